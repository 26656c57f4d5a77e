#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "fragrec/corpus.hpp"

namespace fragrec {

class UndefinedInputError : public std::invalid_argument {
 public:
  explicit UndefinedInputError(const std::string& what) : std::invalid_argument(what) {}
};

/// Exact count-backed fraction.
struct Fraction {
  int64_t numerator = 0;
  int64_t denominator = 0;

  double value() const { return denominator ? static_cast<double>(numerator) / denominator : 0.0; }
  bool operator==(const Fraction& other) const {
    return numerator == other.numerator && denominator == other.denominator;
  }
};

struct OverlapReport {
  Fraction full_example_overlap;
  Fraction token_cooccurrence_overlap;
};

/// Fraction of test sequences that token-equal some train sequence.
/// Throws UndefinedInputError on an empty test set.
Fraction full_example_overlap(const Dataset& train, const Dataset& test);

/// Over unordered pairs of distinct tokens co-occurring within a single test
/// sequence (boundary excluded, pairs may span it), the fraction that also
/// co-occur within some single train sequence. Throws UndefinedInputError
/// when the test set yields no pairs.
Fraction token_cooccurrence_overlap(const Dataset& train, const Dataset& test);

OverlapReport overlap_report(const Dataset& train, const Dataset& test);
std::string to_json(const OverlapReport& report);

}  // namespace fragrec

#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "fragrec/corpus.hpp"

namespace fragrec {

/// Modified Kneser-Ney n-gram language model.
///
/// Estimation follows the count-of-count discounting scheme: three discounts
/// per order (for counts 1, 2 and 3+), lower orders built from continuation
/// counts, n-grams starting with <s> keeping raw counts. Sentences are padded
/// with order-1 begin markers; the end marker is scored, begin markers are
/// not. Tokens outside the training vocabulary map to <unk>, which always
/// receives smoothed mass, so every conditional probability is positive and
/// sums to one over the scoring vocabulary.
class NGramModel {
 public:
  static NGramModel train(const Dataset& data, int order);
  static NGramModel train(const Dataset& data, int order,
                          const std::vector<std::string>& extra_vocab);

  int order() const { return order_; }

  /// p(word | context) in linear space; only the last order-1 context tokens
  /// are read, unknown tokens become <unk>.
  double prob(std::span<const std::string> context, const std::string& word) const;
  double log10_prob(std::span<const std::string> context, const std::string& word) const;

  /// Every predictable token: the vocabulary plus <unk> and </s>, minus <s>.
  const std::vector<std::string>& scoring_vocabulary() const { return scoring_vocab_; }

  /// Plain-text table, one `ngram<TAB>log10prob<TAB>log10backoff` line per
  /// entry, ARPA section layout, entries sorted by ngram text.
  void save_arpa(std::ostream& out) const;
  void save_arpa_file(const std::string& path) const;
  static NGramModel load_arpa(std::istream& in);
  static NGramModel load_arpa_file(const std::string& path);

 private:
  struct Entry {
    double log10_prob = 0.0;
    double log10_backoff = 0.0;
    bool has_backoff = false;
  };
  struct KeyHash {
    size_t operator()(const std::vector<int32_t>& v) const {
      uint64_t h = 1469598103934665603ull;
      for (int32_t x : v) {
        h ^= static_cast<uint64_t>(static_cast<uint32_t>(x));
        h *= 1099511628211ull;
      }
      return static_cast<size_t>(h);
    }
  };
  using Table = std::unordered_map<std::vector<int32_t>, Entry, KeyHash>;

  static constexpr int32_t kUnk = 0;
  static constexpr int32_t kBos = 1;
  static constexpr int32_t kEos = 2;

  int32_t map_token(const std::string& text) const;
  int32_t intern(const std::string& text);
  double log10_prob_ids(std::span<const int32_t> context, int32_t word) const;
  void rebuild_scoring_vocab();

  int order_ = 0;
  std::vector<std::string> id_to_text_;
  std::unordered_map<std::string, int32_t> text_to_id_;
  std::vector<std::string> scoring_vocab_;
  std::vector<Table> tables_;  // tables_[n-1] holds the n-gram entries

  friend double perplexity(const NGramModel&, const Dataset&);
};

/// exp of the mean negative log-likelihood per scored token (sentence tokens
/// plus one end marker each).
double perplexity(const NGramModel& model, const Dataset& data);

/// Two-model mixture: p = (1-weight) * base + weight * augmented.
struct InterpolatedModel {
  const NGramModel* base = nullptr;
  const NGramModel* augmented = nullptr;
  double weight = 0.0;

  double prob(std::span<const std::string> context, const std::string& word) const;
};

double perplexity(const InterpolatedModel& model, const Dataset& data);

/// The mixture weight among {0.05, 0.1, 0.5} minimizing validation
/// perplexity; ties resolve to the smallest weight.
InterpolatedModel select_weight(const NGramModel& base, const NGramModel& augmented,
                                const Dataset& validation);

}  // namespace fragrec

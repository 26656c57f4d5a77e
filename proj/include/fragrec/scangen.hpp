#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "fragrec/corpus.hpp"

namespace fragrec {

class ScanParseError : public std::runtime_error {
 public:
  ScanParseError(const std::string& what, size_t position)
      : std::runtime_error(what), position(position) {}
  size_t position;  // token index the parse failed at
};

/// Deterministic denotation of a command under the SCAN grammar:
///   C -> S | S and S | S after S
///   S -> V | V twice | V thrice
///   V -> U | U left | U right | U opposite D | U around D
///      | turn D | turn opposite D | turn around D
///   U -> walk | look | run | jump        D -> left | right
/// `left`/`right` prefix one turn, `opposite` two, `around` interleaves
/// turn+action four times, `twice`/`thrice` repeat, `x after y` emits y
/// before x. Throws ScanParseError on inputs outside the grammar.
std::vector<std::string> scan_interpret(const std::vector<std::string>& command);

/// Every derivable (command, action) pair in the scan file format, sorted by
/// command text. 20910 examples, duplicate-free.
Dataset scan_generate_all(std::shared_ptr<Vocabulary> vocab = nullptr);

enum class ScanSplit {
  kAddPrimitiveJump,      // train: jump only in isolation; test: composite jumps
  kAddTemplateAroundRight,  // train: no "around right" bigram; test: the rest
};

struct SplitPair {
  Dataset train;
  Dataset test;
};

/// Property-defined split of a SCAN dataset. Throws FormatError when the
/// condition tokens are absent from the dataset.
SplitPair make_split(const Dataset& d, ScanSplit split);

/// Swaps source and target sides of every sequence (the action-to-instruction
/// direction). Throws FormatError on sequences without a boundary.
Dataset reverse_dataset(const Dataset& d);

struct PairValidity {
  bool valid = false;
  std::string reason;  // set when invalid
};

/// True iff interpreting the source side reproduces the target side exactly.
PairValidity validate_pair(const Sequence& s, const Vocabulary& v);

}  // namespace fragrec

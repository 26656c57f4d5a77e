#include "fragrec/stats.hpp"

#include <unordered_set>

#include "json.hpp"

namespace fragrec {

namespace {

struct TokensHash {
  size_t operator()(const std::vector<TokenId>& v) const {
    uint64_t h = 1469598103934665603ull;
    for (TokenId x : v) {
      h ^= static_cast<uint64_t>(static_cast<uint32_t>(x));
      h *= 1099511628211ull;
    }
    return static_cast<size_t>(h);
  }
};

uint64_t pair_key(TokenId a, TokenId b) {
  if (a > b) std::swap(a, b);
  return (static_cast<uint64_t>(static_cast<uint32_t>(a)) << 32) |
         static_cast<uint32_t>(b);
}

// Unordered within-sequence pairs of distinct non-boundary tokens.
void collect_pairs(const Dataset& d, std::unordered_set<uint64_t>& out) {
  std::vector<TokenId> toks;
  for (const Sequence& s : d.sequences) {
    toks.clear();
    for (TokenId t : s.tokens)
      if (t != kBoundaryId) toks.push_back(t);
    std::sort(toks.begin(), toks.end());
    toks.erase(std::unique(toks.begin(), toks.end()), toks.end());
    for (size_t i = 0; i < toks.size(); ++i)
      for (size_t j = i + 1; j < toks.size(); ++j) out.insert(pair_key(toks[i], toks[j]));
  }
}

}  // namespace

Fraction full_example_overlap(const Dataset& train, const Dataset& test) {
  if (test.empty()) throw UndefinedInputError("full_example_overlap: empty test set");
  std::unordered_set<std::vector<TokenId>, TokensHash> train_set;
  for (const Sequence& s : train.sequences) train_set.insert(s.tokens);
  int64_t hits = 0;
  for (const Sequence& s : test.sequences)
    if (train_set.count(s.tokens)) ++hits;
  return {hits, static_cast<int64_t>(test.size())};
}

Fraction token_cooccurrence_overlap(const Dataset& train, const Dataset& test) {
  std::unordered_set<uint64_t> test_pairs;
  collect_pairs(test, test_pairs);
  if (test_pairs.empty())
    throw UndefinedInputError("token_cooccurrence_overlap: test set yields no token pairs");
  std::unordered_set<uint64_t> train_pairs;
  collect_pairs(train, train_pairs);
  int64_t hits = 0;
  for (uint64_t p : test_pairs)
    if (train_pairs.count(p)) ++hits;
  return {hits, static_cast<int64_t>(test_pairs.size())};
}

OverlapReport overlap_report(const Dataset& train, const Dataset& test) {
  return {full_example_overlap(train, test), token_cooccurrence_overlap(train, test)};
}

std::string to_json(const OverlapReport& report) {
  nlohmann::ordered_json j;
  j["full_example_overlap"] = {{"numerator", report.full_example_overlap.numerator},
                               {"denominator", report.full_example_overlap.denominator},
                               {"value", report.full_example_overlap.value()}};
  j["token_cooccurrence_overlap"] = {
      {"numerator", report.token_cooccurrence_overlap.numerator},
      {"denominator", report.token_cooccurrence_overlap.denominator},
      {"value", report.token_cooccurrence_overlap.value()}};
  return j.dump(2);
}

}  // namespace fragrec

#include "doctest.h"
#include "fragrec/stats.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace fragrec;
using namespace fragrec::testing;

TEST_CASE("full example overlap counts exact matches") {
  auto vocab = std::make_shared<Vocabulary>();
  Dataset train = dataset_from({"a"}, CorpusFormat::kLines, vocab);
  Dataset test = dataset_from({"a", "b"}, CorpusFormat::kLines, vocab);
  Fraction f = full_example_overlap(train, test);
  CHECK(f.numerator == 1);
  CHECK(f.denominator == 2);
  CHECK(f.value() == 0.5);
}

TEST_CASE("disjoint datasets have zero overlap") {
  auto vocab = std::make_shared<Vocabulary>();
  Dataset train = dataset_from({"a b"}, CorpusFormat::kLines, vocab);
  Dataset test = dataset_from({"c d"}, CorpusFormat::kLines, vocab);
  CHECK(full_example_overlap(train, test).numerator == 0);
}

TEST_CASE("empty test set is an undefined input") {
  auto vocab = std::make_shared<Vocabulary>();
  Dataset train = dataset_from({"a"}, CorpusFormat::kLines, vocab);
  Dataset test;
  test.vocab = vocab;
  CHECK_THROWS_AS(full_example_overlap(train, test), UndefinedInputError);
}

TEST_CASE("token pair overlap is order-insensitive within a sequence") {
  auto vocab = std::make_shared<Vocabulary>();
  Dataset train = dataset_from({"b a c"}, CorpusFormat::kLines, vocab);
  Dataset test = dataset_from({"a b"}, CorpusFormat::kLines, vocab);
  Fraction f = token_cooccurrence_overlap(train, test);
  CHECK(f.numerator == 1);
  CHECK(f.denominator == 1);
}

TEST_CASE("pairs must co-occur within a single training sequence") {
  auto vocab = std::make_shared<Vocabulary>();
  Dataset train = dataset_from({"a c", "b c"}, CorpusFormat::kLines, vocab);
  Dataset test = dataset_from({"a b"}, CorpusFormat::kLines, vocab);
  Fraction f = token_cooccurrence_overlap(train, test);
  CHECK(f.numerator == 0);
  CHECK(f.denominator == 1);
}

TEST_CASE("a pairless test set is an undefined input") {
  auto vocab = std::make_shared<Vocabulary>();
  Dataset train = dataset_from({"a b"}, CorpusFormat::kLines, vocab);
  Dataset test = dataset_from({"a", "b"}, CorpusFormat::kLines, vocab);
  CHECK_THROWS_AS(token_cooccurrence_overlap(train, test), UndefinedInputError);
}

TEST_CASE("pairs may span the boundary but never include it") {
  auto vocab = std::make_shared<Vocabulary>();
  Dataset train = dataset_from({"a\tb"}, CorpusFormat::kTsv, vocab);
  Dataset test = dataset_from({"a\tb"}, CorpusFormat::kTsv, vocab);
  Fraction f = token_cooccurrence_overlap(train, test);
  CHECK(f.numerator == 1);
  CHECK(f.denominator == 1);  // only {a, b}; nothing pairs with the boundary
}

TEST_CASE("metrics match the quadratic oracle on random pairs") {
  RandomCorpus gen(20240021);
  for (int i = 0; i < 60; ++i) {
    auto vocab = std::make_shared<Vocabulary>();
    Dataset train = gen.next(10, 6, 5);
    // reuse one vocabulary for both sides
    std::vector<std::string> train_lines, test_lines;
    for (const Sequence& s : train.sequences) train_lines.push_back(render(s, *train.vocab));
    Dataset test_src = gen.next(10, 6, 5);
    for (const Sequence& s : test_src.sequences) test_lines.push_back(render(s, *test_src.vocab));
    if (train.format != CorpusFormat::kLines || test_src.format != CorpusFormat::kLines) continue;
    Dataset tr = dataset_from(train_lines, CorpusFormat::kLines, vocab);
    Dataset te = dataset_from(test_lines, CorpusFormat::kLines, vocab);

    auto [fe_num, fe_den] = oracle_full_example_overlap(tr, te);
    Fraction fe = full_example_overlap(tr, te);
    CHECK(fe.numerator == fe_num);
    CHECK(fe.denominator == fe_den);

    auto [tc_num, tc_den] = oracle_token_cooccurrence_overlap(tr, te);
    bool has_pairs = tc_den > 0;
    if (has_pairs) {
      Fraction tc = token_cooccurrence_overlap(tr, te);
      CHECK(tc.numerator == tc_num);
      CHECK(tc.denominator == tc_den);
    }
  }
}

TEST_CASE("metrics are monotone as training data grows") {
  auto vocab = std::make_shared<Vocabulary>();
  Dataset test = dataset_from({"a b", "c d"}, CorpusFormat::kLines, vocab);
  Dataset small = dataset_from({"a b"}, CorpusFormat::kLines, vocab);
  Dataset big = dataset_from({"a b", "c d e"}, CorpusFormat::kLines, vocab);
  CHECK(full_example_overlap(small, test).numerator <=
        full_example_overlap(big, test).numerator);
  CHECK(token_cooccurrence_overlap(small, test).numerator <=
        token_cooccurrence_overlap(big, test).numerator);
}

TEST_CASE("overlap report serializes both fractions") {
  auto vocab = std::make_shared<Vocabulary>();
  Dataset train = dataset_from({"a b"}, CorpusFormat::kLines, vocab);
  Dataset test = dataset_from({"a b", "c d"}, CorpusFormat::kLines, vocab);
  OverlapReport report = overlap_report(train, test);
  std::string json = to_json(report);
  CHECK(json.find("full_example_overlap") != std::string::npos);
  CHECK(json.find("token_cooccurrence_overlap") != std::string::npos);
  CHECK(json.find("\"numerator\": 1") != std::string::npos);
}

#include <algorithm>
#include <set>

#include "doctest.h"
#include "fragrec/fragment.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace fragrec;
using namespace fragrec::testing;

namespace {

AugmentConfig cfg_of(int parts, int tokens) {
  AugmentConfig cfg;
  cfg.max_parts = parts;
  cfg.max_tokens = tokens;
  return cfg;
}

std::set<std::string> rendered_pairs(const Sequence& w, const AugmentConfig& cfg,
                                     const Vocabulary& v) {
  std::set<std::string> out;
  for (const auto& [f, t] : enumerate_fragments(w, cfg))
    out.insert(render(f, v) + " / " + render(t, v));
  return out;
}

std::set<OraclePair> as_oracle_pairs(const Sequence& w, const AugmentConfig& cfg) {
  std::set<OraclePair> out;
  for (const auto& [f, t] : enumerate_fragments(w, cfg)) out.insert({f.parts, t.items});
  return out;
}

}  // namespace

TEST_CASE("single-token fragments of a three-token sentence") {
  Dataset d = dataset_from({"the cat sang"}, CorpusFormat::kLines);
  auto got = rendered_pairs(d.sequences[0], cfg_of(1, 1), *d.vocab);
  std::set<std::string> expected = {
      "(the) / _1 cat sang",
      "(cat) / the _1 sang",
      "(sang) / the cat _1",
  };
  CHECK(got == expected);
}

TEST_CASE("two-part fragment around a gap") {
  Dataset d = dataset_from({"she picks the wug up in fresno"}, CorpusFormat::kLines);
  auto got = rendered_pairs(d.sequences[0], cfg_of(2, 2), *d.vocab);
  CHECK(got.count("(picks, up) / she _1 the wug _2 in fresno") == 1);
}

TEST_CASE("fragments never contain the boundary") {
  Dataset d = dataset_from({"i sing\tcanto"}, CorpusFormat::kTsv);
  const Sequence& w = d.sequences[0];
  AugmentConfig cfg = cfg_of(2, 4);
  auto pairs = enumerate_fragments(w, cfg);
  bool found = false;
  for (const auto& [f, t] : pairs) {
    for (const auto& part : f.parts)
      CHECK(std::find(part.begin(), part.end(), kBoundaryId) == part.end());
    if (render(f, *d.vocab) == "(sing, canto)")
      found = render(t, *d.vocab) == "i _1 ↦ _2";
  }
  CHECK(found);
  // matches the exhaustive span-set enumeration
  CHECK(as_oracle_pairs(w, cfg) == oracle_enumerate(w, cfg));
}

TEST_CASE("replace-all removes every occurrence of a part") {
  Dataset d = dataset_from({"b x b"}, CorpusFormat::kLines);
  auto got = rendered_pairs(d.sequences[0], cfg_of(1, 1), *d.vocab);
  CHECK(got.count("(b) / _1 x _1") == 1);
  CHECK(got.count("(x) / b _1 b") == 1);
  CHECK(got.size() == 2);
}

TEST_CASE("adjacent holes invalidate a candidate") {
  Dataset d = dataset_from({"a a c", "a b c"}, CorpusFormat::kLines);
  // "a" occurs twice adjacently: removing it would leave touching holes
  auto got0 = rendered_pairs(d.sequences[0], cfg_of(2, 2), *d.vocab);
  for (const auto& s : got0) CHECK(s.find("(a)") == std::string::npos);
  CHECK(got0.count("(a a) / _1 c") == 1);
  // two distinct parts may not touch either
  auto got1 = rendered_pairs(d.sequences[1], cfg_of(2, 2), *d.vocab);
  CHECK(got1.count("(a, b) / _1 _2 c") == 0);
  CHECK(got1.count("(a, c) / _1 b _2") == 1);
}

TEST_CASE("the whole sequence is never a fragment") {
  Dataset d = dataset_from({"a b"}, CorpusFormat::kLines);
  auto got = rendered_pairs(d.sequences[0], cfg_of(1, 2), *d.vocab);
  CHECK(got.count("(a) / _1 b") == 1);
  CHECK(got.count("(b) / a _1") == 1);
  CHECK(got.count("(a b) / _1") == 0);
}

TEST_CASE("enumerate_fragments equals the span-set oracle on random sequences") {
  RandomCorpus gen(20240002);
  int checked = 0;
  for (int i = 0; i < 120; ++i) {
    Dataset d = gen.next(1, 9, 3);  // tiny alphabet forces repeated tokens
    AugmentConfig cfg = gen.next_config();
    const Sequence& w = d.sequences[0];
    CHECK(as_oracle_pairs(w, cfg) == oracle_enumerate(w, cfg));
    ++checked;
  }
  CHECK(checked == 120);
}

TEST_CASE("round trip: substitution undoes extraction") {
  RandomCorpus gen(20240003);
  for (int i = 0; i < 80; ++i) {
    Dataset d = gen.next(1, 8, 4);
    AugmentConfig cfg = gen.next_config();
    const Sequence& w = d.sequences[0];
    for (const auto& [f, t] : enumerate_fragments(w, cfg)) {
      Sequence back = substitute(t, f);
      CHECK(back.tokens == w.tokens);
      CHECK(back.boundary_index == w.boundary_index);
    }
  }
}

TEST_CASE("raising limits never removes results") {
  RandomCorpus gen(20240004);
  for (int i = 0; i < 40; ++i) {
    Dataset d = gen.next(1, 7, 3);
    const Sequence& w = d.sequences[0];
    AugmentConfig small = cfg_of(1 + static_cast<int>(gen.rng() % 2),
                                 1 + static_cast<int>(gen.rng() % 3));
    AugmentConfig big = cfg_of(small.max_parts + 1, small.max_tokens + 2);
    auto a = as_oracle_pairs(w, small);
    auto b = as_oracle_pairs(w, big);
    CHECK(std::includes(b.begin(), b.end(), a.begin(), a.end()));
  }
}

TEST_CASE("substitute fills every hole") {
  Dataset d = dataset_from({"she picks the wug up in fresno"}, CorpusFormat::kLines);
  auto pairs = enumerate_fragments(d.sequences[0], cfg_of(2, 2));
  Vocabulary& v = *d.vocab;
  Fragment puts_down;
  puts_down.parts = {{v.intern("puts")}, {v.intern("down")}};
  Template t;
  for (const auto& [f, tt] : pairs)
    if (render(f, v) == "(picks, up)") t = tt;
  REQUIRE(!t.items.empty());
  CHECK(render(substitute(t, puts_down), v) == "she puts the wug down in fresno");
}

TEST_CASE("substitute rejects a part-count mismatch") {
  Dataset d = dataset_from({"the cat sang"}, CorpusFormat::kLines);
  auto pairs = enumerate_fragments(d.sequences[0], cfg_of(1, 1));
  Template one_hole;
  for (const auto& [f, t] : pairs)
    if (render(t, *d.vocab) == "the _1 sang") one_hole = t;
  REQUIRE(!one_hole.items.empty());
  Fragment two_parts;
  two_parts.parts = {{1}, {2}};
  CHECK_THROWS_AS(substitute(one_hole, two_parts), ArityError);
}

TEST_CASE("environment keys follow the window") {
  Dataset d = dataset_from({"she picks the wug up in fresno"}, CorpusFormat::kLines);
  Template t;
  for (const auto& [f, tt] : enumerate_fragments(d.sequences[0], cfg_of(2, 2)))
    if (render(f, *d.vocab) == "(picks, up)") t = tt;
  REQUIRE(!t.items.empty());  // she _1 the wug _2 in fresno

  AugmentConfig windowed = cfg_of(2, 2);
  windowed.env_mode = EnvMode::kWindow;
  windowed.window = 1;
  Environment env = extract_environment(t, windowed);
  // she(-1) _1 the(+1) wug(-1) _2 in(+1); fresno and both edges fall outside
  auto id = [&](const char* s) { return d.vocab->find(s).value(); };
  std::vector<int32_t> expected = {id("she"), -1, hole_item(0), 0, id("the"), 1,
                                   id("wug"), -1, hole_item(1), 0, id("in"),  1};
  CHECK(env.key == expected);
  CHECK(extract_environment(t, windowed).key == env.key);  // idempotent

  // matches the restated oracle on random templates
  RandomCorpus gen(20240005);
  for (int i = 0; i < 60; ++i) {
    Dataset rd = gen.next(1, 8, 4);
    AugmentConfig cfg = gen.next_config();
    cfg.env_mode = EnvMode::kWindow;
    for (const auto& [f, tt] : enumerate_fragments(rd.sequences[0], cfg))
      CHECK(extract_environment(tt, cfg).key == oracle_environment(tt.items, cfg));
  }
}

TEST_CASE("full-template environments coincide with template equality") {
  Dataset d = dataset_from({"the cat sang", "the wug sang"}, CorpusFormat::kLines);
  AugmentConfig cfg = cfg_of(1, 1);
  auto p0 = enumerate_fragments(d.sequences[0], cfg);
  auto p1 = enumerate_fragments(d.sequences[1], cfg);
  for (const auto& [f0, t0] : p0)
    for (const auto& [f1, t1] : p1) {
      bool env_eq = extract_environment(t0, cfg) == extract_environment(t1, cfg);
      CHECK(env_eq == (t0 == t1));
    }
}

TEST_CASE("a window clipped at the sequence start includes the begin sentinel") {
  Dataset d = dataset_from({"a b"}, CorpusFormat::kLines);
  AugmentConfig cfg = cfg_of(1, 1);
  cfg.env_mode = EnvMode::kWindow;
  cfg.window = 2;
  Template t;
  for (const auto& [f, tt] : enumerate_fragments(d.sequences[0], cfg))
    if (render(tt, *d.vocab) == "_1 b") t = tt;
  REQUIRE(!t.items.empty());
  Environment env = extract_environment(t, cfg);
  constexpr int32_t kBegin = INT32_MIN + 1;
  CHECK(std::find(env.key.begin(), env.key.end(), kBegin) != env.key.end());
  CHECK(env.key[0] == kBegin);
}

TEST_CASE("config invariants are enforced") {
  Dataset d = dataset_from({"a b"}, CorpusFormat::kLines);
  AugmentConfig bad;
  bad.max_tokens = 0;
  CHECK_THROWS_AS(enumerate_fragments(d.sequences[0], bad), ConfigError);
  AugmentConfig bad2;
  bad2.max_parts = 0;
  CHECK_THROWS_AS(enumerate_fragments(d.sequences[0], bad2), ConfigError);
  AugmentConfig bad3;
  bad3.env_mode = EnvMode::kWindow;
  bad3.window = 0;
  CHECK_THROWS_AS(enumerate_fragments(d.sequences[0], bad3), ConfigError);
}

TEST_CASE("substitution preserves the boundary count") {
  RandomCorpus gen(20240006);
  for (int i = 0; i < 60; ++i) {
    Dataset d = gen.next(1, 8, 4);
    AugmentConfig cfg = gen.next_config();
    const Sequence& w = d.sequences[0];
    auto pairs = enumerate_fragments(w, cfg);
    for (const auto& [f, t] : pairs) {
      for (const auto& [f2, t2] : pairs) {
        if (f2.arity() != template_arity(t)) continue;
        Sequence z = substitute(t, f2);
        size_t boundaries = std::count(z.tokens.begin(), z.tokens.end(), kBoundaryId);
        CHECK(boundaries == (w.boundary_index ? 1u : 0u));
      }
    }
  }
}

#include "fragrec/fragment.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

namespace fragrec {

void AugmentConfig::validate() const {
  if (max_parts < 1) throw ConfigError("max_parts must be >= 1");
  if (max_tokens < 1) throw ConfigError("max_tokens must be >= 1");
  if (env_mode == EnvMode::kWindow && window < 1)
    throw ConfigError("window must be >= 1");
  if (max_fragment_count && *max_fragment_count < 1)
    throw ConfigError("max_fragment_count must be >= 1");
  if (threads < 1) throw ConfigError("threads must be >= 1");
}

AugmentConfig AugmentConfig::scan_preset() {
  AugmentConfig cfg;
  cfg.max_parts = 2;
  cfg.max_tokens = 4;
  cfg.env_mode = EnvMode::kFullTemplate;
  return cfg;
}

AugmentConfig AugmentConfig::semparse_preset() {
  AugmentConfig cfg;
  cfg.max_parts = 3;
  cfg.max_tokens = 12;
  cfg.env_mode = EnvMode::kFullTemplate;
  return cfg;
}

AugmentConfig AugmentConfig::lm_preset() {
  AugmentConfig cfg;
  cfg.max_parts = 1;
  cfg.max_tokens = 2;
  cfg.env_mode = EnvMode::kWindow;
  cfg.window = 2;
  cfg.max_fragment_count = 20;
  return cfg;
}

size_t Fragment::total_tokens() const {
  size_t n = 0;
  for (const auto& p : parts) n += p.size();
  return n;
}

int template_arity(const Template& t) {
  int max_label = -1;
  for (int32_t item : t.items)
    if (is_hole(item)) max_label = std::max(max_label, hole_part(item));
  return max_label + 1;
}

namespace {

// One candidate part: a distinct token run of w with all of its standalone
// match start positions.
struct Candidate {
  std::vector<TokenId> content;
  std::vector<int> starts;
};

struct Match {
  int start;
  int length;
  int candidate;  // index into the combo, not the candidate pool
};

// Greedy left-to-right matching over a combo of candidate parts. The next
// accepted match is the one with the smallest start position at or after the
// cursor; the longest part wins a start-position tie. Returns false when the
// result cannot form a valid template (a part without a match, touching
// holes, or nothing retained).
bool scan_matches(const std::vector<const Candidate*>& parts, int seq_len,
                  std::vector<Match>& out) {
  out.clear();
  size_t m = parts.size();
  std::vector<size_t> next(m, 0);
  int cursor = 0;
  int covered = 0;
  int prev_end = -1;  // exclusive end of the previous match
  while (true) {
    int best = -1;
    int best_start = seq_len;
    int best_len = 0;
    for (size_t j = 0; j < m; ++j) {
      const auto& starts = parts[j]->starts;
      size_t& p = next[j];
      while (p < starts.size() && starts[p] < cursor) ++p;
      if (p == starts.size()) continue;
      int start = starts[p];
      int len = static_cast<int>(parts[j]->content.size());
      if (start < best_start || (start == best_start && len > best_len)) {
        best = static_cast<int>(j);
        best_start = start;
        best_len = len;
      }
    }
    if (best < 0) break;
    if (best_start == prev_end) return false;  // holes would touch
    out.push_back({best_start, best_len, best});
    covered += best_len;
    prev_end = best_start + best_len;
    cursor = prev_end;
  }
  if (covered >= seq_len) return false;  // nothing retained
  // every part must land at least one hole
  std::vector<char> seen(m, 0);
  for (const Match& match : out) seen[match.candidate] = 1;
  for (char s : seen)
    if (!s) return false;
  return true;
}

void emit_pair(const Sequence& w, const std::vector<const Candidate*>& parts,
               const std::vector<Match>& matches,
               std::vector<std::pair<Fragment, Template>>& out) {
  size_t m = parts.size();
  // canonical part order: first accepted match position
  std::vector<int> first_pos(m, -1);
  for (const Match& match : matches)
    if (first_pos[match.candidate] < 0) first_pos[match.candidate] = match.start;
  std::vector<int> order(m);
  for (size_t j = 0; j < m; ++j) order[j] = static_cast<int>(j);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return first_pos[a] < first_pos[b]; });
  std::vector<int> label(m);
  for (size_t rank = 0; rank < m; ++rank) label[order[rank]] = static_cast<int>(rank);

  Fragment f;
  f.parts.resize(m);
  for (size_t j = 0; j < m; ++j) f.parts[label[j]] = parts[j]->content;

  Template t;
  t.items.reserve(w.tokens.size());
  size_t mi = 0;
  for (int i = 0; i < static_cast<int>(w.tokens.size());) {
    if (mi < matches.size() && matches[mi].start == i) {
      t.items.push_back(hole_item(label[matches[mi].candidate]));
      i += matches[mi].length;
      ++mi;
    } else {
      t.items.push_back(w.tokens[i]);
      ++i;
    }
  }
  out.emplace_back(std::move(f), std::move(t));
}

}  // namespace

std::vector<std::pair<Fragment, Template>> enumerate_fragments(const Sequence& w,
                                                               const AugmentConfig& cfg) {
  cfg.validate();
  if (w.tokens.empty()) throw ConfigError("enumerate_fragments: empty sequence");
  std::vector<std::pair<Fragment, Template>> out;
  int n = static_cast<int>(w.tokens.size());

  // Distinct boundary-free token runs up to max_tokens, in first-occurrence
  // order, each with its full standalone start list.
  std::vector<Candidate> pool;
  std::map<std::vector<TokenId>, int> by_content;
  int part_cap = std::min(cfg.max_tokens, n);
  for (int start = 0; start < n; ++start) {
    if (w.tokens[start] == kBoundaryId) continue;
    for (int len = 1; len <= part_cap && start + len <= n; ++len) {
      if (w.tokens[start + len - 1] == kBoundaryId) break;
      std::vector<TokenId> content(w.tokens.begin() + start, w.tokens.begin() + start + len);
      auto it = by_content.find(content);
      if (it == by_content.end()) {
        pool.push_back({std::move(content), {start}});
        by_content.emplace(pool.back().content, static_cast<int>(pool.size()) - 1);
      } else {
        pool[it->second].starts.push_back(start);
      }
    }
  }
  for (auto& c : pool) std::sort(c.starts.begin(), c.starts.end());
  // stable order: by first occurrence, then shorter first
  std::vector<int> pool_order(pool.size());
  for (size_t i = 0; i < pool.size(); ++i) pool_order[i] = static_cast<int>(i);
  std::sort(pool_order.begin(), pool_order.end(), [&](int a, int b) {
    if (pool[a].starts[0] != pool[b].starts[0]) return pool[a].starts[0] < pool[b].starts[0];
    return pool[a].content.size() < pool[b].content.size();
  });

  std::vector<const Candidate*> combo;
  std::vector<Match> matches;

  // Enumerate unordered combos of 1..max_parts distinct candidates whose
  // total length fits max_tokens.
  auto recurse = [&](auto&& self, size_t from, int budget) -> void {
    for (size_t oi = from; oi < pool_order.size(); ++oi) {
      const Candidate& c = pool[pool_order[oi]];
      int len = static_cast<int>(c.content.size());
      if (len > budget) continue;
      combo.push_back(&c);
      if (scan_matches(combo, n, matches)) emit_pair(w, combo, matches, out);
      if (combo.size() < static_cast<size_t>(cfg.max_parts))
        self(self, oi + 1, budget - len);
      combo.pop_back();
    }
  };
  recurse(recurse, 0, cfg.max_tokens);
  return out;
}

Environment extract_environment(const Template& t, const AugmentConfig& cfg) {
  Environment env;
  if (cfg.env_mode == EnvMode::kFullTemplate) {
    env.key = t.items;
    return env;
  }
  constexpr int32_t kBegin = INT32_MIN + 1;
  constexpr int32_t kEnd = INT32_MIN + 2;
  int n = static_cast<int>(t.items.size());
  std::vector<int> holes;
  for (int i = 0; i < n; ++i)
    if (is_hole(t.items[i])) holes.push_back(i);
  if (holes.empty()) {
    env.key = t.items;  // degenerate hand-built template; nothing to window
    return env;
  }
  int k = cfg.window;
  // Walk virtual positions -1..n; keep anything within k of a hole, tagged
  // with the signed offset to its nearest hole (ties go to the left hole).
  for (int j = -1; j <= n; ++j) {
    int best_dist = INT32_MAX;
    int best_hole = -1;
    for (int h : holes) {
      int dist = std::abs(j - h);
      if (dist < best_dist) {
        best_dist = dist;
        best_hole = h;
      }
    }
    if (best_dist > k) continue;
    int32_t code;
    if (j == -1)
      code = kBegin;
    else if (j == n)
      code = kEnd;
    else
      code = t.items[j];
    env.key.push_back(code);
    env.key.push_back(j - best_hole);
  }
  return env;
}

Sequence substitute(const Template& t, const Fragment& f) {
  int arity = template_arity(t);
  if (arity != f.arity())
    throw ArityError("substitute: fragment has " + std::to_string(f.arity()) +
                     " parts but template has " + std::to_string(arity) +
                     " hole labels");
  std::vector<TokenId> tokens;
  tokens.reserve(t.items.size() + f.total_tokens());
  for (int32_t item : t.items) {
    if (is_hole(item)) {
      const auto& part = f.parts[hole_part(item)];
      tokens.insert(tokens.end(), part.begin(), part.end());
    } else {
      tokens.push_back(item);
    }
  }
  return make_sequence(std::move(tokens));
}

std::string render(const Template& t, const Vocabulary& v) {
  std::string out;
  for (size_t i = 0; i < t.items.size(); ++i) {
    if (i) out += ' ';
    if (is_hole(t.items[i]))
      out += "_" + std::to_string(hole_part(t.items[i]) + 1);
    else
      out += v.text(t.items[i]);
  }
  return out;
}

std::string render(const Fragment& f, const Vocabulary& v) {
  std::string out = "(";
  for (size_t p = 0; p < f.parts.size(); ++p) {
    if (p) out += ", ";
    for (size_t i = 0; i < f.parts[p].size(); ++i) {
      if (i) out += ' ';
      out += v.text(f.parts[p][i]);
    }
  }
  out += ")";
  return out;
}

}  // namespace fragrec

#include "fragrec/augmentor.hpp"

#include <algorithm>
#include <chrono>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

namespace fragrec {

namespace {

struct VecHash {
  size_t operator()(const std::vector<int32_t>& v) const {
    uint64_t h = 1469598103934665603ull;
    for (int32_t x : v) {
      h ^= static_cast<uint64_t>(static_cast<uint32_t>(x));
      h *= 1099511628211ull;
    }
    return static_cast<size_t>(h);
  }
};

/// Dense interner over int32 vectors.
class VecInterner {
 public:
  int32_t intern(std::vector<int32_t>&& key) {
    auto it = ids_.find(key);
    if (it != ids_.end()) return it->second;
    int32_t id = static_cast<int32_t>(ids_.size());
    ids_.emplace(std::move(key), id);
    return id;
  }
  std::optional<int32_t> find(const std::vector<int32_t>& key) const {
    auto it = ids_.find(key);
    if (it == ids_.end()) return std::nullopt;
    return it->second;
  }
  size_t size() const { return ids_.size(); }
  std::vector<std::vector<int32_t>> extract_table() const {
    std::vector<std::vector<int32_t>> table(ids_.size());
    for (const auto& [key, id] : ids_) table[id] = key;
    return table;
  }

 private:
  std::unordered_map<std::vector<int32_t>, int32_t, VecHash> ids_;
};

std::vector<int32_t> fragment_key(const Fragment& f) {
  std::vector<int32_t> key;
  key.reserve(f.total_tokens() + f.parts.size());
  for (const auto& part : f.parts) {
    for (TokenId t : part) key.push_back(t);
    key.push_back(-1);  // separator; token ids are non-negative
  }
  return key;
}

Fragment fragment_from_key(const std::vector<int32_t>& key) {
  Fragment f;
  std::vector<TokenId> part;
  for (int32_t x : key) {
    if (x < 0) {
      f.parts.push_back(part);
      part.clear();
    } else {
      part.push_back(x);
    }
  }
  return f;
}

void sort_unique(std::vector<int32_t>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

// Splits [0, n) into roughly even chunks, one per worker.
std::vector<std::pair<size_t, size_t>> chunks(size_t n, int workers) {
  std::vector<std::pair<size_t, size_t>> out;
  size_t per = (n + workers - 1) / std::max(workers, 1);
  for (size_t lo = 0; lo < n; lo += per) out.emplace_back(lo, std::min(lo + per, n));
  return out;
}

}  // namespace

std::optional<int32_t> SynthesisIndex::find_fragment(const Fragment& f) const {
  for (size_t i = 0; i < fragments.size(); ++i)
    if (fragments[i] == f) return static_cast<int32_t>(i);
  return std::nullopt;
}

std::optional<int32_t> SynthesisIndex::find_template(const Template& t) const {
  for (size_t i = 0; i < templates.size(); ++i)
    if (templates[i] == t) return static_cast<int32_t>(i);
  return std::nullopt;
}

SynthesisIndex build_index(const Dataset& d, const AugmentConfig& cfg) {
  cfg.validate();
  if (d.empty()) throw ConfigError("build_index: empty dataset");

  // Enumeration is the hot path; it parallelizes over sequences. Results are
  // merged in sequence order, so ids and the final index are identical at any
  // thread count.
  std::vector<std::vector<std::pair<Fragment, Template>>> per_seq(d.size());
  auto ranges = chunks(d.size(), cfg.threads);
  if (ranges.size() <= 1) {
    for (size_t i = 0; i < d.size(); ++i) per_seq[i] = enumerate_fragments(d.sequences[i], cfg);
  } else {
    std::vector<std::thread> workers;
    workers.reserve(ranges.size());
    for (auto [lo, hi] : ranges)
      workers.emplace_back([&, lo = lo, hi = hi] {
        for (size_t i = lo; i < hi; ++i) per_seq[i] = enumerate_fragments(d.sequences[i], cfg);
      });
    for (auto& w : workers) w.join();
  }

  SynthesisIndex idx;
  VecInterner frag_ids;
  VecInterner tmpl_ids;
  VecInterner env_ids;
  std::vector<std::pair<int32_t, int32_t>> pairs;  // (fragment, template)
  for (auto& result : per_seq) {
    for (auto& [f, t] : result) {
      int32_t fid = frag_ids.intern(fragment_key(f));
      if (fid == static_cast<int32_t>(idx.fragments.size())) {
        idx.fragments.push_back(std::move(f));
        idx.fragment_count.push_back(0);
      }
      int32_t tid = tmpl_ids.intern(std::vector<int32_t>(t.items));
      if (tid == static_cast<int32_t>(idx.templates.size())) idx.templates.push_back(std::move(t));
      pairs.emplace_back(fid, tid);
      // a fragment pairs with exactly one template per sequence, so each
      // sequence contributes one count
      idx.fragment_count[fid] += 1;
    }
    result.clear();
    result.shrink_to_fit();
  }

  if (cfg.max_distinct_fragments && idx.fragments.size() > *cfg.max_distinct_fragments) {
    // Keep the most frequent fragments; ties resolve to the earlier id.
    std::vector<int32_t> order(idx.fragments.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int32_t>(i);
    std::stable_sort(order.begin(), order.end(), [&](int32_t a, int32_t b) {
      return idx.fragment_count[a] > idx.fragment_count[b];
    });
    std::vector<char> keep(idx.fragments.size(), 0);
    for (size_t i = 0; i < *cfg.max_distinct_fragments; ++i) keep[order[i]] = 1;
    std::erase_if(pairs, [&](const auto& p) { return !keep[p.first]; });
    // Reindex fragments densely.
    std::vector<int32_t> remap(idx.fragments.size(), -1);
    std::vector<Fragment> kept_fragments;
    std::vector<int32_t> kept_counts;
    for (size_t i = 0; i < idx.fragments.size(); ++i) {
      if (!keep[i]) continue;
      remap[i] = static_cast<int32_t>(kept_fragments.size());
      kept_fragments.push_back(std::move(idx.fragments[i]));
      kept_counts.push_back(idx.fragment_count[i]);
    }
    for (auto& p : pairs) p.first = remap[p.first];
    idx.fragments = std::move(kept_fragments);
    idx.fragment_count = std::move(kept_counts);
  }

  // Duplicate (f, t) pairs across sequences collapse here.
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  idx.pair_count = pairs.size();

  idx.f2t.resize(idx.fragments.size());
  idx.t2f.resize(idx.templates.size());
  for (auto [fid, tid] : pairs) {
    idx.f2t[fid].push_back(tid);
    idx.t2f[tid].push_back(fid);
  }
  for (auto& v : idx.f2t) sort_unique(v);
  for (auto& v : idx.t2f) sort_unique(v);

  idx.template_env.resize(idx.templates.size());
  for (size_t tid = 0; tid < idx.templates.size(); ++tid) {
    Environment env = extract_environment(idx.templates[tid], cfg);
    int32_t eid = env_ids.intern(std::move(env.key));
    if (eid == static_cast<int32_t>(idx.environments.size()))
      idx.environments.push_back(extract_environment(idx.templates[tid], cfg));
    idx.template_env[tid] = eid;
    if (static_cast<size_t>(eid) >= idx.e2t.size()) idx.e2t.resize(eid + 1);
    idx.e2t[eid].push_back(static_cast<int32_t>(tid));
  }
  for (auto& v : idx.e2t) sort_unique(v);
  return idx;
}

namespace {

struct SeqHash {
  size_t operator()(const std::vector<TokenId>& v) const { return VecHash{}(v); }
};

// Lexicographic comparison of the rendered (space-joined) forms without
// materializing the strings; byte order matches std::string comparison.
class RenderCursor {
 public:
  RenderCursor(const std::vector<TokenId>& tokens, const Vocabulary& v)
      : tokens_(tokens), vocab_(v) {}

  int next() {
    while (tok_ < tokens_.size()) {
      const std::string& text = vocab_.text(tokens_[tok_]);
      if (ch_ < text.size()) return static_cast<unsigned char>(text[ch_++]);
      ++tok_;
      ch_ = 0;
      if (tok_ < tokens_.size()) return ' ';
    }
    return -1;
  }

 private:
  const std::vector<TokenId>& tokens_;
  const Vocabulary& vocab_;
  size_t tok_ = 0;
  size_t ch_ = 0;
};

bool render_less(const std::vector<TokenId>& a, const std::vector<TokenId>& b,
                 const Vocabulary& v) {
  RenderCursor ca(a, v), cb(b, v);
  while (true) {
    int x = ca.next();
    int y = cb.next();
    if (x != y) return x < y;
    if (x < 0) return false;
  }
}

// For one fragment f1, the set of candidate fill fragments reachable through
// any of f1's templates, with enough bookkeeping to honour the t1 != t1'
// side condition: a candidate qualifies for template t1' unless its only
// contributing t1 is t1' itself.
struct MergedCandidates {
  std::vector<int32_t> fragment;  // candidate f2 ids
  std::vector<int32_t> sole_template;  // -1 when >= 2 templates contribute
};

}  // namespace

Dataset synthesize(const SynthesisIndex& idx, const Dataset& d, const AugmentConfig& cfg,
                   SynthesisReport* report) {
  cfg.validate();
  auto started = std::chrono::steady_clock::now();
  uint64_t work = 0;

  // Candidate fill fragments per environment class: union of t2f over the
  // class, minus fragments at or above the frequency cap.
  std::vector<std::vector<int32_t>> env_candidates(idx.environments.size());
  for (size_t eid = 0; eid < idx.e2t.size(); ++eid) {
    auto& cand = env_candidates[eid];
    for (int32_t tid : idx.e2t[eid])
      for (int32_t fid : idx.t2f[tid]) {
        ++work;
        if (cfg.max_fragment_count && idx.fragment_count[fid] >= *cfg.max_fragment_count)
          continue;
        cand.push_back(fid);
      }
    sort_unique(cand);
  }

  // MergedCandidates per f1.
  std::vector<MergedCandidates> merged(idx.fragments.size());
  {
    std::unordered_map<int32_t, int32_t> sole;  // f2 -> contributing t1, or -1
    for (size_t f1 = 0; f1 < idx.fragments.size(); ++f1) {
      sole.clear();
      for (int32_t t1 : idx.f2t[f1]) {
        for (int32_t f2 : env_candidates[idx.template_env[t1]]) {
          ++work;
          auto [it, fresh] = sole.emplace(f2, t1);
          if (!fresh && it->second != t1) it->second = -1;
        }
      }
      auto& m = merged[f1];
      m.fragment.reserve(sole.size());
      for (const auto& [f2, t1] : sole) m.fragment.push_back(f2);
      std::sort(m.fragment.begin(), m.fragment.end());
      m.sole_template.reserve(m.fragment.size());
      for (int32_t f2 : m.fragment) m.sole_template.push_back(sole[f2]);
    }
  }

  std::unordered_set<std::vector<TokenId>, SeqHash> originals;
  if (cfg.dedup)
    for (const Sequence& s : d.sequences) originals.insert(s.tokens);

  // Emission: for every template t1' and every (t1', f2) pair that qualifies,
  // substitute. Parallel over template ranges; merged in range order.
  struct Emitted {
    std::vector<TokenId> tokens;
    int32_t template_id;
    int32_t fragment_id;
  };
  size_t n_templates = idx.templates.size();
  auto ranges = chunks(n_templates, cfg.threads);
  std::vector<std::vector<Emitted>> emitted(ranges.size());
  std::vector<uint64_t> work_per_range(ranges.size(), 0);

  auto run_range = [&](size_t ri) {
    auto [lo, hi] = ranges[ri];
    auto& out = emitted[ri];
    uint64_t local_work = 0;
    std::unordered_set<int32_t> fills;
    for (size_t t1p = lo; t1p < hi; ++t1p) {
      int32_t t1p_id = static_cast<int32_t>(t1p);
      fills.clear();
      for (int32_t f1 : idx.t2f[t1p]) {
        const MergedCandidates& m = merged[f1];
        for (size_t i = 0; i < m.fragment.size(); ++i) {
          ++local_work;
          if (m.sole_template[i] == t1p_id) continue;  // only witness is t1' itself
          fills.insert(m.fragment[i]);
        }
      }
      if (fills.empty()) continue;
      std::vector<int32_t> fill_list(fills.begin(), fills.end());
      std::sort(fill_list.begin(), fill_list.end());
      for (int32_t f2 : fill_list) {
        ++local_work;
        Sequence z = substitute(idx.templates[t1p], idx.fragments[f2]);
        if (cfg.dedup && originals.count(z.tokens)) continue;
        out.push_back({std::move(z.tokens), t1p_id, f2});
      }
    }
    work_per_range[ri] = local_work;
  };
  if (ranges.size() <= 1) {
    if (!ranges.empty()) run_range(0);
  } else {
    std::vector<std::thread> workers;
    workers.reserve(ranges.size());
    for (size_t ri = 0; ri < ranges.size(); ++ri) workers.emplace_back(run_range, ri);
    for (auto& w : workers) w.join();
  }
  for (uint64_t w : work_per_range) work += w;

  // Deduplicate across derivations, then order by rendered text so the output
  // is invariant under permutations of the input dataset. The set takes
  // ownership of each surviving token vector.
  std::unordered_set<std::vector<TokenId>, SeqHash> seen;
  std::unordered_set<int32_t> used_templates;
  std::unordered_set<int32_t> used_fragments;
  for (auto& range_out : emitted) {
    for (auto& e : range_out) {
      seen.insert(std::move(e.tokens));
      used_templates.insert(e.template_id);
      used_fragments.insert(e.fragment_id);
    }
    range_out.clear();
    range_out.shrink_to_fit();
  }

  Dataset out;
  out.vocab = d.vocab;
  out.format = d.format;
  out.sequences.reserve(seen.size());
  while (!seen.empty()) {
    Sequence s = make_sequence(std::move(seen.extract(seen.begin()).value()));
    s.synthesized = true;
    out.sequences.push_back(std::move(s));
  }
  std::sort(out.sequences.begin(), out.sequences.end(),
            [&](const Sequence& a, const Sequence& b) {
              return render_less(a.tokens, b.tokens, *d.vocab);
            });

  if (report) {
    report->n_synthesized = out.sequences.size();
    report->n_distinct_templates_used = used_templates.size();
    report->n_distinct_fragments_used = used_fragments.size();
    report->index_sizes.fragments = idx.fragments.size();
    report->index_sizes.templates = idx.templates.size();
    report->index_sizes.environments = idx.environments.size();
    report->index_sizes.pairs = idx.pair_count;
    report->work_ops = work;
    report->wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  }
  return out;
}

Dataset augment(const Dataset& d, const AugmentConfig& cfg, SynthesisReport* report) {
  cfg.validate();
  if (d.empty()) {
    if (report) *report = SynthesisReport{};
    return d;
  }
  auto started = std::chrono::steady_clock::now();
  SynthesisIndex idx = build_index(d, cfg);
  Dataset synth = synthesize(idx, d, cfg, report);
  Dataset out;
  out.vocab = d.vocab;
  out.format = d.format;
  out.sequences = d.sequences;
  for (auto& s : out.sequences) s.synthesized = false;
  out.sequences.insert(out.sequences.end(), synth.sequences.begin(), synth.sequences.end());
  if (report)
    report->wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return out;
}

std::string to_json(const SynthesisReport& report) {
  nlohmann::ordered_json j;
  j["n_synthesized"] = report.n_synthesized;
  j["n_distinct_templates_used"] = report.n_distinct_templates_used;
  j["n_distinct_fragments_used"] = report.n_distinct_fragments_used;
  j["wall_time"] = report.wall_time;
  j["index_sizes"] = {{"fragments", report.index_sizes.fragments},
                      {"templates", report.index_sizes.templates},
                      {"environments", report.index_sizes.environments},
                      {"pairs", report.index_sizes.pairs}};
  return j.dump(2);
}

}  // namespace fragrec

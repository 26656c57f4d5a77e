#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fragrec/corpus.hpp"
#include "fragrec/fragment.hpp"

namespace fragrec {

/// Inverted indexes over every (fragment, template) pair extracted from a
/// dataset. Fragments, templates and environments are interned; adjacency
/// lists hold sorted unique ids.
struct SynthesisIndex {
  std::vector<Fragment> fragments;
  std::vector<Template> templates;
  std::vector<Environment> environments;

  std::vector<std::vector<int32_t>> f2t;  // fragment id -> template ids
  std::vector<std::vector<int32_t>> t2f;  // template id -> fragment ids
  std::vector<std::vector<int32_t>> e2t;  // environment id -> template ids
  std::vector<int32_t> template_env;      // template id -> environment id
  // Number of distinct originating sequences per fragment (within-sequence
  // repeats count once).
  std::vector<int32_t> fragment_count;

  size_t pair_count = 0;

  std::optional<int32_t> find_fragment(const Fragment& f) const;
  std::optional<int32_t> find_template(const Template& t) const;
};

struct SynthesisReport {
  size_t n_synthesized = 0;
  size_t n_distinct_templates_used = 0;
  size_t n_distinct_fragments_used = 0;
  double wall_time = 0.0;  // seconds
  struct IndexSizes {
    size_t fragments = 0;
    size_t templates = 0;
    size_t environments = 0;
    size_t pairs = 0;
  } index_sizes;
  // Deterministic inner-loop iteration count; used by the scaling checks.
  uint64_t work_ops = 0;
};

std::string to_json(const SynthesisReport& report);

/// Indexes every (fragment, template) pair of every sequence in `d`.
/// Deterministic for any cfg.threads.
SynthesisIndex build_index(const Dataset& d, const AugmentConfig& cfg);

/// All novel sequences licensed by the substitution rule: whenever fragment
/// f1 occurs in templates t1 and t1' (t1' != t1) and template t2 shares t1's
/// environment, every fragment of t2 (subject to the frequency cap) may fill
/// t1'. Output is deduplicated and ordered by rendered text; with cfg.dedup
/// the originals are excluded.
Dataset synthesize(const SynthesisIndex& idx, const Dataset& d, const AugmentConfig& cfg,
                   SynthesisReport* report = nullptr);

/// d followed by synthesize(build_index(d, cfg), d, cfg), provenance-tagged.
Dataset augment(const Dataset& d, const AugmentConfig& cfg, SynthesisReport* report = nullptr);

}  // namespace fragrec

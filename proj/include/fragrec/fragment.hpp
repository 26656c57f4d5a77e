#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fragrec/corpus.hpp"

namespace fragrec {

class ArityError : public std::invalid_argument {
 public:
  explicit ArityError(const std::string& what) : std::invalid_argument(what) {}
};

enum class EnvMode {
  kFullTemplate,  // environment equality coincides with template equality
  kWindow,        // k retained tokens around each hole
};

/// Extraction and synthesis knobs shared by the fragment and augmentor layers.
struct AugmentConfig {
  int max_parts = 1;   // upper bound on distinct parts per fragment (gaps + 1)
  int max_tokens = 1;  // total tokens across a fragment's parts
  EnvMode env_mode = EnvMode::kFullTemplate;
  int window = 2;  // k, only read in kWindow mode
  // Only fragments seen in fewer than this many distinct sequences are
  // substituted in. Unset means no cap.
  std::optional<int> max_fragment_count;
  bool dedup = true;
  // Memory guard: keep only the N most frequent distinct fragments when set.
  std::optional<size_t> max_distinct_fragments;
  int threads = 1;

  void validate() const;

  static AugmentConfig scan_preset();
  static AugmentConfig semparse_preset();
  static AugmentConfig lm_preset();
};

/// Ordered tuple of distinct, non-empty token runs, ordered by first
/// occurrence in the originating sequence. Parts never contain the boundary.
struct Fragment {
  std::vector<std::vector<TokenId>> parts;

  bool operator==(const Fragment& other) const { return parts == other.parts; }
  int arity() const { return static_cast<int>(parts.size()); }
  size_t total_tokens() const;
};

/// A sequence with a fragment removed. Items are token ids (>= 0) or hole
/// markers; hole markers encode the 0-based part index as -(index + 1).
struct Template {
  std::vector<int32_t> items;

  bool operator==(const Template& other) const { return items == other.items; }
};

inline constexpr int32_t hole_item(int part_index) { return -(part_index + 1); }
inline constexpr bool is_hole(int32_t item) { return item < 0; }
inline constexpr int hole_part(int32_t item) { return -item - 1; }

/// Number of distinct hole labels in a template.
int template_arity(const Template& t);

/// Canonical environment key. Keys are only comparable between templates
/// extracted under the same config.
struct Environment {
  std::vector<int32_t> key;

  bool operator==(const Environment& other) const { return key == other.key; }
};

/// Every fragment extractable from `w` under the config limits, paired with
/// the template left behind. Removal is replace-all: every greedy
/// left-to-right non-overlapping occurrence of every part becomes a hole
/// (longest part wins when two parts match at the same position). A candidate
/// is dropped unless every part keeps at least one hole, no two holes touch,
/// and at least one item of `w` survives.
std::vector<std::pair<Fragment, Template>> enumerate_fragments(const Sequence& w,
                                                               const AugmentConfig& cfg);

/// Restriction of a template to its holes plus the retained tokens within
/// `cfg.window` items of any hole, each tagged with its offset to the nearest
/// hole; virtual begin/end sentinels join the key when a window crosses a
/// sequence edge. In full-template mode the key is the template itself.
Environment extract_environment(const Template& t, const AugmentConfig& cfg);

/// Fills every hole labelled i with f.parts[i]. Throws ArityError when the
/// part count does not match the template's distinct hole labels.
Sequence substitute(const Template& t, const Fragment& f);

std::string render(const Template& t, const Vocabulary& v);
std::string render(const Fragment& f, const Vocabulary& v);

}  // namespace fragrec

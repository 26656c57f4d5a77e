#pragma once

#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fragrec/augmentor.hpp"
#include "fragrec/corpus.hpp"
#include "fragrec/fragment.hpp"

namespace fragrec::testing {

inline Dataset dataset_from(const std::vector<std::string>& lines, CorpusFormat format,
                            std::shared_ptr<Vocabulary> vocab = nullptr) {
  std::string text;
  for (const auto& l : lines) {
    text += l;
    text += '\n';
  }
  std::istringstream in(text);
  return parse_dataset(in, format, std::move(vocab));
}

inline std::string dataset_text(const Dataset& d, CorpusFormat format) {
  std::ostringstream out;
  write_dataset(d, format, out);
  return out.str();
}

inline std::set<std::string> rendered_set(const Dataset& d) {
  std::set<std::string> out;
  for (const Sequence& s : d.sequences) out.insert(render(s, *d.vocab));
  return out;
}

inline std::set<std::string> synthesized_set(const Dataset& d) {
  std::set<std::string> out;
  for (const Sequence& s : d.sequences)
    if (s.synthesized) out.insert(render(s, *d.vocab));
  return out;
}

/// Random corpora over a tiny alphabet; roughly a third carry a boundary.
struct RandomCorpus {
  std::mt19937 rng;

  explicit RandomCorpus(uint32_t seed) : rng(seed) {}

  Dataset next(size_t max_sequences, size_t max_tokens, int vocab_size) {
    static const char* kAlphabet[] = {"a", "b", "c", "d", "e", "f", "g", "h"};
    std::uniform_int_distribution<size_t> n_seqs(1, max_sequences);
    std::uniform_int_distribution<int> tok(0, vocab_size - 1);
    bool conditional = rng() % 3 == 0;
    std::vector<std::string> lines;
    size_t count = n_seqs(rng);
    for (size_t i = 0; i < count; ++i) {
      std::uniform_int_distribution<size_t> n_toks(conditional ? 2 : 1, max_tokens);
      size_t len = n_toks(rng);
      std::string line;
      size_t boundary_at = conditional ? 1 + rng() % (len - 1) : len;
      for (size_t j = 0; j < len; ++j) {
        if (conditional && j == boundary_at) line += "\t";
        else if (j) line += " ";
        line += kAlphabet[tok(rng)];
      }
      lines.push_back(std::move(line));
    }
    return dataset_from(lines, conditional ? CorpusFormat::kTsv : CorpusFormat::kLines);
  }

  AugmentConfig next_config() {
    AugmentConfig cfg;
    cfg.max_parts = 1 + rng() % 3;
    cfg.max_tokens = 1 + rng() % 5;
    if (rng() % 2) {
      cfg.env_mode = EnvMode::kWindow;
      cfg.window = 1 + rng() % 2;
    } else {
      cfg.env_mode = EnvMode::kFullTemplate;
    }
    if (rng() % 3 == 0) cfg.max_fragment_count = 1 + rng() % 3;
    cfg.dedup = rng() % 4 != 0;
    return cfg;
  }
};

}  // namespace fragrec::testing

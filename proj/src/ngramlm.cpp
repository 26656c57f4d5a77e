#include "fragrec/ngramlm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace fragrec {

namespace {

using Key = std::vector<int32_t>;

struct KeyHash {
  size_t operator()(const Key& v) const {
    uint64_t h = 1469598103934665603ull;
    for (int32_t x : v) {
      h ^= static_cast<uint64_t>(static_cast<uint32_t>(x));
      h *= 1099511628211ull;
    }
    return static_cast<size_t>(h);
  }
};

using CountMap = std::unordered_map<Key, int64_t, KeyHash>;

struct Discounts {
  double d1 = 0.5;
  double d2 = 1.0;
  double d3 = 1.5;

  double of(int64_t count) const {
    if (count <= 0) return 0.0;
    if (count == 1) return d1;
    if (count == 2) return d2;
    return d3;
  }
};

// Count-of-count discount estimates; degenerate statistics fall back to fixed
// values and everything is clamped so that no seen count discounts below zero
// and every class keeps a strictly positive discount (required for smoothed
// mass to reach unseen events).
Discounts estimate_discounts(const CountMap& counts) {
  int64_t t[5] = {0, 0, 0, 0, 0};
  for (const auto& [key, c] : counts)
    if (c >= 1 && c <= 4) ++t[c];
  Discounts d;
  if (t[1] > 0) {
    double y = static_cast<double>(t[1]) / (t[1] + 2.0 * t[2]);
    d.d1 = 1.0 - 2.0 * y * t[2] / t[1];
    if (t[2] > 0) d.d2 = 2.0 - 3.0 * y * t[3] / t[2];
    if (t[3] > 0) d.d3 = 3.0 - 4.0 * y * t[4] / t[3];
  }
  d.d1 = std::clamp(d.d1, 0.05, 1.0);
  d.d2 = std::clamp(d.d2, 0.05, 2.0);
  d.d3 = std::clamp(d.d3, 0.05, 3.0);
  return d;
}

struct ContextStats {
  int64_t total = 0;
  int64_t n1 = 0;
  int64_t n2 = 0;
  int64_t n3p = 0;

  void add(int64_t count) {
    total += count;
    if (count == 1)
      ++n1;
    else if (count == 2)
      ++n2;
    else
      ++n3p;
  }
  double gamma(const Discounts& d) const {
    return (d.d1 * n1 + d.d2 * n2 + d.d3 * n3p) / static_cast<double>(total);
  }
};

constexpr double kSentinelLog10 = -99.0;

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

int32_t NGramModel::map_token(const std::string& text) const {
  auto it = text_to_id_.find(text);
  return it == text_to_id_.end() ? kUnk : it->second;
}

int32_t NGramModel::intern(const std::string& text) {
  auto it = text_to_id_.find(text);
  if (it != text_to_id_.end()) return it->second;
  int32_t id = static_cast<int32_t>(id_to_text_.size());
  id_to_text_.push_back(text);
  text_to_id_.emplace(text, id);
  return id;
}

void NGramModel::rebuild_scoring_vocab() {
  scoring_vocab_.clear();
  for (size_t id = 0; id < id_to_text_.size(); ++id)
    if (static_cast<int32_t>(id) != kBos) scoring_vocab_.push_back(id_to_text_[id]);
}

NGramModel NGramModel::train(const Dataset& data, int order) {
  return train(data, order, {});
}

NGramModel NGramModel::train(const Dataset& data, int order,
                             const std::vector<std::string>& extra_vocab) {
  if (order < 1) throw ConfigError("lm order must be >= 1");
  if (data.empty()) throw ConfigError("lm train: empty dataset");
  for (const Sequence& s : data.sequences)
    if (s.boundary_index)
      throw ConfigError("lm train: dataset contains boundary tokens");

  NGramModel m;
  m.order_ = order;
  m.intern("<unk>");
  m.intern("<s>");
  m.intern("</s>");
  const int n_orders = order;

  // Raw counts at every order over <s>-padded sentences; only windows ending
  // at a scored position (real token or </s>) are counted.
  std::vector<CountMap> raw(n_orders + 1);
  std::vector<int32_t> padded;
  for (const Sequence& s : data.sequences) {
    padded.assign(n_orders - 1, kBos);
    for (TokenId t : s.tokens) padded.push_back(m.intern(data.vocab->text(t)));
    padded.push_back(kEos);
    for (size_t pos = n_orders - 1; pos < padded.size(); ++pos) {
      for (int n = 1; n <= n_orders; ++n) {
        Key key(padded.begin() + pos - n + 1, padded.begin() + pos + 1);
        raw[n][std::move(key)] += 1;
      }
    }
  }
  for (const std::string& extra : extra_vocab) m.intern(extra);

  // Adjusted counts: the highest order keeps raw counts; below that an
  // n-gram's count is its number of distinct single-token left extensions,
  // except that n-grams starting with <s> keep their raw counts (they cannot
  // be extended left). The bare <s> unigram is excluded; it is never
  // predicted.
  std::vector<CountMap> adjusted(n_orders + 1);
  adjusted[n_orders] = std::move(raw[n_orders]);
  for (int n = n_orders - 1; n >= 1; --n) {
    CountMap& dst = adjusted[n];
    for (const auto& [key, c] : adjusted[n + 1]) {
      if (key[1] == kBos) continue;
      Key suffix(key.begin() + 1, key.end());
      dst[std::move(suffix)] += 1;
    }
    for (const auto& [key, c] : raw[n]) {
      if (key[0] != kBos) continue;
      if (n == 1) continue;
      dst[key] = c;
    }
    raw[n].clear();
  }

  std::vector<Discounts> discounts(n_orders + 1);
  for (int n = 1; n <= n_orders; ++n) discounts[n] = estimate_discounts(adjusted[n]);

  // Context statistics per order (the empty context at order 1).
  std::vector<std::unordered_map<Key, ContextStats, KeyHash>> contexts(n_orders + 1);
  for (int n = 1; n <= n_orders; ++n) {
    for (const auto& [key, c] : adjusted[n]) {
      Key ctx(key.begin(), key.end() - 1);
      contexts[n][std::move(ctx)].add(c);
    }
  }

  m.tables_.assign(n_orders, Table{});

  // Unigrams over the scoring vocabulary (zero-count entries included so
  // <unk> and extra vocabulary receive their uniform share).
  {
    const ContextStats& root = contexts[1].at(Key{});
    const Discounts& d = discounts[1];
    double gamma = root.gamma(d);
    double uniform = 1.0 / static_cast<double>(m.id_to_text_.size() - 1);  // minus <s>
    for (size_t id = 0; id < m.id_to_text_.size(); ++id) {
      int32_t w = static_cast<int32_t>(id);
      if (w == kBos) continue;
      Key key{w};
      auto it = adjusted[1].find(key);
      int64_t c = it == adjusted[1].end() ? 0 : it->second;
      double p = (c > 0 ? (c - d.of(c)) / static_cast<double>(root.total) : 0.0) + gamma * uniform;
      m.tables_[0][key] = {std::log10(p), 0.0, false};
    }
    m.tables_[0][Key{kBos}] = {kSentinelLog10, 0.0, false};
  }

  for (int n = 2; n <= n_orders; ++n) {
    const Discounts& d = discounts[n];
    for (const auto& [key, c] : adjusted[n]) {
      Key ctx(key.begin(), key.end() - 1);
      const ContextStats& stats = contexts[n].at(ctx);
      Key lower(key.begin() + 1, key.end());
      double p_lower = std::pow(10.0, m.tables_[n - 2].at(lower).log10_prob);
      double p = (c - d.of(c)) / static_cast<double>(stats.total) + stats.gamma(d) * p_lower;
      m.tables_[n - 1][key] = {std::log10(p), 0.0, false};
    }
    // Backoff weights live on the context's entry one order down; all-<s>
    // contexts get sentinel entries.
    for (const auto& [ctx, stats] : contexts[n]) {
      double gamma = stats.gamma(d);
      auto [it, fresh] = m.tables_[n - 2].try_emplace(ctx, Entry{kSentinelLog10, 0.0, false});
      it->second.log10_backoff = std::log10(gamma);
      it->second.has_backoff = true;
    }
  }

  m.rebuild_scoring_vocab();
  return m;
}

double NGramModel::log10_prob_ids(std::span<const int32_t> context, int32_t word) const {
  double backoff_acc = 0.0;
  int start_n = std::min<int>(order_, static_cast<int>(context.size()) + 1);
  Key key;
  for (int n = start_n; n >= 1; --n) {
    key.assign(context.end() - (n - 1), context.end());
    key.push_back(word);
    auto it = tables_[n - 1].find(key);
    if (it != tables_[n - 1].end()) return backoff_acc + it->second.log10_prob;
    if (n >= 2) {
      Key ctx(context.end() - (n - 1), context.end());
      auto cit = tables_[n - 2].find(ctx);
      if (cit != tables_[n - 2].end() && cit->second.has_backoff)
        backoff_acc += cit->second.log10_backoff;
    }
  }
  // unreachable for in-vocabulary ids: every scoring token has a unigram entry
  return backoff_acc + kSentinelLog10;
}

double NGramModel::log10_prob(std::span<const std::string> context,
                              const std::string& word) const {
  size_t take = std::min<size_t>(context.size(), order_ - 1);
  Key ctx;
  ctx.reserve(take);
  for (size_t i = context.size() - take; i < context.size(); ++i)
    ctx.push_back(map_token(context[i]));
  return log10_prob_ids(ctx, map_token(word));
}

double NGramModel::prob(std::span<const std::string> context, const std::string& word) const {
  return std::pow(10.0, log10_prob(context, word));
}

namespace {

// Shared perplexity driver so a single model and a 0-weight mixture walk
// through bit-identical arithmetic.
template <typename ProbFn>
double perplexity_impl(ProbFn&& prob_fn, const Dataset& data, int pad) {
  if (data.empty()) throw ConfigError("perplexity: empty dataset");
  double nll = 0.0;
  size_t scored = 0;
  std::vector<std::string> history;
  for (const Sequence& s : data.sequences) {
    history.assign(pad, "<s>");
    for (TokenId t : s.tokens) {
      const std::string& w = data.vocab->text(t);
      nll -= std::log(prob_fn(history, w));
      ++scored;
      history.push_back(w);
    }
    nll -= std::log(prob_fn(history, "</s>"));
    ++scored;
  }
  return std::exp(nll / static_cast<double>(scored));
}

}  // namespace

double perplexity(const NGramModel& model, const Dataset& data) {
  for (const Sequence& s : data.sequences)
    if (s.boundary_index) throw ConfigError("perplexity: dataset contains boundary tokens");
  return perplexity_impl(
      [&](std::span<const std::string> ctx, const std::string& w) { return model.prob(ctx, w); },
      data, model.order() - 1);
}

double InterpolatedModel::prob(std::span<const std::string> context,
                               const std::string& word) const {
  return (1.0 - weight) * base->prob(context, word) +
         weight * augmented->prob(context, word);
}

double perplexity(const InterpolatedModel& model, const Dataset& data) {
  for (const Sequence& s : data.sequences)
    if (s.boundary_index) throw ConfigError("perplexity: dataset contains boundary tokens");
  int pad = std::max(model.base->order(), model.augmented->order()) - 1;
  return perplexity_impl(
      [&](std::span<const std::string> ctx, const std::string& w) { return model.prob(ctx, w); },
      data, pad);
}

InterpolatedModel select_weight(const NGramModel& base, const NGramModel& augmented,
                                const Dataset& validation) {
  if (validation.empty()) throw ConfigError("select_weight: empty validation dataset");
  InterpolatedModel best{&base, &augmented, 0.0};
  double best_ppl = 0.0;
  for (double w : {0.05, 0.1, 0.5}) {
    InterpolatedModel candidate{&base, &augmented, w};
    double ppl = perplexity(candidate, validation);
    if (best.weight == 0.0 || ppl < best_ppl) {
      best = candidate;
      best_ppl = ppl;
    }
  }
  return best;
}

void NGramModel::save_arpa(std::ostream& out) const {
  out << "\\data\\\n";
  for (int n = 1; n <= order_; ++n)
    out << "ngram " << n << "=" << tables_[n - 1].size() << "\n";
  for (int n = 1; n <= order_; ++n) {
    out << "\n\\" << n << "-grams:\n";
    std::vector<std::pair<std::string, const Entry*>> lines;
    lines.reserve(tables_[n - 1].size());
    for (const auto& [key, entry] : tables_[n - 1]) {
      std::string text;
      for (size_t i = 0; i < key.size(); ++i) {
        if (i) text += ' ';
        text += id_to_text_[key[i]];
      }
      lines.emplace_back(std::move(text), &entry);
    }
    std::sort(lines.begin(), lines.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [text, entry] : lines) {
      out << text << '\t' << format_double(entry->log10_prob);
      if (entry->has_backoff) out << '\t' << format_double(entry->log10_backoff);
      out << '\n';
    }
  }
  out << "\n\\end\\\n";
}

void NGramModel::save_arpa_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open output file: " + path);
  save_arpa(out);
}

NGramModel NGramModel::load_arpa(std::istream& in) {
  NGramModel m;
  m.intern("<unk>");
  m.intern("<s>");
  m.intern("</s>");
  std::string line;
  int current = 0;
  int max_order = 0;
  bool in_data = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line == "\\data\\") {
      in_data = true;
      continue;
    }
    if (line == "\\end\\") break;
    if (line.size() > 2 && line[0] == '\\' && line.find("-grams:") != std::string::npos) {
      current = std::stoi(line.substr(1));
      max_order = std::max(max_order, current);
      if (static_cast<size_t>(current) > m.tables_.size()) m.tables_.resize(current);
      continue;
    }
    if (in_data && line.rfind("ngram ", 0) == 0) continue;
    if (current == 0) throw FormatError("arpa: entry before any \\N-grams: section");
    size_t tab1 = line.find('\t');
    if (tab1 == std::string::npos) throw FormatError("arpa: missing tab in entry: " + line);
    size_t tab2 = line.find('\t', tab1 + 1);
    std::string ngram = line.substr(0, tab1);
    std::string prob_text =
        tab2 == std::string::npos ? line.substr(tab1 + 1) : line.substr(tab1 + 1, tab2 - tab1 - 1);
    Entry entry;
    entry.log10_prob = std::stod(prob_text);
    if (tab2 != std::string::npos) {
      entry.log10_backoff = std::stod(line.substr(tab2 + 1));
      entry.has_backoff = true;
    }
    Key key;
    std::istringstream toks(ngram);
    std::string tok;
    while (toks >> tok) {
      if (current == 1) {
        key.push_back(m.intern(tok));
      } else {
        auto it = m.text_to_id_.find(tok);
        if (it == m.text_to_id_.end())
          throw FormatError("arpa: token missing from unigram section: " + tok);
        key.push_back(it->second);
      }
    }
    if (key.size() != static_cast<size_t>(current))
      throw FormatError("arpa: ngram length does not match section: " + line);
    m.tables_[current - 1][std::move(key)] = entry;
  }
  if (max_order == 0) throw FormatError("arpa: no n-gram sections found");
  m.order_ = max_order;
  m.rebuild_scoring_vocab();
  return m;
}

NGramModel NGramModel::load_arpa_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open model file: " + path);
  return load_arpa(in);
}

}  // namespace fragrec

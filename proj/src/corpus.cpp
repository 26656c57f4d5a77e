#include "fragrec/corpus.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace fragrec {

TokenId Vocabulary::intern(std::string_view token) {
  auto it = text_to_id_.find(std::string(token));
  if (it != text_to_id_.end()) return it->second;
  TokenId id = static_cast<TokenId>(id_to_text_.size());
  id_to_text_.emplace_back(token);
  text_to_id_.emplace(std::string(token), id);
  return id;
}

std::optional<TokenId> Vocabulary::find(std::string_view token) const {
  auto it = text_to_id_.find(std::string(token));
  if (it == text_to_id_.end()) return std::nullopt;
  return it->second;
}

const std::string& Vocabulary::text(TokenId id) const {
  return id_to_text_.at(static_cast<size_t>(id));
}

std::span<const TokenId> source_side(const Sequence& s) {
  if (!s.boundary_index) return {s.tokens.data(), s.tokens.size()};
  return {s.tokens.data(), *s.boundary_index};
}

std::span<const TokenId> target_side(const Sequence& s) {
  if (!s.boundary_index) return {};
  size_t start = *s.boundary_index + 1;
  return {s.tokens.data() + start, s.tokens.size() - start};
}

Sequence make_sequence(std::vector<TokenId> tokens) {
  Sequence s;
  s.tokens = std::move(tokens);
  for (size_t i = 0; i < s.tokens.size(); ++i) {
    if (s.tokens[i] == kBoundaryId) {
      s.boundary_index = i;
      break;
    }
  }
  return s;
}

namespace {

std::vector<std::string_view> split_ws(std::string_view text) {
  std::vector<std::string_view> out;
  size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t' || text[i] == '\r')) ++i;
    size_t start = i;
    while (i < text.size() && text[i] != ' ' && text[i] != '\t' && text[i] != '\r') ++i;
    if (i > start) out.push_back(text.substr(start, i - start));
  }
  return out;
}

std::shared_ptr<Vocabulary> ensure_vocab(std::shared_ptr<Vocabulary> vocab) {
  return vocab ? std::move(vocab) : std::make_shared<Vocabulary>();
}

void intern_into(Vocabulary& vocab, std::span<const std::string_view> tokens,
                 std::vector<TokenId>& out) {
  for (std::string_view t : tokens) out.push_back(vocab.intern(t));
}

}  // namespace

Dataset parse_lines(std::istream& in, std::shared_ptr<Vocabulary> vocab) {
  Dataset d;
  d.vocab = ensure_vocab(std::move(vocab));
  d.format = CorpusFormat::kLines;
  std::string line;
  while (std::getline(in, line)) {
    auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    Sequence s;
    intern_into(*d.vocab, tokens, s.tokens);
    d.sequences.push_back(std::move(s));
  }
  return d;
}

Dataset parse_tsv(std::istream& in, std::shared_ptr<Vocabulary> vocab) {
  Dataset d;
  d.vocab = ensure_vocab(std::move(vocab));
  d.format = CorpusFormat::kTsv;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    size_t first = line.find('\t');
    if (first == std::string::npos)
      throw FormatError("tsv line " + std::to_string(line_no) + ": expected one tab, found none");
    if (line.find('\t', first + 1) != std::string::npos)
      throw FormatError("tsv line " + std::to_string(line_no) + ": multiple tabs");
    Sequence s;
    auto src = split_ws(std::string_view(line).substr(0, first));
    auto tgt = split_ws(std::string_view(line).substr(first + 1));
    intern_into(*d.vocab, src, s.tokens);
    s.boundary_index = s.tokens.size();
    s.tokens.push_back(kBoundaryId);
    intern_into(*d.vocab, tgt, s.tokens);
    d.sequences.push_back(std::move(s));
  }
  return d;
}

Dataset parse_scan(std::istream& in, std::shared_ptr<Vocabulary> vocab) {
  Dataset d;
  d.vocab = ensure_vocab(std::move(vocab));
  d.format = CorpusFormat::kScan;
  std::string line;
  size_t line_no = 0;
  constexpr std::string_view kIn = "IN:";
  constexpr std::string_view kOut = " OUT:";
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::string_view view(line);
    if (view.substr(0, kIn.size()) != kIn)
      throw FormatError("scan line " + std::to_string(line_no) + ": missing IN: marker");
    size_t out_pos = view.find(kOut);
    if (out_pos == std::string_view::npos)
      throw FormatError("scan line " + std::to_string(line_no) + ": missing OUT: marker");
    Sequence s;
    auto src = split_ws(view.substr(kIn.size(), out_pos - kIn.size()));
    auto tgt = split_ws(view.substr(out_pos + kOut.size()));
    intern_into(*d.vocab, src, s.tokens);
    s.boundary_index = s.tokens.size();
    s.tokens.push_back(kBoundaryId);
    intern_into(*d.vocab, tgt, s.tokens);
    d.sequences.push_back(std::move(s));
  }
  return d;
}

Dataset parse_dataset(std::istream& in, CorpusFormat format, std::shared_ptr<Vocabulary> vocab) {
  switch (format) {
    case CorpusFormat::kLines:
      return parse_lines(in, std::move(vocab));
    case CorpusFormat::kTsv:
      return parse_tsv(in, std::move(vocab));
    case CorpusFormat::kScan:
      return parse_scan(in, std::move(vocab));
  }
  throw FormatError("unknown corpus format");
}

Dataset load_dataset(const std::string& path, CorpusFormat format,
                     std::shared_ptr<Vocabulary> vocab) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open input file: " + path);
  return parse_dataset(in, format, std::move(vocab));
}

namespace {

void write_side(const Dataset& d, std::span<const TokenId> side, std::ostream& out) {
  for (size_t i = 0; i < side.size(); ++i) {
    if (i) out << ' ';
    out << d.vocab->text(side[i]);
  }
}

}  // namespace

void write_dataset(const Dataset& d, CorpusFormat format, std::ostream& out) {
  for (const Sequence& s : d.sequences) {
    if (format == CorpusFormat::kLines) {
      if (s.boundary_index)
        throw FormatError("lines format cannot carry a sequence with a boundary");
      write_side(d, s.tokens, out);
      out << '\n';
      continue;
    }
    if (!s.boundary_index)
      throw FormatError("tsv/scan formats require a boundary in every sequence");
    if (format == CorpusFormat::kTsv) {
      write_side(d, source_side(s), out);
      out << '\t';
      write_side(d, target_side(s), out);
      out << '\n';
    } else {
      out << "IN: ";
      write_side(d, source_side(s), out);
      out << " OUT: ";
      write_side(d, target_side(s), out);
      out << '\n';
    }
  }
}

void save_dataset(const Dataset& d, CorpusFormat format, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open output file: " + path);
  write_dataset(d, format, out);
}

std::string render(const Sequence& s, const Vocabulary& v) {
  std::string out;
  for (size_t i = 0; i < s.tokens.size(); ++i) {
    if (i) out += ' ';
    out += v.text(s.tokens[i]);
  }
  return out;
}

std::optional<CorpusFormat> format_from_name(std::string_view name) {
  if (name == "lines") return CorpusFormat::kLines;
  if (name == "tsv") return CorpusFormat::kTsv;
  if (name == "scan") return CorpusFormat::kScan;
  return std::nullopt;
}

std::string_view format_name(CorpusFormat format) {
  switch (format) {
    case CorpusFormat::kLines:
      return "lines";
    case CorpusFormat::kTsv:
      return "tsv";
    case CorpusFormat::kScan:
      return "scan";
  }
  return "?";
}

}  // namespace fragrec

#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace fragrec {

using TokenId = int32_t;

/// Reserved vocabulary slot for the boundary marker that separates the source
/// and target halves of a conditional example. The marker is implied
/// positionally by the tsv/scan formats and is never produced by intern(), so
/// it cannot collide with corpus tokens.
inline constexpr TokenId kBoundaryId = 0;
inline constexpr const char* kBoundaryText = "↦";  // rendered in debug output only

class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// Bidirectional map between token strings and dense ids. Construction is
/// single-writer; once ingestion finishes the table is treated as immutable
/// and may be shared across threads.
class Vocabulary {
 public:
  Vocabulary() { id_to_text_.emplace_back(kBoundaryText); }

  TokenId intern(std::string_view token);
  std::optional<TokenId> find(std::string_view token) const;
  const std::string& text(TokenId id) const;
  size_t size() const { return id_to_text_.size(); }

 private:
  std::vector<std::string> id_to_text_;
  // The boundary slot is deliberately absent here: a literal boundary glyph in
  // a corpus interns as an ordinary token.
  std::unordered_map<std::string, TokenId> text_to_id_;
};

struct Sequence {
  std::vector<TokenId> tokens;
  std::optional<size_t> boundary_index;
  bool synthesized = false;

  // Token-level equality; provenance does not participate.
  bool operator==(const Sequence& other) const { return tokens == other.tokens; }
};

/// Source/target halves of a conditional sequence (empty target span when no
/// boundary is present).
std::span<const TokenId> source_side(const Sequence& s);
std::span<const TokenId> target_side(const Sequence& s);

Sequence make_sequence(std::vector<TokenId> tokens);

enum class CorpusFormat { kLines, kTsv, kScan };

struct Dataset {
  std::shared_ptr<Vocabulary> vocab;
  std::vector<Sequence> sequences;
  CorpusFormat format = CorpusFormat::kLines;

  size_t size() const { return sequences.size(); }
  bool empty() const { return sequences.empty(); }
};

Dataset parse_lines(std::istream& in, std::shared_ptr<Vocabulary> vocab = nullptr);
Dataset parse_tsv(std::istream& in, std::shared_ptr<Vocabulary> vocab = nullptr);
Dataset parse_scan(std::istream& in, std::shared_ptr<Vocabulary> vocab = nullptr);
Dataset parse_dataset(std::istream& in, CorpusFormat format,
                      std::shared_ptr<Vocabulary> vocab = nullptr);
Dataset load_dataset(const std::string& path, CorpusFormat format,
                     std::shared_ptr<Vocabulary> vocab = nullptr);

/// Inverse of the parsers. Throws FormatError when the format cannot carry the
/// dataset (lines requires no boundary, tsv/scan require exactly one).
void write_dataset(const Dataset& d, CorpusFormat format, std::ostream& out);
void save_dataset(const Dataset& d, CorpusFormat format, const std::string& path);

/// Debug rendering: tokens joined by spaces, boundary as the arrow glyph.
std::string render(const Sequence& s, const Vocabulary& v);

std::optional<CorpusFormat> format_from_name(std::string_view name);
std::string_view format_name(CorpusFormat format);

}  // namespace fragrec

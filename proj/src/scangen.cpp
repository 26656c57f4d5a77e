#include "fragrec/scangen.hpp"

#include <algorithm>
#include <array>
#include <sstream>

namespace fragrec {

namespace {

const std::array<std::pair<const char*, const char*>, 4> kPrimitives = {{
    {"walk", "WALK"},
    {"look", "LOOK"},
    {"run", "RUN"},
    {"jump", "JUMP"},
}};

const char* primitive_action(const std::string& word) {
  for (auto [cmd, act] : kPrimitives)
    if (word == cmd) return act;
  return nullptr;
}

const char* turn_action(const std::string& dir) {
  if (dir == "left") return "LTURN";
  if (dir == "right") return "RTURN";
  return nullptr;
}

// V -> U | U D | U opposite D | U around D | turn D | turn opposite D |
//      turn around D. `base` is at token offset `pos` within the command.
std::vector<std::string> interpret_v(const std::vector<std::string>& toks, size_t pos,
                                     size_t end) {
  if (pos >= end) throw ScanParseError("expected a verb phrase", pos);
  const std::string& head = toks[pos];
  const char* prim = primitive_action(head);
  bool is_turn = head == "turn";
  if (!prim && !is_turn) throw ScanParseError("unknown verb '" + head + "'", pos);
  size_t len = end - pos;
  if (is_turn && len == 1) throw ScanParseError("'turn' requires a direction", pos + 1);
  if (len == 1) return {prim};

  auto finish = [&](const char* turn, int turns, int repeats) {
    std::vector<std::string> out;
    for (int r = 0; r < repeats; ++r) {
      for (int t = 0; t < turns; ++t) out.emplace_back(turn);
      if (!is_turn) out.emplace_back(prim);
    }
    return out;
  };

  if (len == 2) {
    const char* turn = turn_action(toks[pos + 1]);
    if (!turn) throw ScanParseError("expected a direction, got '" + toks[pos + 1] + "'", pos + 1);
    return finish(turn, 1, 1);
  }
  if (len == 3) {
    const std::string& mod = toks[pos + 1];
    const char* turn = turn_action(toks[pos + 2]);
    if (!turn) throw ScanParseError("expected a direction, got '" + toks[pos + 2] + "'", pos + 2);
    if (mod == "opposite") return finish(turn, 2, 1);
    if (mod == "around") return finish(turn, 1, 4);
    throw ScanParseError("expected 'opposite' or 'around', got '" + mod + "'", pos + 1);
  }
  throw ScanParseError("verb phrase too long", pos + 3);
}

// S -> V | V twice | V thrice
std::vector<std::string> interpret_s(const std::vector<std::string>& toks, size_t pos,
                                     size_t end) {
  if (pos >= end) throw ScanParseError("expected a command", pos);
  int repeats = 1;
  size_t v_end = end;
  const std::string& last = toks[end - 1];
  if (last == "twice") {
    repeats = 2;
    --v_end;
  } else if (last == "thrice") {
    repeats = 3;
    --v_end;
  }
  std::vector<std::string> once = interpret_v(toks, pos, v_end);
  std::vector<std::string> out;
  out.reserve(once.size() * repeats);
  for (int r = 0; r < repeats; ++r) out.insert(out.end(), once.begin(), once.end());
  return out;
}

}  // namespace

std::vector<std::string> scan_interpret(const std::vector<std::string>& command) {
  if (command.empty()) throw ScanParseError("empty command", 0);
  // at most one top-level connective
  size_t conn = command.size();
  bool is_after = false;
  for (size_t i = 0; i < command.size(); ++i) {
    if (command[i] == "and" || command[i] == "after") {
      if (conn != command.size()) throw ScanParseError("more than one connective", i);
      conn = i;
      is_after = command[i] == "after";
    }
  }
  if (conn == command.size()) return interpret_s(command, 0, command.size());
  if (conn == 0) throw ScanParseError("connective at start", 0);
  if (conn == command.size() - 1) throw ScanParseError("connective at end", conn);
  std::vector<std::string> left = interpret_s(command, 0, conn);
  std::vector<std::string> right = interpret_s(command, conn + 1, command.size());
  std::vector<std::string> out;
  out.reserve(left.size() + right.size());
  if (is_after) {
    out.insert(out.end(), right.begin(), right.end());
    out.insert(out.end(), left.begin(), left.end());
  } else {
    out.insert(out.end(), left.begin(), left.end());
    out.insert(out.end(), right.begin(), right.end());
  }
  return out;
}

namespace {

std::vector<std::vector<std::string>> all_verb_phrases() {
  std::vector<std::vector<std::string>> vs;
  const std::array<std::string, 2> dirs = {"left", "right"};
  for (auto [cmd, act] : kPrimitives) {
    (void)act;
    vs.push_back({cmd});
    for (const auto& d : dirs) vs.push_back({cmd, d});
    for (const auto& d : dirs) vs.push_back({cmd, "opposite", d});
    for (const auto& d : dirs) vs.push_back({cmd, "around", d});
  }
  for (const auto& d : dirs) vs.push_back({"turn", d});
  for (const auto& d : dirs) vs.push_back({"turn", "opposite", d});
  for (const auto& d : dirs) vs.push_back({"turn", "around", d});
  return vs;
}

}  // namespace

Dataset scan_generate_all(std::shared_ptr<Vocabulary> vocab) {
  auto verb_phrases = all_verb_phrases();
  std::vector<std::vector<std::string>> simple;  // S
  for (const auto& v : verb_phrases) {
    simple.push_back(v);
    for (const char* rep : {"twice", "thrice"}) {
      auto s = v;
      s.emplace_back(rep);
      simple.push_back(std::move(s));
    }
  }
  std::vector<std::vector<std::string>> commands = simple;
  for (const char* conn : {"and", "after"}) {
    for (const auto& a : simple) {
      for (const auto& b : simple) {
        auto c = a;
        c.emplace_back(conn);
        c.insert(c.end(), b.begin(), b.end());
        commands.push_back(std::move(c));
      }
    }
  }

  std::vector<std::string> lines;
  lines.reserve(commands.size());
  for (const auto& c : commands) {
    std::vector<std::string> actions = scan_interpret(c);
    std::string line = "IN:";
    for (const auto& t : c) line += " " + t;
    line += " OUT:";
    for (const auto& t : actions) line += " " + t;
    lines.push_back(std::move(line));
  }
  std::sort(lines.begin(), lines.end());
  lines.erase(std::unique(lines.begin(), lines.end()), lines.end());

  std::string text;
  for (const auto& l : lines) {
    text += l;
    text += '\n';
  }
  std::istringstream in(text);
  return parse_scan(in, std::move(vocab));
}

SplitPair make_split(const Dataset& d, ScanSplit split) {
  SplitPair out;
  out.train.vocab = out.test.vocab = d.vocab;
  out.train.format = out.test.format = d.format;

  if (split == ScanSplit::kAddPrimitiveJump) {
    auto jump = d.vocab->find("jump");
    if (!jump) throw FormatError("make_split: dataset has no 'jump' token");
    const Sequence* isolated = nullptr;
    for (const Sequence& s : d.sequences) {
      auto src = source_side(s);
      bool has_jump = std::find(src.begin(), src.end(), *jump) != src.end();
      if (!has_jump) {
        out.train.sequences.push_back(s);
      } else if (src.size() == 1) {
        isolated = &s;
      } else {
        out.test.sequences.push_back(s);
      }
    }
    if (!isolated) throw FormatError("make_split: dataset has no isolated 'jump' example");
    out.train.sequences.push_back(*isolated);
    return out;
  }

  auto around = d.vocab->find("around");
  auto right = d.vocab->find("right");
  if (!around || !right)
    throw FormatError("make_split: dataset has no 'around right' bigram");
  bool any = false;
  for (const Sequence& s : d.sequences) {
    auto src = source_side(s);
    bool has_bigram = false;
    for (size_t i = 0; i + 1 < src.size(); ++i)
      if (src[i] == *around && src[i + 1] == *right) has_bigram = true;
    (has_bigram ? out.test : out.train).sequences.push_back(s);
    any |= has_bigram;
  }
  if (!any) throw FormatError("make_split: dataset has no 'around right' bigram");
  return out;
}

Dataset reverse_dataset(const Dataset& d) {
  Dataset out;
  out.vocab = d.vocab;
  out.format = d.format;
  out.sequences.reserve(d.size());
  for (const Sequence& s : d.sequences) {
    if (!s.boundary_index) throw FormatError("reverse: sequence has no boundary");
    std::vector<TokenId> tokens;
    tokens.reserve(s.tokens.size());
    auto tgt = target_side(s);
    auto src = source_side(s);
    tokens.insert(tokens.end(), tgt.begin(), tgt.end());
    tokens.push_back(kBoundaryId);
    tokens.insert(tokens.end(), src.begin(), src.end());
    Sequence r = make_sequence(std::move(tokens));
    r.synthesized = s.synthesized;
    out.sequences.push_back(std::move(r));
  }
  return out;
}

PairValidity validate_pair(const Sequence& s, const Vocabulary& v) {
  if (!s.boundary_index) return {false, "no boundary"};
  std::vector<std::string> command;
  for (TokenId t : source_side(s)) command.push_back(v.text(t));
  std::vector<std::string> actions;
  try {
    actions = scan_interpret(command);
  } catch (const ScanParseError& e) {
    return {false, std::string("parse: ") + e.what()};
  }
  auto tgt = target_side(s);
  if (tgt.size() != actions.size()) return {false, "wrong action sequence"};
  for (size_t i = 0; i < actions.size(); ++i)
    if (v.text(tgt[i]) != actions[i]) return {false, "wrong action sequence"};
  return {true, ""};
}

}  // namespace fragrec

#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "bpsys/bp.hpp"

namespace bpsys {

/// An ordinary net with its initial marking.
struct NetSystem {
  Net net;
  Marking marking;
};

using NetFile = std::variant<NetSystem, BPSystem>;

namespace detail {

struct Token {
  std::string text;
  std::size_t column;  // 1-based
  bool quoted = false;
};

inline std::vector<Token> tokenize(std::string_view line, std::size_t line_no) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    char c = line[i];
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      continue;
    }
    if (c == '#') break;
    if (c == '"') {
      auto end = line.find('"', i + 1);
      if (end == std::string_view::npos) throw ParseError(line_no, i + 1, "unterminated string");
      out.push_back({std::string(line.substr(i + 1, end - i - 1)), i + 1, true});
      i = end + 1;
      continue;
    }
    auto start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r' && line[i] != '#' &&
           line[i] != '"')
      ++i;
    out.push_back({std::string(line.substr(start, i - start)), start + 1, false});
  }
  return out;
}

inline std::pair<std::string_view, std::string_view> split_option(const Token& tok, std::size_t line_no,
                                                                   std::string_view key) {
  std::string_view text = tok.text;
  auto eq = text.find('=');
  if (eq == std::string_view::npos || text.substr(0, eq) != key)
    throw ParseError(line_no, tok.column, "expected " + std::string(key) + "=...");
  return {text.substr(0, eq), text.substr(eq + 1)};
}

inline std::uint32_t parse_count(std::string_view s, std::size_t line_no, std::size_t column) {
  if (s.empty() || s.size() > 9) throw ParseError(line_no, column, "expected a token count");
  std::uint32_t v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') throw ParseError(line_no, column, "expected a token count");
    v = v * 10 + static_cast<std::uint32_t>(c - '0');
  }
  return v;
}

inline ColourCount parse_colours(std::string_view s, std::size_t line_no, std::size_t column) {
  if (s.size() < 2 || s.front() != '[' || s.back() != ']')
    throw ParseError(line_no, column, "expected a colour list like [high,low]");
  ColourCount cc;
  s = s.substr(1, s.size() - 2);
  std::size_t offset = 1;
  while (!s.empty()) {
    auto comma = s.find(',');
    auto item = s.substr(0, comma);
    if (item == "high")
      ++cc.high;
    else if (item == "low")
      ++cc.low;
    else
      throw ParseError(line_no, column + offset, "unknown colour '" + std::string(item) + "'");
    if (comma == std::string_view::npos) break;
    offset += comma + 1;
    s = s.substr(comma + 1);
    if (s.empty()) throw ParseError(line_no, column + offset, "trailing comma in colour list");
  }
  return cc;
}

}  // namespace detail

/// Parses the line-oriented net format. Throws ParseError for syntax
/// problems and ValidationError when the described net breaks a structural
/// rule.
inline NetFile parse_file(std::string_view text) {
  std::size_t line_no = 0;
  bool have_header = false;
  bool bp = false;
  Net net;
  std::vector<std::uint32_t> tokens;
  std::vector<ColourCount> colours;
  std::vector<TransitionKind> kinds;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    auto toks = detail::tokenize(line, line_no);
    if (toks.empty()) continue;
    const auto& kw = toks[0];
    auto expect_count = [&](std::size_t lo, std::size_t hi) {
      if (toks.size() < lo) throw ParseError(line_no, line.size() + 1, "missing operand after '" + kw.text + "'");
      if (toks.size() > hi) throw ParseError(line_no, toks[hi].column, "unexpected '" + toks[hi].text + "'");
    };
    auto check_id = [&](const detail::Token& t) {
      if (t.quoted || t.text.empty() || t.text.find_first_of("=[]") != std::string::npos)
        throw ParseError(line_no, t.column, "invalid identifier '" + t.text + "'");
    };
    if (!have_header) {
      if (kw.text != "net") throw ParseError(line_no, kw.column, "expected 'net ordinary|bp \"<name>\"' header");
      expect_count(3, 3);
      if (toks[1].text == "bp")
        bp = true;
      else if (toks[1].text != "ordinary")
        throw ParseError(line_no, toks[1].column, "net kind must be 'ordinary' or 'bp'");
      if (!toks[2].quoted) throw ParseError(line_no, toks[2].column, "net name must be quoted");
      net.set_name(toks[2].text);
      have_header = true;
      continue;
    }
    try {
      if (kw.text == "place") {
        expect_count(2, 3);
        check_id(toks[1]);
        net.add_place(toks[1].text);
        if (bp) {
          ColourCount cc;
          if (toks.size() == 3) {
            auto [key, value] = detail::split_option(toks[2], line_no, "tokens");
            cc = detail::parse_colours(value, line_no, toks[2].column + key.size() + 1);
          }
          colours.push_back(cc);
        } else {
          std::uint32_t n = 0;
          if (toks.size() == 3) {
            auto [key, value] = detail::split_option(toks[2], line_no, "tokens");
            n = detail::parse_count(value, line_no, toks[2].column + key.size() + 1);
          }
          tokens.push_back(n);
        }
      } else if (kw.text == "trans") {
        expect_count(2, 3);
        check_id(toks[1]);
        net.add_transition(toks[1].text);
        if (toks.size() == 3) {
          if (!bp) throw ParseError(line_no, toks[2].column, "ordinary transitions take no kind");
          auto [key, value] = detail::split_option(toks[2], line_no, "kind");
          if (value == "and")
            kinds.push_back(TransitionKind::and_);
          else if (value == "xor")
            kinds.push_back(TransitionKind::xor_);
          else
            throw ParseError(line_no, toks[2].column + key.size() + 1, "kind must be 'and' or 'xor'");
        } else {
          kinds.push_back(TransitionKind::and_);
        }
      } else if (kw.text == "arc") {
        expect_count(4, 4);
        if (toks[2].text != "->") throw ParseError(line_no, toks[2].column, "expected '->'");
        auto src = net.find_place(toks[1].text) ? std::optional<bool>(true)
                   : net.find_transition(toks[1].text) ? std::optional<bool>(false)
                                                       : std::nullopt;
        if (!src) throw ParseError(line_no, toks[1].column, "unknown node '" + toks[1].text + "'");
        bool dst_ok = *src ? net.find_transition(toks[3].text).has_value() : net.find_place(toks[3].text).has_value();
        if (!dst_ok) {
          bool known = net.find_place(toks[3].text) || net.find_transition(toks[3].text);
          throw ParseError(line_no, toks[3].column,
                           known ? "arc must connect a place and a transition" : "unknown node '" + toks[3].text + "'");
        }
        net.add_arc(toks[1].text, toks[3].text);
      } else if (kw.text == "net") {
        throw ParseError(line_no, kw.column, "duplicate header");
      } else {
        throw ParseError(line_no, kw.column, "unknown keyword '" + kw.text + "'");
      }
    } catch (const ValidationError& e) {
      throw ParseError(line_no, kw.column, e.what());
    }
  }
  if (!have_header) throw ParseError(line_no == 0 ? 1 : line_no, 1, "missing header");

  if (bp) {
    BPMarking m(net.place_count());
    for (PlaceIndex p = 0; p < net.place_count(); ++p) m[p] = colours[p];
    BPSystem sys{BPGraph(std::move(net), std::move(kinds)), std::move(m)};
    sys.validate();
    return sys;
  }
  for (NodeIndex n = 0; n < net.node_count(); ++n)
    if (net.successors(n).empty() && net.predecessors(n).empty())
      throw ValidationError("isolated node " + net.node_id(n));
  NetSystem sys{std::move(net), Marking(std::move(tokens))};
  return sys;
}

inline NetSystem parse_net(std::string_view text) {
  auto f = parse_file(text);
  if (auto* n = std::get_if<NetSystem>(&f)) return std::move(*n);
  throw ParseError(1, 1, "expected an ordinary net");
}

inline BPSystem parse_bp(std::string_view text) {
  auto f = parse_file(text);
  if (auto* b = std::get_if<BPSystem>(&f)) return std::move(*b);
  throw ParseError(1, 1, "expected a BP net");
}

inline std::string print_file(const Net& net, const Marking& m) {
  std::ostringstream os;
  os << "net ordinary \"" << net.name() << "\"\n";
  for (PlaceIndex p = 0; p < net.place_count(); ++p) os << "place " << net.place_id(p) << " tokens=" << m[p] << "\n";
  for (TransIndex t = 0; t < net.transition_count(); ++t) os << "trans " << net.transition_id(t) << "\n";
  for (const auto& a : net.arcs()) {
    if (a.from_place)
      os << "arc " << net.place_id(a.place) << " -> " << net.transition_id(a.transition) << "\n";
    else
      os << "arc " << net.transition_id(a.transition) << " -> " << net.place_id(a.place) << "\n";
  }
  return os.str();
}

inline std::string print_file(const NetSystem& s) { return print_file(s.net, s.marking); }

inline std::string print_file(const BPSystem& s) {
  const auto& net = s.net();
  std::ostringstream os;
  os << "net bp \"" << net.name() << "\"\n";
  for (PlaceIndex p = 0; p < net.place_count(); ++p) {
    os << "place " << net.place_id(p) << " tokens=[";
    std::string sep;
    for (std::uint32_t k = 0; k < s.initial[p].high; ++k, sep = ",") os << sep << "high";
    for (std::uint32_t k = 0; k < s.initial[p].low; ++k, sep = ",") os << sep << "low";
    os << "]\n";
  }
  for (TransIndex t = 0; t < net.transition_count(); ++t)
    os << "trans " << net.transition_id(t) << " kind=" << to_string(s.graph.kind(t)) << "\n";
  for (const auto& a : net.arcs()) {
    if (a.from_place)
      os << "arc " << net.place_id(a.place) << " -> " << net.transition_id(a.transition) << "\n";
    else
      os << "arc " << net.transition_id(a.transition) << " -> " << net.place_id(a.place) << "\n";
  }
  return os.str();
}

inline std::string print_file(const NetFile& f) {
  return std::visit([](const auto& s) { return print_file(s); }, f);
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFound("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline NetFile read_file(const std::string& path) { return parse_file(read_text(path)); }

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

// Splits at commas outside parentheses; strips one pair of enclosing
// brackets or braces.
inline std::vector<std::string> split_items(std::string_view s) {
  s = trim(s);
  if (s.size() >= 2 && ((s.front() == '[' && s.back() == ']') || (s.front() == '{' && s.back() == '}')))
    s = trim(s.substr(1, s.size() - 2));
  std::vector<std::string> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || (s[i] == ',' && depth == 0)) {
      auto item = trim(s.substr(start, i - start));
      if (!item.empty()) out.emplace_back(item);
      start = i + 1;
    } else if (s[i] == '(') {
      ++depth;
    } else if (s[i] == ')') {
      --depth;
    }
  }
  return out;
}

}  // namespace detail

/// Reads "t.h", "t.l" or "t.(i,j)" as printed by BPGraph::mode_id.
inline FiringMode parse_mode(const BPGraph& g, std::string_view text) {
  text = detail::trim(text);
  auto bad = [&] { return DomainMismatch("not a firing mode: '" + std::string(text) + "'"); };
  FiringMode f;
  if (text.size() > 2 && (text.substr(text.size() - 2) == ".h" || text.substr(text.size() - 2) == ".l")) {
    auto t = g.net().find_transition(text.substr(0, text.size() - 2));
    if (!t) throw bad();
    f = {*t, text.back() == 'h' ? Colour::high : Colour::low, 0, 0};
    if (f.is_high() && g.is_xor(*t)) throw bad();
  } else {
    auto open = text.rfind(".(");
    if (open == std::string_view::npos || text.back() != ')') throw bad();
    auto t = g.net().find_transition(text.substr(0, open));
    auto inner = text.substr(open + 2, text.size() - open - 3);
    auto comma = inner.find(',');
    if (!t || comma == std::string_view::npos) throw bad();
    std::uint32_t i = 0, j = 0;
    try {
      i = detail::parse_count(detail::trim(inner.substr(0, comma)), 1, 1);
      j = detail::parse_count(detail::trim(inner.substr(comma + 1)), 1, 1);
    } catch (const ParseError&) {
      throw bad();
    }
    f = {*t, Colour::high, i, j};
  }
  check_mode(g, f);
  return f;
}

inline std::vector<FiringMode> parse_modes(const BPGraph& g, std::string_view text) {
  std::vector<FiringMode> out;
  for (const auto& item : detail::split_items(text)) out.push_back(parse_mode(g, item));
  return out;
}

/// Reads "{p1:1, p2:2}"; a bare place name counts one token, unlisted
/// places hold none.
inline Marking parse_marking(const Net& net, std::string_view text) {
  Marking m(net.place_count());
  for (const auto& item : detail::split_items(text)) {
    std::string_view sv = item;
    auto colon = sv.rfind(':');
    auto name = detail::trim(sv.substr(0, colon));
    auto p = net.find_place(name);
    if (!p) throw DomainMismatch("no place '" + std::string(name) + "'");
    std::uint32_t n = 1;
    if (colon != std::string_view::npos) {
      try {
        n = detail::parse_count(detail::trim(sv.substr(colon + 1)), 1, 1);
      } catch (const ParseError&) {
        throw DomainMismatch("bad token count in '" + item + "'");
      }
    }
    m[*p] = n;
  }
  return m;
}

/// Reads "{p1:h, p2:l+l}" as printed by BPGraph::marking_string.
inline BPMarking parse_bp_marking(const BPGraph& g, std::string_view text) {
  BPMarking m(g.net().place_count());
  for (const auto& item : detail::split_items(text)) {
    std::string_view sv = item;
    auto colon = sv.rfind(':');
    if (colon == std::string_view::npos) throw DomainMismatch("expected place:tokens in '" + item + "'");
    auto name = detail::trim(sv.substr(0, colon));
    auto p = g.net().find_place(name);
    if (!p) throw DomainMismatch("no place '" + std::string(name) + "'");
    ColourCount cc;
    auto rest = detail::trim(sv.substr(colon + 1));
    while (!rest.empty()) {
      auto plus = rest.find('+');
      auto tok = detail::trim(rest.substr(0, plus));
      if (tok == "h")
        ++cc.high;
      else if (tok == "l")
        ++cc.low;
      else
        throw DomainMismatch("bad colour in '" + item + "'");
      if (plus == std::string_view::npos) break;
      rest = rest.substr(plus + 1);
    }
    m[*p] = cc;
  }
  return m;
}

}  // namespace bpsys

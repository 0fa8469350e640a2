#include <gtest/gtest.h>

#include "common.hpp"

using namespace bpsys;
using namespace testutil;

namespace {

std::pair<std::size_t, std::size_t> parse_error_at(std::string_view text) {
  try {
    parse_file(text);
  } catch (const ParseError& e) {
    return {e.line, e.column};
  }
  return {0, 0};
}

}  // namespace

TEST(Io, FixturesRoundTripCanonically) {
  for (const auto& e : fixtures::all) {
    auto f = parse_file(e.text);
    if (e.text.find('#') == std::string_view::npos) EXPECT_EQ(print_file(f), e.text) << e.name;
    EXPECT_EQ(print_file(parse_file(print_file(f))), print_file(f)) << e.name;
  }
}

TEST(Io, FixtureFilesMatchEmbeddedTexts) {
  for (const auto& e : fixtures::all) {
    std::string lower(e.name);
    for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    EXPECT_EQ(read_text(std::string(BPSYS_FIXTURE_DIR) + "/" + lower + ".net"), e.text) << e.name;
  }
}

TEST(Io, GeneratedSystemsRoundTrip) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto bps = gen::bp_system(seed, 1 + seed % 20);
    auto text = print_file(bps);
    auto back = parse_bp(text);
    EXPECT_EQ(print_file(back), text) << seed;
    EXPECT_EQ(back.initial, bps.initial) << seed;
    auto [net, m] = gen::rfc_system(seed, 8);
    auto ntext = print_file(net, m);
    EXPECT_EQ(print_file(parse_net(ntext)), ntext) << seed;
  }
}

TEST(Io, CommentsAndBlankLines) {
  auto s = parse_net(R"(# a comment
net ordinary "C"   # trailing

place p tokens=2
trans t
arc p -> t   # more
arc t -> p
)");
  EXPECT_EQ(s.net.name(), "C");
  EXPECT_EQ(s.marking, Marking(std::vector<std::uint32_t>{2}));
  EXPECT_TRUE(s.net.has_arc(s.net.place_node(0), s.net.transition_node(0)));
}

TEST(Io, BPColourLists) {
  auto b = parse_bp(R"(net bp "L"
place p tokens=[high,low,low]
trans t kind=xor
arc p -> t
arc t -> p
)");
  EXPECT_EQ(b.initial[0].high, 1u);
  EXPECT_EQ(b.initial[0].low, 2u);
  EXPECT_TRUE(b.graph.is_xor(0));
}

TEST(Io, ParseErrorPositions) {
  EXPECT_EQ(parse_error_at("place p\n"), (std::pair<std::size_t, std::size_t>{1, 1}));
  EXPECT_EQ(parse_error_at("net ordinary \"N\"\nplace p tokens=x\n"), (std::pair<std::size_t, std::size_t>{2, 16}));
  EXPECT_EQ(parse_error_at("net ordinary \"N\"\nplace p\ntrans t\narc p => t\n"),
            (std::pair<std::size_t, std::size_t>{4, 7}));
  EXPECT_EQ(parse_error_at("net ordinary \"N\"\nplace p\ntrans t\narc p -> q\n"),
            (std::pair<std::size_t, std::size_t>{4, 10}));
  EXPECT_EQ(parse_error_at("net bp \"N\"\nplace p tokens=[high,blue]\n"), (std::pair<std::size_t, std::size_t>{2, 22}));
  EXPECT_EQ(parse_error_at("net bp \"N\"\nplace p\ntrans t kind=or\n"), (std::pair<std::size_t, std::size_t>{3, 14}));
  EXPECT_EQ(parse_error_at("net ordinary N\n"), (std::pair<std::size_t, std::size_t>{1, 14}));
  EXPECT_EQ(parse_error_at("net ordinary \"N\"\nplace p\nplace p\n"), (std::pair<std::size_t, std::size_t>{3, 1}));
  EXPECT_EQ(parse_error_at("net ordinary \"N\"\nfoo p\n"), (std::pair<std::size_t, std::size_t>{2, 1}));
  EXPECT_EQ(parse_error_at("net ordinary \"N\"\nplace p\ntrans t\narc p -> p\n"),
            (std::pair<std::size_t, std::size_t>{4, 10}));
  EXPECT_EQ(parse_error_at("net ordinary \"N\"\nplace \"p\n"), (std::pair<std::size_t, std::size_t>{2, 7}));
  EXPECT_EQ(parse_error_at(""), (std::pair<std::size_t, std::size_t>{1, 1}));
  EXPECT_EQ(parse_error_at("net ordinary \"N\"\nnet ordinary \"M\"\n"), (std::pair<std::size_t, std::size_t>{2, 1}));
  EXPECT_EQ(parse_error_at("net ordinary \"N\"\nplace p\ntrans t kind=and\n"), (std::pair<std::size_t, std::size_t>{3, 9}));
}

TEST(Io, ValidationErrors) {
  // branched place
  EXPECT_THROW(parse_bp(R"(net bp "B"
place p tokens=[high]
trans t1 kind=and
trans t2 kind=and
arc p -> t1
arc p -> t2
arc t1 -> p
arc t2 -> p
)"),
               ValidationError);
  // no high token
  EXPECT_THROW(parse_bp(R"(net bp "Z"
place p tokens=[]
trans t kind=and
arc p -> t
arc t -> p
)"),
               ValidationError);
  // isolated node
  EXPECT_THROW(parse_net(R"(net ordinary "I"
place p tokens=1
place lone
trans t
arc p -> t
arc t -> p
)"),
               ValidationError);
}

TEST(Io, WrongKindRequested) {
  EXPECT_THROW(parse_net(fixtures::xdia_text), ParseError);
  EXPECT_THROW(parse_bp(fixtures::circ2_text), ParseError);
}

TEST(Io, ParseModeForms) {
  auto x = fixtures::xdia();
  EXPECT_EQ(x.graph.mode_id(parse_mode(x.graph, "x_open.(1,2)")), "x_open.(1,2)");
  EXPECT_EQ(x.graph.mode_id(parse_mode(x.graph, " tb.h ")), "tb.h");
  EXPECT_EQ(x.graph.mode_id(parse_mode(x.graph, "x_close.l")), "x_close.l");
  EXPECT_THROW(parse_mode(x.graph, "x_open.h"), DomainMismatch);
  EXPECT_THROW(parse_mode(x.graph, "tb.(1,1)"), DomainMismatch);
  EXPECT_THROW(parse_mode(x.graph, "nope.h"), DomainMismatch);
  EXPECT_THROW(parse_mode(x.graph, "x_open.(a,1)"), DomainMismatch);
  EXPECT_THROW(parse_mode(x.graph, "x_open"), DomainMismatch);
  for (const auto& f : all_modes(x.graph)) EXPECT_EQ(parse_mode(x.graph, x.graph.mode_id(f)), f);
  EXPECT_EQ(parse_modes(x.graph, "[x_open.(1,1), x_close.(1,1), tb.h]").size(), 3u);
  EXPECT_TRUE(parse_modes(x.graph, "[]").empty());
}

TEST(Io, ParseMarkingForms) {
  auto c = fixtures::circ2();
  EXPECT_EQ(parse_marking(c.net, "{p1:1, p2:3}"), Marking(std::vector<std::uint32_t>{1, 3}));
  EXPECT_EQ(parse_marking(c.net, "{p2}"), Marking(std::vector<std::uint32_t>{0, 1}));
  EXPECT_EQ(parse_marking(c.net, "{}"), Marking(2));
  EXPECT_THROW(parse_marking(c.net, "{q:1}"), DomainMismatch);
  EXPECT_THROW(parse_marking(c.net, "{p1:x}"), DomainMismatch);
  EXPECT_EQ(c.net.marking_string(parse_marking(c.net, "{p1:1,p2:3}")), "{p1:1, p2:3}");

  auto x = fixtures::xdia();
  auto m = parse_bp_marking(x.graph, "{p1:h, p2:l+l}");
  EXPECT_EQ(m[1].high, 1u);
  EXPECT_EQ(m[2].low, 2u);
  EXPECT_EQ(parse_bp_marking(x.graph, x.graph.marking_string(m)), m);
  EXPECT_THROW(parse_bp_marking(x.graph, "{p1}"), DomainMismatch);
  EXPECT_THROW(parse_bp_marking(x.graph, "{p1:x}"), DomainMismatch);
}

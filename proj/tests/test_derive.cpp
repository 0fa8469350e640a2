#include <gtest/gtest.h>

#include <map>

#include "common.hpp"

using namespace bpsys;
using namespace testutil;

namespace {

std::set<std::string> pre_ids(const Net& net, TransIndex t) { return place_ids(net, net.pre(t)); }
std::set<std::string> post_ids(const Net& net, TransIndex t) { return place_ids(net, net.post(t)); }

// Random fireable mode sequence of length up to n.
std::vector<FiringMode> walk(const BPSystem& bps, std::mt19937_64& rng, std::size_t n) {
  std::vector<FiringMode> out;
  auto m = bps.initial;
  for (std::size_t k = 0; k < n; ++k) {
    auto en = enabled_modes(bps, m);
    if (en.empty()) break;
    auto f = en[rng() % en.size()];
    m = fire_mode(bps, m, f);
    out.push_back(f);
  }
  return out;
}

}  // namespace

TEST(Flatten, XdiaCounts) {
  auto d = flatten(fixtures::xdia());
  EXPECT_EQ(d.view.kind, ViewKind::flat);
  EXPECT_EQ(d.view.net.place_count(), 8u);
  EXPECT_EQ(d.view.net.transition_count(), 8u);
  EXPECT_EQ(d.view.marking, mk(d.view.net, "{p0.h:1}"));
}

TEST(Flatten, ColStripsColour) {
  auto x = fixtures::xdia();
  auto d = flatten(x);
  auto p1l = d.view.net.place("p1.l");
  EXPECT_EQ(d.view.place_map[p1l].place, x.net().place("p1"));
  EXPECT_EQ(d.view.place_map[p1l].colour, Colour::low);
  auto t = d.view.net.transition("x_open.(1,2)");
  EXPECT_EQ(project(d.morphism, t), mode(x.graph, "x_open.(1,2)"));
  EXPECT_EQ(project(d.morphism, d.view.marking), x.initial);
}

TEST(Flatten, ArcsEncodeConsumedAndProducedTokens) {
  auto x = fixtures::xdia();
  auto d = flatten(x);
  const auto& n = d.view.net;
  auto t = n.transition("x_open.(1,2)");
  EXPECT_EQ(pre_ids(n, t), (std::set<std::string>{"p0.h"}));
  EXPECT_EQ(post_ids(n, t), (std::set<std::string>{"p1.l", "p2.h"}));
  t = n.transition("x_close.l");
  EXPECT_EQ(pre_ids(n, t), (std::set<std::string>{"p1.l", "p2.l"}));
  EXPECT_EQ(post_ids(n, t), (std::set<std::string>{"p3.l"}));
}

TEST(FlatHigh, XdiaHigh) {
  auto v = xdia_high();
  const auto& n = v.net;
  EXPECT_EQ(n.place_ids(), (std::vector<std::string>{"p0.h", "p1.h", "p2.h", "p3.h"}));
  EXPECT_EQ(n.transition_count(), 5u);
  std::map<std::string, std::pair<std::string, std::string>> arcs{{"x_open.(1,1)", {"p0.h", "p1.h"}},
                                                                 {"x_open.(1,2)", {"p0.h", "p2.h"}},
                                                                 {"x_close.(1,1)", {"p1.h", "p3.h"}},
                                                                 {"x_close.(2,1)", {"p2.h", "p3.h"}},
                                                                 {"tb.h", {"p3.h", "p0.h"}}};
  for (const auto& [id, io] : arcs) {
    auto t = n.transition(id);
    EXPECT_EQ(pre_ids(n, t), std::set<std::string>{io.first}) << id;
    EXPECT_EQ(post_ids(n, t), std::set<std::string>{io.second}) << id;
  }
  EXPECT_EQ(v.marking, mk(n, "{p0.h:1}"));
  EXPECT_TRUE(classify(n).restricted_free_choice);
}

TEST(FlatHigh, MismatchAndKeepsAllArcs) {
  auto v = mismatch_high();
  auto t = v.net.transition("a_close.h");
  EXPECT_EQ(pre_ids(v.net, t), (std::set<std::string>{"p1.h", "p2.h"}));
  EXPECT_EQ(post_ids(v.net, t), (std::set<std::string>{"p3.h"}));
}

TEST(FlatHigh, RestrictedFreeChoiceOnGenerated) {
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    auto bps = gen::bp_system(seed, 1 + seed % 16);
    EXPECT_TRUE(classify(flat_high(bps).net).restricted_free_choice) << seed;
  }
}

TEST(Skeleton, XdiaMarkingAndShape) {
  auto x = fixtures::xdia();
  auto s = skeleton_view(x.graph, bmk(x.graph, "{p1:h,p2:l}"));
  EXPECT_EQ(s.marking, mk(s.net, "{p1:1,p2:1}"));
  EXPECT_EQ(s.net.place_ids(), x.net().place_ids());
  EXPECT_EQ(s.net.transition_ids(), x.net().transition_ids());
  EXPECT_EQ(s.net.arcs().size(), x.net().arcs().size());
  EXPECT_TRUE(classify(s.net).t_system);
  EXPECT_TRUE(classify(s.net).strongly_connected);
}

TEST(Skeleton, ModeMapsToTransition) {
  auto x = fixtures::xdia();
  auto d = skeleton(x);
  EXPECT_EQ(project(d.morphism, mode(x.graph, "x_open.(1,2)")), x.net().transition("x_open"));
}

TEST(Skeleton, TSystemOnGenerated) {
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    auto bps = gen::bp_system(seed, 1 + seed % 16);
    EXPECT_TRUE(classify(skeleton(bps).view.net).t_system) << seed;
  }
}

TEST(LowView, Markings) {
  auto x = fixtures::xdia();
  auto v = low_view(x);
  EXPECT_EQ(v.marking, Marking(4));
  EXPECT_EQ(low_view(x.graph, bmk(x.graph, "{p1:h,p2:l}")).marking, mk(v.net, "{p2:1}"));
  EXPECT_EQ(v.net.arcs().size(), skeleton(x).view.net.arcs().size());
  EXPECT_EQ(v.net.place_count(), x.net().place_count());
  EXPECT_EQ(v.net.transition_count(), x.net().transition_count());
}

TEST(LowView, ColOnFlatLowSubnetMatchesLowView) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    auto bps = gen::bp_system(seed, 8);
    auto flat = flatten(bps).view;
    NodeSet low_nodes;
    for (PlaceIndex p = 0; p < flat.net.place_count(); ++p)
      if (flat.place_map[p].colour == Colour::low) low_nodes.push_back(flat.net.place_node(p));
    for (TransIndex t = 0; t < flat.net.transition_count(); ++t)
      if (!flat.trans_map[t].mode->is_high()) low_nodes.push_back(flat.net.transition_node(t));
    auto sub = induced_subnet(flat.net, make_node_set(low_nodes));
    auto low = low_view(bps);
    EXPECT_EQ(sub.net.place_count(), low.net.place_count());
    EXPECT_EQ(sub.net.transition_count(), low.net.transition_count());
    EXPECT_EQ(sub.net.arcs().size(), low.net.arcs().size());
  }
}

TEST(Project, HighSkipsLowModes) {
  auto x = fixtures::xdia();
  auto h = high_morphism(x);
  auto seq = project(h, std::vector<FiringMode>{mode(x.graph, "x_open.(1,1)"), mode(x.graph, "x_close.l")});
  ASSERT_EQ(seq.size(), 1u);
  EXPECT_EQ(h.view.net.transition_id(seq[0]), "x_open.(1,1)");
}

TEST(Project, SkelForgetsModes) {
  auto x = fixtures::xdia();
  auto s = skeleton(x).morphism;
  auto seq = project(s, parse_modes(x.graph, "[x_open.(1,2), x_close.(2,1), tb.h]"));
  std::vector<std::string> names;
  for (auto t : seq) names.push_back(x.net().transition_id(t));
  EXPECT_EQ(names, (std::vector<std::string>{"x_open", "x_close", "tb"}));
}

TEST(Project, HighDropsLowTokens) {
  auto x = fixtures::xdia();
  auto h = high_morphism(x);
  EXPECT_EQ(project(h, bmk(x.graph, "{p1:h,p2:l}")), mk(h.view.net, "{p1.h:1}"));
}

TEST(Project, WrongDomainThrows) {
  auto x = fixtures::xdia();
  auto h = high_morphism(x);
  auto col = flatten(x).morphism;
  EXPECT_THROW(project(h, Marking(4)), DomainMismatch);
  EXPECT_THROW(project(col, x.initial), DomainMismatch);
  EXPECT_THROW(project(col, mode(x.graph, "tb.h")), DomainMismatch);
  EXPECT_THROW(project(h, BPMarking(7)), DomainMismatch);
  EXPECT_THROW(project(col, Marking(3)), DomainMismatch);
}

TEST(Project, FunctorialOnRandomSequences) {
  std::mt19937_64 rng(7);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    auto bps = gen::bp_system(seed, 8);
    auto seq = walk(bps, rng, 25);
    auto end = fire_modes(bps.graph, bps.initial, seq);
    for (const auto& m : {skeleton(bps).morphism, high_morphism(bps)}) {
      auto cur = project(m, bps.initial);
      for (auto t : project(m, seq)) {
        ASSERT_TRUE(oracle::enabled(m.view.net, cur.tokens(), t)) << seed;
        cur = Marking(oracle::fire(m.view.net, cur.tokens(), t));
      }
      EXPECT_EQ(cur, project(m, end)) << seed;
    }
    // col: fire the flat images and map the end back
    auto flat = flatten(bps);
    auto fm = flat.view.marking;
    for (const auto& f : seq) {
      auto t = flat.view.transition_of(f);
      ASSERT_TRUE(t);
      ASSERT_TRUE(oracle::enabled(flat.view.net, fm.tokens(), *t));
      fm = Marking(oracle::fire(flat.view.net, fm.tokens(), *t));
    }
    EXPECT_EQ(project(flat.morphism, fm), end) << seed;
  }
}

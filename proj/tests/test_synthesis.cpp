#include <gtest/gtest.h>

#include "common.hpp"

using namespace bpsys;
using namespace testutil;

namespace {

std::vector<FiringMode> high_only(const std::vector<FiringMode>& seq) {
  std::vector<FiringMode> out;
  for (const auto& f : seq)
    if (f.is_high()) out.push_back(f);
  return out;
}

// The reconstruction over the place ids of ref, so colour suffixes vanish.
BPGraph with_place_ids(const BPGraph& g, const Net& ref) {
  Net out(g.net().name());
  for (const auto& id : ref.place_ids()) out.add_place(id);
  std::vector<TransitionKind> kinds;
  for (TransIndex t = 0; t < g.net().transition_count(); ++t) {
    auto bt = out.add_transition(g.net().transition_id(t));
    for (auto p : g.net().pre(t)) out.add_input(p, bt);
    for (auto p : g.net().post(t)) out.add_output(bt, p);
    kinds.push_back(g.is_xor(t) ? TransitionKind::xor_ : TransitionKind::and_);
  }
  return BPGraph(std::move(out), std::move(kinds));
}

}  // namespace

TEST(UniqueBPGraph, XdiaHigh) {
  auto x = fixtures::xdia();
  auto h = xdia_high();
  auto rec = unique_bp_graph(h.net);
  EXPECT_EQ(check_reconstruction(h.net, rec), std::nullopt);
  EXPECT_TRUE(equivalent_up_to_renaming(with_place_ids(rec.graph, x.net()), x.graph));
  EXPECT_EQ(rec.graph.net().transition_count(), 3u);
  auto a = rec.mode_map[h.net.transition("x_open.(1,1)")];
  auto b = rec.mode_map[h.net.transition("x_open.(1,2)")];
  EXPECT_EQ(a.transition, b.transition);
  EXPECT_TRUE(rec.graph.is_xor(a.transition));
  EXPECT_NE(a.out, b.out);
}

TEST(UniqueBPGraph, Circ2) {
  auto c = fixtures::circ2();
  auto rec = unique_bp_graph(c.net);
  EXPECT_EQ(check_reconstruction(c.net, rec), std::nullopt);
  EXPECT_EQ(rec.graph.net().transition_ids(), (std::vector<std::string>{"t1", "t2"}));
  EXPECT_EQ(rec.graph.net().place_ids(), (std::vector<std::string>{"p1", "p2"}));
}

TEST(UniqueBPGraph, MismatchHigh) {
  auto mm = fixtures::mismatch();
  auto h = mismatch_high();
  auto rec = unique_bp_graph(h.net);
  EXPECT_EQ(check_reconstruction(h.net, rec), std::nullopt);
  EXPECT_TRUE(equivalent_up_to_renaming(with_place_ids(rec.graph, mm.net()), mm.graph));
}

TEST(UniqueBPGraph, DoubleClaimRejected) {
  auto n = net_of(R"(net ordinary "CLAIM"
place p tokens=1
place q
trans t1
trans t2
trans t3
arc p -> t1
arc p -> t2
arc t1 -> q
arc t2 -> q
arc q -> t3
arc t3 -> p
)");
  EXPECT_THROW(unique_bp_graph(n), NotReconstructible);
}

TEST(UniqueBPGraph, NotRestrictedFreeChoice) {
  auto n = net_of(R"(net ordinary "NRFC"
place p tokens=1
place q
trans t1
trans t2
arc p -> t1
arc q -> t1
arc p -> t2
arc t1 -> p
arc t2 -> q
)");
  EXPECT_THROW(unique_bp_graph(n), PreconditionFailed);
}

bool has_wide_xor(const BPGraph& g) {
  for (TransIndex t = 0; t < g.net().transition_count(); ++t)
    if (g.is_xor(t) && g.net().pre(t).size() > 1 && g.net().post(t).size() > 1) return true;
  return false;
}

TEST(UniqueBPGraph, RoundTripOnGenerated) {
  std::size_t n = 0, refined = 0, wide = 0;
  for (std::uint64_t seed = 0; seed < 600; ++seed) {
    auto bps = gen::bp_system(seed, 1 + seed % 12);
    if (seed % 2) bps = binary_refine(bps);
    auto h = flat_high_view(bps.graph, BPMarking(bps.net().place_count()));
    ASSERT_TRUE(oracle::strongly_connected(h.net)) << seed;
    if (has_wide_xor(bps.graph)) {
      // its high modes are 1/1 between a branching and a merging place
      EXPECT_THROW(unique_bp_graph(h.net), NotReconstructible) << seed;
      ++wide;
      continue;
    }
    auto rec = unique_bp_graph(h.net);
    EXPECT_EQ(check_reconstruction(h.net, rec), std::nullopt) << seed;
    EXPECT_TRUE(equivalent_up_to_renaming(with_place_ids(rec.graph, bps.net()), bps.graph)) << seed;
    ++n;
    refined += seed % 2;
  }
  EXPECT_GE(refined, 300u);
  EXPECT_GT(n, 350u);
  EXPECT_GT(wide, 20u);
}

TEST(UniqueBPGraph, NotStronglyConnected) {
  auto n = net_of(R"(net ordinary "TWO"
place p tokens=1
place q tokens=1
trans t
trans u
arc p -> t
arc t -> p
arc q -> u
arc u -> q
)");
  EXPECT_THROW(unique_bp_graph(n), PreconditionFailed);
}

TEST(ReverseLift, XdiaOneStep) {
  auto x = fixtures::xdia();
  BPSystem target{x.graph, bmk(x.graph, "{p1:l,p2:h}")};
  auto rl = reverse_lift(target, Marking(std::vector<std::uint32_t>{1, 0, 0, 0}),
                         parse_modes(x.graph, "[x_open.(1,2)]"));
  EXPECT_EQ(rl.initial, x.initial);
  EXPECT_EQ(rl.sequence, parse_modes(x.graph, "[x_open.(1,2)]"));
}

TEST(ReverseLift, XdiaOpenFirstBranch) {
  auto x = fixtures::xdia();
  BPSystem target{x.graph, bmk(x.graph, "{p1:h,p2:l}")};
  auto rl = reverse_lift(target, Marking(std::vector<std::uint32_t>{1, 0, 0, 0}),
                         parse_modes(x.graph, "[x_open.(1,1)]"));
  EXPECT_EQ(rl.initial, bmk(x.graph, "{p0:h}"));
  EXPECT_EQ(rl.sequence, parse_modes(x.graph, "[x_open.(1,1)]"));
}

TEST(ReverseLift, EmptySequence) {
  auto x = fixtures::xdia();
  auto rl = reverse_lift(x, high_part(x.initial), {});
  EXPECT_TRUE(rl.sequence.empty());
  EXPECT_EQ(high_part(rl.initial), high_part(x.initial));
}

TEST(ReverseLift, LowModesBehindOpeningXor) {
  auto l = fixtures::xloop();
  BPSystem target{l.graph, bmk(l.graph, "{x1:l,x2:h}")};
  Marking mu0(l.net().place_count());
  mu0[l.net().place("y")] = 1;
  auto sigma = parse_modes(l.graph, "[tO.(1,1)]");
  auto rl = reverse_lift(target, mu0, sigma);
  EXPECT_EQ(high_part(rl.initial), mu0);
  EXPECT_EQ(fire_modes(l.graph, rl.initial, rl.sequence), target.initial);
  EXPECT_EQ(high_only(rl.sequence), sigma);
  EXPECT_EQ(rl.sequence, parse_modes(l.graph, "[tO.(1,1), tE.l, tF.l]"));
}

TEST(ReverseLift, Preconditions) {
  auto x = fixtures::xdia();
  auto one = Marking(std::vector<std::uint32_t>{1, 0, 0, 0});
  EXPECT_THROW(reverse_lift(x, one, parse_modes(x.graph, "[x_open.(1,2)]")), PreconditionFailed);
  EXPECT_THROW(reverse_lift(x, one, parse_modes(x.graph, "[x_open.l]")), DomainMismatch);
  EXPECT_THROW(reverse_lift(x, Marking(3), {}), DomainMismatch);
  auto mm = fixtures::mismatch();
  EXPECT_THROW(reverse_lift(mm, high_part(mm.initial), {}), PreconditionFailed);
}

TEST(ReverseLift, RandomWalksReplay) {
  std::size_t checked = 0, with_low = 0;
  std::mt19937_64 rng(11);
  for (std::uint64_t seed = 0; seed < 400 && checked < 100; ++seed) {
    auto bps = gen::bp_system(seed, 6);
    if (!oracle::bp_safe_and_live(bps.graph, oracle::colours(bps.initial))) continue;
    auto m = bps.initial;
    std::vector<FiringMode> walk;
    for (std::size_t k = 0; k < 8; ++k) {
      auto en = enabled_modes(bps, m);
      auto f = en[rng() % en.size()];
      m = fire_mode(bps, m, f);
      walk.push_back(f);
    }
    auto sigma = high_only(walk);
    BPSystem target{bps.graph, m};
    auto rl = reverse_lift(target, high_part(bps.initial), sigma);
    EXPECT_EQ(high_part(rl.initial), high_part(bps.initial)) << seed;
    EXPECT_EQ(fire_modes(bps.graph, rl.initial, rl.sequence), m) << seed;
    EXPECT_EQ(high_only(rl.sequence), sigma) << seed;
    for (PlaceIndex p = 0; p < rl.initial.size(); ++p) EXPECT_LE(rl.initial[p].total(), 1u) << seed;
    with_low += rl.sequence.size() > sigma.size();
    ++checked;
  }
  EXPECT_GE(checked, 100u);
  EXPECT_GT(with_low, 10u);
}

TEST(Extension, CatchesHighTokensInOneTComponent) {
  std::size_t n = 0;
  for (std::uint64_t seed = 0; seed < 2000 && n < 30; ++seed) {
    auto [net, m] = gen::rfc_system(seed, 6);
    if (!oracle::strongly_connected(net)) continue;
    if (!oracle::explore_safe(net, m.tokens()) || !oracle::live(net, m.tokens()) || oracle::frozen(net, m.tokens()))
      continue;
    Extension ext;
    try {
      ext = extend_to_live_bp(net, m);
    } catch (const NotReconstructible&) {
      continue;
    }
    ++n;
    const auto& rec = ext.reconstruction;
    EXPECT_TRUE(oracle::is_component(net, ext.t_component.nodes, 't')) << seed;
    // high tokens sit inside the component and are reachable from m
    Marking h(net.place_count());
    for (PlaceIndex p = 0; p < net.place_count(); ++p) {
      h[p] = ext.system.initial[rec.place_map[p]].high;
      if (h[p]) EXPECT_TRUE(contains(ext.t_component.nodes, net.place_node(p))) << seed;
    }
    auto g = oracle::explore(net, m.tokens(), 100000);
    EXPECT_TRUE(std::find(g.states.begin(), g.states.end(), h.tokens()) != g.states.end()) << seed;
    auto cur = m.tokens();
    for (const auto& f : ext.sigma_high) {
      auto t = std::find(rec.mode_map.begin(), rec.mode_map.end(), f) - rec.mode_map.begin();
      ASSERT_TRUE(oracle::enabled(net, cur, t)) << seed;
      cur = oracle::fire(net, cur, t);
    }
    EXPECT_EQ(cur, h.tokens()) << seed;
    // skeleton marking is the activated marking plus one token outside the component
    std::uint64_t high_total = 0, start_inside = 0;
    for (PlaceIndex p = 0; p < net.place_count(); ++p) {
      high_total += h[p];
      if (contains(ext.t_component.nodes, net.place_node(p))) start_inside += ext.skeleton_start[rec.place_map[p]];
    }
    EXPECT_EQ(high_total, start_inside) << seed;
    EXPECT_TRUE(oracle::bp_safe_and_live(ext.system.graph, oracle::colours(ext.system.initial))) << seed;
  }
  EXPECT_GE(n, 30u);
}

TEST(Extension, Examples) {
  auto x = fixtures::xdia();
  auto h = xdia_high();
  auto ext = extend_to_live_bp(h.net, h.marking);
  EXPECT_TRUE(equivalent_up_to_renaming(with_place_ids(ext.system.graph, x.net()), x.graph));
  EXPECT_EQ(verify_bp(ext.system).result, Outcome::pass);
  auto c = fixtures::circ2();
  auto ec = extend_to_live_bp(c.net, c.marking);
  EXPECT_EQ(ec.system.initial, bmk(ec.system.graph, "{p1:h}"));
  auto mm = mismatch_high();
  EXPECT_THROW(extend_to_live_bp(mm.net, mm.marking), PreconditionFailed);
}

TEST(Synthesize, Circ2) {
  auto c = fixtures::circ2();
  auto s = synthesize(c.net, c.marking);
  EXPECT_EQ(high_part(s.system.initial), c.marking);
  EXPECT_EQ(verify_bp(s.system).result, Outcome::pass);
  EXPECT_EQ(fire_modes(s.system.graph, s.system.initial, s.sequence), s.extension.system.initial);
}

TEST(Synthesize, Preconditions) {
  auto c = fixtures::circ2();
  EXPECT_THROW(synthesize(c.net, Marking(std::vector<std::uint32_t>{0, 0})), PreconditionFailed);
  EXPECT_THROW(synthesize(c.net, Marking(std::vector<std::uint32_t>{2, 0})), PreconditionFailed);
  EXPECT_THROW(synthesize(c.net, Marking(1)), DomainMismatch);
}

#include <gtest/gtest.h>

#include "common.hpp"

using namespace bpsys;
using namespace testutil;

namespace {

const std::vector<std::string> check_names{"skeleton_safe", "skeleton_live", "high_safe", "high_live",
                                           "high_frozen_free"};

BPMarking dead_of(const BPSystem& bps) {
  auto d = find_dead_marking(bps);
  if (!d) throw NotFound("not dead");
  return d->state;
}

TransIndex closing_and_in_deadlock(const BPSystem& bps, const BPMarking& m) {
  for (auto t : deadlock_transitions(bps, m))
    if (!bps.graph.is_xor(t) && bps.net().pre(t).size() == 2 && bps.net().post(t).size() == 1) return t;
  throw NotFound("no closing AND");
}

bool high_safe_live(const BPSystem& bps, const BPMarking& m) {
  auto h = flat_high_view(bps.graph, m);
  return oracle::explore_safe(h.net, h.marking.tokens()) && oracle::live(h.net, h.marking.tokens());
}

}  // namespace

TEST(Verify, XdiaPasses) {
  auto v = verify_bp(fixtures::xdia());
  EXPECT_EQ(v.result, Outcome::pass);
  ASSERT_EQ(v.checks.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(v.checks[i].name, check_names[i]);
    EXPECT_EQ(v.checks[i].outcome, Outcome::pass);
  }
  EXPECT_TRUE(brute_verdict(fixtures::xdia()));
}

TEST(Verify, MismatchFailsHighLive) {
  auto bps = fixtures::mismatch();
  auto v = verify_bp(bps);
  EXPECT_EQ(v.result, Outcome::fail);
  const auto* c = v.check("high_live");
  ASSERT_NE(c, nullptr);
  EXPECT_EQ(c->outcome, Outcome::fail);
  EXPECT_NE(c->witness.find("{p1:1}"), std::string::npos) << c->witness;
  ASSERT_TRUE(c->marking);
  EXPECT_EQ(*c->marking, mk(bps.net(), "{p1:1}"));
  EXPECT_FALSE(brute_verdict(bps));
}

TEST(Verify, FrozenFailsOnlyFrozenFreedom) {
  auto bps = fixtures::frozen();
  auto v = verify_bp(bps);
  EXPECT_EQ(v.result, Outcome::fail);
  for (const auto& c : v.checks) EXPECT_EQ(c.outcome, c.name == "high_frozen_free" ? Outcome::fail : Outcome::pass) << c.name;
  EXPECT_FALSE(v.check("high_frozen_free")->witness.empty());
  EXPECT_FALSE(brute_verdict(bps));
  auto h = flat_high(bps);
  EXPECT_TRUE(oracle::frozen(h.net, h.marking.tokens()));
  EXPECT_TRUE(oracle::live(h.net, h.marking.tokens()));
  EXPECT_TRUE(find_dead_marking(bps));
}

TEST(Verify, XloopPasses) {
  EXPECT_EQ(verify_bp(fixtures::xloop()).result, Outcome::pass);
  EXPECT_TRUE(brute_verdict(fixtures::xloop()));
}

TEST(Verify, CapsGiveInconclusive) {
  Caps caps;
  caps.states = 2;
  auto v = verify_bp(fixtures::frozen(), caps);
  EXPECT_EQ(v.result, Outcome::inconclusive);
  EXPECT_TRUE(v.caps_hit.states);
}

TEST(Verify, AgreesWithBruteForce) {
  std::size_t pass = 0, fail = 0;
  for (std::uint64_t seed = 0; seed < 400; ++seed) {
    auto bps = gen::bp_system(seed, 1 + seed % 10);
    bool ref = oracle::bp_safe_and_live(bps.graph, oracle::colours(bps.initial));
    auto v = verify_bp(bps);
    ASSERT_NE(v.result, Outcome::inconclusive) << seed;
    EXPECT_EQ(v.result == Outcome::pass, ref) << seed;
    EXPECT_EQ(brute_verdict(bps), ref) << seed;
    (ref ? pass : fail) += 1;
  }
  EXPECT_GT(pass, 40u);
  EXPECT_GT(fail, 40u);
}

TEST(BruteVerdict, Examples) {
  auto loop = parse_bp(R"(net bp "SELF"
place p tokens=[high]
trans t kind=and
arc p -> t
arc t -> p
)");
  EXPECT_TRUE(brute_verdict(loop));
  EXPECT_FALSE(brute_verdict(fixtures::mismatch()));
  EXPECT_TRUE(brute_verdict(fixtures::xdia()));
}

TEST(Chain, FrozenChainSatisfiesInvariants) {
  auto bps = fixtures::frozen();
  auto m = dead_of(bps);
  auto t = closing_and_in_deadlock(bps, m);
  auto chain = and_xor_chain(bps, m, t);
  EXPECT_EQ(oracle::chain_defect(bps, m, chain, t), std::nullopt);
  EXPECT_EQ(check_chain(bps, m, chain), std::nullopt);
  EXPECT_EQ(bps.net().transition_id(chain.first()), "tX");
  EXPECT_EQ(bps.net().transition_id(chain.last()), "tA");
  for (const auto& c : all_and_xor_chains(bps, m, t)) EXPECT_EQ(oracle::chain_defect(bps, m, c, t), std::nullopt);
}

TEST(Chain, Preconditions) {
  auto mm = fixtures::mismatch();
  auto dead = bmk(mm.graph, "{p1:h,p2:l}");
  EXPECT_THROW(and_xor_chain(mm, dead, mm.net().transition("a_close")), PreconditionFailed);
  auto x = fixtures::xdia();
  EXPECT_THROW(and_xor_chain(x, x.initial, x.net().transition("x_close")), PreconditionFailed);
  auto fz = fixtures::frozen();
  auto m = dead_of(fz);
  EXPECT_THROW(and_xor_chain(fz, m, fz.net().transition("tE")), PreconditionFailed);
}

TEST(Chain, CheckerRejectsBrokenChains) {
  auto bps = fixtures::frozen();
  auto m = dead_of(bps);
  auto chain = and_xor_chain(bps, m, closing_and_in_deadlock(bps, m));
  auto reversed = chain;
  std::reverse(reversed.entries.begin(), reversed.entries.end());
  EXPECT_TRUE(check_chain(bps, m, reversed));
  auto shortened = chain;
  shortened.entries.pop_back();
  EXPECT_TRUE(check_chain(bps, m, shortened));
}

TEST(Chain, GeneratedDeadInstances) {
  std::size_t chains = 0;
  for (std::uint64_t seed = 0; seed < 4000; ++seed) {
    auto bps = binary_refine(gen::bp_system(seed, 8));
    auto d = find_dead_marking(bps);
    if (!d || !high_safe_live(bps, d->state)) continue;
    for (auto t : deadlock_transitions(bps, d->state)) {
      if (bps.graph.is_xor(t) || bps.net().pre(t).size() != 2 || bps.net().post(t).size() != 1) continue;
      for (const auto& c : all_and_xor_chains(bps, d->state, t)) {
        EXPECT_EQ(oracle::chain_defect(bps, d->state, c, t), std::nullopt) << seed;
        ++chains;
      }
    }
  }
  EXPECT_GE(chains, 50u);
}

TEST(Chain, LaterHighModesLieInTComponents) {
  std::size_t checked = 0;
  for (std::uint64_t seed = 0; seed < 20000 && checked < 20; ++seed) {
    auto bps = binary_refine(gen::bp_system(seed, 8));
    auto d = find_dead_marking(bps);
    if (!d || !high_safe_live(bps, d->state)) continue;
    auto h = flat_high_view(bps.graph, d->state);
    if (oracle::frozen(h.net, h.marking.tokens())) continue;
    auto tcomps = components(h.net, ComponentKind::t);
    for (const auto& tc : tcomps) ASSERT_TRUE(oracle::is_component(h.net, tc.nodes, 't')) << seed;
    for (auto t : deadlock_transitions(bps, d->state)) {
      if (bps.graph.is_xor(t) || bps.net().pre(t).size() != 2 || bps.net().post(t).size() != 1) continue;
      for (const auto& chain : all_and_xor_chains(bps, d->state, t)) {
        ++checked;
        const auto& es = chain.entries;
        for (std::size_t i0 = 0; i0 < es.size(); ++i0)
          for (const auto& f : modes(bps.graph, es[i0].transition)) {
            if (!f.is_high()) continue;
            auto node = h.net.transition_node(*h.transition_of(f));
            for (const auto& tc : tcomps) {
              if (!tc.contains(node)) continue;
              for (std::size_t i = i0 + 1; i < es.size(); ++i) {
                auto later = h.transition_of(FiringMode{es[i].transition, Colour::high, 0, 0});
                EXPECT_TRUE(tc.contains(h.net.transition_node(*later))) << seed;
              }
            }
          }
      }
    }
  }
  EXPECT_GE(checked, 20u);
}

TEST(Configuration, Frozen) {
  auto bps = fixtures::frozen();
  auto m = dead_of(bps);
  auto cfg = deadlock_configuration(bps, m);
  EXPECT_GE(cfg.chains.size(), 1u);
  EXPECT_EQ(oracle::configuration_defect(bps, m, cfg), std::nullopt);
  EXPECT_EQ(check_configuration(bps, m, cfg), std::nullopt);
}

TEST(Configuration, Preconditions) {
  auto x = fixtures::xdia();
  EXPECT_THROW(deadlock_configuration(x, x.initial), PreconditionFailed);
  auto mm = fixtures::mismatch();
  EXPECT_THROW(deadlock_configuration(mm, bmk(mm.graph, "{p1:l,p2:l}")), PreconditionFailed);
}

TEST(Configuration, GeneratedDeadInstances) {
  std::size_t found = 0;
  for (std::uint64_t seed = 0; seed < 4000; ++seed) {
    auto bps = binary_refine(gen::bp_system(seed, 8));
    auto d = find_dead_marking(bps);
    if (!d || !high_safe_live(bps, d->state)) continue;
    auto s = skeleton_view(bps.graph, d->state);
    if (!oracle::explore_safe(s.net, s.marking.tokens()) || !oracle::live(s.net, s.marking.tokens())) continue;
    bool has_and = false;
    for (auto t : deadlock_transitions(bps, d->state))
      has_and = has_and || (!bps.graph.is_xor(t) && bps.net().pre(t).size() == 2);
    if (!has_and) continue;
    auto cfg = deadlock_configuration(bps, d->state);
    EXPECT_EQ(oracle::configuration_defect(bps, d->state, cfg), std::nullopt) << seed;
    ++found;
  }
  EXPECT_GE(found, 30u);
}

TEST(Explain, Examples) {
  auto mm = fixtures::mismatch();
  auto d = explain(mm);
  ASSERT_TRUE(d.dead_marking);
  EXPECT_EQ(d.dead_marking->state, bmk(mm.graph, "{p1:h,p2:l}"));
  EXPECT_EQ(d.deadlock_transitions, (std::vector<std::string>{"a_close"}));

  auto x = explain(fixtures::xdia());
  ASSERT_EQ(x.lines.size(), 1u);
  EXPECT_EQ(x.lines[0], "no defects found");

  auto f = explain(fixtures::frozen());
  ASSERT_TRUE(f.configuration);
  EXPECT_FALSE(f.chains.empty());
  bool frozen_line = false, config_line = false;
  for (const auto& l : f.lines) {
    frozen_line = frozen_line || l.rfind("high_frozen_free", 0) == 0;
    config_line = config_line || l.rfind("deadlock-configuration", 0) == 0;
  }
  EXPECT_TRUE(frozen_line);
  EXPECT_TRUE(config_line);
}

TEST(Properties, NoHiddenDeadlock) {
  std::size_t dead = 0;
  for (std::uint64_t seed = 0; seed < 600; ++seed) {
    auto bps = gen::bp_system(seed, 8);
    if (!find_dead_marking(bps)) continue;
    ++dead;
    auto v = verify_bp(bps);
    EXPECT_EQ(v.result, Outcome::fail) << seed;
  }
  EXPECT_GT(dead, 100u);
}

TEST(Properties, PassingClassIsClosed) {
  std::size_t n = 0;
  for (std::uint64_t seed = 0; seed < 300 && n < 40; ++seed) {
    auto bps = gen::bp_system(seed, 6);
    if (verify_bp(bps).result != Outcome::pass) continue;
    ++n;
    auto rg = reach_graph(bps);
    for (std::size_t i = 0; i < rg.size(); i += 1 + rg.size() / 8) {
      BPSystem alt{bps.graph, rg.state(i)};
      EXPECT_EQ(verify_bp(alt).result, Outcome::pass) << seed;
    }
    // one step backwards, restricted to safe predecessors
    for (const auto& f : all_modes(bps.graph)) {
      auto prev = unfire_mode(bps.graph, bps.initial, f);
      if (!prev || prev->high_total() == 0) continue;
      bool safe = true;
      for (PlaceIndex p = 0; p < prev->size(); ++p) safe = safe && (*prev)[p].total() <= 1;
      if (!safe) continue;
      EXPECT_EQ(verify_bp(BPSystem{bps.graph, *prev}).result, Outcome::pass) << seed;
    }
  }
  EXPECT_GT(n, 20u);
}

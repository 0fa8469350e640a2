#include <gtest/gtest.h>

#include "bpsys/difftest.hpp"
#include "common.hpp"

using namespace bpsys;
using namespace testutil;

TEST(Generator, BPSystemsDeterministic) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    EXPECT_EQ(print_file(gen::bp_system(seed, 10)), print_file(gen::bp_system(seed, 10)));
    EXPECT_EQ(print_file(gen::frozen_prone_bp_system(seed, 10)), print_file(gen::frozen_prone_bp_system(seed, 10)));
    auto [a, ma] = gen::rfc_system(seed, 8);
    auto [b, mb] = gen::rfc_system(seed, 8);
    EXPECT_EQ(print_file(a, ma), print_file(b, mb));
  }
  EXPECT_NE(print_file(gen::bp_system(1, 10)), print_file(gen::bp_system(2, 10)));
}

TEST(Generator, SizeBounds) {
  EXPECT_THROW(gen::bp_system(0, 0), PreconditionFailed);
  EXPECT_THROW(gen::bp_system(0, gen::max_size + 1), PreconditionFailed);
  for (std::size_t size = 1; size <= 20; ++size) {
    auto bps = gen::bp_system(size, size);
    EXPECT_LE(bps.net().place_count(), 2 * size + 4) << size;
  }
}

TEST(Generator, TSystemsAreTSystems) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    auto [net, m] = gen::t_system(seed, 1 + seed % 12);
    auto c = classify(net);
    EXPECT_TRUE(c.t_system) << seed;
    EXPECT_TRUE(oracle::strongly_connected(net)) << seed;
    EXPECT_EQ(m.size(), net.place_count());
  }
}

TEST(Generator, RfcSystemsAreRestrictedFreeChoice) {
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    auto [net, m] = gen::rfc_system(seed, 1 + seed % 12);
    auto c = classify(net);
    EXPECT_TRUE(c.restricted_free_choice) << seed;
    EXPECT_TRUE(c.free_choice) << seed;
  }
}

TEST(Generator, RestrictedImpliesFreeChoiceOnRandomNets) {
  std::mt19937_64 rng(3);
  std::size_t rfc = 0;
  for (int k = 0; k < 1000; ++k) {
    Net n;
    std::size_t np = 1 + rng() % 5, nt = 1 + rng() % 5;
    for (std::size_t p = 0; p < np; ++p) n.add_place("p" + std::to_string(p));
    for (std::size_t t = 0; t < nt; ++t) n.add_transition("t" + std::to_string(t));
    for (std::size_t p = 0; p < np; ++p)
      for (std::size_t t = 0; t < nt; ++t) {
        if (rng() % 3 == 0) n.add_arc("p" + std::to_string(p), "t" + std::to_string(t));
        if (rng() % 3 == 0) n.add_arc("t" + std::to_string(t), "p" + std::to_string(p));
      }
    auto c = classify(n);
    if (c.restricted_free_choice) {
      ++rfc;
      EXPECT_TRUE(c.free_choice) << k;
    }
    if (c.t_system) EXPECT_TRUE(c.restricted_free_choice) << k;
  }
  EXPECT_GT(rfc, 100u);
}

TEST(Generator, VerdictDistribution) {
  std::size_t pass = 0;
  const std::size_t n = 1000;
  for (std::uint64_t seed = 0; seed < n; ++seed) pass += brute_verdict(gen::bp_system(seed, 8));
  EXPECT_GE(pass, n / 20);
  EXPECT_GE(n - pass, n / 20);
}

TEST(Generator, FrozenProneSystemsFreeze) {
  std::size_t frozen = 0, n = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    auto bps = gen::frozen_prone_bp_system(seed, 8);
    auto h = flat_high(bps);
    if (!oracle::explore_safe(h.net, h.marking.tokens()) || !oracle::live(h.net, h.marking.tokens())) continue;
    ++n;
    frozen += oracle::frozen(h.net, h.marking.tokens());
  }
  EXPECT_GT(n, 20u);
  EXPECT_GT(frozen, n / 10);
}

TEST(Difftest, SmokeAllProperties) {
  for (const auto& p : difftest::properties()) {
    auto s = difftest::run(p.name, 30, 1, 6);
    EXPECT_TRUE(s.ok()) << p.name;
    EXPECT_EQ(s.runs, 30u);
    EXPECT_EQ(s.agree + s.disagree + s.inconclusive + s.filtered + s.violations, s.runs) << p.name;
    EXPECT_EQ(difftest::property(p.alias).name, p.name);
  }
  EXPECT_THROW(difftest::property("nope"), NotFound);
}

TEST(Difftest, Deterministic) {
  auto a = difftest::run("verdict_agreement", 50, 7, 8);
  auto b = difftest::run("thm_4_6", 50, 7, 8);
  EXPECT_EQ(a.agree, b.agree);
  EXPECT_EQ(a.inconclusive, b.inconclusive);
  EXPECT_EQ(a.property, b.property);
}

TEST(Difftest, TinyCapsAreInconclusive) {
  Caps caps;
  caps.states = 1;
  auto s = difftest::run("verdict_agreement", 20, 1, 8, caps);
  EXPECT_TRUE(s.ok());
  EXPECT_GT(s.inconclusive, 0u);
}

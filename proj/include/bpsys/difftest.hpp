#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bpsys/gen.hpp"
#include "bpsys/io.hpp"
#include "bpsys/synthesis.hpp"

namespace bpsys::difftest {

enum class Status { agree, disagree, inconclusive, filtered, violation };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::agree: return "agree";
    case Status::disagree: return "disagree";
    case Status::inconclusive: return "inconclusive";
    case Status::filtered: return "filtered";
    case Status::violation: return "violation";
  }
  return "?";
}

struct InstanceResult {
  Status status = Status::agree;
  std::string detail;
  std::optional<NetFile> instance;
  std::size_t pairs = 1;  // checked pairs; lifting checks several per instance
};

using Property = std::function<InstanceResult(std::uint64_t seed, std::size_t size, const Caps& caps)>;

namespace detail {

inline InstanceResult agree() { return {}; }
inline InstanceResult filtered(std::string why) { return {Status::filtered, std::move(why), std::nullopt}; }

inline bool safe_live(const Net& net, const Marking& m, std::size_t cap) {
  return check_safe(net, m, cap).safe && check_live(net, m, {}, cap).all_live();
}

inline bool safe_live_unfrozen(const Net& net, const Marking& m, std::size_t cap) {
  return safe_live(net, m, cap) && !frozen_tokens(net, m, cap).frozen;
}

inline InstanceResult verdict_agreement(std::uint64_t seed, std::size_t size, const Caps& caps) {
  auto bps = gen::bp_system(seed, size);
  auto v = verify_bp(bps, caps);
  if (v.result == Outcome::inconclusive) return {Status::inconclusive, "verify_bp inconclusive", bps};
  bool brute = brute_verdict(bps, caps.states);
  if (brute == (v.result == Outcome::pass)) return agree();
  return {Status::disagree, std::string("verify_bp ") + to_string(v.result) + ", brute force " + (brute ? "pass" : "fail"),
          bps};
}

inline InstanceResult live_implies_views(std::uint64_t seed, std::size_t size, const Caps& caps) {
  auto bps = gen::bp_system(seed, size);
  if (!brute_verdict(bps, caps.states)) return filtered("not live");
  auto skel = skeleton_view(bps.graph, bps.initial);
  auto high = flat_high(bps);
  if (!safe_live(skel.net, skel.marking, caps.states)) return {Status::violation, "skeleton not safe and live", bps};
  if (!safe_live(high.net, high.marking, caps.states)) return {Status::violation, "high-system not safe and live", bps};
  if (frozen_tokens(high.net, high.marking, caps.states).frozen)
    return {Status::violation, "high-system has frozen tokens", bps};
  return agree();
}

inline InstanceResult blocking_freedom(std::uint64_t seed, std::size_t size, const Caps& caps) {
  auto [net, m] = gen::rfc_system(seed, size);
  if (!is_free_choice(net) || !safe_live(net, m, caps.states)) return filtered("not a safe and live free-choice system");
  auto sfb = structural_free_from_blocking(net, caps.components).holds;
  auto frozen = frozen_tokens(net, m, caps.states).frozen;
  if (sfb == !frozen) return agree();
  return {Status::disagree,
          std::string("structural ") + (sfb ? "free" : "blocking") + ", behavioral " + (frozen ? "frozen" : "unfrozen"),
          NetSystem{net, m}};
}

inline InstanceResult well_formedness(std::uint64_t seed, std::size_t size, const Caps& caps) {
  auto [net, m] = gen::rfc_system(seed, size);
  auto structural = well_formed_restricted_fc(net, caps.circuits);
  auto oracle = well_formed_oracle(net, net.place_count(), caps.states);
  if (oracle.outcome == Tristate::inconclusive) return {Status::inconclusive, oracle.note, NetSystem{net, m}};
  if (structural.holds == (oracle.outcome == Tristate::yes)) return agree();
  return {Status::disagree,
          std::string("structural ") + (structural.holds ? "yes" : "no (" + structural.reason + ")") + ", oracle " +
              to_string(oracle.outcome),
          NetSystem{net, m}};
}

inline InstanceResult blocking_markings(std::uint64_t seed, std::size_t size, const Caps& caps) {
  auto [net, m] = gen::rfc_system(seed, size);
  if (!is_free_choice(net) || !safe_live_unfrozen(net, m, caps.states))
    return filtered("not a safe, live, frozen-free free-choice system");
  auto parts = clusters(net);
  for (const auto& c : parts.parts) {
    auto b = blocking_marking(net, m, c, caps.states);
    if (b.count != 1 || !b.home)
      return {Status::violation,
              "cluster of " + net.node_id(c.nodes.front()) + ": " + std::to_string(b.count) + " blocking markings" +
                  (b.home ? "" : ", not a home state"),
              NetSystem{net, m}};
  }
  return agree();
}

inline InstanceResult chain_construction(std::uint64_t seed, std::size_t size, const Caps& caps) {
  auto bps = binary_refine(gen::bp_system(seed, size));
  auto dead = find_dead_marking(bps, caps.states);
  if (!dead) return filtered("no dead marking");
  auto high = flat_high(bps);
  if (!safe_live(high.net, high.marking, caps.states)) return filtered("high-system not safe and live");
  std::size_t checked = 0;
  for (auto t : deadlock_transitions(bps, dead->state)) {
    if (bps.graph.is_xor(t) || !is_closing(bps.net(), t)) continue;
    auto chains = all_and_xor_chains(bps, dead->state, t, caps);
    if (chains.empty()) return {Status::violation, "no chain for " + bps.net().transition_id(t), bps};
    for (const auto& ch : chains) {
      if (auto err = check_chain(bps, dead->state, ch, caps.components))
        return {Status::violation, "chain for " + bps.net().transition_id(t) + ": " + *err, bps};
      ++checked;
    }
  }
  if (checked == 0) return filtered("no closing AND in deadlock");
  InstanceResult r;
  r.pairs = checked;
  return r;
}

inline InstanceResult no_hidden_deadlock(std::uint64_t seed, std::size_t size, const Caps& caps) {
  auto bps = gen::bp_system(seed, size);
  if (!find_dead_marking(bps, caps.states)) return filtered("no dead marking");
  auto skel = skeleton_view(bps.graph, bps.initial);
  auto high = flat_high(bps);
  if (safe_live(skel.net, skel.marking, caps.states) && safe_live_unfrozen(high.net, high.marking, caps.states))
    return {Status::violation, "dead although skeleton and high-system are safe, live and frozen-free", bps};
  return agree();
}

inline InstanceResult synthesis_round_trip(std::uint64_t seed, std::size_t size, const Caps& caps) {
  auto [net, m] = gen::rfc_system(seed, size);
  if (!is_strongly_connected(net)) return filtered("not strongly connected");
  if (!safe_live_unfrozen(net, m, caps.states)) return filtered("not safe, live and frozen-free");
  NetSystem input{net, m};
  Synthesis s;
  try {
    s = synthesize(net, m, caps);
  } catch (const NotReconstructible& e) {
    return filtered(std::string("not reconstructible: ") + e.what());
  }
  if (auto err = check_reconstruction(net, s.extension.reconstruction)) return {Status::violation, *err, input};
  auto high = flat_high(s.system);
  for (PlaceIndex p = 0; p < net.place_count(); ++p)
    if (high.marking[s.extension.reconstruction.place_map[p]] != m[p])
      return {Status::violation, "high marking differs at " + net.place_id(p), input};
  if (fire_modes(s.system.graph, s.system.initial, s.sequence) != s.extension.system.initial)
    return {Status::violation, "lifted sequence does not reach the extended marking", input};
  auto v = verify_bp(s.system, caps);
  if (v.result == Outcome::inconclusive) return {Status::inconclusive, "verify_bp inconclusive", input};
  if (v.result != Outcome::pass) return {Status::violation, "synthesized system fails verification", input};
  return agree();
}

template <class Pick>
std::vector<TransIndex> random_walk(const Net& net, Marking m, std::size_t length, Pick&& pick) {
  std::vector<TransIndex> out;
  for (std::size_t k = 0; k < length; ++k) {
    auto en = net.enabled_transitions(m);
    if (en.empty()) break;
    auto t = en[pick(en.size())];
    out.push_back(t);
    m = net.fire_unchecked(m, t);
  }
  return out;
}

inline InstanceResult lifting(std::uint64_t seed, std::size_t size, const Caps& caps) {
  auto bps = gen::bp_system(seed, size);
  if (!brute_verdict(bps, caps.states)) return filtered("not live");
  gen::Rng rng(seed * 31 + 7);
  auto pick = [&](std::size_t n) { return gen::detail::pick(rng, n); };
  auto skel = skeleton(bps);
  auto high = high_morphism(bps);
  std::size_t len = 1 + pick(2 * bps.net().place_count());
  auto sigma = random_walk(skel.view.net, skel.view.marking, len, pick);
  auto lifted = lift_skeleton_sequence(bps, bps.initial, sigma, std::nullopt, caps.states);
  std::vector<TransIndex> back;
  for (const auto& f : lifted) back.push_back(f.transition);
  if (back != sigma) return {Status::violation, "skeleton projection differs from the input sequence", bps};
  fire_modes(bps.graph, bps.initial, lifted);

  auto walk = random_walk(high.view.net, high.view.marking, len, pick);
  std::vector<FiringMode> sigma_high;
  for (auto t : walk) sigma_high.push_back(*high.view.trans_map[t].mode);
  auto lifted_high = lift_high_sequence(bps, bps.initial, sigma_high, caps.states);
  std::vector<FiringMode> kept;
  for (const auto& f : lifted_high)
    if (f.is_high()) kept.push_back(f);
  if (kept != sigma_high) return {Status::violation, "high projection differs from the input sequence", bps};
  fire_modes(bps.graph, bps.initial, lifted_high);
  InstanceResult r;
  r.pairs = 2;
  return r;
}

}  // namespace detail

struct Named {
  const char* name;
  const char* alias;
  const char* about;
  Property run;
};

inline const std::vector<Named>& properties() {
  static const std::vector<Named> all = {
      {"verdict_agreement", "thm_4_6", "verify_bp equals the brute-force verdict", detail::verdict_agreement},
      {"live_implies_views", "thm_3_6", "live BP-systems have safe, live, frozen-free views",
       detail::live_implies_views},
      {"blocking_freedom", "lemma_1_5", "structural blocking freedom equals absence of frozen tokens",
       detail::blocking_freedom},
      {"well_formedness", "thm_1_7", "handle/bridge criterion equals the well-formedness oracle",
       detail::well_formedness},
      {"blocking_marking", "lemma_1_9", "every cluster has one blocking marking, a home state",
       detail::blocking_markings},
      {"chain_construction", "alg_4_4", "every chain resolution satisfies the chain invariants",
       detail::chain_construction},
      {"no_hidden_deadlock", "lemma_4_5", "no dead system has safe, live, frozen-free views",
       detail::no_hidden_deadlock},
      {"synthesis_round_trip", "thm_4_9", "extension plus reverse lifting reproduces the input",
       detail::synthesis_round_trip},
      {"lifting", "lifting", "lifted sequences project back to their input", detail::lifting},
  };
  return all;
}

inline const Named& property(const std::string& name) {
  for (const auto& p : properties())
    if (name == p.name || name == p.alias) return p;
  throw NotFound("unknown property '" + name + "'");
}

struct Failure {
  std::uint64_t seed;
  std::size_t size;  // after minimisation
  Status status;
  std::string detail;
  std::string file;  // reproducer path, empty when not written
};

struct Summary {
  std::string property;
  std::size_t runs = 0;
  std::size_t agree = 0;
  std::size_t disagree = 0;
  std::size_t inconclusive = 0;
  std::size_t filtered = 0;
  std::size_t violations = 0;
  std::size_t pairs = 0;
  std::vector<Failure> failures;

  bool ok() const { return disagree == 0 && violations == 0; }
};

/// Runs the property, turning cap exhaustion into inconclusive and
/// theorem violations into violations.
inline InstanceResult run_one(const Named& p, std::uint64_t seed, std::size_t size, const Caps& caps) {
  try {
    return p.run(seed, size, caps);
  } catch (const CapExceeded& e) {
    return {Status::inconclusive, e.what(), std::nullopt};
  } catch (const TheoremViolation& e) {
    return {Status::violation, e.what(), std::nullopt};
  } catch (const Error& e) {
    return {Status::violation, std::string("unexpected error: ") + e.what(), std::nullopt};
  }
}

/// Smallest size at which the same seed still fails.
inline std::pair<std::size_t, InstanceResult> minimize(const Named& p, std::uint64_t seed, std::size_t size,
                                                       InstanceResult failing, const Caps& caps) {
  for (std::size_t s = 1; s < size; ++s) {
    auto r = run_one(p, seed, s, caps);
    if (r.status == Status::disagree || r.status == Status::violation) return {s, std::move(r)};
  }
  return {size, std::move(failing)};
}

/// Instance i uses seed + i. Failures are minimised and, when dump_dir is
/// set, written there as net files.
inline Summary run(const std::string& name, std::size_t n, std::uint64_t seed, std::size_t size, const Caps& caps = {},
                   const std::string& dump_dir = "") {
  const auto& p = property(name);
  Summary s;
  s.property = p.name;
  for (std::size_t i = 0; i < n; ++i) {
    auto inst_seed = seed + i;
    auto r = run_one(p, inst_seed, size, caps);
    ++s.runs;
    switch (r.status) {
      case Status::agree:
        ++s.agree;
        s.pairs += r.pairs;
        continue;
      case Status::inconclusive: ++s.inconclusive; continue;
      case Status::filtered: ++s.filtered; continue;
      case Status::disagree: ++s.disagree; break;
      case Status::violation: ++s.violations; break;
    }
    auto [min_size, min_r] = minimize(p, inst_seed, size, r, caps);
    Failure f{inst_seed, min_size, r.status, min_r.detail, {}};
    if (!dump_dir.empty() && min_r.instance) {
      std::filesystem::create_directories(dump_dir);
      f.file = (std::filesystem::path(dump_dir) /
                (s.property + "_" + std::to_string(inst_seed) + "_" + std::to_string(min_size) + ".net"))
                   .string();
      std::ofstream out(f.file);
      out << "# property " << s.property << ", seed " << inst_seed << ", size " << min_size << "\n";
      out << "# " << min_r.detail << "\n";
      out << print_file(*min_r.instance);
    }
    s.failures.push_back(std::move(f));
  }
  return s;
}

}  // namespace bpsys::difftest

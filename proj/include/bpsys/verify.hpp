#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bpsys/behavior.hpp"

namespace bpsys {

enum class Outcome { pass, fail, inconclusive, skipped };

inline const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::pass: return "pass";
    case Outcome::fail: return "fail";
    case Outcome::inconclusive: return "inconclusive";
    case Outcome::skipped: return "skipped";
  }
  return "?";
}

struct Caps {
  std::size_t states = default_state_cap;
  std::size_t circuits = default_circuit_cap;
  std::size_t components = default_component_cap;
};

struct CapsHit {
  bool states = false;
  bool circuits = false;
  bool components = false;
  bool any() const { return states || circuits || components; }
};

struct Check {
  std::string name;
  Outcome outcome = Outcome::pass;
  std::string witness;             // empty on pass
  std::optional<Marking> marking;  // witness marking of the checked net
  std::vector<std::string> trace;  // identifiers of the firings leading to it
};

/// One link of an AND/XOR-chain: a BP transition, a basic P-component of
/// the flat high-system and the component's marked place, which is a
/// preplace of the transition's high mode.
struct ChainEntry {
  TransIndex transition;
  Component component;
  PlaceIndex place;
  friend bool operator==(const ChainEntry&, const ChainEntry&) = default;
};

/// Entries k = 0..n from a closing XOR to a closing AND in deadlock.
struct AndXorChain {
  std::vector<ChainEntry> entries;

  TransIndex first() const { return entries.front().transition; }
  TransIndex last() const { return entries.back().transition; }
  friend bool operator==(const AndXorChain&, const AndXorChain&) = default;
};

/// Chains i = 0..m-1 with token-free paths beta_i from the final AND of
/// chain i to the postplace of the initial XOR of chain i+1 (mod m).
struct DeadlockConfiguration {
  std::vector<AndXorChain> chains;
  std::vector<std::vector<NodeIndex>> beta;
};

struct Verdict {
  Outcome result = Outcome::pass;
  std::vector<Check> checks;
  std::optional<StateWitness<BPMarking, FiringMode>> dead_marking;
  std::optional<DeadlockConfiguration> configuration;
  CapsHit caps_hit;

  const Check* check(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
};

namespace detail {

inline std::vector<std::string> trace_ids(const Net& net, const std::vector<TransIndex>& trace) {
  std::vector<std::string> out;
  for (auto t : trace) out.push_back(net.transition_id(t));
  return out;
}

inline std::vector<std::string> trace_ids(const BPGraph& g, const std::vector<FiringMode>& trace) {
  std::vector<std::string> out;
  for (const auto& f : trace) out.push_back(g.mode_id(f));
  return out;
}

inline std::string join(const std::vector<std::string>& items, const char* sep = ", ") {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += sep;
    out += s;
  }
  return out;
}

inline Check fail_check(std::string name, std::string witness, std::optional<Marking> m = std::nullopt,
                        std::vector<std::string> trace = {}) {
  return {std::move(name), Outcome::fail, std::move(witness), std::move(m), std::move(trace)};
}

inline Check pass_check(std::string name) { return {std::move(name), Outcome::pass, {}, std::nullopt, {}}; }

inline Check open_check(std::string name, Outcome o, std::string why) {
  return {std::move(name), o, std::move(why), std::nullopt, {}};
}

// Markings of derived views are printed with the BP place names: skeleton
// and flat high places share the BP place numbering.
inline std::string view_marking(const BPSystem& bps, const Marking& m) { return bps.net().marking_string(m); }

inline std::pair<Check, Check> skeleton_checks(const BPSystem& bps, const DerivedView& skel, const Caps& caps,
                                               CapsHit& hit) {
  const auto& net = skel.net;
  const auto& m = skel.marking;
  std::optional<Check> safe, live;
  // T-system fast path: circuits decide liveness, and for live strongly
  // connected T-systems also safeness.
  if (is_strongly_connected(net)) {
    try {
      auto l = t_system_live(net, m, caps.circuits);
      live = l.holds ? pass_check("skeleton_live")
                     : fail_check("skeleton_live", "unmarked circuit " + to_string(net, l.circuit->nodes));
      if (l.holds) {
        auto s = t_system_safe(net, m, caps.circuits);
        safe = s.holds ? pass_check("skeleton_safe")
                       : fail_check("skeleton_safe", "place " + net.place_id(*s.place) +
                                                         " lies on no circuit carrying exactly one token");
      }
    } catch (const CircuitCapExceeded&) {
      hit.circuits = true;
      live.reset();
      safe.reset();
    }
  }
  if (!safe) {
    try {
      auto s = check_safe(net, m, caps.states);
      safe = s.safe ? pass_check("skeleton_safe")
                    : fail_check("skeleton_safe", "unsafe marking " + view_marking(bps, s.witness->state),
                                 s.witness->state, trace_ids(net, s.witness->trace));
    } catch (const StateCapExceeded&) {
      hit.states = true;
      safe = open_check("skeleton_safe", Outcome::inconclusive, "state cap reached");
    }
  }
  if (!live) {
    try {
      if (!check_bounded(net, m, caps.states).bounded) {
        live = open_check("skeleton_live", Outcome::skipped, "skeleton is unbounded");
      } else {
        auto l = check_live(net, m, {}, caps.states);
        if (const auto* e = l.first_dead())
          live = fail_check("skeleton_live",
                            "transition " + net.transition_id(e->item) + " not live; stuck at " +
                                view_marking(bps, e->stuck->state),
                            e->stuck->state, trace_ids(net, e->stuck->trace));
        else
          live = pass_check("skeleton_live");
      }
    } catch (const StateCapExceeded&) {
      hit.states = true;
      live = open_check("skeleton_live", Outcome::inconclusive, "state cap reached");
    }
  }
  return {*safe, *live};
}

inline std::string frozen_text(const BPSystem& bps, const Net& net, const FrozenWitness& w) {
  return "token on " + bps.net().place_id(w.place) + " frozen at " + view_marking(bps, w.reached) + ": " +
         view_marking(bps, w.reduced) + " repeats [" + join(trace_ids(net, w.cycle)) + "]";
}

inline std::vector<Check> high_checks(const BPSystem& bps, const DerivedView& high, const Caps& caps, CapsHit& hit) {
  const auto& net = high.net;
  const auto& m = high.marking;
  Check safe, live, frozen;
  bool bounded = true;
  try {
    auto s = check_safe(net, m, caps.states);
    safe = s.safe ? pass_check("high_safe")
                  : fail_check("high_safe", "unsafe marking " + view_marking(bps, s.witness->state), s.witness->state,
                               trace_ids(net, s.witness->trace));
    if (!s.safe) bounded = check_bounded(net, m, caps.states).bounded;
  } catch (const StateCapExceeded&) {
    hit.states = true;
    safe = open_check("high_safe", Outcome::inconclusive, "state cap reached");
    bounded = false;
  }
  if (!bounded) {
    auto o = safe.outcome == Outcome::fail ? Outcome::skipped : Outcome::inconclusive;
    return {safe, open_check("high_live", o, "high-system is unbounded"),
            open_check("high_frozen_free", o, "high-system is unbounded")};
  }
  try {
    auto l = check_live(net, m, {}, caps.states);
    if (const auto* e = l.first_dead())
      live = fail_check("high_live",
                        "transition " + net.transition_id(e->item) + " not live; stuck at " +
                            view_marking(bps, e->stuck->state),
                        e->stuck->state, trace_ids(net, e->stuck->trace));
    else
      live = pass_check("high_live");
  } catch (const StateCapExceeded&) {
    hit.states = true;
    live = open_check("high_live", Outcome::inconclusive, "state cap reached");
  }

  std::optional<Check> structural;
  if (safe.outcome == Outcome::pass && live.outcome == Outcome::pass) {
    // Safe and live free-choice systems: frozen tokens are absent iff every
    // P-component meets every T-component.
    try {
      auto sfb = structural_free_from_blocking(net, caps.components);
      if (sfb.holds) {
        structural = pass_check("high_frozen_free");
      } else {
        // Pin the structural verdict to a concrete frozen token.
        auto f = frozen_tokens(net, m, caps.states);
        if (!f.frozen)
          throw TheoremViolation("structural freedom from blocking",
                                 "disjoint components found but no frozen token exists");
        structural = fail_check("high_frozen_free", frozen_text(bps, net, *f.witness), f.witness->reached,
                                trace_ids(net, f.witness->trace));
      }
    } catch (const SearchCapExceeded&) {
      hit.components = true;
    } catch (const StateCapExceeded&) {
      hit.states = true;
      structural = open_check("high_frozen_free", Outcome::inconclusive, "state cap reached");
    }
  }
  if (structural) {
    frozen = *structural;
  } else {
    try {
      auto f = frozen_tokens(net, m, caps.states);
      frozen = f.frozen ? fail_check("high_frozen_free", frozen_text(bps, net, *f.witness), f.witness->reached,
                                     trace_ids(net, f.witness->trace))
                        : pass_check("high_frozen_free");
    } catch (const StateCapExceeded&) {
      hit.states = true;
      frozen = open_check("high_frozen_free", Outcome::inconclusive, "state cap reached");
    }
  }
  return {safe, live, frozen};
}

}  // namespace detail

/// Decides "safe and live w.r.t. all high-modes" from five checks on the
/// skeleton and the flat high-system.
inline Verdict verify_bp(const BPSystem& bps, const Caps& caps = {}) {
  bps.validate();
  Verdict v;
  auto skel = skeleton_view(bps.graph, bps.initial);
  auto high = flat_high(bps);
  auto [skel_safe, skel_live] = detail::skeleton_checks(bps, skel, caps, v.caps_hit);
  v.checks.push_back(skel_safe);
  v.checks.push_back(skel_live);
  for (auto& c : detail::high_checks(bps, high, caps, v.caps_hit)) v.checks.push_back(std::move(c));

  bool any_fail = false, any_open = false;
  for (const auto& c : v.checks) {
    any_fail |= c.outcome == Outcome::fail;
    any_open |= c.outcome == Outcome::inconclusive;
  }
  v.result = any_fail ? Outcome::fail : any_open ? Outcome::inconclusive : Outcome::pass;
  if (v.result == Outcome::fail) {
    try {
      v.dead_marking = find_dead_marking(bps, caps.states);
    } catch (const StateCapExceeded&) {
      v.caps_hit.states = true;
    }
  }
  return v;
}

/// Ground truth on the coloured state space: safe and every high mode live.
inline bool brute_verdict(const BPSystem& bps, std::size_t cap = default_state_cap) {
  if (!check_safe(bps, cap).safe) return false;
  return check_live(reach_graph(bps, cap), bps.graph).live_all_high_modes();
}

inline bool is_closing(const Net& net, TransIndex t) { return net.pre(t).size() == 2 && net.post(t).size() == 1; }

/// Returns a description of the first violated chain invariant, if any.
inline std::optional<std::string> check_chain(const BPSystem& bps, const BPMarking& m, const AndXorChain& chain,
                                              std::size_t component_cap = default_component_cap) {
  const auto& net = bps.net();
  const auto& g = bps.graph;
  auto high = flat_high_view(g, m);
  if (chain.entries.size() < 2) return "chain needs length n >= 1";
  auto basics = basic_components(high.net, high.marking, ComponentKind::p, component_cap);
  auto high_node = [&](const FiringMode& f) { return high.net.transition_node(*high.transition_of(f)); };
  // The high mode of entry k that consumes the token of p_k.
  auto entry_mode = [&](const ChainEntry& e) -> std::optional<FiringMode> {
    const auto& pre = net.pre(e.transition);
    auto it = std::find(pre.begin(), pre.end(), e.place);
    if (it == pre.end()) return std::nullopt;
    if (!g.is_xor(e.transition)) return FiringMode{e.transition, Colour::high, 0, 0};
    return FiringMode{e.transition, Colour::high, static_cast<std::uint32_t>(it - pre.begin()) + 1, 1};
  };
  for (std::size_t k = 0; k < chain.entries.size(); ++k) {
    const auto& e = chain.entries[k];
    const auto& id = net.transition_id(e.transition);
    if (e.transition >= net.transition_count()) return "entry " + std::to_string(k) + " names no transition";
    if (!is_closing(net, e.transition)) return id + " is not a closing transition";
    bool want_xor = k == 0;
    if (g.is_xor(e.transition) != want_xor)
      return id + (want_xor ? " must be a closing XOR" : " must be a closing AND");
    if (std::find(basics.begin(), basics.end(), e.component) == basics.end())
      return "component of entry " + std::to_string(k) + " is not a basic P-component of the high-system";
    if (!e.component.contains(high.net.place_node(e.place)) || high.marking[e.place] != 1)
      return "place " + net.place_id(e.place) + " is not the marked place of its component";
    auto f = entry_mode(e);
    if (!f) return "place " + net.place_id(e.place) + " is no preplace of " + id;
    if (k + 1 < chain.entries.size()) {
      auto next = entry_mode(chain.entries[k + 1]);
      if (next && !e.component.contains(high_node(*next)))
        return "component of entry " + std::to_string(k) + " misses the high mode of " +
               net.transition_id(chain.entries[k + 1].transition);
    }
  }
  return std::nullopt;
}

namespace detail {

struct ChainContext {
  const BPSystem& bps;
  const BPMarking& m;
  DerivedView high;
  std::vector<Component> basics;
};

inline ChainContext chain_context(const BPSystem& bps, const BPMarking& m, TransIndex t_and, const Caps& caps) {
  const auto& net = bps.net();
  if (!is_binary(bps.graph)) throw PreconditionFailed("AND/XOR-chains need a binary BP-graph (see binary_refine)");
  if (m.size() != net.place_count()) throw DomainMismatch("marking does not match BP-graph");
  if (!is_dead(bps, m)) throw PreconditionFailed("marking is not dead");
  if (t_and >= net.transition_count()) throw DomainMismatch("unknown transition");
  auto dl = deadlock_transitions(bps, m);
  if (bps.graph.is_xor(t_and) || !is_closing(net, t_and) || std::find(dl.begin(), dl.end(), t_and) == dl.end())
    throw PreconditionFailed(net.transition_id(t_and) + " is not a closing AND in deadlock");
  auto high = flat_high_view(bps.graph, m);
  if (!check_safe(high.net, high.marking, caps.states).safe) throw PreconditionFailed("high-system is not safe");
  if (!check_live(high.net, high.marking, {}, caps.states).all_live())
    throw PreconditionFailed("high-system is not live");
  auto basics = basic_components(high.net, high.marking, ComponentKind::p, caps.components);
  return {bps, m, std::move(high), std::move(basics)};
}

/// Backward tracking from the AND in deadlock. `choose` picks the basic
/// components through a place; every pick is followed when `all` is set.
inline void track_chains(const ChainContext& cx, std::vector<ChainEntry>& stack, bool all,
                         std::vector<AndXorChain>& out) {
  const auto& net = cx.bps.net();
  const auto& H = cx.high;
  const std::size_t iteration_cap = net.place_count() + 1;
  if (stack.size() > iteration_cap)
    throw TheoremViolation("termination of AND/XOR-chain construction", "iteration cap reached");

  // t^{j,ini}: the high mode of the last tracked transition (an AND).
  const auto& last = stack.back();
  std::optional<PlaceIndex> q;
  for (auto p : net.pre(last.transition))
    if (H.marking[p] == 0) {
      if (q) throw TheoremViolation("AND/XOR-chain construction", "two unmarked preplaces");
      q = p;
    }
  if (!q) throw TheoremViolation("AND/XOR-chain construction", "no unmarked preplace at " + net.transition_id(last.transition));

  std::vector<Component> candidates;
  for (const auto& e : stack)
    if (e.component.contains(H.net.place_node(*q))) {
      candidates = {e.component};
      break;
    }
  if (candidates.empty())
    for (const auto& c : cx.basics)
      if (c.contains(H.net.place_node(*q))) candidates.push_back(c);
  if (candidates.empty())
    throw TheoremViolation("AND/XOR-chain construction", "no basic component through " + net.place_id(*q));

  for (const auto& comp : candidates) {
    std::optional<PlaceIndex> p;
    for (auto v : comp.nodes)
      if (H.net.is_place(v) && H.marking[v] > 0) p = v;
    const auto& post = H.net.place_post(*p);
    if (post.size() != 1)
      throw TheoremViolation("AND/XOR-chain construction", "marked place " + net.place_id(*p) + " branches");
    const auto& mode = *H.trans_map[post.front()].mode;
    auto t = mode.transition;
    if (!is_closing(net, t))
      throw TheoremViolation("AND/XOR-chain construction", net.transition_id(t) + " is not closing");
    stack.push_back({t, comp, *p});
    if (cx.bps.graph.is_xor(t)) {
      out.push_back(AndXorChain{{stack.rbegin(), stack.rend()}});
    } else {
      track_chains(cx, stack, all, out);
    }
    stack.pop_back();
    if (!all && !out.empty()) return;
  }
}

inline std::vector<AndXorChain> chains_for(const BPSystem& bps, const BPMarking& m, TransIndex t_and, bool all,
                                           const Caps& caps) {
  auto cx = chain_context(bps, m, t_and, caps);
  const auto& net = bps.net();
  std::optional<PlaceIndex> p0;
  for (auto p : net.pre(t_and))
    if (m[p].high > 0) p0 = p;
  std::vector<AndXorChain> out;
  std::vector<ChainEntry> stack;
  for (const auto& c : cx.basics) {
    if (!c.contains(cx.high.net.place_node(*p0))) continue;
    stack = {{t_and, c, *p0}};
    track_chains(cx, stack, all, out);
    if (!all && !out.empty()) break;
  }
  if (out.empty()) throw TheoremViolation("AND/XOR-chain construction", "no basic component through the marked preplace");
  return out;
}

}  // namespace detail

/// AND/XOR-chain ending at a closing AND in deadlock, built by backward
/// tracking with the first basic component at every choice.
inline AndXorChain and_xor_chain(const BPSystem& bps, const BPMarking& m, TransIndex t_and, const Caps& caps = {}) {
  return detail::chains_for(bps, m, t_and, false, caps).front();
}

/// Every chain the construction can return, one per resolution of its
/// component choices.
inline std::vector<AndXorChain> all_and_xor_chains(const BPSystem& bps, const BPMarking& m, TransIndex t_and,
                                                   const Caps& caps = {}) {
  return detail::chains_for(bps, m, t_and, true, caps);
}

/// Returns a description of the first violated invariant, if any.
inline std::optional<std::string> check_configuration(const BPSystem& bps, const BPMarking& m,
                                                      const DeadlockConfiguration& cfg,
                                                      std::size_t component_cap = default_component_cap) {
  const auto& net = bps.net();
  const auto size = cfg.chains.size();
  if (size == 0) return "configuration is empty";
  if (cfg.beta.size() != size) return "one path per chain required";
  auto dl = deadlock_transitions(bps, m);
  for (std::size_t i = 0; i < size; ++i) {
    const auto& chain = cfg.chains[i];
    if (auto err = check_chain(bps, m, chain, component_cap)) return "chain " + std::to_string(i) + ": " + *err;
    if (std::find(dl.begin(), dl.end(), chain.last()) == dl.end())
      return net.transition_id(chain.last()) + " is not in deadlock";
    const auto& beta = cfg.beta[i];
    const auto& next = cfg.chains[(i + 1) % size];
    if (beta.empty() || beta.front() != net.transition_node(chain.last()))
      return "path " + std::to_string(i) + " must start at " + net.transition_id(chain.last());
    if (beta.back() != net.place_node(net.post(next.first()).front()))
      return "path " + std::to_string(i) + " must end at the postplace of " + net.transition_id(next.first());
    if (make_node_set(beta).size() != beta.size()) return "path " + std::to_string(i) + " is not elementary";
    for (std::size_t k = 0; k + 1 < beta.size(); ++k)
      if (!net.has_arc(beta[k], beta[k + 1])) return "path " + std::to_string(i) + " leaves the arcs";
    for (auto v : beta)
      if (net.is_place(v) && m[v].total() > 0) return "path " + std::to_string(i) + " carries a token";
  }
  return std::nullopt;
}

/// Minimal deadlock-configuration of a dead BP-system: one chain per closing
/// AND in deadlock, linked by token-free paths, closed into a shortest cycle.
inline DeadlockConfiguration deadlock_configuration(const BPSystem& bps, const BPMarking& m, const Caps& caps = {}) {
  const auto& net = bps.net();
  if (!is_binary(bps.graph)) throw PreconditionFailed("deadlock-configurations need a binary BP-graph");
  if (!is_dead(bps, m)) throw PreconditionFailed("marking is not dead");
  auto skel = skeleton_view(bps.graph, m);
  if (!check_safe(skel.net, skel.marking, caps.states).safe) throw PreconditionFailed("skeleton is not safe");
  if (!check_live(skel.net, skel.marking, {}, caps.states).all_live()) throw PreconditionFailed("skeleton is not live");

  std::vector<AndXorChain> chains;
  for (auto t : deadlock_transitions(bps, m))
    if (!bps.graph.is_xor(t) && is_closing(net, t)) chains.push_back(and_xor_chain(bps, m, t, caps));
  if (chains.empty())
    throw TheoremViolation("structure of dead BP-systems", "no closing AND-transition in deadlock");

  auto adj = node_adjacency(net);
  auto token_free = [&](std::size_t v) { return !net.is_place(v) || m[v].total() == 0; };
  const auto r = chains.size();
  std::vector<std::vector<std::optional<std::vector<NodeIndex>>>> link(r, std::vector<std::optional<std::vector<NodeIndex>>>(r));
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j) {
      auto target = net.place_node(net.post(chains[j].first()).front());
      if (!token_free(target)) continue;
      link[i][j] = graph::shortest_path(
          adj, net.transition_node(chains[i].last()), [&](std::size_t w) { return w == target; }, token_free);
    }
  // Shortest cycle in the chain digraph.
  std::optional<std::vector<std::size_t>> best;
  for (std::size_t s = 0; s < r; ++s) {
    graph::Adjacency cadj(r);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < r; ++j)
        if (link[i][j]) cadj[i].push_back(j);
    if (link[s][s]) {
      best = std::vector<std::size_t>{s};
      break;
    }
    auto path = graph::shortest_path(cadj, s, [&](std::size_t w) { return link[w][s].has_value(); },
                                     [](std::size_t) { return true; });
    if (path && (!best || path->size() < best->size())) best = std::move(path);
  }
  if (!best) throw TheoremViolation("existence of deadlock-configurations", "chains do not close into a cycle");
  DeadlockConfiguration cfg;
  for (std::size_t k = 0; k < best->size(); ++k) {
    auto i = (*best)[k];
    auto j = (*best)[(k + 1) % best->size()];
    cfg.chains.push_back(chains[i]);
    cfg.beta.push_back(*link[i][j]);
  }
  return cfg;
}

inline std::string describe(const BPSystem& bps, const AndXorChain& chain) {
  std::string out;
  for (const auto& e : chain.entries) {
    if (!out.empty()) out += " => ";
    out += bps.net().transition_id(e.transition) + "@" + bps.net().place_id(e.place);
  }
  return out;
}

struct Diagnosis {
  Verdict verdict;
  bool refined = false;  // analysis ran on the binary refinement
  std::optional<StateWitness<BPMarking, FiringMode>> dead_marking;
  std::vector<std::string> deadlock_transitions;
  std::vector<AndXorChain> chains;
  std::optional<DeadlockConfiguration> configuration;
  std::vector<std::string> notes;
  std::vector<std::string> lines;  // human-readable report
};

/// Best-effort defect report: dead markings, deadlock-transitions, chains
/// and a deadlock-configuration, or the failing check's witness.
inline Diagnosis explain(const BPSystem& bps, const Caps& caps = {}) {
  Diagnosis d;
  d.verdict = verify_bp(bps, caps);
  auto& out = d.lines;
  if (d.verdict.result == Outcome::pass) {
    out.push_back("no defects found");
    return d;
  }
  for (const auto& c : d.verdict.checks)
    if (c.outcome != Outcome::pass) out.push_back(c.name + ": " + to_string(c.outcome) + (c.witness.empty() ? "" : " (" + c.witness + ")"));

  const BPSystem work = is_binary(bps.graph) ? bps : binary_refine(bps);
  d.refined = !is_binary(bps.graph);
  try {
    d.dead_marking = find_dead_marking(work, caps.states);
  } catch (const StateCapExceeded&) {
    d.notes.push_back("dead-marking search hit the state cap");
  }
  if (!d.dead_marking) {
    out.push_back("no reachable dead marking");
    for (const auto& n : d.notes) out.push_back(n);
    return d;
  }
  const auto& dead = d.dead_marking->state;
  out.push_back(std::string("dead marking ") + work.graph.marking_string(dead) + " after [" +
                detail::join(detail::trace_ids(work.graph, d.dead_marking->trace)) + "]" +
                (d.refined ? " (binary refinement)" : ""));
  for (auto t : deadlock_transitions(work, dead)) d.deadlock_transitions.push_back(work.net().transition_id(t));
  out.push_back("deadlock transitions: " +
                (d.deadlock_transitions.empty() ? std::string("none") : detail::join(d.deadlock_transitions)));
  for (auto t : deadlock_transitions(work, dead)) {
    if (work.graph.is_xor(t) || !is_closing(work.net(), t)) continue;
    try {
      d.chains.push_back(and_xor_chain(work, dead, t, caps));
      out.push_back("AND/XOR-chain: " + describe(work, d.chains.back()));
    } catch (const PreconditionFailed& e) {
      d.notes.push_back(std::string("no chain for ") + work.net().transition_id(t) + ": " + e.what());
      break;
    } catch (const CapExceeded& e) {
      d.notes.push_back(e.what());
      break;
    }
  }
  if (!d.chains.empty()) {
    try {
      d.configuration = deadlock_configuration(work, dead, caps);
      std::string line = "deadlock-configuration of size " + std::to_string(d.configuration->chains.size()) + ":";
      for (std::size_t i = 0; i < d.configuration->chains.size(); ++i)
        line += " [" + describe(work, d.configuration->chains[i]) + "] then " +
                to_string(work.net(), d.configuration->beta[i]) + ";";
      out.push_back(line);
    } catch (const PreconditionFailed& e) {
      d.notes.push_back(std::string("no deadlock-configuration: ") + e.what());
    } catch (const CapExceeded& e) {
      d.notes.push_back(e.what());
    }
  }
  for (const auto& n : d.notes) out.push_back(n);
  return d;
}

}  // namespace bpsys

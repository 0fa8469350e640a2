#pragma once

#include <algorithm>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "bpsys/derive.hpp"
#include "bpsys/structure.hpp"

namespace bpsys {

inline constexpr std::size_t default_state_cap = 1'000'000;

struct BPMarkingHash {
  std::size_t operator()(const BPMarking& m) const noexcept {
    std::size_t h = 0x84222325cbf29ce4ull;
    for (PlaceIndex p = 0; p < m.size(); ++p) {
      h ^= (std::size_t{m[p].high} << 16 | m[p].low) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
  }
};

/// Explicit state graph built breadth-first from a root state. State 0 is
/// the root; parents form a BFS tree, so traces to any state are shortest.
template <class State, class Label, class Hash>
class ReachGraph {
 public:
  static constexpr std::size_t none = std::numeric_limits<std::size_t>::max();

  struct Edge {
    Label label;
    std::size_t target;
  };

  std::size_t size() const { return states_.size(); }
  const State& state(std::size_t i) const { return states_[i]; }
  const std::vector<State>& states() const { return states_; }
  const std::vector<Edge>& edges(std::size_t i) const { return edges_[i]; }
  std::size_t parent(std::size_t i) const { return parent_[i]; }

  std::size_t edge_count() const {
    std::size_t n = 0;
    for (const auto& e : edges_) n += e.size();
    return n;
  }

  std::optional<std::size_t> find(const State& s) const {
    auto it = index_.find(s);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  /// Labels along the BFS tree from the root to state i.
  std::vector<Label> trace_to(std::size_t i) const {
    std::vector<Label> out;
    for (; parent_[i] != none; i = parent_[i]) out.push_back(parent_label_[i]);
    return {out.rbegin(), out.rend()};
  }

  graph::Adjacency adjacency() const {
    graph::Adjacency adj(size());
    for (std::size_t i = 0; i < size(); ++i)
      for (const auto& e : edges_[i]) adj[i].push_back(e.target);
    return adj;
  }

  /// Inserts a state; returns its index and whether it is new.
  std::pair<std::size_t, bool> insert(const State& s, std::size_t parent, const Label& label) {
    auto [it, fresh] = index_.emplace(s, states_.size());
    if (!fresh) return {it->second, false};
    states_.push_back(s);
    edges_.emplace_back();
    parent_.push_back(parent);
    parent_label_.push_back(label);
    return {it->second, true};
  }

  void add_edge(std::size_t from, const Label& label, std::size_t to) { edges_[from].push_back({label, to}); }

 private:
  std::vector<State> states_;
  std::vector<std::vector<Edge>> edges_;
  std::vector<std::size_t> parent_;
  std::vector<Label> parent_label_;
  std::unordered_map<State, std::size_t, Hash> index_;
};

using NetReachGraph = ReachGraph<Marking, TransIndex, MarkingHash>;
using BPReachGraph = ReachGraph<BPMarking, FiringMode, BPMarkingHash>;

namespace detail {

[[noreturn]] inline void state_cap_hit(std::size_t cap) {
  throw StateCapExceeded("state cap " + std::to_string(cap) + " exceeded");
}

/// Breadth-first expansion. `expand(state, emit)` calls emit(label, next)
/// for every successor in declaration order; `visit(index)` runs once per
/// new state and returns false to stop early. Returns true when complete.
template <class G, class State, class Expand, class Visit>
bool explore(G& g, const State& root, std::size_t cap, Expand expand, Visit visit) {
  using Label = std::decay_t<decltype(g.edges(0).front().label)>;
  g.insert(root, G::none, Label{});
  if (!visit(std::size_t{0})) return false;
  for (std::size_t i = 0; i < g.size(); ++i) {
    bool stop = false;
    State current = g.state(i);
    expand(current, [&](const Label& label, const State& next) {
      if (stop) return;
      auto [j, fresh] = g.insert(next, i, label);
      g.add_edge(i, label, j);
      if (fresh) {
        if (g.size() > cap) state_cap_hit(cap);
        if (!visit(j)) stop = true;
      }
    });
    if (stop) return false;
  }
  return true;
}

inline auto net_expander(const Net& net) {
  return [&net](const Marking& m, auto&& emit) {
    for (TransIndex t = 0; t < net.transition_count(); ++t)
      if (net.is_enabled(m, t)) emit(t, net.fire_unchecked(m, t));
  };
}

inline auto bp_expander(const BPGraph& g) {
  return [&g](const BPMarking& m, auto&& emit) {
    for (TransIndex t = 0; t < g.net().transition_count(); ++t)
      for (const auto& f : modes(g, t))
        if (is_mode_enabled(g, m, f)) emit(f, fire_mode(g, m, f));
  };
}

}  // namespace detail

inline NetReachGraph reach_graph(const Net& net, const Marking& m, std::size_t cap = default_state_cap) {
  NetReachGraph g;
  detail::explore(g, m, cap, detail::net_expander(net), [](std::size_t) { return true; });
  return g;
}

inline BPReachGraph reach_graph(const BPGraph& bpg, const BPMarking& m, std::size_t cap = default_state_cap) {
  BPReachGraph g;
  detail::explore(g, m, cap, detail::bp_expander(bpg), [](std::size_t) { return true; });
  return g;
}

inline BPReachGraph reach_graph(const BPSystem& bps, std::size_t cap = default_state_cap) {
  return reach_graph(bps.graph, bps.initial, cap);
}

/// Property verdict with an optional counterexample state and the shortest
/// firing sequence reaching it.
template <class State, class Label>
struct StateWitness {
  State state;
  std::vector<Label> trace;
};

template <class State, class Label>
struct SafetyResult {
  bool safe = true;
  std::optional<StateWitness<State, Label>> witness;
};

using NetSafety = SafetyResult<Marking, TransIndex>;
using BPSafety = SafetyResult<BPMarking, FiringMode>;

/// Every reachable marking puts at most one token on each place.
inline NetSafety check_safe(const Net& net, const Marking& m, std::size_t cap = default_state_cap) {
  NetReachGraph g;
  NetSafety out;
  detail::explore(g, m, cap, detail::net_expander(net), [&](std::size_t i) {
    for (auto v : g.state(i).tokens())
      if (v > 1) {
        out = {false, StateWitness<Marking, TransIndex>{g.state(i), g.trace_to(i)}};
        return false;
      }
    return true;
  });
  return out;
}

/// Safeness of a BP-system counts high and low tokens together.
inline BPSafety check_safe(const BPGraph& bpg, const BPMarking& m, std::size_t cap = default_state_cap) {
  BPReachGraph g;
  BPSafety out;
  detail::explore(g, m, cap, detail::bp_expander(bpg), [&](std::size_t i) {
    const auto& s = g.state(i);
    for (PlaceIndex p = 0; p < s.size(); ++p)
      if (s[p].total() > 1) {
        out = {false, StateWitness<BPMarking, FiringMode>{s, g.trace_to(i)}};
        return false;
      }
    return true;
  });
  return out;
}

inline BPSafety check_safe(const BPSystem& bps, std::size_t cap = default_state_cap) {
  return check_safe(bps.graph, bps.initial, cap);
}

struct BoundedResult {
  bool bounded = true;
  // smaller reaches larger, larger strictly dominates smaller
  std::optional<std::pair<Marking, Marking>> witness;
  std::vector<TransIndex> trace;  // root to the larger marking
};

/// Unbounded iff some BFS-tree path reaches a marking strictly dominating
/// one of its ancestors.
inline BoundedResult check_bounded(const Net& net, const Marking& m, std::size_t cap = default_state_cap) {
  NetReachGraph g;
  BoundedResult out;
  detail::explore(g, m, cap, detail::net_expander(net), [&](std::size_t i) {
    const auto& s = g.state(i);
    for (auto a = g.parent(i); a != NetReachGraph::none; a = g.parent(a)) {
      if (g.state(a).strictly_less(s)) {
        out = {false, std::pair{g.state(a), s}, g.trace_to(i)};
        return false;
      }
    }
    return true;
  });
  return out;
}

/// Per-item liveness with a stuck state for every non-live item.
template <class Item, class State, class Label>
struct LivenessReport {
  struct Entry {
    Item item;
    bool live = true;
    std::optional<StateWitness<State, Label>> stuck;
  };
  std::vector<Entry> entries;

  bool all_live() const {
    return std::all_of(entries.begin(), entries.end(), [](const Entry& e) { return e.live; });
  }
  const Entry* first_dead() const {
    for (const auto& e : entries)
      if (!e.live) return &e;
    return nullptr;
  }
};

using NetLiveness = LivenessReport<TransIndex, Marking, TransIndex>;

namespace detail {

/// Terminal strongly connected components of a finite state graph, each as
/// its sorted list of states. An item is live iff every terminal component
/// contains a state enabling it: from any state some terminal component is
/// reachable, and inside one every state reaches every other.
template <class G>
std::vector<std::vector<std::size_t>> terminal_sccs(const G& g) {
  auto adj = g.adjacency();
  auto sccs = graph::strongly_connected_components(adj);
  std::vector<bool> terminal(sccs.count, true);
  for (std::size_t v = 0; v < adj.size(); ++v)
    for (auto w : adj[v])
      if (sccs.component_of[v] != sccs.component_of[w]) terminal[sccs.component_of[v]] = false;
  std::vector<std::vector<std::size_t>> members(sccs.count);
  for (std::size_t v = 0; v < adj.size(); ++v)
    if (terminal[sccs.component_of[v]]) members[sccs.component_of[v]].push_back(v);
  std::vector<std::vector<std::size_t>> out;
  for (auto& m : members)
    if (!m.empty()) out.push_back(std::move(m));
  std::sort(out.begin(), out.end());
  return out;
}

template <class Report, class G, class Items, class Enables>
Report liveness(const G& g, const Items& items, Enables enables) {
  auto terminals = terminal_sccs(g);
  Report report;
  for (const auto& item : items) {
    typename Report::Entry e{item, true, std::nullopt};
    for (const auto& comp : terminals) {
      bool seen = std::any_of(comp.begin(), comp.end(), [&](std::size_t s) { return enables(s, item); });
      if (!seen) {
        e.live = false;
        e.stuck = {g.state(comp.front()), g.trace_to(comp.front())};
        break;
      }
    }
    report.entries.push_back(std::move(e));
  }
  return report;
}

template <class G, class Label>
bool has_edge_label(const G& g, std::size_t s, const Label& label) {
  for (const auto& e : g.edges(s))
    if (e.label == label) return true;
  return false;
}

}  // namespace detail

/// Liveness of the given transitions (all when empty) on a finite graph.
inline NetLiveness check_live(const NetReachGraph& g, const Net& net, std::vector<TransIndex> items = {}) {
  if (items.empty())
    for (TransIndex t = 0; t < net.transition_count(); ++t) items.push_back(t);
  return detail::liveness<NetLiveness>(
      g, items, [&](std::size_t s, TransIndex t) { return net.is_enabled(g.state(s), t); });
}

inline NetLiveness check_live(const Net& net, const Marking& m, std::vector<TransIndex> items = {},
                              std::size_t cap = default_state_cap) {
  return check_live(reach_graph(net, m, cap), net, std::move(items));
}

/// Liveness of a BP-system: every high mode (live w.r.t. all high-modes)
/// and every transition through some high mode (high-live).
struct BPLiveness {
  LivenessReport<FiringMode, BPMarking, FiringMode> high_modes;
  LivenessReport<TransIndex, BPMarking, FiringMode> high_live;

  bool live_all_high_modes() const { return high_modes.all_live(); }
  bool is_high_live() const { return high_live.all_live(); }
};

inline BPLiveness check_live(const BPReachGraph& g, const BPGraph& bpg) {
  std::vector<FiringMode> high;
  std::vector<TransIndex> transitions;
  for (const auto& f : all_modes(bpg))
    if (f.is_high()) high.push_back(f);
  for (TransIndex t = 0; t < bpg.net().transition_count(); ++t) transitions.push_back(t);
  BPLiveness out;
  out.high_modes = detail::liveness<decltype(out.high_modes)>(
      g, high, [&](std::size_t s, const FiringMode& f) { return is_mode_enabled(bpg, g.state(s), f); });
  out.high_live = detail::liveness<decltype(out.high_live)>(g, transitions, [&](std::size_t s, TransIndex t) {
    for (const auto& f : modes(bpg, t))
      if (f.is_high() && is_mode_enabled(bpg, g.state(s), f)) return true;
    return false;
  });
  return out;
}

inline BPLiveness check_live(const BPSystem& bps, std::size_t cap = default_state_cap) {
  return check_live(reach_graph(bps, cap), bps.graph);
}

/// First reachable marking (BFS order) with a deadlock-transition.
inline std::optional<StateWitness<BPMarking, FiringMode>> find_deadlock(const BPSystem& bps, const BPMarking& m,
                                                                        std::size_t cap = default_state_cap) {
  BPReachGraph g;
  std::optional<StateWitness<BPMarking, FiringMode>> out;
  detail::explore(g, m, cap, detail::bp_expander(bps.graph), [&](std::size_t i) {
    if (deadlock_transitions(bps, g.state(i)).empty()) return true;
    out = StateWitness<BPMarking, FiringMode>{g.state(i), g.trace_to(i)};
    return false;
  });
  return out;
}

/// First reachable dead marking (BFS order).
inline std::optional<StateWitness<BPMarking, FiringMode>> find_dead_marking(const BPSystem& bps,
                                                                            std::size_t cap = default_state_cap) {
  BPReachGraph g;
  std::optional<StateWitness<BPMarking, FiringMode>> out;
  detail::explore(g, bps.initial, cap, detail::bp_expander(bps.graph), [&](std::size_t i) {
    if (!is_dead(bps, g.state(i))) return true;
    out = StateWitness<BPMarking, FiringMode>{g.state(i), g.trace_to(i)};
    return false;
  });
  return out;
}

namespace detail {

/// A cycle reachable from the root: shortest prefix to a state inside a
/// non-trivial strongly connected component, then a cycle through it.
template <class G>
std::optional<std::pair<std::vector<TransIndex>, std::vector<TransIndex>>> reachable_cycle(const G& g) {
  auto adj = g.adjacency();
  auto sccs = graph::strongly_connected_components(adj);
  for (std::size_t s = 0; s < g.size(); ++s) {
    auto comp = sccs.component_of[s];
    bool cyclic = false;
    for (auto w : adj[s]) cyclic |= sccs.component_of[w] == comp;
    if (!cyclic) continue;
    // BFS inside the component from s back to s.
    std::vector<std::size_t> parent(g.size(), G::none);
    std::vector<TransIndex> via(g.size());
    std::deque<std::size_t> queue{s};
    std::vector<bool> seen(g.size(), false);
    std::optional<std::size_t> closing;
    TransIndex closing_label{};
    while (!queue.empty() && !closing) {
      auto v = queue.front();
      queue.pop_front();
      for (const auto& e : g.edges(v)) {
        if (sccs.component_of[e.target] != comp) continue;
        if (e.target == s) {
          closing = v;
          closing_label = e.label;
          break;
        }
        if (seen[e.target]) continue;
        seen[e.target] = true;
        parent[e.target] = v;
        via[e.target] = e.label;
        queue.push_back(e.target);
      }
    }
    std::vector<TransIndex> cycle{closing_label};
    for (auto v = *closing; v != s; v = parent[v]) cycle.push_back(via[v]);
    std::reverse(cycle.begin(), cycle.end());
    return std::pair{g.trace_to(s), cycle};
  }
  return std::nullopt;
}

}  // namespace detail

struct FrozenWitness {
  Marking reached;                  // reachable marking holding the frozen token
  std::vector<TransIndex> trace;    // from the initial marking to `reached`
  PlaceIndex place;                 // the frozen token's place
  Marking reduced;                  // reached minus that token
  std::vector<TransIndex> prefix;   // from `reduced` into the cycle
  std::vector<TransIndex> cycle;    // repeatable without the token
};

struct FrozenResult {
  bool frozen = false;
  std::optional<FrozenWitness> witness;
};

/// Frozen tokens: some reachable marking m1 and some marking strictly below
/// it that still admits an infinite occurrence sequence. Checking the
/// markings m1 minus one token suffices, since every smaller marking lies
/// below one of them and infinite sequences persist when tokens are added.
inline FrozenResult frozen_tokens(const Net& net, const Marking& m, std::size_t cap = default_state_cap) {
  auto bounded = check_bounded(net, m, cap);
  if (!bounded.bounded) throw PreconditionFailed("frozen-token analysis needs a bounded system");
  auto g = reach_graph(net, m, cap);
  std::unordered_set<Marking, MarkingHash> terminating;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto& reached = g.state(i);
    for (PlaceIndex p = 0; p < net.place_count(); ++p) {
      if (reached[p] == 0) continue;
      Marking reduced = reached;
      --reduced[p];
      if (terminating.count(reduced)) continue;
      auto sub = reach_graph(net, reduced, cap);
      if (auto cyc = detail::reachable_cycle(sub)) {
        return {true, FrozenWitness{reached, g.trace_to(i), p, reduced, cyc->first, cyc->second}};
      }
      terminating.insert(sub.states().begin(), sub.states().end());
    }
  }
  return {};
}

namespace detail {

inline void require_safe_live_unfrozen(const Net& net, const Marking& m, std::size_t cap, const char* what) {
  if (!check_safe(net, m, cap).safe) throw PreconditionFailed(std::string(what) + ": system is not safe");
  if (!check_live(net, m, {}, cap).all_live()) throw PreconditionFailed(std::string(what) + ": system is not live");
  if (frozen_tokens(net, m, cap).frozen) throw PreconditionFailed(std::string(what) + ": system has frozen tokens");
}

}  // namespace detail

struct BlockingMarking {
  Marking marking;
  std::vector<TransIndex> trace;
  std::size_t count = 0;  // reachable markings blocking the cluster
  bool unique = false;
  bool home = false;  // reachable from every reachable marking
};

/// The reachable marking enabling exactly the transitions of the cluster.
inline BlockingMarking blocking_marking(const Net& net, const Marking& m, const Cluster& cluster,
                                        std::size_t cap = default_state_cap) {
  detail::require_safe_live_unfrozen(net, m, cap, "blocking marking");
  auto g = reach_graph(net, m, cap);
  std::vector<bool> wanted(net.transition_count(), false);
  for (auto v : cluster.nodes)
    if (!net.is_place(v)) wanted[net.node_transition(v)] = true;
  std::vector<std::size_t> hits;
  for (std::size_t i = 0; i < g.size(); ++i) {
    bool ok = true;
    for (TransIndex t = 0; t < net.transition_count() && ok; ++t) ok = net.is_enabled(g.state(i), t) == wanted[t];
    if (ok) hits.push_back(i);
  }
  if (hits.empty()) throw TheoremViolation("existence of blocking markings", "no reachable marking blocks the cluster");
  BlockingMarking out;
  out.marking = g.state(hits.front());
  out.trace = g.trace_to(hits.front());
  out.count = hits.size();
  out.unique = hits.size() == 1;
  auto back = graph::reachable_from(graph::reversed(g.adjacency()), {hits.front()});
  out.home = std::all_of(back.begin(), back.end(), [](bool b) { return b; });
  return out;
}

struct Activation {
  std::vector<TransIndex> sequence;
  Marking marking;
};

/// Shortest occurrence sequence that avoids every transition of the
/// cluster closure of the T-component and ends in a marking whose
/// restriction to the component is live there.
inline Activation activate_t_component(const Net& net, const Marking& m, const Component& comp,
                                       std::size_t cap = default_state_cap) {
  if (comp.kind != ComponentKind::t) throw PreconditionFailed("activation needs a T-component");
  if (!check_bounded(net, m, cap).bounded) throw PreconditionFailed("activation needs a bounded system");
  if (!check_live(net, m, {}, cap).all_live()) throw PreconditionFailed("activation needs a live system");

  auto closure = cl_closure(net, comp.nodes);
  std::vector<bool> forbidden(net.transition_count(), false);
  for (auto v : closure)
    if (!net.is_place(v)) forbidden[net.node_transition(v)] = true;
  auto sub = induced_subnet(net, comp.nodes);
  std::unordered_map<Marking, bool, MarkingHash> live_cache;
  auto activated = [&](const Marking& s) {
    auto local = sub.restrict(s);
    auto it = live_cache.find(local);
    if (it != live_cache.end()) return it->second;
    bool live = check_live(sub.net, local, {}, cap).all_live();
    live_cache.emplace(local, live);
    return live;
  };

  NetReachGraph g;
  std::optional<std::size_t> hit;
  auto expand = [&](const Marking& s, auto&& emit) {
    for (TransIndex t = 0; t < net.transition_count(); ++t)
      if (!forbidden[t] && net.is_enabled(s, t)) emit(t, net.fire_unchecked(s, t));
  };
  detail::explore(g, m, cap, expand, [&](std::size_t i) {
    if (!activated(g.state(i))) return true;
    hit = i;
    return false;
  });
  if (!hit) throw TheoremViolation("T-component activation", "no activating sequence avoids the cluster closure");
  return {g.trace_to(*hit), g.state(*hit)};
}

enum class Tristate { yes, no, inconclusive };

inline const char* to_string(Tristate t) {
  switch (t) {
    case Tristate::yes: return "yes";
    case Tristate::no: return "no";
    case Tristate::inconclusive: return "inconclusive";
  }
  return "?";
}

struct OracleResult {
  Tristate outcome = Tristate::inconclusive;
  std::optional<Marking> witness;  // live and bounded marking
  std::size_t markings_checked = 0;
  std::string note;
};

/// Behavioral well-formedness: searches markings by ascending token count
/// (at most `budget`, default |P|) for one that is live and bounded.
/// Exhausting the search with budget >= |P| on a free-choice net is a
/// definite "no", since well-formed free-choice nets have live and safe
/// markings. Any other exhaustion, or a state cap hit without witness, is
/// inconclusive.
inline OracleResult well_formed_oracle(const Net& net, std::optional<std::size_t> budget = std::nullopt,
                                       std::size_t cap = default_state_cap) {
  const std::size_t places = net.place_count();
  const std::size_t limit = budget.value_or(places);
  OracleResult out;
  std::vector<Marking> unbounded;
  bool capped = false;

  auto dominated = [&](const Marking& m) {
    return std::any_of(unbounded.begin(), unbounded.end(), [&](const Marking& u) { return u.covered_by(m); });
  };
  auto test = [&](const Marking& m) {
    ++out.markings_checked;
    if (dominated(m)) return false;
    try {
      auto b = check_bounded(net, m, cap);
      if (!b.bounded) {
        unbounded.push_back(m);
        return false;
      }
      return check_live(net, m, {}, cap).all_live();
    } catch (const StateCapExceeded&) {
      capped = true;
      return false;
    }
  };

  Marking m(places);
  // Depth-first generation of all markings with exactly `left` more tokens
  // on places >= p, in lexicographic order.
  std::function<bool(std::size_t, std::size_t)> generate = [&](std::size_t p, std::size_t left) -> bool {
    if (p + 1 == places) {
      m[p] = static_cast<std::uint32_t>(left);
      if (test(m)) return true;
      m[p] = 0;
      return false;
    }
    for (std::size_t k = left + 1; k-- > 0;) {
      m[p] = static_cast<std::uint32_t>(k);
      if (generate(p + 1, left - k)) return true;
    }
    m[p] = 0;
    return false;
  };
  for (std::size_t total = 0; total <= limit && places > 0; ++total) {
    if (generate(0, total)) {
      out.outcome = Tristate::yes;
      out.witness = m;
      return out;
    }
  }
  if (capped) {
    out.note = "state cap reached for some markings";
  } else if (limit < places) {
    out.note = "token budget below |P|";
  } else if (!is_free_choice(net)) {
    out.note = "exhaustion is only conclusive for free-choice nets";
  } else {
    out.outcome = Tristate::no;
    out.note = "no live and bounded marking up to " + std::to_string(limit) + " tokens";
  }
  return out;
}

namespace detail {

inline void check_path(const Net& net, const std::vector<NodeIndex>& path) {
  for (auto v : path)
    if (v >= net.node_count()) throw DomainMismatch("path leaves the net");
  for (std::size_t i = 0; i + 1 < path.size(); ++i)
    if (!net.has_arc(path[i], path[i + 1]))
      throw PreconditionFailed("no arc " + net.node_id(path[i]) + " -> " + net.node_id(path[i + 1]));
}

}  // namespace detail

/// Lifts a skeleton occurrence sequence to firing modes of the BP-system.
/// With a path gamma (starting at a high-marked place), the high token on
/// its first place is routed along gamma, so every transition of gamma
/// fires a high mode.
inline std::vector<FiringMode> lift_skeleton_sequence(const BPSystem& bps, const BPMarking& m,
                                                      const std::vector<TransIndex>& sigma,
                                                      const std::optional<std::vector<NodeIndex>>& gamma = std::nullopt,
                                                      std::size_t cap = default_state_cap) {
  const auto& net = bps.net();
  if (m.size() != net.place_count()) throw DomainMismatch("marking does not match BP-graph");
  try {
    fire_sequence(net, uncoloured(m), sigma);
  } catch (const NotEnabled& e) {
    throw PreconditionFailed(std::string("sequence is not fireable in the skeleton: ") + e.what());
  }
  if (auto dl = find_deadlock(bps, m, cap))
    throw PreconditionFailed("BP-system is not deadlock-free: " + bps.graph.marking_string(dl->state));

  std::vector<NodeIndex> route;
  if (gamma && !gamma->empty()) {
    route = *gamma;
    detail::check_path(net, route);
    if (!net.is_place(route.front()) || m[route.front()].high == 0)
      throw PreconditionFailed("path must start at a high-marked place");
    for (auto v : route)
      if (!net.is_place(v) && std::find(sigma.begin(), sigma.end(), net.node_transition(v)) == sigma.end())
        throw PreconditionFailed("path transition " + net.node_id(v) + " does not occur in the sequence");
  }
  // The tracked high token sits on route[pos]; it has passed the whole
  // route once pos reaches `target`.
  const std::size_t target = route.empty() ? 0 : (net.is_place(route.back()) ? route.size() - 1 : route.size());

  std::set<std::tuple<std::size_t, BPMarking, std::size_t>> failed;
  std::vector<FiringMode> out;
  std::function<bool(std::size_t, const BPMarking&, std::size_t)> search = [&](std::size_t k, const BPMarking& cur,
                                                                              std::size_t pos) -> bool {
    if (k == sigma.size()) return pos == target;
    if (failed.count({k, cur, pos})) return false;
    auto t = sigma[k];
    bool on_route = pos < target && route[pos + 1] == net.transition_node(t);
    for (const auto& f : modes(bps.graph, t)) {
      if (!is_mode_enabled(bps.graph, cur, f)) continue;
      auto next_pos = pos;
      if (on_route && f.is_high()) {
        const auto& pre = net.pre(t);
        auto from = static_cast<std::uint32_t>(std::find(pre.begin(), pre.end(), route[pos]) - pre.begin()) + 1;
        bool takes = !bps.graph.is_xor(t) || from == f.in;
        if (takes && pos + 2 < route.size()) {
          const auto& post = net.post(t);
          auto to = static_cast<std::uint32_t>(std::find(post.begin(), post.end(), route[pos + 2]) - post.begin()) + 1;
          if (bps.graph.is_xor(t) && to != f.out) continue;
          next_pos = pos + 2;
        } else if (takes) {
          next_pos = target;
        }
      }
      out.push_back(f);
      if (search(k + 1, fire_mode(bps.graph, cur, f), next_pos)) return true;
      out.pop_back();
    }
    failed.insert({k, cur, pos});
    return false;
  };
  if (!search(0, m, 0)) throw TheoremViolation("skeleton lifting", "no lift of the skeleton sequence found");
  return out;
}

/// Lifts an occurrence sequence of the flat high-system (given as high
/// modes) to the BP-system, interleaving low modes where needed. Returns a
/// shortest such lift.
inline std::vector<FiringMode> lift_high_sequence(const BPSystem& bps, const BPMarking& m,
                                                  const std::vector<FiringMode>& sigma_high,
                                                  std::size_t cap = default_state_cap) {
  if (m.size() != bps.net().place_count()) throw DomainMismatch("marking does not match BP-graph");
  for (const auto& f : sigma_high) {
    check_mode(bps.graph, f);
    if (!f.is_high()) throw DomainMismatch("high sequence contains the low mode " + bps.graph.mode_id(f));
  }
  {
    auto view = flat_high_view(bps.graph, m);
    Marking h = view.marking;
    for (const auto& f : sigma_high) {
      auto t = *view.transition_of(f);
      if (!view.net.is_enabled(h, t))
        throw PreconditionFailed("sequence is not fireable in the high-system at " + bps.graph.mode_id(f));
      h = view.net.fire_unchecked(h, t);
    }
  }
  auto skel = skeleton_view(bps.graph, m);
  if (!check_safe(skel.net, skel.marking, cap).safe) throw PreconditionFailed("skeleton is not safe");
  if (!check_live(skel.net, skel.marking, {}, cap).all_live()) throw PreconditionFailed("skeleton is not live");
  if (auto dl = find_deadlock(bps, m, cap))
    throw PreconditionFailed("BP-system is not deadlock-free: " + bps.graph.marking_string(dl->state));

  using Node = std::pair<BPMarking, std::size_t>;
  std::map<Node, std::pair<Node, FiringMode>> parent;
  std::deque<Node> queue{{m, 0}};
  std::set<Node> seen{{m, 0}};
  while (!queue.empty()) {
    auto node = queue.front();
    queue.pop_front();
    if (node.second == sigma_high.size()) {
      std::vector<FiringMode> out;
      for (auto cur = node; cur != Node{m, 0};) {
        const auto& [prev, f] = parent.at(cur);
        out.push_back(f);
        cur = prev;
      }
      return {out.rbegin(), out.rend()};
    }
    for (TransIndex t = 0; t < bps.net().transition_count(); ++t) {
      for (const auto& f : modes(bps.graph, t)) {
        bool matches = f == sigma_high[node.second];
        if (f.is_high() && !matches) continue;
        if (!is_mode_enabled(bps.graph, node.first, f)) continue;
        Node next{fire_mode(bps.graph, node.first, f), node.second + (matches ? 1 : 0)};
        if (!seen.insert(next).second) continue;
        if (seen.size() > cap) detail::state_cap_hit(cap);
        parent.emplace(next, std::pair{node, f});
        queue.push_back(std::move(next));
      }
    }
  }
  throw TheoremViolation("high lifting", "no lift of the high sequence found");
}

}  // namespace bpsys

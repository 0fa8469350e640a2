#pragma once

#include <algorithm>
#include <deque>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bpsys/net_core.hpp"

namespace bpsys {

inline constexpr std::size_t default_circuit_cap = 10'000;
inline constexpr std::size_t default_component_cap = 10'000;
inline constexpr std::size_t default_siphon_cap = 1'000'000;

/// Elementary circuit as a cyclic node sequence following arc direction,
/// rotated to start at its smallest node.
struct Circuit {
  std::vector<NodeIndex> nodes;

  NodeSet node_set() const { return make_node_set(nodes); }
  bool contains(NodeIndex n) const { return std::find(nodes.begin(), nodes.end(), n) != nodes.end(); }
  friend bool operator==(const Circuit&, const Circuit&) = default;
};

inline std::string to_string(const Net& net, const std::vector<NodeIndex>& path) {
  std::string out;
  for (auto v : path) {
    if (!out.empty()) out += " -> ";
    out += net.node_id(v);
  }
  return out;
}

inline std::uint64_t token_count(const Net& net, const NodeSet& nodes, const Marking& m) {
  std::uint64_t n = 0;
  for (auto v : nodes)
    if (net.is_place(v)) n += m[v];
  return n;
}

/// Johnson's algorithm over the node graph of the net.
inline std::vector<Circuit> elementary_circuits(const Net& net, std::size_t cap = default_circuit_cap) {
  const std::size_t n = net.node_count();
  auto adj = node_adjacency(net);
  std::vector<Circuit> out;

  std::vector<bool> blocked(n, false);
  std::vector<std::vector<std::size_t>> block_map(n);
  std::vector<std::size_t> stack;

  std::function<void(std::size_t)> unblock = [&](std::size_t u) {
    blocked[u] = false;
    while (!block_map[u].empty()) {
      auto w = block_map[u].back();
      block_map[u].pop_back();
      if (blocked[w]) unblock(w);
    }
  };

  for (std::size_t s = 0; s < n; ++s) {
    // Subgraph induced by nodes >= s; only the SCC of s matters.
    graph::Adjacency sub(n);
    for (std::size_t v = s; v < n; ++v)
      for (auto w : adj[v])
        if (w >= s) sub[v].push_back(w);
    auto sccs = graph::strongly_connected_components(sub);
    auto comp = sccs.component_of[s];
    bool has_cycle = false;
    for (auto w : sub[s]) has_cycle |= sccs.component_of[w] == comp;
    if (!has_cycle) continue;
    auto in_comp = [&](std::size_t v) { return v >= s && sccs.component_of[v] == comp; };

    for (std::size_t v = s; v < n; ++v) {
      blocked[v] = false;
      block_map[v].clear();
    }
    std::function<bool(std::size_t)> circuit = [&](std::size_t v) -> bool {
      bool found = false;
      stack.push_back(v);
      blocked[v] = true;
      for (auto w : sub[v]) {
        if (!in_comp(w)) continue;
        if (w == s) {
          if (out.size() >= cap) throw CircuitCapExceeded("circuit cap " + std::to_string(cap) + " exceeded");
          out.push_back(Circuit{stack});
          found = true;
        } else if (!blocked[w] && circuit(w)) {
          found = true;
        }
      }
      if (found) {
        unblock(v);
      } else {
        for (auto w : sub[v])
          if (in_comp(w) && std::find(block_map[w].begin(), block_map[w].end(), v) == block_map[w].end())
            block_map[w].push_back(v);
      }
      stack.pop_back();
      return found;
    };
    circuit(s);
  }
  return out;
}

enum class ComponentKind { p, t };

inline const char* to_string(ComponentKind k) { return k == ComponentKind::p ? "P" : "T"; }

/// P- or T-component given by its node set.
struct Component {
  ComponentKind kind;
  NodeSet nodes;

  std::vector<PlaceIndex> places(const Net& net) const {
    std::vector<PlaceIndex> out;
    for (auto v : nodes)
      if (net.is_place(v)) out.push_back(net.node_place(v));
    return out;
  }
  std::vector<TransIndex> transitions(const Net& net) const {
    std::vector<TransIndex> out;
    for (auto v : nodes)
      if (!net.is_place(v)) out.push_back(net.node_transition(v));
    return out;
  }
  bool contains(NodeIndex n) const { return bpsys::contains(nodes, n); }
  friend bool operator==(const Component&, const Component&) = default;
};

namespace detail {

// Both component kinds share one search: generators are places (P) or
// transitions (T); every neighbour of a chosen generator becomes a
// constraint node that needs exactly one in-neighbour and exactly one
// out-neighbour among the chosen generators.
class ComponentSearch {
 public:
  ComponentSearch(const Net& net, ComponentKind kind, std::size_t cap) : net_(net), kind_(kind), cap_(cap) {}

  std::vector<Component> run() {
    auto count = kind_ == ComponentKind::p ? net_.place_count() : net_.transition_count();
    for (std::size_t seed = 0; seed < count; ++seed) {
      std::vector<int> state(count, undecided);
      for (std::size_t g = 0; g < seed; ++g) state[g] = excluded;
      state[seed] = included;
      search(std::move(state));
    }
    return std::move(found_);
  }

 private:
  static constexpr int undecided = 0, included = 1, excluded = 2;

  NodeIndex gen_node(std::size_t g) const {
    return kind_ == ComponentKind::p ? net_.place_node(g) : net_.transition_node(g);
  }
  NodeIndex con_node(std::size_t c) const {
    return kind_ == ComponentKind::p ? net_.transition_node(c) : net_.place_node(c);
  }
  const std::vector<std::size_t>& con_in(std::size_t c) const {
    return kind_ == ComponentKind::p ? net_.pre(c) : net_.place_pre(c);
  }
  const std::vector<std::size_t>& con_out(std::size_t c) const {
    return kind_ == ComponentKind::p ? net_.post(c) : net_.place_post(c);
  }
  std::vector<std::size_t> gen_neighbours(std::size_t g) const {
    std::vector<std::size_t> out;
    if (kind_ == ComponentKind::p) {
      out = net_.place_pre(g);
      out.insert(out.end(), net_.place_post(g).begin(), net_.place_post(g).end());
    } else {
      out = net_.pre(g);
      out.insert(out.end(), net_.post(g).begin(), net_.post(g).end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  // Returns false on conflict. Otherwise fills `open` with a side of a
  // constraint node that still has no chosen generator.
  bool propagate(std::vector<int>& state, std::vector<std::size_t>& open) const {
    for (bool changed = true; changed;) {
      changed = false;
      open.clear();
      std::vector<bool> active(kind_ == ComponentKind::p ? net_.transition_count() : net_.place_count(), false);
      for (std::size_t g = 0; g < state.size(); ++g)
        if (state[g] == included)
          for (auto c : gen_neighbours(g)) active[c] = true;
      for (std::size_t c = 0; c < active.size(); ++c) {
        if (!active[c]) continue;
        for (const auto* side : {&con_in(c), &con_out(c)}) {
          std::size_t chosen = 0, free = 0;
          std::size_t last_free = 0;
          for (auto g : *side) {
            if (state[g] == included) ++chosen;
            if (state[g] == undecided) {
              ++free;
              last_free = g;
            }
          }
          if (chosen > 1) return false;
          if (chosen == 1) {
            for (auto g : *side)
              if (state[g] == undecided) {
                state[g] = excluded;
                changed = true;
              }
          } else if (free == 0) {
            return false;
          } else if (free == 1) {
            state[last_free] = included;
            changed = true;
          } else if (open.empty()) {
            open = *side;
          }
        }
      }
    }
    return true;
  }

  void search(std::vector<int> state) {
    std::vector<std::size_t> open;
    if (!propagate(state, open)) return;
    if (open.empty()) {
      if (++candidates_ > cap_)
        throw SearchCapExceeded("component search cap " + std::to_string(cap_) + " exceeded");
      emit(state);
      return;
    }
    for (auto g : open) {
      if (state[g] != undecided) continue;
      auto next = state;
      next[g] = included;
      search(next);
      state[g] = excluded;
    }
  }

  void emit(const std::vector<int>& state) {
    NodeSet nodes;
    for (std::size_t g = 0; g < state.size(); ++g) {
      if (state[g] != included) continue;
      nodes.push_back(gen_node(g));
      for (auto c : gen_neighbours(g)) nodes.push_back(con_node(c));
    }
    nodes = make_node_set(std::move(nodes));
    if (!graph::strongly_connected(induced_adjacency(net_, nodes))) return;
    Component comp{kind_, std::move(nodes)};
    if (std::find(found_.begin(), found_.end(), comp) == found_.end()) found_.push_back(std::move(comp));
  }

  const Net& net_;
  ComponentKind kind_;
  std::size_t cap_;
  std::size_t candidates_ = 0;
  std::vector<Component> found_;
};

}  // namespace detail

/// All P-components (or T-components) of the net.
inline std::vector<Component> components(const Net& net, ComponentKind kind,
                                         std::size_t cap = default_component_cap) {
  return detail::ComponentSearch(net, kind, cap).run();
}

/// Components carrying exactly one token.
inline std::vector<Component> basic_components(const Net& net, const Marking& m,
                                               ComponentKind kind = ComponentKind::p,
                                               std::size_t cap = default_component_cap) {
  std::vector<Component> out;
  for (auto& c : components(net, kind, cap))
    if (token_count(net, c.nodes, m) == 1) out.push_back(std::move(c));
  return out;
}

inline std::vector<Circuit> basic_circuits(const Net& net, const Marking& m, std::size_t cap = default_circuit_cap) {
  std::vector<Circuit> out;
  for (auto& c : elementary_circuits(net, cap))
    if (token_count(net, c.node_set(), m) == 1) out.push_back(std::move(c));
  return out;
}

struct BlockingFreedom {
  bool holds = true;
  std::optional<std::pair<Component, Component>> witness;  // disjoint P- and T-component
};

/// Every P-component meets every T-component.
inline BlockingFreedom structural_free_from_blocking(const Net& net, std::size_t cap = default_component_cap) {
  auto ps = components(net, ComponentKind::p, cap);
  auto ts = components(net, ComponentKind::t, cap);
  for (const auto& p : ps)
    for (const auto& t : ts)
      if (set_intersection(p.nodes, t.nodes).empty()) return {false, std::pair{p, t}};
  return {};
}

enum class HandleKind { tp, pt, tt, pp };

inline const char* to_string(HandleKind k) {
  switch (k) {
    case HandleKind::tp: return "TP";
    case HandleKind::pt: return "PT";
    case HandleKind::tt: return "TT";
    case HandleKind::pp: return "PP";
  }
  return "?";
}

/// Elementary path x0 ... xk (k >= 1) meeting the circuit exactly in its
/// two ends. The kind names the sorts of x0 and xk.
struct Handle {
  std::vector<NodeIndex> path;
  HandleKind kind;
  friend bool operator==(const Handle&, const Handle&) = default;
};

inline HandleKind handle_kind(const Net& net, NodeIndex from, NodeIndex to) {
  bool a = net.is_place(from), b = net.is_place(to);
  if (!a && b) return HandleKind::tp;
  if (a && !b) return HandleKind::pt;
  return a ? HandleKind::pp : HandleKind::tt;
}

inline std::vector<Handle> find_handles(const Net& net, const Circuit& c, std::size_t cap = default_circuit_cap) {
  std::vector<Handle> out;
  std::vector<bool> on_circuit(net.node_count(), false), on_path(net.node_count(), false);
  for (auto v : c.nodes) on_circuit[v] = true;
  auto circuit_arc = [&](NodeIndex a, NodeIndex b) {
    for (std::size_t i = 0; i < c.nodes.size(); ++i)
      if (c.nodes[i] == a && c.nodes[(i + 1) % c.nodes.size()] == b) return true;
    return false;
  };
  std::vector<NodeIndex> path;
  std::function<void(NodeIndex)> extend = [&](NodeIndex v) {
    for (auto w : net.successors(v)) {
      if (on_path[w]) continue;
      if (on_circuit[w]) {
        if (path.size() == 1 && circuit_arc(path[0], w)) continue;
        if (out.size() >= cap) throw CircuitCapExceeded("handle cap " + std::to_string(cap) + " exceeded");
        auto p = path;
        p.push_back(w);
        out.push_back(Handle{p, handle_kind(net, p.front(), w)});
        continue;
      }
      on_path[w] = true;
      path.push_back(w);
      extend(w);
      path.pop_back();
      on_path[w] = false;
    }
  };
  for (auto x0 : c.nodes) {
    path = {x0};
    on_path[x0] = true;
    extend(x0);
    on_path[x0] = false;
  }
  return out;
}

/// Shortest elementary path from a transition inside the handle to a place
/// of the circuit, avoiding the handle and the circuit in between.
inline std::optional<std::vector<NodeIndex>> find_tp_bridge(const Net& net, const Circuit& c, const Handle& h) {
  std::vector<bool> blocked(net.node_count(), false), on_circuit(net.node_count(), false);
  for (auto v : c.nodes) blocked[v] = on_circuit[v] = true;
  for (auto v : h.path) blocked[v] = true;
  auto adj = node_adjacency(net);
  std::optional<std::vector<NodeIndex>> best;
  for (std::size_t i = 1; i + 1 < h.path.size(); ++i) {
    auto start = h.path[i];
    if (net.is_place(start)) continue;
    auto path = graph::shortest_path(
        adj, start, [&](std::size_t w) { return on_circuit[w] && net.is_place(w); },
        [&](std::size_t w) { return !blocked[w]; });
    if (path && (!best || path->size() < best->size())) best = std::move(path);
  }
  return best;
}

struct WellFormedness {
  bool holds = true;
  std::string reason;
  std::optional<Circuit> circuit;
  std::optional<Handle> handle;
};

/// Handle/bridge criterion for restricted free-choice nets: strongly
/// connected, no elementary circuit with a TP-handle, every PT-handle of an
/// elementary circuit bridged back to it by a TP-bridge.
inline WellFormedness well_formed_restricted_fc(const Net& net, std::size_t circuit_cap = default_circuit_cap) {
  if (!is_restricted_free_choice(net)) throw NotRestrictedFreeChoice("net " + net.name() + " is not restricted free-choice");
  if (!is_strongly_connected(net)) return {false, "not strongly connected", std::nullopt, std::nullopt};
  auto circuits = elementary_circuits(net, circuit_cap);
  for (const auto& c : circuits) {
    for (const auto& h : find_handles(net, c, circuit_cap)) {
      if (h.kind == HandleKind::tp) return {false, "circuit has a TP-handle", c, h};
      if (h.kind == HandleKind::pt && !find_tp_bridge(net, c, h))
        return {false, "PT-handle without TP-bridge", c, h};
    }
  }
  return {};
}

inline bool is_siphon(const Net& net, const std::vector<PlaceIndex>& places) {
  std::vector<bool> in(net.place_count(), false);
  for (auto p : places) in[p] = true;
  for (auto p : places)
    for (auto t : net.place_pre(p)) {
      bool feeds = false;
      for (auto q : net.pre(t)) feeds |= in[q];
      if (!feeds) return false;
    }
  return true;
}

/// Smallest non-empty siphon free of tokens under m (ties: lexicographic).
inline std::optional<std::vector<PlaceIndex>> unmarked_siphon(const Net& net, const Marking& m,
                                                              std::size_t cap = default_siphon_cap) {
  // Largest unmarked siphon by fixpoint; every unmarked siphon lies in it.
  std::vector<bool> in(net.place_count(), false);
  for (PlaceIndex p = 0; p < net.place_count(); ++p) in[p] = m[p] == 0;
  for (bool changed = true; changed;) {
    changed = false;
    for (PlaceIndex p = 0; p < net.place_count(); ++p) {
      if (!in[p]) continue;
      for (auto t : net.place_pre(p)) {
        bool feeds = false;
        for (auto q : net.pre(t)) feeds |= in[q];
        if (!feeds) {
          in[p] = false;
          changed = true;
          break;
        }
      }
    }
  }
  std::vector<PlaceIndex> pool;
  for (PlaceIndex p = 0; p < net.place_count(); ++p)
    if (in[p]) pool.push_back(p);
  if (pool.empty()) return std::nullopt;

  std::size_t checked = 0;
  for (std::size_t size = 1; size <= pool.size(); ++size) {
    std::vector<std::size_t> idx(size);
    for (std::size_t i = 0; i < size; ++i) idx[i] = i;
    while (true) {
      if (++checked > cap) throw SearchCapExceeded("siphon search cap " + std::to_string(cap) + " exceeded");
      std::vector<PlaceIndex> candidate;
      for (auto i : idx) candidate.push_back(pool[i]);
      if (is_siphon(net, candidate)) return candidate;
      std::size_t i = size;
      while (i > 0 && idx[i - 1] == pool.size() - size + i - 1) --i;
      if (i == 0) break;
      ++idx[i - 1];
      for (std::size_t j = i; j < size; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  return pool;
}

struct TSystemCheck {
  bool holds = true;
  std::optional<Circuit> circuit;   // unmarked circuit (liveness)
  std::optional<PlaceIndex> place;  // place on no 1-token circuit (safeness)
};

/// A T-system is live iff every elementary circuit carries a token.
inline TSystemCheck t_system_live(const Net& net, const Marking& m, std::size_t circuit_cap = default_circuit_cap) {
  if (!is_t_system(net)) throw PreconditionFailed("net is not a T-system");
  for (const auto& c : elementary_circuits(net, circuit_cap))
    if (token_count(net, c.node_set(), m) == 0) return {false, c, std::nullopt};
  return {};
}

/// A live, strongly connected T-system is safe iff every place lies on a
/// circuit with exactly one token.
inline TSystemCheck t_system_safe(const Net& net, const Marking& m, std::size_t circuit_cap = default_circuit_cap) {
  if (!is_t_system(net) || !is_strongly_connected(net))
    throw PreconditionFailed("net is not a strongly connected T-system");
  std::vector<bool> covered(net.place_count(), false);
  for (const auto& c : elementary_circuits(net, circuit_cap)) {
    if (token_count(net, c.node_set(), m) != 1) continue;
    for (auto v : c.nodes)
      if (net.is_place(v)) covered[v] = true;
  }
  for (PlaceIndex p = 0; p < net.place_count(); ++p)
    if (!covered[p]) return {false, std::nullopt, p};
  return {};
}

}  // namespace bpsys

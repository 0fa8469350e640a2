#pragma once

#include <numeric>
#include <string>
#include <vector>

#include "bpsys/graph.hpp"
#include "bpsys/net.hpp"

namespace bpsys {

struct NetClass {
  bool t_system = false;
  bool free_choice = false;
  bool restricted_free_choice = false;
  bool strongly_connected = false;
  friend bool operator==(const NetClass&, const NetClass&) = default;
};

/// Node adjacency following arc direction, in the shared node numbering.
inline graph::Adjacency node_adjacency(const Net& net) {
  graph::Adjacency adj(net.node_count());
  for (NodeIndex n = 0; n < net.node_count(); ++n) adj[n] = net.successors(n);
  return adj;
}

/// Adjacency of the subnet induced by `nodes`, renumbered 0..|nodes|-1 in
/// the order of `nodes`.
inline graph::Adjacency induced_adjacency(const Net& net, const NodeSet& nodes) {
  graph::Adjacency adj(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (auto w : net.successors(nodes[i])) {
      auto it = std::lower_bound(nodes.begin(), nodes.end(), w);
      if (it != nodes.end() && *it == w) adj[i].push_back(static_cast<std::size_t>(it - nodes.begin()));
    }
  }
  return adj;
}

inline bool is_strongly_connected(const Net& net) {
  return net.node_count() > 0 && graph::strongly_connected(node_adjacency(net));
}

/// Weak connectivity of the whole node graph.
inline bool is_connected(const Net& net) {
  if (net.node_count() == 0) return true;
  auto adj = node_adjacency(net);
  auto rev = graph::reversed(adj);
  for (std::size_t v = 0; v < adj.size(); ++v) adj[v].insert(adj[v].end(), rev[v].begin(), rev[v].end());
  auto seen = graph::reachable_from(adj, {0});
  return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

inline bool is_t_system(const Net& net) {
  for (PlaceIndex p = 0; p < net.place_count(); ++p)
    if (net.place_pre(p).size() != 1 || net.place_post(p).size() != 1) return false;
  return true;
}

/// Free-choice in the extended sense used by the free-choice literature:
/// two transitions sharing a preplace have identical presets.
inline bool is_free_choice(const Net& net) {
  for (PlaceIndex p = 0; p < net.place_count(); ++p) {
    const auto& succ = net.place_post(p);
    if (succ.size() < 2) continue;
    auto reference = make_node_set(net.pre(succ.front()));
    for (auto t : succ)
      if (make_node_set(net.pre(t)) != reference) return false;
  }
  return true;
}

/// |post(p)| > 1 implies pre(post(p)) = {p}.
inline bool is_restricted_free_choice(const Net& net) {
  for (PlaceIndex p = 0; p < net.place_count(); ++p) {
    const auto& succ = net.place_post(p);
    if (succ.size() < 2) continue;
    for (auto t : succ)
      if (net.pre(t).size() != 1) return false;
  }
  return true;
}

inline NetClass classify(const Net& net) {
  NetClass c;
  c.t_system = is_t_system(net);
  c.free_choice = is_free_choice(net);
  c.restricted_free_choice = is_restricted_free_choice(net);
  c.strongly_connected = is_strongly_connected(net);
  return c;
}

struct Cluster {
  NodeSet nodes;
  friend bool operator==(const Cluster&, const Cluster&) = default;
};

struct ClusterPartition {
  std::vector<Cluster> parts;            // ordered by smallest node
  std::vector<std::size_t> part_of_node;

  const Cluster& cluster_of(NodeIndex n) const { return parts[part_of_node[n]]; }
};

/// Clusters: connected components of the place -> transition arcs.
inline ClusterPartition clusters(const Net& net) {
  const std::size_t n = net.node_count();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& arc : net.arcs()) {
    if (!arc.from_place) continue;
    auto a = find(net.place_node(arc.place));
    auto b = find(net.transition_node(arc.transition));
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  ClusterPartition out;
  out.part_of_node.assign(n, 0);
  std::vector<std::size_t> part_of_root(n, n);
  for (NodeIndex v = 0; v < n; ++v) {
    auto r = find(v);
    if (part_of_root[r] == n) {
      part_of_root[r] = out.parts.size();
      out.parts.emplace_back();
    }
    out.part_of_node[v] = part_of_root[r];
    out.parts[part_of_root[r]].nodes.push_back(v);
  }
  return out;
}

/// Union of the clusters of the places in `nodes`. Transitions in the input
/// contribute nothing by themselves.
inline NodeSet cl_closure(const Net& net, const NodeSet& nodes) {
  auto parts = clusters(net);
  std::vector<bool> taken(parts.parts.size(), false);
  NodeSet out;
  for (auto v : nodes) {
    if (!net.is_place(v)) continue;
    auto c = parts.part_of_node[v];
    if (taken[c]) continue;
    taken[c] = true;
    out.insert(out.end(), parts.parts[c].nodes.begin(), parts.parts[c].nodes.end());
  }
  return make_node_set(std::move(out));
}

/// Subnet induced by a node set, with maps back to the parent net.
struct Subnet {
  Net net;
  std::vector<PlaceIndex> places;      // subnet place -> parent place
  std::vector<TransIndex> transitions;  // subnet transition -> parent transition

  Marking restrict(const Marking& m) const {
    Marking out(places.size());
    for (PlaceIndex p = 0; p < places.size(); ++p) out[p] = m[places[p]];
    return out;
  }
};

inline Subnet induced_subnet(const Net& net, const NodeSet& nodes) {
  Subnet s{Net(net.name()), {}, {}};
  std::vector<std::size_t> local(net.node_count(), net.node_count());
  for (auto v : nodes) {
    if (net.is_place(v)) {
      local[v] = s.net.add_place(net.place_id(v));
      s.places.push_back(v);
    } else {
      local[v] = s.net.add_transition(net.node_id(v));
      s.transitions.push_back(net.node_transition(v));
    }
  }
  for (const auto& arc : net.arcs()) {
    auto pn = net.place_node(arc.place);
    auto tn = net.transition_node(arc.transition);
    if (!contains(nodes, pn) || !contains(nodes, tn)) continue;
    if (arc.from_place)
      s.net.add_input(local[pn], local[tn]);
    else
      s.net.add_output(local[tn], local[pn]);
  }
  return s;
}

inline Marking step(const Net& net, const Marking& m, TransIndex t) {
  if (m.size() != net.place_count()) throw DomainMismatch("marking does not match net");
  for (auto p : net.pre(t))
    if (m[p] == 0)
      throw NotEnabled("transition " + net.transition_id(t) + " is not enabled: place " +
                       net.place_id(p) + " is empty");
  return net.fire_unchecked(m, t);
}

/// Fires a whole sequence; throws NotEnabled at the first blocked step.
inline Marking fire_sequence(const Net& net, Marking m, const std::vector<TransIndex>& seq) {
  for (auto t : seq) m = step(net, m, t);
  return m;
}

}  // namespace bpsys

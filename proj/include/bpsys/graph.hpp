#pragma once

#include <cstddef>
#include <deque>
#include <limits>
#include <optional>
#include <vector>

namespace bpsys::graph {

using Adjacency = std::vector<std::vector<std::size_t>>;

/// Strongly connected components (iterative Tarjan). Component ids are
/// assigned in reverse topological order of the condensation: a component
/// with no edges leaving it is found before any component that reaches it.
struct Sccs {
  std::vector<std::size_t> component_of;
  std::size_t count = 0;
};

inline Sccs strongly_connected_components(const Adjacency& adj) {
  constexpr auto unvisited = std::numeric_limits<std::size_t>::max();
  const std::size_t n = adj.size();
  Sccs out;
  out.component_of.assign(n, unvisited);
  std::vector<std::size_t> index(n, unvisited), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::pair<std::size_t, std::size_t>> frames;
  std::size_t counter = 0;

  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != unvisited) continue;
    frames.emplace_back(root, 0);
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!frames.empty()) {
      auto& [v, next] = frames.back();
      if (next < adj[v].size()) {
        std::size_t w = adj[v][next++];
        if (index[w] == unvisited) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          frames.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          out.component_of[w] = out.count;
        } while (w != v);
        ++out.count;
      }
      std::size_t finished = v;
      frames.pop_back();
      if (!frames.empty()) {
        auto parent = frames.back().first;
        low[parent] = std::min(low[parent], low[finished]);
      }
    }
  }
  return out;
}

inline bool strongly_connected(const Adjacency& adj) {
  if (adj.empty()) return true;
  return strongly_connected_components(adj).count == 1;
}

/// Nodes reachable from `sources` (sources included).
inline std::vector<bool> reachable_from(const Adjacency& adj, const std::vector<std::size_t>& sources) {
  std::vector<bool> seen(adj.size(), false);
  std::deque<std::size_t> queue;
  for (auto s : sources) {
    if (!seen[s]) {
      seen[s] = true;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    auto v = queue.front();
    queue.pop_front();
    for (auto w : adj[v]) {
      if (!seen[w]) {
        seen[w] = true;
        queue.push_back(w);
      }
    }
  }
  return seen;
}

inline Adjacency reversed(const Adjacency& adj) {
  Adjacency rev(adj.size());
  for (std::size_t v = 0; v < adj.size(); ++v)
    for (auto w : adj[v]) rev[w].push_back(v);
  return rev;
}

/// Shortest path from `from` to any node satisfying `is_target`, moving only
/// through nodes accepted by `allowed` (the endpoints are exempt from
/// `allowed`). Returns the node sequence including both ends.
template <class Target, class Allowed>
std::optional<std::vector<std::size_t>> shortest_path(const Adjacency& adj, std::size_t from,
                                                      Target is_target, Allowed allowed) {
  constexpr auto none = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> parent(adj.size(), none);
  std::vector<bool> seen(adj.size(), false);
  std::deque<std::size_t> queue{from};
  seen[from] = true;
  while (!queue.empty()) {
    auto v = queue.front();
    queue.pop_front();
    for (auto w : adj[v]) {
      if (seen[w]) continue;
      if (is_target(w)) {
        std::vector<std::size_t> path{w};
        for (auto x = v; x != none; x = parent[x]) path.push_back(x);
        return std::vector<std::size_t>(path.rbegin(), path.rend());
      }
      if (!allowed(w)) continue;
      seen[w] = true;
      parent[w] = v;
      queue.push_back(w);
    }
  }
  return std::nullopt;
}

}  // namespace bpsys::graph

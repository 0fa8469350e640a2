#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "bpsys/errors.hpp"

namespace bpsys {

using PlaceIndex = std::size_t;
using TransIndex = std::size_t;

/// Places and transitions share one node numbering: places first
/// (0..|P|-1), then transitions (|P|..|P|+|T|-1).
using NodeIndex = std::size_t;

/// Sorted, duplicate-free list of nodes.
using NodeSet = std::vector<NodeIndex>;

inline NodeSet make_node_set(std::vector<NodeIndex> nodes) {
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  return nodes;
}

inline bool contains(const NodeSet& set, NodeIndex n) {
  return std::binary_search(set.begin(), set.end(), n);
}

inline NodeSet set_intersection(const NodeSet& a, const NodeSet& b) {
  NodeSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline NodeSet set_union(const NodeSet& a, const NodeSet& b) {
  NodeSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

/// Token counts of an ordinary net, one entry per place.
class Marking {
 public:
  Marking() = default;
  explicit Marking(std::size_t places, std::uint32_t value = 0) : tokens_(places, value) {}
  explicit Marking(std::vector<std::uint32_t> tokens) : tokens_(std::move(tokens)) {}

  std::size_t size() const { return tokens_.size(); }
  std::uint32_t operator[](PlaceIndex p) const { return tokens_[p]; }
  std::uint32_t& operator[](PlaceIndex p) { return tokens_[p]; }
  const std::vector<std::uint32_t>& tokens() const { return tokens_; }

  std::uint64_t total() const {
    return std::accumulate(tokens_.begin(), tokens_.end(), std::uint64_t{0});
  }

  /// Componentwise <=.
  bool covered_by(const Marking& other) const {
    for (std::size_t i = 0; i < tokens_.size(); ++i)
      if (tokens_[i] > other.tokens_[i]) return false;
    return true;
  }

  /// Componentwise <= and different.
  bool strictly_less(const Marking& other) const { return covered_by(other) && *this != other; }

  friend bool operator==(const Marking&, const Marking&) = default;
  friend auto operator<=>(const Marking&, const Marking&) = default;

 private:
  std::vector<std::uint32_t> tokens_;
};

struct MarkingHash {
  std::size_t operator()(const Marking& m) const noexcept {
    std::size_t h = 0xcbf29ce484222325ull;
    for (auto v : m.tokens()) {
      h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
  }
};

struct Arc {
  bool from_place;  // place -> transition when true, transition -> place otherwise
  PlaceIndex place;
  TransIndex transition;
  friend bool operator==(const Arc&, const Arc&) = default;
};

/// Ordinary place/transition net with unit arc weights. Identifiers keep
/// their declaration order, and so do the pre/post lists of every node.
class Net {
 public:
  explicit Net(std::string name = {}) : name_(std::move(name)) {}

  const std::string& name() const { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }

  PlaceIndex add_place(std::string id) {
    claim_id(id, true, place_ids_.size());
    place_ids_.push_back(std::move(id));
    place_pre_.emplace_back();
    place_post_.emplace_back();
    return place_ids_.size() - 1;
  }

  TransIndex add_transition(std::string id) {
    claim_id(id, false, trans_ids_.size());
    trans_ids_.push_back(std::move(id));
    trans_pre_.emplace_back();
    trans_post_.emplace_back();
    return trans_ids_.size() - 1;
  }

  /// Arc p -> t.
  void add_input(PlaceIndex p, TransIndex t) {
    if (std::find(trans_pre_[t].begin(), trans_pre_[t].end(), p) != trans_pre_[t].end())
      throw ValidationError("duplicate arc " + place_ids_[p] + " -> " + trans_ids_[t]);
    trans_pre_[t].push_back(p);
    place_post_[p].push_back(t);
    arcs_.push_back({true, p, t});
  }

  /// Arc t -> p.
  void add_output(TransIndex t, PlaceIndex p) {
    if (std::find(trans_post_[t].begin(), trans_post_[t].end(), p) != trans_post_[t].end())
      throw ValidationError("duplicate arc " + trans_ids_[t] + " -> " + place_ids_[p]);
    trans_post_[t].push_back(p);
    place_pre_[p].push_back(t);
    arcs_.push_back({false, p, t});
  }

  /// Arc between two named nodes; the orientation follows the node sorts.
  void add_arc(std::string_view src, std::string_view dst) {
    auto sp = find_place(src);
    auto st = find_transition(src);
    auto dp = find_place(dst);
    auto dt = find_transition(dst);
    if (sp && dt)
      add_input(*sp, *dt);
    else if (st && dp)
      add_output(*st, *dp);
    else if (!(sp || st))
      throw ValidationError("unknown node '" + std::string(src) + "'");
    else if (!(dp || dt))
      throw ValidationError("unknown node '" + std::string(dst) + "'");
    else
      throw ValidationError("arc " + std::string(src) + " -> " + std::string(dst) +
                            " must connect a place and a transition");
  }

  std::size_t place_count() const { return place_ids_.size(); }
  std::size_t transition_count() const { return trans_ids_.size(); }
  std::size_t node_count() const { return place_count() + transition_count(); }

  const std::string& place_id(PlaceIndex p) const { return place_ids_[p]; }
  const std::string& transition_id(TransIndex t) const { return trans_ids_[t]; }
  const std::vector<std::string>& place_ids() const { return place_ids_; }
  const std::vector<std::string>& transition_ids() const { return trans_ids_; }

  std::optional<PlaceIndex> find_place(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end() || !it->second.first) return std::nullopt;
    return it->second.second;
  }
  std::optional<TransIndex> find_transition(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end() || it->second.first) return std::nullopt;
    return it->second.second;
  }
  PlaceIndex place(std::string_view id) const {
    if (auto p = find_place(id)) return *p;
    throw DomainMismatch("no place '" + std::string(id) + "'");
  }
  TransIndex transition(std::string_view id) const {
    if (auto t = find_transition(id)) return *t;
    throw DomainMismatch("no transition '" + std::string(id) + "'");
  }

  const std::vector<PlaceIndex>& pre(TransIndex t) const { return trans_pre_[t]; }
  const std::vector<PlaceIndex>& post(TransIndex t) const { return trans_post_[t]; }
  const std::vector<TransIndex>& place_pre(PlaceIndex p) const { return place_pre_[p]; }
  const std::vector<TransIndex>& place_post(PlaceIndex p) const { return place_post_[p]; }
  const std::vector<Arc>& arcs() const { return arcs_; }

  // Node numbering.
  NodeIndex place_node(PlaceIndex p) const { return p; }
  NodeIndex transition_node(TransIndex t) const { return place_count() + t; }
  bool is_place(NodeIndex n) const { return n < place_count(); }
  PlaceIndex node_place(NodeIndex n) const { return n; }
  TransIndex node_transition(NodeIndex n) const { return n - place_count(); }
  const std::string& node_id(NodeIndex n) const {
    return is_place(n) ? place_ids_[n] : trans_ids_[n - place_count()];
  }

  std::vector<NodeIndex> successors(NodeIndex n) const {
    std::vector<NodeIndex> out;
    if (is_place(n)) {
      for (auto t : place_post_[n]) out.push_back(transition_node(t));
    } else {
      for (auto p : trans_post_[node_transition(n)]) out.push_back(place_node(p));
    }
    return out;
  }

  std::vector<NodeIndex> predecessors(NodeIndex n) const {
    std::vector<NodeIndex> out;
    if (is_place(n)) {
      for (auto t : place_pre_[n]) out.push_back(transition_node(t));
    } else {
      for (auto p : trans_pre_[node_transition(n)]) out.push_back(place_node(p));
    }
    return out;
  }

  bool has_arc(NodeIndex from, NodeIndex to) const {
    if (is_place(from) == is_place(to)) return false;
    if (is_place(from)) {
      const auto& pre = trans_pre_[node_transition(to)];
      return std::find(pre.begin(), pre.end(), node_place(from)) != pre.end();
    }
    const auto& post = trans_post_[node_transition(from)];
    return std::find(post.begin(), post.end(), node_place(to)) != post.end();
  }

  bool is_enabled(const Marking& m, TransIndex t) const {
    for (auto p : trans_pre_[t])
      if (m[p] == 0) return false;
    return true;
  }

  std::vector<TransIndex> enabled_transitions(const Marking& m) const {
    std::vector<TransIndex> out;
    for (TransIndex t = 0; t < transition_count(); ++t)
      if (is_enabled(m, t)) out.push_back(t);
    return out;
  }

  /// Fires t without checking enabledness.
  Marking fire_unchecked(const Marking& m, TransIndex t) const {
    Marking next = m;
    for (auto p : trans_pre_[t]) --next[p];
    for (auto p : trans_post_[t]) ++next[p];
    return next;
  }

  std::string marking_string(const Marking& m) const {
    std::string out = "{";
    bool first = true;
    for (PlaceIndex p = 0; p < place_count(); ++p) {
      if (m[p] == 0) continue;
      if (!first) out += ", ";
      first = false;
      out += place_ids_[p] + ":" + std::to_string(m[p]);
    }
    return out + "}";
  }

  friend bool operator==(const Net& a, const Net& b) {
    return a.place_ids_ == b.place_ids_ && a.trans_ids_ == b.trans_ids_ && a.arcs_ == b.arcs_;
  }

 private:
  void claim_id(const std::string& id, bool is_place, std::size_t index) {
    if (id.empty()) throw ValidationError("empty identifier");
    if (!index_.emplace(id, std::pair{is_place, index}).second)
      throw ValidationError("duplicate identifier '" + id + "'");
  }

  std::string name_;
  std::vector<std::string> place_ids_;
  std::vector<std::string> trans_ids_;
  std::vector<std::vector<PlaceIndex>> trans_pre_, trans_post_;
  std::vector<std::vector<TransIndex>> place_pre_, place_post_;
  std::vector<Arc> arcs_;
  std::unordered_map<std::string, std::pair<bool, std::size_t>> index_;
};

}  // namespace bpsys

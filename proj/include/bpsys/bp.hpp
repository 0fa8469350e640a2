#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "bpsys/net_core.hpp"

namespace bpsys {

enum class Colour : std::uint8_t { high, low };
enum class TransitionKind : std::uint8_t { and_, xor_ };

inline const char* to_string(Colour c) { return c == Colour::high ? "high" : "low"; }
inline const char* to_string(TransitionKind k) { return k == TransitionKind::and_ ? "and" : "xor"; }

/// One firing mode of a BP transition. AND transitions have the modes
/// {high, low}; an XOR transition with n preplaces and m postplaces has the
/// high modes (i, j), 1 <= i <= n, 1 <= j <= m, plus one low mode. Indices
/// are 1-based positions in the transition's arc declaration order; they
/// are 0 for AND modes and for low modes.
struct FiringMode {
  TransIndex transition = 0;
  Colour colour = Colour::high;
  std::uint32_t in = 0;
  std::uint32_t out = 0;

  bool is_high() const { return colour == Colour::high; }
  friend bool operator==(const FiringMode&, const FiringMode&) = default;
  friend auto operator<=>(const FiringMode&, const FiringMode&) = default;
};

struct ColourCount {
  std::uint32_t high = 0;
  std::uint32_t low = 0;
  std::uint32_t total() const { return high + low; }
  friend bool operator==(const ColourCount&, const ColourCount&) = default;
  friend auto operator<=>(const ColourCount&, const ColourCount&) = default;
};

/// Coloured marking: high and low token counts per place.
class BPMarking {
 public:
  BPMarking() = default;
  explicit BPMarking(std::size_t places) : counts_(places) {}

  std::size_t size() const { return counts_.size(); }
  const ColourCount& operator[](PlaceIndex p) const { return counts_[p]; }
  ColourCount& operator[](PlaceIndex p) { return counts_[p]; }

  std::uint64_t high_total() const {
    std::uint64_t n = 0;
    for (const auto& c : counts_) n += c.high;
    return n;
  }

  friend bool operator==(const BPMarking&, const BPMarking&) = default;
  friend auto operator<=>(const BPMarking&, const BPMarking&) = default;

 private:
  std::vector<ColourCount> counts_;
};

/// BP-graph: an ordinary net whose places are unbranched, plus an AND/XOR
/// kind per transition. Every place carries the colour set {high, low}.
class BPGraph {
 public:
  BPGraph() = default;
  BPGraph(Net net, std::vector<TransitionKind> kinds) : net_(std::move(net)), kinds_(std::move(kinds)) {
    if (kinds_.size() != net_.transition_count())
      throw ValidationError("one kind per transition required");
  }

  const Net& net() const { return net_; }
  TransitionKind kind(TransIndex t) const { return kinds_[t]; }
  const std::vector<TransitionKind>& kinds() const { return kinds_; }

  bool is_xor(TransIndex t) const { return kinds_[t] == TransitionKind::xor_; }

  std::string mode_id(const FiringMode& f) const {
    const auto& t = net_.transition_id(f.transition);
    if (f.colour == Colour::low) return t + ".l";
    if (!is_xor(f.transition)) return t + ".h";
    return t + ".(" + std::to_string(f.in) + "," + std::to_string(f.out) + ")";
  }

  std::string marking_string(const BPMarking& m) const {
    std::string out = "{";
    bool first = true;
    for (PlaceIndex p = 0; p < net_.place_count(); ++p) {
      if (m[p].total() == 0) continue;
      if (!first) out += ", ";
      first = false;
      out += net_.place_id(p) + ":";
      std::string tokens;
      for (std::uint32_t i = 0; i < m[p].high; ++i) tokens += tokens.empty() ? "h" : "+h";
      for (std::uint32_t i = 0; i < m[p].low; ++i) tokens += tokens.empty() ? "l" : "+l";
      out += tokens;
    }
    return out + "}";
  }

  /// Throws ValidationError naming the violated constraint.
  void validate() const {
    if (net_.place_count() == 0 || net_.transition_count() == 0)
      throw ValidationError("a BP-graph needs at least one place and one transition");
    for (PlaceIndex p = 0; p < net_.place_count(); ++p) {
      auto in = net_.place_pre(p).size();
      auto out = net_.place_post(p).size();
      if (in == 0 || out == 0)
        throw ValidationError("place " + net_.place_id(p) +
                              " is a boundary place: BP places need exactly one input and one output transition");
      if (in > 1 || out > 1) throw ValidationError("place " + net_.place_id(p) + " must be unbranched");
    }
    for (TransIndex t = 0; t < net_.transition_count(); ++t) {
      if (net_.pre(t).empty() || net_.post(t).empty())
        throw ValidationError("transition " + net_.transition_id(t) + " needs at least one preplace and one postplace");
    }
    if (!is_connected(net_)) throw ValidationError("BP-graph must be connected");
  }

  friend bool operator==(const BPGraph&, const BPGraph&) = default;

 private:
  Net net_;
  std::vector<TransitionKind> kinds_;
};

struct BPSystem {
  BPGraph graph;
  BPMarking initial;

  const Net& net() const { return graph.net(); }

  void validate() const {
    graph.validate();
    if (initial.size() != graph.net().place_count()) throw ValidationError("marking does not match graph");
    if (initial.high_total() == 0) throw ValidationError("initial marking must carry at least one high token");
  }
};

/// All firing modes of t: AND -> [high, low]; XOR -> (i, j) i-major, then low.
inline std::vector<FiringMode> modes(const BPGraph& g, TransIndex t) {
  std::vector<FiringMode> out;
  if (!g.is_xor(t)) {
    out.push_back({t, Colour::high, 0, 0});
  } else {
    auto n = static_cast<std::uint32_t>(g.net().pre(t).size());
    auto m = static_cast<std::uint32_t>(g.net().post(t).size());
    for (std::uint32_t i = 1; i <= n; ++i)
      for (std::uint32_t j = 1; j <= m; ++j) out.push_back({t, Colour::high, i, j});
  }
  out.push_back({t, Colour::low, 0, 0});
  return out;
}

inline std::vector<FiringMode> all_modes(const BPGraph& g) {
  std::vector<FiringMode> out;
  for (TransIndex t = 0; t < g.net().transition_count(); ++t) {
    auto ms = modes(g, t);
    out.insert(out.end(), ms.begin(), ms.end());
  }
  return out;
}

/// Checks that the mode names an existing transition and valid indices.
inline void check_mode(const BPGraph& g, const FiringMode& f) {
  if (f.transition >= g.net().transition_count()) throw DomainMismatch("firing mode names an unknown transition");
  bool ok = true;
  if (f.colour == Colour::low || !g.is_xor(f.transition)) {
    ok = f.in == 0 && f.out == 0;
  } else {
    ok = f.in >= 1 && f.in <= g.net().pre(f.transition).size() && f.out >= 1 &&
         f.out <= g.net().post(f.transition).size();
  }
  if (!ok) throw DomainMismatch("firing mode indices out of range for " + g.net().transition_id(f.transition));
}

inline bool is_mode_enabled(const BPGraph& g, const BPMarking& m, const FiringMode& f) {
  const auto& pre = g.net().pre(f.transition);
  for (std::size_t k = 0; k < pre.size(); ++k) {
    const auto& c = m[pre[k]];
    bool wants_high = f.colour == Colour::high && (!g.is_xor(f.transition) || k + 1 == f.in);
    if (wants_high ? c.high == 0 : c.low == 0) return false;
  }
  return true;
}

inline std::vector<FiringMode> enabled_modes(const BPSystem& bps, const BPMarking& m) {
  std::vector<FiringMode> out;
  for (TransIndex t = 0; t < bps.net().transition_count(); ++t)
    for (const auto& f : modes(bps.graph, t))
      if (is_mode_enabled(bps.graph, m, f)) out.push_back(f);
  return out;
}

inline BPMarking fire_mode(const BPGraph& g, const BPMarking& m, const FiringMode& f) {
  check_mode(g, f);
  if (!is_mode_enabled(g, m, f)) throw NotEnabled("firing mode " + g.mode_id(f) + " is not enabled");
  BPMarking next = m;
  const auto& pre = g.net().pre(f.transition);
  const auto& post = g.net().post(f.transition);
  bool xor_t = g.is_xor(f.transition);
  for (std::size_t k = 0; k < pre.size(); ++k) {
    bool high = f.colour == Colour::high && (!xor_t || k + 1 == f.in);
    (high ? next[pre[k]].high : next[pre[k]].low) -= 1;
  }
  for (std::size_t k = 0; k < post.size(); ++k) {
    bool high = f.colour == Colour::high && (!xor_t || k + 1 == f.out);
    (high ? next[post[k]].high : next[post[k]].low) += 1;
  }
  return next;
}

inline BPMarking fire_mode(const BPSystem& bps, const BPMarking& m, const FiringMode& f) {
  return fire_mode(bps.graph, m, f);
}

inline BPMarking fire_modes(const BPGraph& g, BPMarking m, const std::vector<FiringMode>& seq) {
  for (const auto& f : seq) m = fire_mode(g, m, f);
  return m;
}

/// AND with a high-marked and a low-marked preplace, or XOR with at least
/// two high-marked preplaces.
inline std::vector<TransIndex> deadlock_transitions(const BPSystem& bps, const BPMarking& m) {
  std::vector<TransIndex> out;
  const auto& net = bps.net();
  for (TransIndex t = 0; t < net.transition_count(); ++t) {
    std::size_t high_marked = 0, low_marked = 0;
    for (auto p : net.pre(t)) {
      if (m[p].high > 0) ++high_marked;
      if (m[p].low > 0) ++low_marked;
    }
    bool deadlock = bps.graph.is_xor(t) ? high_marked >= 2 : (high_marked >= 1 && low_marked >= 1);
    if (deadlock) out.push_back(t);
  }
  return out;
}

inline bool is_dead(const BPSystem& bps, const BPMarking& m) {
  for (TransIndex t = 0; t < bps.net().transition_count(); ++t)
    for (const auto& f : modes(bps.graph, t))
      if (is_mode_enabled(bps.graph, m, f)) return false;
  return true;
}

/// Unary (1 pre, 1 post), opening (1 pre, 2 post) or closing (2 pre, 1 post).
inline bool is_binary_transition(const Net& net, TransIndex t) {
  auto n = net.pre(t).size();
  auto m = net.post(t).size();
  return (n == 1 && m <= 2) || (n == 2 && m == 1);
}

inline bool is_binary(const BPGraph& g) {
  for (TransIndex t = 0; t < g.net().transition_count(); ++t)
    if (!is_binary_transition(g.net(), t)) return false;
  return true;
}

namespace detail {

inline std::string fresh_id(const Net& net, const std::string& base) {
  if (!net.find_place(base) && !net.find_transition(base)) return base;
  for (int k = 2;; ++k) {
    auto id = base + "_" + std::to_string(k);
    if (!net.find_place(id) && !net.find_transition(id)) return id;
  }
}

}  // namespace detail

/// Replaces every non-binary transition by left-leaning combs of binary
/// transitions of the same kind: a closing comb that merges the preplaces in
/// declaration order, then an opening comb that splits towards the
/// postplaces. Internal places start empty; already binary graphs come back
/// unchanged.
inline BPSystem binary_refine(const BPSystem& bps) {
  const auto& src = bps.net();
  if (is_binary(bps.graph)) return bps;

  // Reserve every original identifier so generated ones never collide.
  Net reserved;
  for (const auto& id : src.place_ids()) reserved.add_place(id);
  for (const auto& id : src.transition_ids()) reserved.add_transition(id);

  struct PendingTransition {
    std::string id;
    TransitionKind kind;
    std::vector<std::string> pre, post;
  };
  std::vector<std::string> new_places;
  std::vector<PendingTransition> new_transitions;

  auto fresh = [&](const std::string& base, bool place) {
    auto id = detail::fresh_id(reserved, base);
    if (place)
      reserved.add_place(id);
    else
      reserved.add_transition(id);
    return id;
  };

  for (TransIndex t = 0; t < src.transition_count(); ++t) {
    const auto& tid = src.transition_id(t);
    std::vector<std::string> pre, post;
    for (auto p : src.pre(t)) pre.push_back(src.place_id(p));
    for (auto p : src.post(t)) post.push_back(src.place_id(p));
    auto kind = bps.graph.kind(t);
    if (is_binary_transition(src, t)) {
      new_transitions.push_back({tid, kind, pre, post});
      continue;
    }
    int part = 0;
    auto next_tid = [&] { return fresh(tid + "~" + std::to_string(++part), false); };
    int internal = 0;
    auto next_place = [&] {
      auto id = fresh(tid + "~p" + std::to_string(++internal), true);
      new_places.push_back(id);
      return id;
    };

    // Closing comb: reduce the preplaces to a single carrier place.
    std::string carrier = pre.front();
    bool needs_opening = post.size() >= 2;
    for (std::size_t k = 1; k < pre.size(); ++k) {
      bool last = k + 1 == pre.size();
      std::string out = (last && !needs_opening) ? post.front() : next_place();
      new_transitions.push_back({next_tid(), kind, {carrier, pre[k]}, {out}});
      carrier = out;
    }
    if (!needs_opening) continue;
    // Opening comb: split the carrier into the postplaces.
    for (std::size_t k = 0; k + 1 < post.size(); ++k) {
      bool last = k + 2 == post.size();
      std::string rest = last ? post[k + 1] : next_place();
      new_transitions.push_back({next_tid(), kind, {carrier}, {post[k], rest}});
      carrier = rest;
    }
  }

  Net out(src.name());
  for (const auto& id : src.place_ids()) out.add_place(id);
  for (const auto& id : new_places) out.add_place(id);
  std::vector<TransitionKind> kinds;
  for (const auto& nt : new_transitions) {
    out.add_transition(nt.id);
    kinds.push_back(nt.kind);
  }
  for (const auto& nt : new_transitions) {
    for (const auto& p : nt.pre) out.add_arc(p, nt.id);
    for (const auto& p : nt.post) out.add_arc(nt.id, p);
  }
  BPSystem refined{BPGraph(std::move(out), std::move(kinds)), BPMarking(src.place_count() + new_places.size())};
  for (PlaceIndex p = 0; p < src.place_count(); ++p) refined.initial[p] = bps.initial[p];
  return refined;
}

}  // namespace bpsys

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bpsys/bp.hpp"

namespace bpsys {

enum class ViewKind { flat, low, flat_high, skeleton };

inline const char* to_string(ViewKind k) {
  switch (k) {
    case ViewKind::flat: return "flat";
    case ViewKind::low: return "low";
    case ViewKind::flat_high: return "high";
    case ViewKind::skeleton: return "skeleton";
  }
  return "?";
}

struct PlaceImage {
  PlaceIndex place;
  std::optional<Colour> colour;  // empty for colour-blind views
};

struct TransImage {
  TransIndex transition;
  std::optional<FiringMode> mode;  // empty for the skeleton
};

/// An ordinary net derived from a BP-system, with maps from its nodes back
/// to the places/transitions (and colours/modes) of the BP-graph.
struct DerivedView {
  ViewKind kind;
  Net net;
  Marking marking;
  std::vector<PlaceImage> place_map;
  std::vector<TransImage> trans_map;

  std::optional<TransIndex> transition_of(const FiringMode& f) const {
    for (TransIndex t = 0; t < trans_map.size(); ++t)
      if (trans_map[t].mode && *trans_map[t].mode == f) return t;
    return std::nullopt;
  }
};

namespace detail {

inline std::string token_id(const Net& net, PlaceIndex p, Colour c) {
  return net.place_id(p) + (c == Colour::high ? ".h" : ".l");
}

}  // namespace detail

// Flat place numbering: (p, high) = 2p, (p, low) = 2p + 1.
inline PlaceIndex flat_place(PlaceIndex p, Colour c) { return 2 * p + (c == Colour::low ? 1 : 0); }

inline Marking to_flat(const BPMarking& m) {
  Marking out(2 * m.size());
  for (PlaceIndex p = 0; p < m.size(); ++p) {
    out[flat_place(p, Colour::high)] = m[p].high;
    out[flat_place(p, Colour::low)] = m[p].low;
  }
  return out;
}

inline BPMarking from_flat(const Marking& m) {
  BPMarking out(m.size() / 2);
  for (PlaceIndex p = 0; p < out.size(); ++p) {
    out[p].high = m[flat_place(p, Colour::high)];
    out[p].low = m[flat_place(p, Colour::low)];
  }
  return out;
}

inline Marking high_part(const BPMarking& m) {
  Marking out(m.size());
  for (PlaceIndex p = 0; p < m.size(); ++p) out[p] = m[p].high;
  return out;
}

inline Marking low_part(const BPMarking& m) {
  Marking out(m.size());
  for (PlaceIndex p = 0; p < m.size(); ++p) out[p] = m[p].low;
  return out;
}

inline Marking uncoloured(const BPMarking& m) {
  Marking out(m.size());
  for (PlaceIndex p = 0; p < m.size(); ++p) out[p] = m[p].total();
  return out;
}

/// Flat net: token elements as places, firing elements as transitions.
/// Each flat transition consumes and produces exactly the token elements of
/// its firing mode, so the flat net simulates the BP-graph step for step.
inline DerivedView flat_view(const BPGraph& g, const BPMarking& m) {
  const auto& src = g.net();
  DerivedView v{ViewKind::flat, Net(src.name() + "^flat"), to_flat(m), {}, {}};
  for (PlaceIndex p = 0; p < src.place_count(); ++p) {
    for (auto c : {Colour::high, Colour::low}) {
      v.net.add_place(detail::token_id(src, p, c));
      v.place_map.push_back({p, c});
    }
  }
  for (const auto& f : all_modes(g)) {
    auto t = v.net.add_transition(g.mode_id(f));
    v.trans_map.push_back({f.transition, f});
    const auto& pre = src.pre(f.transition);
    const auto& post = src.post(f.transition);
    bool xor_t = g.is_xor(f.transition);
    for (std::size_t k = 0; k < pre.size(); ++k) {
      bool high = f.is_high() && (!xor_t || k + 1 == f.in);
      v.net.add_input(flat_place(pre[k], high ? Colour::high : Colour::low), t);
    }
    for (std::size_t k = 0; k < post.size(); ++k) {
      bool high = f.is_high() && (!xor_t || k + 1 == f.out);
      v.net.add_output(t, flat_place(post[k], high ? Colour::high : Colour::low));
    }
  }
  return v;
}

/// Flat high-system: high token elements and high modes only. An XOR high
/// mode (i, j) keeps a single arc from the i-th preplace and a single arc to
/// the j-th postplace. Place p.h has index p.
inline DerivedView flat_high_view(const BPGraph& g, const BPMarking& m) {
  const auto& src = g.net();
  DerivedView v{ViewKind::flat_high, Net(src.name() + "^high"), high_part(m), {}, {}};
  for (PlaceIndex p = 0; p < src.place_count(); ++p) {
    v.net.add_place(detail::token_id(src, p, Colour::high));
    v.place_map.push_back({p, Colour::high});
  }
  for (const auto& f : all_modes(g)) {
    if (!f.is_high()) continue;
    auto t = v.net.add_transition(g.mode_id(f));
    v.trans_map.push_back({f.transition, f});
    const auto& pre = src.pre(f.transition);
    const auto& post = src.post(f.transition);
    if (g.is_xor(f.transition)) {
      v.net.add_input(pre[f.in - 1], t);
      v.net.add_output(t, post[f.out - 1]);
    } else {
      for (auto p : pre) v.net.add_input(p, t);
      for (auto p : post) v.net.add_output(t, p);
    }
  }
  return v;
}

inline DerivedView flat_high(const BPSystem& bps) { return flat_high_view(bps.graph, bps.initial); }

/// Same places, transitions and arcs as the BP-graph.
inline DerivedView skeleton_view(const BPGraph& g, const BPMarking& m) {
  DerivedView v{ViewKind::skeleton, g.net(), uncoloured(m), {}, {}};
  v.net.set_name(g.net().name() + "^skel");
  for (PlaceIndex p = 0; p < g.net().place_count(); ++p) v.place_map.push_back({p, std::nullopt});
  for (TransIndex t = 0; t < g.net().transition_count(); ++t) v.trans_map.push_back({t, std::nullopt});
  return v;
}

/// Low-system: same shape as the skeleton, single colour, low tokens only.
inline DerivedView low_view(const BPGraph& g, const BPMarking& m) {
  DerivedView v{ViewKind::low, g.net(), low_part(m), {}, {}};
  v.net.set_name(g.net().name() + "^low");
  for (PlaceIndex p = 0; p < g.net().place_count(); ++p) v.place_map.push_back({p, Colour::low});
  for (TransIndex t = 0; t < g.net().transition_count(); ++t)
    v.trans_map.push_back({t, FiringMode{t, Colour::low, 0, 0}});
  return v;
}

inline DerivedView low_view(const BPSystem& bps) { return low_view(bps.graph, bps.initial); }

enum class MorphismKind { col, low, high, skel, uncol };

inline const char* to_string(MorphismKind k) {
  switch (k) {
    case MorphismKind::col: return "col";
    case MorphismKind::low: return "low";
    case MorphismKind::high: return "high";
    case MorphismKind::skel: return "skel";
    case MorphismKind::uncol: return "uncol";
  }
  return "?";
}

/// Discrete morphism between a BP-system and one of its derived nets.
/// col and low point from the derived net into the BP-system; high, skel
/// and uncol point from the BP-system to the derived net.
struct Morphism {
  MorphismKind kind;
  BPGraph graph;
  DerivedView view;

  bool from_bp() const { return kind == MorphismKind::high || kind == MorphismKind::skel || kind == MorphismKind::uncol; }
};

struct Derived {
  DerivedView view;
  Morphism morphism;
};

inline Derived flatten(const BPSystem& bps) {
  auto v = flat_view(bps.graph, bps.initial);
  return {v, Morphism{MorphismKind::col, bps.graph, v}};
}

inline Derived skeleton(const BPSystem& bps) {
  auto v = skeleton_view(bps.graph, bps.initial);
  return {v, Morphism{MorphismKind::skel, bps.graph, v}};
}

inline Morphism high_morphism(const BPSystem& bps) { return {MorphismKind::high, bps.graph, flat_high(bps)}; }
inline Morphism low_morphism(const BPSystem& bps) { return {MorphismKind::low, bps.graph, low_view(bps)}; }
inline Morphism uncol_morphism(const BPSystem& bps) {
  return {MorphismKind::uncol, bps.graph, low_view(bps.graph, bps.initial)};
}

namespace detail {

inline void require_bp_source(const Morphism& m, const char* what) {
  if (!m.from_bp())
    throw DomainMismatch(std::string(what) + " of the BP-system is not in the domain of " + to_string(m.kind));
}

inline void require_net_source(const Morphism& m, const char* what) {
  if (m.from_bp())
    throw DomainMismatch(std::string(what) + " of an ordinary net is not in the domain of " + to_string(m.kind));
}

}  // namespace detail

/// high drops low tokens; skel and uncol count all tokens per place.
inline Marking project(const Morphism& m, const BPMarking& marking) {
  detail::require_bp_source(m, "marking");
  if (marking.size() != m.graph.net().place_count()) throw DomainMismatch("marking does not match BP-graph");
  return m.kind == MorphismKind::high ? high_part(marking) : uncoloured(marking);
}

/// col maps a flat marking to its coloured marking; low maps low tokens.
inline BPMarking project(const Morphism& m, const Marking& marking) {
  detail::require_net_source(m, "marking");
  if (marking.size() != m.view.net.place_count()) throw DomainMismatch("marking does not match derived net");
  if (m.kind == MorphismKind::col) return from_flat(marking);
  BPMarking out(marking.size());
  for (PlaceIndex p = 0; p < marking.size(); ++p) out[p].low = marking[p];
  return out;
}

/// Image of a firing element in the derived net; empty when high skips a
/// low mode.
inline std::optional<TransIndex> project(const Morphism& m, const FiringMode& f) {
  detail::require_bp_source(m, "firing element");
  check_mode(m.graph, f);
  if (m.kind == MorphismKind::high) {
    if (!f.is_high()) return std::nullopt;
    return m.view.transition_of(f);
  }
  return f.transition;
}

/// Firing element named by a transition of the derived source net.
inline FiringMode project(const Morphism& m, TransIndex t) {
  detail::require_net_source(m, "transition");
  if (t >= m.view.trans_map.size()) throw DomainMismatch("transition outside the derived net");
  return *m.view.trans_map[t].mode;
}

inline std::vector<TransIndex> project(const Morphism& m, const std::vector<FiringMode>& seq) {
  std::vector<TransIndex> out;
  for (const auto& f : seq)
    if (auto t = project(m, f)) out.push_back(*t);
  return out;
}

inline std::vector<FiringMode> project(const Morphism& m, const std::vector<TransIndex>& seq) {
  std::vector<FiringMode> out;
  for (auto t : seq) out.push_back(project(m, t));
  return out;
}

/// Image of a BP place in the flat high-system.
inline PlaceIndex high_place(PlaceIndex p) { return p; }

}  // namespace bpsys

#pragma once

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bpsys/verify.hpp"

namespace bpsys {

/// BP-graph rebuilt from a net meant to be its flat high-system. Places
/// keep their identifiers and numbering; every input transition becomes one
/// high mode.
struct BPGraphReconstruction {
  BPGraph graph;
  std::vector<PlaceIndex> place_map;  // input place -> BP place
  std::vector<FiringMode> mode_map;   // input transition -> BP high mode
};

/// Groups the transitions of a restricted free-choice net into BP
/// transitions: 1/1 transitions behind a branching place form an opening
/// XOR ("xo.<place>"), 1/1 transitions in front of a merging place form a
/// closing XOR ("xc.<place>"), everything else becomes an AND of the same
/// name.
inline BPGraphReconstruction unique_bp_graph(const Net& net) {
  if (!is_restricted_free_choice(net)) throw PreconditionFailed("net is not restricted free-choice");
  if (!is_strongly_connected(net)) throw PreconditionFailed("net is not strongly connected");

  struct Group {
    std::string id;
    TransitionKind kind;
    std::vector<TransIndex> members;
    bool opening = false;  // XOR groups only
  };
  std::vector<Group> groups;
  std::vector<std::optional<std::size_t>> group_of(net.transition_count());
  auto one_one = [&](TransIndex t) { return net.pre(t).size() == 1 && net.post(t).size() == 1; };

  for (PlaceIndex p = 0; p < net.place_count(); ++p) {
    if (net.place_post(p).size() < 2) continue;
    Group g{"xo." + net.place_id(p), TransitionKind::xor_, {}, true};
    for (auto t : net.place_post(p))
      if (one_one(t)) g.members.push_back(t);
    if (g.members.empty()) continue;
    for (auto t : g.members) group_of[t] = groups.size();
    groups.push_back(std::move(g));
  }
  for (PlaceIndex q = 0; q < net.place_count(); ++q) {
    if (net.place_pre(q).size() < 2) continue;
    Group g{"xc." + net.place_id(q), TransitionKind::xor_, {}, false};
    for (auto t : net.place_pre(q))
      if (one_one(t)) g.members.push_back(t);
    if (g.members.empty()) continue;
    for (auto t : g.members) {
      if (group_of[t])
        throw NotReconstructible("transition " + net.transition_id(t) + " is claimed by " + groups[*group_of[t]].id +
                                 " and " + g.id);
      group_of[t] = groups.size();
    }
    groups.push_back(std::move(g));
  }
  // Remaining transitions become ANDs, placed in input order before XORs.
  std::vector<Group> ordered;
  std::vector<std::size_t> final_group(net.transition_count());
  for (TransIndex t = 0; t < net.transition_count(); ++t) {
    if (group_of[t]) continue;
    final_group[t] = ordered.size();
    ordered.push_back(Group{net.transition_id(t), TransitionKind::and_, {t}, false});
  }
  for (auto& g : groups) {
    for (auto t : g.members) final_group[t] = ordered.size();
    ordered.push_back(std::move(g));
  }

  Net out(net.name());
  for (const auto& id : net.place_ids()) out.add_place(id);
  std::vector<TransitionKind> kinds;
  BPGraphReconstruction rec;
  rec.place_map.resize(net.place_count());
  for (PlaceIndex p = 0; p < net.place_count(); ++p) rec.place_map[p] = p;
  rec.mode_map.resize(net.transition_count());
  try {
    for (const auto& g : ordered) {
      if (out.find_place(g.id) || out.find_transition(g.id))
        throw NotReconstructible("identifier clash on " + g.id);
      auto bt = out.add_transition(g.id);
      kinds.push_back(g.kind);
      if (g.kind == TransitionKind::and_) {
        auto t = g.members.front();
        for (auto p : net.pre(t)) out.add_input(p, bt);
        for (auto p : net.post(t)) out.add_output(bt, p);
        rec.mode_map[t] = FiringMode{bt, Colour::high, 0, 0};
      } else if (g.opening) {
        out.add_input(net.pre(g.members.front()).front(), bt);
        for (std::uint32_t j = 0; j < g.members.size(); ++j) {
          auto t = g.members[j];
          out.add_output(bt, net.post(t).front());
          rec.mode_map[t] = FiringMode{bt, Colour::high, 1, j + 1};
        }
      } else {
        for (std::uint32_t i = 0; i < g.members.size(); ++i) {
          auto t = g.members[i];
          out.add_input(net.pre(t).front(), bt);
          rec.mode_map[t] = FiringMode{bt, Colour::high, i + 1, 1};
        }
        out.add_output(bt, net.post(g.members.front()).front());
      }
    }
  } catch (const ValidationError& e) {
    throw NotReconstructible(e.what());
  }
  rec.graph = BPGraph(std::move(out), std::move(kinds));
  for (PlaceIndex p = 0; p < net.place_count(); ++p) {
    if (rec.graph.net().place_pre(p).size() != 1 || rec.graph.net().place_post(p).size() != 1)
      throw NotReconstructible("place " + net.place_id(p) + " would be branched in the BP-graph");
  }
  try {
    rec.graph.validate();
  } catch (const ValidationError& e) {
    throw NotReconstructible(e.what());
  }
  return rec;
}

/// Checks that the flat high-system of the reconstruction is the input net
/// under the witness maps.
inline std::optional<std::string> check_reconstruction(const Net& net, const BPGraphReconstruction& rec) {
  auto high = flat_high_view(rec.graph, BPMarking(rec.graph.net().place_count()));
  if (high.net.place_count() != net.place_count() || high.net.transition_count() != net.transition_count())
    return "node counts differ";
  std::set<FiringMode> seen;
  for (TransIndex t = 0; t < net.transition_count(); ++t) {
    const auto& f = rec.mode_map[t];
    if (!seen.insert(f).second) return "mode " + rec.graph.mode_id(f) + " used twice";
    auto ht = high.transition_of(f);
    if (!ht) return "mode " + rec.graph.mode_id(f) + " missing from the high-system";
    auto mapped = [&](const std::vector<PlaceIndex>& ps) {
      std::vector<PlaceIndex> out;
      for (auto p : ps) out.push_back(rec.place_map[p]);
      return make_node_set(out);
    };
    if (mapped(net.pre(t)) != make_node_set(high.net.pre(*ht)) ||
        mapped(net.post(t)) != make_node_set(high.net.post(*ht)))
      return "arcs of " + net.transition_id(t) + " differ";
  }
  return std::nullopt;
}

/// Same places (by identifier) and the same transitions up to renaming:
/// equal kind and equal pre- and postsets. Unary transitions compare equal
/// regardless of kind, since both kinds behave alike there.
inline bool equivalent_up_to_renaming(const BPGraph& a, const BPGraph& b) {
  const auto& na = a.net();
  const auto& nb = b.net();
  if (na.place_ids() != nb.place_ids() || na.transition_count() != nb.transition_count()) return false;
  using Key = std::tuple<int, std::vector<PlaceIndex>, std::vector<PlaceIndex>>;
  auto keys = [](const BPGraph& g) {
    std::multiset<Key> out;
    for (TransIndex t = 0; t < g.net().transition_count(); ++t) {
      bool unary = g.net().pre(t).size() == 1 && g.net().post(t).size() == 1;
      int kind = unary ? 0 : (g.is_xor(t) ? 2 : 1);
      out.insert({kind, make_node_set(g.net().pre(t)), make_node_set(g.net().post(t))});
    }
    return out;
  };
  return keys(a) == keys(b);
}

struct Extension {
  BPGraphReconstruction reconstruction;
  BPSystem system;                     // safe and live w.r.t. all high-modes
  Component t_component;               // of the input net, holding all high tokens
  std::vector<FiringMode> sigma_high;  // input marking -> high part of system.initial
  Marking skeleton_start;              // skeleton marking before token removal
};

/// Extends a safe and live restricted free-choice system without frozen
/// tokens to a BP-system over the reconstructed BP-graph: all high tokens
/// are gathered in one T-component, a low token is added on every other
/// place, and surplus tokens are removed until the skeleton is safe.
inline Extension extend_to_live_bp(const Net& net, const Marking& m0, const Caps& caps = {},
                                   bool try_all_components = false) {
  if (m0.size() != net.place_count()) throw DomainMismatch("marking does not match net");
  auto rec = unique_bp_graph(net);
  if (!check_safe(net, m0, caps.states).safe) throw PreconditionFailed("system is not safe");
  if (!check_live(net, m0, {}, caps.states).all_live()) throw PreconditionFailed("system is not live");
  if (frozen_tokens(net, m0, caps.states).frozen) throw PreconditionFailed("system has frozen tokens");
  if (!structural_free_from_blocking(net, caps.components).holds)
    throw PreconditionFailed("net is not structurally free from blocking");

  const auto& g = rec.graph;
  const auto& bnet = g.net();
  auto ts = components(net, ComponentKind::t, caps.components);
  if (ts.empty()) throw TheoremViolation("T-component covering", "no T-component");

  for (std::size_t choice = 0; choice < ts.size(); ++choice) {
    const auto& comp = ts[choice];
    try {
      auto act = activate_t_component(net, m0, comp, caps.states);
      std::vector<bool> in_image(bnet.place_count(), false);
      for (auto p : comp.places(net)) in_image[rec.place_map[p]] = true;
      for (PlaceIndex p = 0; p < net.place_count(); ++p)
        if (act.marking[p] > 0 && !in_image[rec.place_map[p]])
          throw TheoremViolation("catching high tokens in a T-component", "token outside the activated component");

      Marking skel(bnet.place_count());
      for (PlaceIndex p = 0; p < net.place_count(); ++p) skel[rec.place_map[p]] = act.marking[p];
      for (PlaceIndex p = 0; p < bnet.place_count(); ++p)
        if (!in_image[p]) skel[p] = 1;
      Marking start = skel;
      if (!t_system_live(bnet, skel, caps.circuits).holds)
        throw TheoremViolation("extension to a live skeleton", "initial skeleton marking is not live");
      while (true) {
        auto s = check_safe(bnet, skel, caps.states);
        if (s.safe) break;
        skel = s.witness->state;
        PlaceIndex over = 0;
        while (skel[over] <= 1) ++over;
        if (in_image[over])
          throw TheoremViolation("token removal outside the T-component", "surplus token inside the component");
        skel[over] = 1;
        if (!t_system_live(bnet, skel, caps.circuits).holds)
          throw TheoremViolation("token removal outside the T-component", "marking lost liveness");
      }

      BPSystem sys{g, BPMarking(bnet.place_count())};
      for (PlaceIndex p = 0; p < bnet.place_count(); ++p) {
        if (in_image[p])
          sys.initial[p].high = skel[p];
        else
          sys.initial[p].low = skel[p];
      }
      // high(mu) must be reachable from the input marking.
      Marking target(net.place_count());
      for (PlaceIndex p = 0; p < net.place_count(); ++p) target[p] = sys.initial[rec.place_map[p]].high;
      auto rg = reach_graph(net, m0, caps.states);
      auto hit = rg.find(target);
      if (!hit) throw TheoremViolation("reachability in live T-systems", "high marking not reachable");
      std::vector<FiringMode> sigma;
      for (auto t : rg.trace_to(*hit)) sigma.push_back(rec.mode_map[t]);
      return {rec, sys, comp, sigma, start};
    } catch (const CapExceeded&) {
      if (!try_all_components || choice + 1 == ts.size()) throw;
    }
  }
  throw TheoremViolation("T-component covering", "no usable T-component");
}

/// Reverse firing of a mode; empty when the postplaces lack the tokens the
/// mode would have produced.
inline std::optional<BPMarking> unfire_mode(const BPGraph& g, const BPMarking& m, const FiringMode& f) {
  const auto& pre = g.net().pre(f.transition);
  const auto& post = g.net().post(f.transition);
  bool xor_t = g.is_xor(f.transition);
  BPMarking prev = m;
  for (std::size_t k = 0; k < post.size(); ++k) {
    bool high = f.is_high() && (!xor_t || k + 1 == f.out);
    auto& slot = high ? prev[post[k]].high : prev[post[k]].low;
    if (slot == 0) return std::nullopt;
    --slot;
  }
  for (std::size_t k = 0; k < pre.size(); ++k) {
    bool high = f.is_high() && (!xor_t || k + 1 == f.in);
    (high ? prev[pre[k]].high : prev[pre[k]].low) += 1;
  }
  return prev;
}

struct ReverseLift {
  BPMarking initial;
  std::vector<FiringMode> sequence;  // initial -> bps.initial
};

/// Finds a BP marking over the given high marking and a BP sequence from it
/// to bps.initial whose high projection is sigma_high. Backward breadth-first
/// search over safe BP markings; low modes may be unfired freely, high modes
/// only in the order of sigma_high.
inline ReverseLift reverse_lift(const BPSystem& bps, const Marking& mu0_high, const std::vector<FiringMode>& sigma_high,
                                const Caps& caps = {}) {
  const auto& g = bps.graph;
  const auto& net = bps.net();
  if (mu0_high.size() != net.place_count()) throw DomainMismatch("marking does not match BP-graph");
  auto view = flat_high_view(g, bps.initial);
  Marking h = mu0_high;
  for (const auto& f : sigma_high) {
    check_mode(g, f);
    if (!f.is_high()) throw DomainMismatch("high sequence contains the low mode " + g.mode_id(f));
    auto t = *view.transition_of(f);
    if (!view.net.is_enabled(h, t))
      throw PreconditionFailed("sequence is not fireable in the high-system at " + g.mode_id(f));
    h = view.net.fire_unchecked(h, t);
  }
  if (h != high_part(bps.initial)) throw PreconditionFailed("sequence does not end in the high marking of the system");
  if (!brute_verdict(bps, caps.states)) throw PreconditionFailed("BP-system is not safe and live w.r.t. all high-modes");

  using Node = std::pair<BPMarking, std::size_t>;  // marking, number of high modes still to unfire
  std::map<Node, std::pair<Node, FiringMode>> next_of;
  const Node root{bps.initial, sigma_high.size()};
  std::deque<Node> queue{root};
  std::set<Node> seen{root};
  auto safe = [](const BPMarking& m) {
    for (PlaceIndex p = 0; p < m.size(); ++p)
      if (m[p].total() > 1) return false;
    return true;
  };
  while (!queue.empty()) {
    auto node = queue.front();
    queue.pop_front();
    if (node.second == 0) {
      ReverseLift out{node.first, {}};
      for (auto cur = node; cur != root;) {
        const auto& [after, f] = next_of.at(cur);
        out.sequence.push_back(f);
        cur = after;
      }
      return out;
    }
    for (TransIndex t = 0; t < net.transition_count(); ++t) {
      for (const auto& f : modes(g, t)) {
        bool matches = f == sigma_high[node.second - 1];
        if (f.is_high() && !matches) continue;
        auto prev = unfire_mode(g, node.first, f);
        if (!prev || !safe(*prev)) continue;
        Node pn{*prev, node.second - (matches ? 1 : 0)};
        if (!seen.insert(pn).second) continue;
        if (seen.size() > caps.states) detail::state_cap_hit(caps.states);
        next_of.emplace(pn, std::pair{node, f});
        queue.push_back(std::move(pn));
      }
    }
  }
  throw NotFound("no BP marking over the given high marking reaches the system marking");
}

struct Synthesis {
  Extension extension;
  BPSystem system;  // over the reconstructed graph, high part = input marking
  std::vector<FiringMode> sequence;  // system.initial -> extension.system.initial
};

/// Full construction: extension, then reverse lifting back to the input
/// marking.
inline Synthesis synthesize(const Net& net, const Marking& m0, const Caps& caps = {}) {
  auto ext = extend_to_live_bp(net, m0, caps);
  Marking mu0(ext.system.net().place_count());
  for (PlaceIndex p = 0; p < net.place_count(); ++p) mu0[ext.reconstruction.place_map[p]] = m0[p];
  auto rl = reverse_lift(ext.system, mu0, ext.sigma_high, caps);
  BPSystem sys{ext.system.graph, rl.initial};
  return {std::move(ext), std::move(sys), std::move(rl.sequence)};
}

}  // namespace bpsys

#pragma once

#include <set>
#include <string>
#include <vector>

#include <random>

#include "bpsys/bpsys.hpp"
#include "bpsys/gen.hpp"
#include "oracles.hpp"

namespace testutil {

using namespace bpsys;

inline Net net_of(std::string_view text) { return parse_net(text).net; }

inline Marking mk(const Net& net, std::string_view text) { return parse_marking(net, text); }
inline BPMarking bmk(const BPGraph& g, std::string_view text) { return parse_bp_marking(g, text); }
inline FiringMode mode(const BPGraph& g, std::string_view text) { return parse_mode(g, text); }

inline DerivedView xdia_high() { return flat_high(fixtures::xdia()); }
inline DerivedView mismatch_high() { return flat_high(fixtures::mismatch()); }

inline std::set<std::string> ids(const Net& net, const NodeSet& nodes) {
  std::set<std::string> out;
  for (auto v : nodes) out.insert(net.node_id(v));
  return out;
}

inline std::set<std::string> place_ids(const Net& net, const std::vector<PlaceIndex>& ps) {
  std::set<std::string> out;
  for (auto p : ps) out.insert(net.place_id(p));
  return out;
}

inline std::set<std::string> mode_ids(const BPGraph& g, const std::vector<FiringMode>& fs) {
  std::set<std::string> out;
  for (const auto& f : fs) out.insert(g.mode_id(f));
  return out;
}

inline oracle::Mode to_oracle(const FiringMode& f) { return {f.transition, f.is_high(), f.in, f.out}; }

inline oracle::Tokens tokens(const Marking& m) { return m.tokens(); }

}  // namespace testutil

#pragma once

#include <random>
#include <string>
#include <vector>

#include "bpsys/derive.hpp"
#include "bpsys/net_core.hpp"

namespace bpsys::gen {

inline constexpr std::size_t max_size = 64;

using Rng = std::mt19937_64;

namespace detail {

inline std::size_t pick(Rng& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }
inline bool chance(Rng& rng, double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p; }

inline void check_size(std::size_t size) {
  if (size == 0 || size > max_size) throw PreconditionFailed("size must be in 1.." + std::to_string(max_size));
}

// Graph under construction: every place has exactly one producer and one
// consumer, so it can be spliced without touching the rest.
struct Sketch {
  struct Place {
    std::size_t src, dst;
    ColourCount tokens;
  };
  struct Trans {
    TransitionKind kind;
    std::vector<std::size_t> pre, post;
  };
  std::vector<Place> places;
  std::vector<Trans> trans;

  std::size_t add_place(std::size_t src, std::size_t dst) {
    places.push_back({src, dst, {}});
    return places.size() - 1;
  }
  std::size_t add_trans(TransitionKind k) {
    trans.push_back({k, {}, {}});
    return trans.size() - 1;
  }
  // Redirects the consumer side of p to t, handing p's old slot in the old
  // consumer's preset to q.
  void reroute(std::size_t p, std::size_t t, std::size_t q) {
    auto old = places[p].dst;
    for (auto& x : trans[old].pre)
      if (x == p) x = q;
    places[q].dst = old;
    places[p].dst = t;
  }

  BPSystem build(const std::string& name) const {
    Net net(name);
    for (std::size_t p = 0; p < places.size(); ++p) net.add_place("p" + std::to_string(p));
    for (std::size_t t = 0; t < trans.size(); ++t) net.add_transition("t" + std::to_string(t));
    std::vector<TransitionKind> kinds;
    for (std::size_t t = 0; t < trans.size(); ++t) {
      for (auto p : trans[t].pre) net.add_input(p, t);
      for (auto p : trans[t].post) net.add_output(t, p);
      kinds.push_back(trans[t].kind);
    }
    BPMarking m(places.size());
    for (std::size_t p = 0; p < places.size(); ++p) m[p] = places[p].tokens;
    return {BPGraph(std::move(net), std::move(kinds)), std::move(m)};
  }
};

inline TransitionKind random_kind(Rng& rng) { return chance(rng, 0.5) ? TransitionKind::xor_ : TransitionKind::and_; }

// p -> t -> q in front of p's consumer.
inline void grow_series(Sketch& s, std::size_t p) {
  auto t = s.add_trans(TransitionKind::and_);
  auto q = s.add_place(t, 0);
  s.reroute(p, t, q);
  s.trans[t].pre = {p};
  s.trans[t].post = {q};
}

// p -> open -> {b1..bk} -> close -> q.
inline void grow_block(Sketch& s, Rng& rng, std::size_t p, std::size_t width) {
  auto open_kind = random_kind(rng);
  auto close_kind = chance(rng, 0.7) ? open_kind : random_kind(rng);
  auto o = s.add_trans(open_kind);
  auto c = s.add_trans(close_kind);
  auto q = s.add_place(c, 0);
  s.reroute(p, o, q);
  s.trans[o].pre = {p};
  for (std::size_t k = 0; k < width; ++k) {
    auto b = s.add_place(o, c);
    s.trans[o].post.push_back(b);
    s.trans[c].pre.push_back(b);
  }
  s.trans[c].post = {q};
}

// p -> join -> q -> split -> out, with the feedback place r: split -> join.
inline void grow_loop(Sketch& s, Rng& rng, std::size_t p) {
  auto kind = random_kind(rng);
  auto join = s.add_trans(chance(rng, 0.8) ? kind : random_kind(rng));
  auto split = s.add_trans(kind);
  auto q = s.add_place(join, split);
  auto r = s.add_place(split, join);
  auto out = s.add_place(split, 0);
  s.reroute(p, join, out);
  s.trans[join].pre = {p, r};
  s.trans[join].post = {q};
  s.trans[split].pre = {q};
  s.trans[split].post = {out, r};
  if (chance(rng, 0.75))
    s.places[r].tokens.low = 1;
  else
    s.places[r].tokens.high = 1;
}

// Extra place between two existing transitions; makes the structure
// non-series-parallel.
inline void grow_sync(Sketch& s, Rng& rng) {
  auto a = pick(rng, s.trans.size());
  auto b = pick(rng, s.trans.size());
  auto r = s.add_place(a, b);
  s.trans[a].post.push_back(r);
  s.trans[b].pre.push_back(r);
  double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  if (u < 0.5)
    s.places[r].tokens.low = 1;
  else if (u < 0.65)
    s.places[r].tokens.high = 1;
}

}  // namespace detail

namespace detail {

inline void grow(Sketch& s, Rng& rng, std::size_t size, bool blocks_only) {
  std::size_t attempts = 0;
  while (s.places.size() < size && attempts++ < 100) {
    auto room = size - s.places.size();
    auto p = pick(rng, s.places.size());
    auto roll = pick(rng, 100);
    if (roll < 20) {
      grow_series(s, p);
    } else if (roll < 65 && room >= 3) {
      std::size_t width = (room >= 4 && chance(rng, 0.1)) ? 3 : 2;
      grow_block(s, rng, p, width);
    } else if (blocks_only) {
      continue;
    } else if (roll < 85 && room >= 3) {
      grow_loop(s, rng, p);
    } else if (roll >= 85 && s.trans.size() >= 2) {
      grow_sync(s, rng);
    }
  }
}

// An XOR loop that can cycle forever next to an AND cycle it feeds only
// through one of its branches.
inline Sketch frozen_core() {
  Sketch s;
  using K = TransitionKind;
  for (auto k : {K::and_, K::and_, K::xor_, K::xor_, K::and_}) s.add_trans(k);
  // a, b, c, x1, x2, y, e
  for (auto [src, dst] : {std::pair{1, 0}, {4, 0}, {0, 1}, {1, 2}, {3, 2}, {2, 3}, {3, 4}}) s.add_place(src, dst);
  s.trans[0].pre = {0, 1};
  s.trans[0].post = {2};
  s.trans[1].pre = {2};
  s.trans[1].post = {3, 0};
  s.trans[2].pre = {3, 4};
  s.trans[2].post = {5};
  s.trans[3].pre = {5};
  s.trans[3].post = {4, 6};
  s.trans[4].pre = {6};
  s.trans[4].post = {1};
  s.places[0].tokens.high = 1;
  s.places[1].tokens.low = 1;
  s.places[4].tokens.high = 1;
  return s;
}

}  // namespace detail

/// Random BP-system with about `size` places: a marked circuit grown by
/// series insertion, opening/closing blocks of matched or mismatched kinds,
/// feedback loops and cross synchronisations. Always carries a high token.
inline BPSystem bp_system(std::uint64_t seed, std::size_t size) {
  detail::check_size(size);
  Rng rng(seed);
  detail::Sketch s;
  auto t0 = s.add_trans(TransitionKind::and_);
  auto p0 = s.add_place(t0, t0);
  s.trans[t0].pre = {p0};
  s.trans[t0].post = {p0};
  s.places[p0].tokens.high = 1;
  detail::grow(s, rng, size, false);
  // Perturb the marking now and then.
  auto roll = detail::pick(rng, 100);
  if (roll < 10) {
    s.places[detail::pick(rng, s.places.size())].tokens.low += 1;
  } else if (roll < 15) {
    s.places[detail::pick(rng, s.places.size())].tokens.high += 1;
  } else if (roll < 25) {
    s.places[p0].tokens.high = 0;
    s.places[detail::pick(rng, s.places.size())].tokens.high += 1;
  }
  return s.build("bp" + std::to_string(seed));
}

/// BP-system grown from a core whose high-system is safe and live but has a
/// frozen token. Growth keeps to series and block insertion.
inline BPSystem frozen_prone_bp_system(std::uint64_t seed, std::size_t size) {
  detail::check_size(size);
  Rng rng(seed);
  auto s = detail::frozen_core();
  detail::grow(s, rng, size, true);
  return s.build("fz" + std::to_string(seed));
}

/// Random strongly connected T-system with `size` places. Transitions lie on
/// a Hamiltonian circuit; extra places join random transition pairs. Every
/// place pointing backwards along the circuit carries a token, so every
/// circuit is marked.
inline std::pair<Net, Marking> t_system(std::uint64_t seed, std::size_t size) {
  detail::check_size(size);
  Rng rng(seed);
  std::size_t nt = std::max<std::size_t>(1, (size + 1) / 2);
  nt = std::min(nt, size);
  Net net("ts" + std::to_string(seed));
  for (std::size_t t = 0; t < nt; ++t) net.add_transition("t" + std::to_string(t));
  std::vector<std::uint32_t> tokens;
  auto link = [&](std::size_t a, std::size_t b) {
    auto p = net.add_place("p" + std::to_string(net.place_count()));
    net.add_output(a, p);
    net.add_input(p, b);
    std::uint32_t n = b <= a ? 1 : 0;
    if (detail::chance(rng, 0.1)) ++n;
    tokens.push_back(n);
  };
  for (std::size_t t = 0; t < nt; ++t) link(t, (t + 1) % nt);
  while (net.place_count() < size) link(detail::pick(rng, nt), detail::pick(rng, nt));
  return {std::move(net), Marking(std::move(tokens))};
}

namespace detail {

inline bool try_add_place(Net& net, std::vector<std::uint32_t>& tokens, Rng& rng) {
  auto a = pick(rng, net.transition_count());
  auto b = pick(rng, net.transition_count());
  Net copy = net;
  auto p = copy.add_place("q" + std::to_string(copy.place_count()));
  copy.add_output(a, p);
  copy.add_input(p, b);
  if (!is_restricted_free_choice(copy)) return false;
  net = std::move(copy);
  tokens.push_back(chance(rng, 0.3) ? 1 : 0);
  return true;
}

inline bool try_add_transition(Net& net, Rng& rng) {
  auto a = pick(rng, net.place_count());
  auto b = pick(rng, net.place_count());
  Net copy = net;
  auto t = copy.add_transition("u" + std::to_string(copy.transition_count()));
  copy.add_input(a, t);
  copy.add_output(t, b);
  if (!is_restricted_free_choice(copy)) return false;
  net = std::move(copy);
  return true;
}

}  // namespace detail

/// Random restricted free-choice net with a random marking. Mixes high
/// systems of random BP-systems, random T-systems and random extensions of
/// both, so well-formed and ill-formed nets both occur.
inline std::pair<Net, Marking> rfc_system(std::uint64_t seed, std::size_t size) {
  detail::check_size(size);
  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  Net net;
  Marking m;
  auto roll = detail::pick(rng, 100);
  if (roll < 65) {
    auto bp_size = std::max<std::size_t>(1, size * 2 / 3);
    auto bps = roll < 45 ? bp_system(rng(), bp_size) : frozen_prone_bp_system(rng(), bp_size);
    if (detail::chance(rng, 0.3)) bps.initial[detail::pick(rng, bps.initial.size())].high += 1;
    auto high = flat_high(bps);
    net = std::move(high.net);
    m = std::move(high.marking);
  } else {
    auto [n, mk] = t_system(rng(), size);
    net = std::move(n);
    m = std::move(mk);
  }
  std::vector<std::uint32_t> tokens = m.tokens();
  auto extra = detail::pick(rng, 3);
  for (std::size_t k = 0, tries = 0; k < extra && tries < 20; ++tries) {
    bool ok = detail::chance(rng, 0.5) ? detail::try_add_place(net, tokens, rng) : detail::try_add_transition(net, rng);
    if (ok) ++k;
  }
  if (detail::chance(rng, 0.3))
    for (auto& x : tokens) x = detail::chance(rng, 0.35) ? 1 : 0;
  net.set_name("rfc" + std::to_string(seed));
  return {std::move(net), Marking(std::move(tokens))};
}

}  // namespace bpsys::gen

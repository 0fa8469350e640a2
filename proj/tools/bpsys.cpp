#include <chrono>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "bpsys/bpsys.hpp"
#include "bpsys/difftest.hpp"
#include "bpsys/gen.hpp"
#include "bpsys/report.hpp"

using namespace bpsys;

namespace {

struct Options {
  std::size_t state_cap = default_state_cap;
  std::size_t circuit_cap = default_circuit_cap;
  std::size_t component_cap = default_component_cap;
  std::uint64_t seed = 1;
  std::string format = "text";
  std::string file;
  std::string out;
  std::string view = "skeleton";
  std::string prop;
  std::string kind = "bp_system";
  std::size_t size = 8;
  std::size_t count = 100;
  std::optional<std::size_t> budget;
  std::string high;
  std::string seq;
  std::string dump;

  Caps caps() const { return {state_cap, circuit_cap, component_cap}; }
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

BPSystem load_bp(const std::string& path) {
  auto f = read_file(path);
  if (auto* b = std::get_if<BPSystem>(&f)) return *b;
  throw UsageError(path + " is not a BP net");
}

// Ordinary nets as they are; BP files through their flat high-system.
NetSystem load_net(const std::string& path) {
  auto f = read_file(path);
  if (auto* n = std::get_if<NetSystem>(&f)) return *n;
  auto high = flat_high(std::get<BPSystem>(f));
  return {high.net, high.marking};
}

Check flag(const std::string& name, bool holds, std::string why = "") {
  return {name, holds ? Outcome::pass : Outcome::fail, holds ? "" : std::move(why), std::nullopt, {}};
}

Check output(std::string text) { return {"output", Outcome::pass, std::move(text), std::nullopt, {}}; }

Report classify_cmd(const Options& o) {
  auto f = read_file(o.file);
  const Net& net = std::holds_alternative<NetSystem>(f) ? std::get<NetSystem>(f).net : std::get<BPSystem>(f).net();
  auto c = classify(net);
  Report r;
  r.kind = "classify";
  r.checks = {flag("t_system", c.t_system), flag("free_choice", c.free_choice),
              flag("restricted_free_choice", c.restricted_free_choice),
              flag("strongly_connected", c.strongly_connected)};
  return r;
}

Report derive_cmd(const Options& o) {
  auto bps = load_bp(o.file);
  DerivedView v;
  if (o.view == "skeleton")
    v = skeleton_view(bps.graph, bps.initial);
  else if (o.view == "high")
    v = flat_high(bps);
  else if (o.view == "low")
    v = low_view(bps);
  else if (o.view == "flat")
    v = flat_view(bps.graph, bps.initial);
  else
    throw UsageError("unknown view '" + o.view + "'");
  Report r;
  r.kind = "derive";
  r.checks = {output(print_file(v.net, v.marking))};
  return r;
}

Report check_cmd(const Options& o) {
  auto caps = o.caps();
  Report r;
  r.kind = "check";
  auto f = read_file(o.file);
  if (auto* bps = std::get_if<BPSystem>(&f); bps && (o.prop == "safe" || o.prop == "live")) {
    if (o.prop == "safe") {
      auto s = check_safe(*bps, caps.states);
      r.checks = {flag("safe", s.safe, s.safe ? "" : bps->graph.marking_string(s.witness->state))};
      if (!s.safe)
        r.counterexample = {{"marking", bps->graph.marking_string(s.witness->state)},
                            {"trace", detail::trace_ids(bps->graph, s.witness->trace)}};
    } else {
      auto l = check_live(*bps, caps.states);
      auto dead = l.high_modes.first_dead();
      r.checks = {flag("live", dead == nullptr,
                       dead ? bps->graph.mode_id(dead->item) + " stuck at " +
                                  bps->graph.marking_string(dead->stuck->state)
                            : "")};
    }
  } else {
    auto sys = load_net(o.file);
    const auto& net = sys.net;
    const auto& m = sys.marking;
    if (o.prop == "safe") {
      auto s = check_safe(net, m, caps.states);
      r.checks = {flag("safe", s.safe, s.safe ? "" : net.marking_string(s.witness->state))};
      if (!s.safe)
        r.counterexample = {{"marking", net.marking_string(s.witness->state)},
                            {"trace", detail::trace_ids(net, s.witness->trace)}};
    } else if (o.prop == "bounded") {
      auto b = check_bounded(net, m, caps.states);
      r.checks = {flag("bounded", b.bounded,
                       b.bounded ? "" : net.marking_string(b.witness->first) + " < " + net.marking_string(b.witness->second))};
      if (!b.bounded) r.counterexample = {{"trace", detail::trace_ids(net, b.trace)}};
    } else if (o.prop == "live") {
      auto l = check_live(net, m, {}, caps.states);
      auto dead = l.first_dead();
      r.checks = {flag("live", dead == nullptr,
                       dead ? net.transition_id(dead->item) + " stuck at " + net.marking_string(dead->stuck->state) : "")};
    } else if (o.prop == "frozen") {
      auto fr = frozen_tokens(net, m, caps.states);
      std::string why;
      if (fr.frozen) {
        const auto& w = *fr.witness;
        why = "token on " + net.place_id(w.place) + " frozen at " + net.marking_string(w.reached);
        r.counterexample = {{"marking", net.marking_string(w.reached)},
                            {"trace", detail::trace_ids(net, w.trace)},
                            {"place", net.place_id(w.place)},
                            {"reduced", net.marking_string(w.reduced)},
                            {"cycle", detail::trace_ids(net, w.cycle)}};
      }
      r.checks = {flag("frozen_free", !fr.frozen, why)};
    } else if (o.prop == "wellformed") {
      auto wf = well_formed_restricted_fc(net, caps.circuits);
      std::string why = wf.reason;
      if (wf.circuit) why += ": " + to_string(net, wf.circuit->nodes);
      if (wf.handle) why += "; handle " + to_string(net, wf.handle->path);
      r.checks = {flag("well_formed", wf.holds, why)};
    } else if (o.prop == "blocking") {
      for (const auto& c : clusters(net).parts) {
        auto b = blocking_marking(net, m, c, caps.states);
        bool ok = b.unique && b.home;
        std::string w = net.marking_string(b.marking);
        if (!ok) w += "; " + std::to_string(b.count) + " blocking markings" + (b.home ? "" : ", not a home state");
        r.checks.push_back({"cluster " + net.node_id(c.nodes.front()), ok ? Outcome::pass : Outcome::fail, w,
                            b.marking, detail::trace_ids(net, b.trace)});
      }
    } else if (o.prop == "sfb") {
      auto s = structural_free_from_blocking(net, caps.components);
      std::string why;
      if (!s.holds)
        why = "P-component " + to_string(net, s.witness->first.nodes) + " misses T-component " +
              to_string(net, s.witness->second.nodes);
      r.checks = {flag("structurally_free_from_blocking", s.holds, why)};
    } else {
      throw UsageError("unknown property '" + o.prop + "'");
    }
  }
  for (const auto& c : r.checks)
    if (c.outcome == Outcome::fail) r.verdict = Outcome::fail;
  return r;
}

Report verify_cmd(const Options& o) {
  auto bps = load_bp(o.file);
  return verdict_report(bps, verify_bp(bps, o.caps()));
}

Report explain_cmd(const Options& o) {
  auto bps = load_bp(o.file);
  auto d = explain(bps, o.caps());
  auto r = verdict_report(bps, d.verdict);
  r.kind = "explain";
  r.checks.push_back({"diagnosis", d.verdict.result, detail::join(d.lines, "\n"), std::nullopt, {}});
  r.text = d.lines;
  return r;
}

Report oracle_cmd(const Options& o) {
  auto sys = load_net(o.file);
  auto res = well_formed_oracle(sys.net, o.budget, o.state_cap);
  Report r;
  r.kind = "oracle";
  r.verdict = res.outcome == Tristate::yes ? Outcome::pass : res.outcome == Tristate::no ? Outcome::fail
                                                                                         : Outcome::inconclusive;
  std::string w = res.witness ? "live and bounded at " + sys.net.marking_string(*res.witness) : res.note;
  r.checks = {{"well_formed", r.verdict, w, res.witness, {}}};
  return r;
}

Report synthesize_cmd(const Options& o) {
  auto f = read_file(o.file);
  auto* sys = std::get_if<NetSystem>(&f);
  if (!sys) throw UsageError(o.file + " is not an ordinary net");
  auto s = synthesize(sys->net, sys->marking, o.caps());
  auto v = verify_bp(s.system, o.caps());
  Report r;
  r.kind = "synthesize";
  r.verdict = v.result;
  r.checks = v.checks;
  r.checks.push_back({"extended_marking", Outcome::pass, s.system.graph.marking_string(s.extension.system.initial),
                      std::nullopt, detail::trace_ids(s.system.graph, s.sequence)});
  r.checks.push_back(output(print_file(s.system)));
  return r;
}

Report reverse_lift_cmd(const Options& o) {
  auto bps = load_bp(o.file);
  auto mu0_high = parse_marking(bps.net(), o.high);
  auto sigma_high = parse_modes(bps.graph, o.seq);
  auto rl = reverse_lift(bps, mu0_high, sigma_high, o.caps());
  Report r;
  r.kind = "reverse-lift";
  r.checks = {{"initial", Outcome::pass, bps.graph.marking_string(rl.initial), std::nullopt, {}},
              {"sequence", Outcome::pass, "[" + detail::join(detail::trace_ids(bps.graph, rl.sequence)) + "]",
               std::nullopt, detail::trace_ids(bps.graph, rl.sequence)},
              output(print_file(BPSystem{bps.graph, rl.initial}))};
  return r;
}

Report gen_cmd(const Options& o) {
  std::string text;
  if (o.kind == "bp_system") {
    text = print_file(gen::bp_system(o.seed, o.size));
  } else if (o.kind == "t_system") {
    auto [net, m] = gen::t_system(o.seed, o.size);
    text = print_file(net, m);
  } else if (o.kind == "rfc_system") {
    auto [net, m] = gen::rfc_system(o.seed, o.size);
    text = print_file(net, m);
  } else {
    throw UsageError("unknown generator '" + o.kind + "'");
  }
  Report r;
  r.kind = "gen";
  r.checks = {output(std::move(text))};
  return r;
}

Report difftest_cmd(const Options& o) {
  return difftest_report(difftest::run(o.prop, o.count, o.seed, o.size, o.caps(), o.dump));
}

int exit_code(Outcome o) {
  switch (o) {
    case Outcome::pass: return 0;
    case Outcome::fail: return 1;
    default: return 2;
  }
}

// Output-producing commands print the produced file in text mode.
void emit(const Options& o, Report& r) {
  if (o.format == "json") {
    std::cout << to_json(r).dump(2) << "\n";
    return;
  }
  std::string file;
  for (auto it = r.checks.begin(); it != r.checks.end();) {
    if (it->name == "output") {
      file = it->witness;
      it = r.checks.erase(it);
    } else if (it->name == "diagnosis") {
      it = r.checks.erase(it);
    } else {
      ++it;
    }
  }
  if (!file.empty() && !o.out.empty()) {
    std::ofstream(o.out) << file;
    file.clear();
  }
  if (!r.checks.empty() || r.kind != "derive" && r.kind != "gen") std::cout << to_text(r);
  std::cout << file;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verification toolkit for bipolar synchronization systems"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--state-cap", o.state_cap, "Maximum number of explored states");
  app.add_option("--circuit-cap", o.circuit_cap, "Maximum number of enumerated circuits or handles");
  app.add_option("--component-cap", o.component_cap, "Maximum search effort for components");
  app.add_option("--seed", o.seed, "Seed for generators and difftest");
  app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "json"}));

  std::map<std::string, std::function<Report(const Options&)>> handlers;
  auto sub = [&](const char* name, const char* about, auto handler, bool needs_file = true) {
    auto* s = app.add_subcommand(name, about);
    if (needs_file) s->add_option("file", o.file, "Net file")->required();
    handlers[name] = handler;
    return s;
  };
  sub("classify", "Structural class of a net", classify_cmd);
  sub("derive", "Derived view of a BP-system as a net file", derive_cmd)
      ->add_option("--view", o.view, "skeleton|high|low|flat")
      ->check(CLI::IsMember({"skeleton", "high", "low", "flat"}));
  sub("check", "Single property of a net or BP-system", check_cmd)
      ->add_option("--prop", o.prop, "safe|bounded|live|frozen|wellformed|blocking|sfb")
      ->required()
      ->check(CLI::IsMember({"safe", "bounded", "live", "frozen", "wellformed", "blocking", "sfb"}));
  sub("verify", "Safety and liveness of a BP-system", verify_cmd);
  sub("explain", "Verdict with deadlock diagnosis", explain_cmd);
  sub("oracle", "Behavioral well-formedness search", oracle_cmd)->add_option("--budget", o.budget, "Token budget");
  sub("synthesize", "Live BP-system over a restricted free-choice system", synthesize_cmd);
  auto* rl = sub("reverse-lift", "BP marking and sequence over a high-system run", reverse_lift_cmd);
  rl->add_option("--high", o.high, "High marking over BP places, e.g. {p0:1}")->required();
  rl->add_option("--seq", o.seq, "High modes, e.g. [x_open.(1,1)]")->required();
  auto* g = sub("gen", "Random instance", gen_cmd, false);
  g->add_option("--kind", o.kind, "t_system|rfc_system|bp_system")
      ->check(CLI::IsMember({"t_system", "rfc_system", "bp_system"}));
  g->add_option("--size", o.size, "Number of places");
  auto* d = sub("difftest", "Differential test of a named property", difftest_cmd, false);
  d->add_option("--prop", o.prop, "Property name")->required();
  d->add_option("-n", o.count, "Number of instances");
  d->add_option("--size", o.size, "Instance size");
  d->add_option("--dump", o.dump, "Directory for minimized reproducers");
  for (auto* s : app.get_subcommands({})) s->add_option("-o,--out", o.out, "Write the produced net file here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 3;
  }
  auto* chosen = app.get_subcommands().front();
  auto start = std::chrono::steady_clock::now();
  try {
    auto r = handlers.at(chosen->get_name())(o);
    r.total_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    emit(o, r);
    return exit_code(r.verdict);
  } catch (const CapExceeded& e) {
    Report r;
    r.kind = chosen->get_name();
    r.verdict = Outcome::inconclusive;
    r.checks = {{"cap", Outcome::inconclusive, e.what(), std::nullopt, {}}};
    r.caps_hit.states = dynamic_cast<const StateCapExceeded*>(&e) != nullptr;
    r.caps_hit.circuits = dynamic_cast<const CircuitCapExceeded*>(&e) != nullptr;
    r.caps_hit.components = dynamic_cast<const SearchCapExceeded*>(&e) != nullptr;
    emit(o, r);
    return 2;
  } catch (const TheoremViolation& e) {
    std::cerr << "theorem violation: " << e.what() << "\n";
    return 1;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

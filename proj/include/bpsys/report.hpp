#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "bpsys/difftest.hpp"
#include "bpsys/verify.hpp"

namespace bpsys {

/// Machine-readable result of one command. Serialised with schema 1:
/// {schema, kind, verdict, checks[{name, outcome, witness}], counterexample,
/// caps{states, circuits, components}, timings}.
struct Report {
  std::string kind;
  Outcome verdict = Outcome::pass;
  std::vector<Check> checks;
  nlohmann::ordered_json counterexample;  // null when there is none
  CapsHit caps_hit;
  double total_ms = 0.0;
  std::vector<std::string> text;  // extra lines for the text format
};

inline nlohmann::ordered_json to_json(const Report& r) {
  nlohmann::ordered_json j;
  j["schema"] = 1;
  j["kind"] = r.kind;
  j["verdict"] = to_string(r.verdict == Outcome::skipped ? Outcome::inconclusive : r.verdict);
  auto checks = nlohmann::ordered_json::array();
  for (const auto& c : r.checks) {
    nlohmann::ordered_json cj;
    cj["name"] = c.name;
    cj["outcome"] = to_string(c.outcome);
    cj["witness"] = c.witness.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(c.witness);
    checks.push_back(std::move(cj));
  }
  j["checks"] = std::move(checks);
  j["counterexample"] = r.counterexample;
  j["caps"] = {{"states", r.caps_hit.states}, {"circuits", r.caps_hit.circuits}, {"components", r.caps_hit.components}};
  j["timings"] = {{"total_ms", r.total_ms}};
  return j;
}

inline std::string to_text(const Report& r) {
  std::ostringstream os;
  os << r.kind << ": " << to_string(r.verdict) << "\n";
  for (const auto& c : r.checks) {
    os << "  " << c.name << ": " << to_string(c.outcome);
    if (!c.witness.empty()) os << " (" << c.witness << ")";
    os << "\n";
  }
  if (!r.counterexample.is_null()) os << "  counterexample: " << r.counterexample.dump() << "\n";
  if (r.caps_hit.any()) os << "  caps hit\n";
  for (const auto& line : r.text) os << line << "\n";
  return os.str();
}

inline nlohmann::ordered_json counterexample(const BPSystem& bps, const Verdict& v) {
  if (!v.dead_marking) {
    for (const auto& c : v.checks)
      if (c.outcome == Outcome::fail && c.marking)
        return {{"check", c.name}, {"marking", bps.net().marking_string(*c.marking)}, {"trace", c.trace}};
    return nullptr;
  }
  nlohmann::ordered_json j;
  j["dead_marking"] = bps.graph.marking_string(v.dead_marking->state);
  j["trace"] = detail::trace_ids(bps.graph, v.dead_marking->trace);
  j["deadlock_transitions"] = nlohmann::ordered_json::array();
  for (auto t : deadlock_transitions(bps, v.dead_marking->state))
    j["deadlock_transitions"].push_back(bps.net().transition_id(t));
  return j;
}

inline Report verdict_report(const BPSystem& bps, const Verdict& v) {
  Report r;
  r.kind = "verify";
  r.verdict = v.result;
  r.checks = v.checks;
  r.caps_hit = v.caps_hit;
  if (v.result == Outcome::fail) r.counterexample = counterexample(bps, v);
  return r;
}

inline Report difftest_report(const difftest::Summary& s) {
  Report r;
  r.kind = "difftest";
  r.verdict = s.ok() ? Outcome::pass : Outcome::fail;
  auto failures = nlohmann::ordered_json::array();
  for (const auto& f : s.failures)
    failures.push_back({{"seed", f.seed},
                        {"size", f.size},
                        {"status", difftest::to_string(f.status)},
                        {"detail", f.detail},
                        {"file", f.file}});
  if (!s.failures.empty()) r.counterexample = std::move(failures);
  std::ostringstream os;
  os << "runs " << s.runs << ", agree " << s.agree << ", disagree " << s.disagree << ", inconclusive "
     << s.inconclusive << ", filtered " << s.filtered << ", violations " << s.violations;
  r.checks.push_back({s.property, r.verdict, os.str(), std::nullopt, {}});
  for (const auto& f : s.failures)
    r.text.push_back("  seed " + std::to_string(f.seed) + " size " + std::to_string(f.size) + ": " + f.detail +
                     (f.file.empty() ? "" : " -> " + f.file));
  return r;
}

}  // namespace bpsys

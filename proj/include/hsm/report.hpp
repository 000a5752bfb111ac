#pragma once

// JSON / CSV views of every result type, plus the run record envelope the
// CLI writes: {config, version, timestamp, results, diagnostics}. JSON is
// canonical (numbers round-trip exactly); CSV is a flattened view of
// trajectory samples.

#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "hsm/analysis.hpp"
#include "hsm/coefficients.hpp"
#include "hsm/integrate.hpp"
#include "hsm/shooting.hpp"

namespace hsm {

inline constexpr const char* kVersion = "0.1.0";

using json = nlohmann::json;

inline json to_json(const ExtReal& e) {
  if (e.is_finite()) return e.value;
  return e.kind == ExtReal::Kind::PlusInf ? "+inf" : "-inf";
}

inline json to_json(const MultPair& p) { return json::array({p.m0, p.m1}); }

inline json to_json(const StructuralConstants& sc) {
  return {
      {"pair", to_json(sc.pair)},
      {"z_alpha", to_json(sc.z_alpha)},
      {"z_beta", sc.z_beta},
      {"big_b", sc.big_b},
      {"c", sc.c},
      {"d_plus", sc.d_plus},
      {"d_minus", sc.d_minus},
      {"cap_c", sc.cap_c},
      {"cap_l", sc.cap_l},
      {"cap_r", sc.cap_r},
      {"multiple_cap_c_roots", sc.multiple_cap_c_roots},
  };
}

inline json to_json(const StripeBounds& b) {
  return {
      {"r_bound", b.r_bound},   {"l_bound_pi", b.l_bound_pi}, {"l_lower", b.l_lower},
      {"r_ok", b.r_ok},         {"l_pi_ok", b.l_pi_ok},       {"l_lower_ok", b.l_lower_ok},
  };
}

inline json to_json(const Fate& f) {
  json j = {{"kind", fate_name(f.kind)}};
  if (f.kind == Fate::Kind::Converged) j["ell"] = f.ell;
  return j;
}

inline const char* event_name(Event::Kind k) {
  switch (k) {
    case Event::Kind::HalfPiCross: return "half_pi_cross";
    case Event::Kind::DerivBlowupTrigger: return "deriv_blowup_trigger";
    case Event::Kind::StripeEscape: return "stripe_escape";
    case Event::Kind::ConvergenceWindow: return "convergence_window";
  }
  return "?";
}

inline json to_json(const Event& e) {
  return {{"kind", event_name(e.kind)}, {"level", e.level}, {"direction", e.direction},
          {"x", e.x},                   {"r", e.r},         {"rp", e.rp}};
}

inline json trajectory_samples_json(const Trajectory& t) {
  json arr = json::array();
  for (const Sample& s : t.samples)
    arr.push_back({{"x", s.x}, {"r", s.r}, {"rp", s.rp}, {"w", s.w}, {"v", s.v}});
  return arr;
}

inline json to_json(const Trajectory& t, bool with_samples = true) {
  json j = {{"pair", to_json(t.pair)},
            {"termination", to_json(t.termination)},
            {"x_end", t.x_end},
            {"tail_cross_pending", t.tail_cross_pending}};
  json ev = json::array();
  for (const Event& e : t.events) ev.push_back(to_json(e));
  j["events"] = ev;
  if (with_samples) j["trajectory"] = trajectory_samples_json(t);
  return j;
}

inline json to_json(const ShotOutcome& s, bool with_trajectory = true) {
  json j = {{"pair", to_json(s.pair)},
            {"v", s.v},
            {"fate", to_json(s.fate)},
            {"nodal", s.nodal},
            {"constant_zero", s.constant_zero}};
  j["ell"] = s.ell ? json(*s.ell) : json(nullptr);
  j["degree"] = s.ell ? json(brouwer_degree(*s.ell, s.pair)) : json(nullptr);
  if (with_trajectory) {
    j["trajectory"] = trajectory_samples_json(s.trajectory);
    json ev = json::array();
    for (const Event& e : s.trajectory.events) ev.push_back(to_json(e));
    j["events"] = ev;
  }
  return j;
}

inline json to_json(const BvpSolution& s, bool with_trajectory = true) {
  json j = to_json(s.outcome, with_trajectory);
  j["v_bracket"] = json::array({s.v_lo, s.v_hi});
  j["degree"] = s.degree;
  j["flags"] = {{"degree_watchdog", s.degree_watchdog}, {"deep_lane_used", s.deep_lane_used}};
  return j;
}

inline json to_json(const SweepRow& r) {
  json j = {{"v", r.v}, {"fate", to_json(r.fate)}, {"nodal", r.nodal}};
  j["ell"] = r.ell ? json(*r.ell) : json(nullptr);
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

inline json to_json(const WindingReport& w) {
  return {{"pair", to_json(w.pair)},
          {"v", w.v},
          {"theta_start", w.theta_start},
          {"theta_end", w.theta_end},
          {"omega", w.omega},
          {"substituted_start", w.substituted_start},
          {"start_x", w.start_x}};
}

inline json to_json(const LimitProfile& p, bool with_samples = true) {
  json j = {{"m0", p.m0}, {"tail_value", p.tail_value}};
  if (with_samples) {
    json arr = json::array();
    for (const auto& s : p.samples) arr.push_back({{"x", s[0]}, {"psi", s[1]}, {"psip", s[2]}});
    j["samples"] = arr;
  }
  return j;
}

inline std::string iso_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof buf, "%FT%TZ", std::gmtime(&tt));
  return buf;
}

/// Envelope for one CLI invocation.
inline json run_record(const json& config, const json& results, const json& diagnostics = {}) {
  return {{"config", config},
          {"version", kVersion},
          {"timestamp", iso_timestamp()},
          {"results", results},
          {"diagnostics", diagnostics}};
}

/// CSV flattening of trajectory samples.
inline std::string trajectory_csv(const Trajectory& t) {
  std::ostringstream os;
  os.precision(17);
  os << "x,r,rp,w,v\n";
  for (const Sample& s : t.samples)
    os << s.x << ',' << s.r << ',' << s.rp << ',' << s.w << ',' << s.v << '\n';
  return os.str();
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os.precision(17);
  os << "v,fate,nodal,ell\n";
  for (const SweepRow& r : rows) {
    os << r.v << ',' << fate_name(r.fate.kind) << ',' << r.nodal << ',';
    if (r.ell) os << *r.ell;
    os << '\n';
  }
  return os.str();
}

inline std::string limit_profile_csv(const LimitProfile& p) {
  std::ostringstream os;
  os.precision(17);
  os << "x,psi,psip\n";
  for (const auto& s : p.samples) os << s[0] << ',' << s[1] << ',' << s[2] << '\n';
  return os.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open output file: " + path);
  f << content;
}

}  // namespace hsm

// Command-line front end: shoot, classify, solve, sweep, and verify the
// boundary-value solutions of the equivariant harmonic self-map equation.
//
// Exit codes: 0 success, 1 property violation, 2 usage/domain error,
// 3 numerical failure.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hsm/analysis.hpp"
#include "hsm/report.hpp"

namespace {

using namespace hsm;

struct GlobalOpts {
  std::vector<std::string> pairs;
  std::string format = "json";
  std::string out;
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double eps = 0;  // per-command epsilon; 0 = command default
  double x_max = 60.0;
  unsigned threads = 0;

  IntegratorControls controls() const {
    IntegratorControls c;
    c.rel_tol = rel_tol;
    c.abs_tol = abs_tol;
    c.x_max = x_max;
    return c;
  }

  json config_echo(const json& extra) const {
    json j = {{"format", format},   {"out", out},     {"rel_tol", rel_tol},
              {"abs_tol", abs_tol}, {"x_max", x_max}, {"threads", threads}};
    for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
    return j;
  }
};

MultPair parse_pair(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos)
    throw CLI::ValidationError("--pair", "expected m0,m1");
  return MultPair(std::stoi(s.substr(0, comma)), std::stoi(s.substr(comma + 1)));
}

std::vector<MultPair> parse_pairs(const std::vector<std::string>& ss) {
  std::vector<MultPair> out;
  for (const auto& s : ss) out.push_back(parse_pair(s));
  if (out.empty()) throw CLI::ValidationError("--pair", "at least one pair is required");
  return out;
}

// lo:hi:n[:log]
std::vector<double> parse_grid(const std::string& s) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const auto colon = s.find(':', pos);
    parts.push_back(s.substr(pos, colon == std::string::npos ? std::string::npos : colon - pos));
    if (colon == std::string::npos) break;
    pos = colon + 1;
  }
  if (parts.size() < 3 || parts.size() > 4)
    throw CLI::ValidationError("--grid", "expected lo:hi:n[:log]");
  const double lo = std::stod(parts[0]);
  const double hi = std::stod(parts[1]);
  const int n = std::stoi(parts[2]);
  const bool log_spacing = parts.size() == 4 && parts[3] == "log";
  return make_grid(lo, hi, n, log_spacing);
}

// "k" or "a..b"
std::pair<int, int> parse_nodal_range(const std::string& s) {
  const auto dots = s.find("..");
  if (dots == std::string::npos) {
    const int k = std::stoi(s);
    return {k, k};
  }
  return {std::stoi(s.substr(0, dots)), std::stoi(s.substr(dots + 2))};
}

void emit(const GlobalOpts& g, const json& record, const std::string& csv = "") {
  if (!g.out.empty()) {
    if (g.format == "csv" && !csv.empty())
      write_text_file(g.out, csv);
    else
      write_text_file(g.out, record.dump(2) + "\n");
    std::cout << "wrote " << g.out << "\n";
  }
}

int cmd_constants(const GlobalOpts& g) {
  json results = json::array();
  for (const auto& ps : g.pairs) {
    const MultPair p = parse_pair(ps);
    const StructuralConstants sc = constants(p);
    json row = to_json(sc);
    std::printf("pair %s\n", p.str().c_str());
    std::printf("  Z^alpha  = %s\n", sc.z_alpha.str().c_str());
    std::printf("  Z^beta   = %.15g\n", sc.z_beta);
    std::printf("  B        = %.15g\n", sc.big_b);
    std::printf("  c        = %.15g\n", sc.c);
    std::printf("  d+       = %.15g\n", sc.d_plus);
    std::printf("  d-       = %.15g\n", sc.d_minus);
    std::printf("  C        = %.15g\n", sc.cap_c);
    std::printf("  L        = %.15g\n", sc.cap_l);
    std::printf("  R        = %.15g\n", sc.cap_r);
    if (p.m0 >= 2) {
      const StripeBounds b = absch1_bounds(p);
      row["stripe_bounds"] = to_json(b);
      std::printf("  R bound  = %.15g  [%s]\n", b.r_bound, b.r_ok ? "ok" : "VIOLATED");
      std::printf("  L pi/2   = %.15g  [%s]\n", b.l_bound_pi, b.l_pi_ok ? "ok" : "VIOLATED");
      std::printf("  L lower  = %.15g  [%s]\n", b.l_lower, b.l_lower_ok ? "ok" : "VIOLATED");
      if (!(b.r_ok && b.l_pi_ok && b.l_lower_ok)) return 1;
    }
    if (sc.multiple_cap_c_roots)
      std::printf("  note: multiple roots found while locating C\n");
    results.push_back(row);
  }
  emit(g, run_record(g.config_echo({{"command", "constants"}, {"pairs", g.pairs}}), results));
  return 0;
}

int cmd_table1(const GlobalOpts& g) {
  const int expected[4] = {4, 27, 60, 106};
  bool all_match = true;
  json results = json::array();
  std::string csv = "m0,m1_max,expected\n";
  for (int m0 = 2; m0 <= 5; ++m0) {
    const int got = m1_max(m0);
    const bool ok = got == expected[m0 - 2];
    all_match = all_match && ok;
    std::printf("m0=%d  m1_max=%d  expected=%d  [%s]\n", m0, got, expected[m0 - 2],
                ok ? "ok" : "MISMATCH");
    results.push_back({{"m0", m0}, {"m1_max", got}, {"expected", expected[m0 - 2]}, {"match", ok}});
    csv += std::to_string(m0) + "," + std::to_string(got) + "," + std::to_string(expected[m0 - 2]) + "\n";
  }
  emit(g, run_record(g.config_echo({{"command", "table1"}}), results), csv);
  return all_match ? 0 : 1;
}

int cmd_shoot(const GlobalOpts& g, double v, bool deep) {
  const MultPair p = parse_pairs(g.pairs).front();
  const IntegratorControls ctl = g.controls();
  ShotOutcome s;
  if (deep) {
    IntegratorControls dctl = ctl;
    dctl.rel_tol = std::min(ctl.rel_tol, 1e-24);
    dctl.abs_tol = std::min(ctl.abs_tol, 1e-28);
    s = shoot<quad>(p, quad(v), dctl);
  } else {
    s = shoot(p, v, ctl);
  }
  std::printf("pair %s  v=%.17g\n", p.str().c_str(), v);
  std::printf("  fate  = %s", fate_name(s.fate.kind));
  if (s.ell) std::printf(" (ell=%d, degree=%+d)", *s.ell, brouwer_degree(*s.ell, p));
  std::printf("\n  nodal = %d\n  x_end = %.6g, %zu samples, %zu events\n", s.nodal,
              s.trajectory.x_end, s.trajectory.samples.size(), s.trajectory.events.size());
  json rec = run_record(g.config_echo({{"command", "shoot"}, {"pair", to_json(p)}, {"v", v}, {"deep", deep}}),
                        json::array({to_json(s)}),
                        {{"constants", to_json(constants(p))}});
  emit(g, rec, trajectory_csv(s.trajectory));
  return s.fate.kind == Fate::Kind::StepFailure ? 3 : 0;
}

int cmd_solve(const GlobalOpts& g, int k) {
  const MultPair p = parse_pairs(g.pairs).front();
  const BvpSolution sol = solve_bvp(p, k, g.controls());
  std::printf("pair %s  nodal=%d\n", p.str().c_str(), k);
  std::printf("  v       = %.17g\n", sol.outcome.v);
  std::printf("  bracket = [%.17g, %.17g]\n", sol.v_lo, sol.v_hi);
  std::printf("  ell     = %d\n", *sol.outcome.ell);
  std::printf("  degree  = %+d%s\n", sol.degree,
              sol.degree_watchdog ? "  ** watchdog: |degree| = 3 **" : "");
  if (sol.deep_lane_used) std::printf("  (deep precision lane used)\n");
  json rec = run_record(g.config_echo({{"command", "solve"}, {"pair", to_json(p)}, {"nodal", k}}),
                        json::array({to_json(sol)}),
                        {{"constants", to_json(constants(p))}});
  emit(g, rec, trajectory_csv(sol.outcome.trajectory));
  return 0;
}

int cmd_sweep(const GlobalOpts& g, const std::string& grid_spec) {
  const MultPair p = parse_pairs(g.pairs).front();
  const auto grid = parse_grid(grid_spec);
  const auto rows = sweep(p, grid, g.controls(), g.threads);
  int max_nodal = 0;
  json results = json::array();
  for (const SweepRow& r : rows) {
    results.push_back(to_json(r));
    max_nodal = std::max(max_nodal, r.nodal);
  }
  std::printf("pair %s: %zu shots, max nodal %d\n", p.str().c_str(), rows.size(), max_nodal);
  for (const SweepRow& r : rows)
    std::printf("  v=%-14.6g fate=%-12s nodal=%d%s\n", r.v, fate_name(r.fate.kind), r.nodal,
                r.error.empty() ? "" : ("  error: " + r.error).c_str());
  json rec = run_record(
      g.config_echo({{"command", "sweep"}, {"pair", to_json(p)}, {"grid", grid_spec}}), results);
  emit(g, rec, sweep_csv(rows));
  return 0;
}

int cmd_omega(const GlobalOpts& g, double v) {
  const MultPair p = parse_pairs(g.pairs).front();
  const WindingReport w = winding(p, v, g.controls());
  const ShotOutcome s = shoot(p, v, g.controls());
  const int floor_omega = (int)std::floor(w.omega);
  std::printf("pair %s  v=%.17g\n", p.str().c_str(), v);
  std::printf("  theta(-d+) = %.12g\n  theta(inf) = %.12g\n  omega      = %.12g\n",
              w.theta_start, w.theta_end, w.omega);
  std::printf("  floor(omega)=%d  nodal=%d  |floor-nodal|<=1: %s\n", floor_omega, s.nodal,
              std::abs(floor_omega - s.nodal) <= 1 ? "yes" : "NO");
  if (w.substituted_start)
    std::printf("  note: trajectory ends before d+; lift starts at %.6g\n", w.start_x);
  json j = to_json(w);
  j["nodal"] = s.nodal;
  emit(g, run_record(g.config_echo({{"command", "omega"}, {"pair", to_json(p)}, {"v", v}}),
                     json::array({j})));
  return std::abs(floor_omega - s.nodal) <= 1 ? 0 : 1;
}

int cmd_limit(const GlobalOpts& g) {
  const MultPair p = parse_pairs(g.pairs).front();
  const LimitProfile prof = limit_profile(p.m0);
  std::printf("m0=%d  psi(%g) = %.6e\n", p.m0, prof.samples.back()[0], prof.tail_value);
  emit(g, run_record(g.config_echo({{"command", "limit"}, {"pair", to_json(p)}}),
                     json::array({to_json(prof)})),
       limit_profile_csv(prof));
  return 0;
}

int cmd_verify(const GlobalOpts& g, const std::string& nodal_range) {
  const MultPair p = parse_pairs(g.pairs).front();
  const auto [k_lo, k_hi] = parse_nodal_range(nodal_range);
  const IntegratorControls ctl = g.controls();
  bool ok = true;
  json results = json::array();
  auto check = [&](const char* name, bool pass, double value) {
    std::printf("  %-28s %-4s (%.3e)\n", name, pass ? "PASS" : "FAIL", value);
    results.push_back({{"check", name}, {"pass", pass}, {"value", value}});
    ok = ok && pass;
  };
  for (int k = k_lo; k <= k_hi; ++k) {
    std::printf("pair %s nodal %d:\n", p.str().c_str(), k);
    const BvpSolution sol = solve_bvp(p, k, ctl);
    const LyapunovReport lr = lyapunov_check(sol.outcome.trajectory);
    check("W nondecreasing (>= Z^a)", lr.max_w_violation < 1e-9, lr.max_w_violation);
    check("V nonincreasing (<= Z^a)", lr.max_v_violation < 1e-9, lr.max_v_violation);
    const DerivBoundReport dr = derivative_bound_check(sol.outcome.trajectory);
    check("slope bounds", dr.worst() < 1e-6, dr.worst());
    check("ell in {-1,0,1}", std::abs(*sol.outcome.ell) <= 1, *sol.outcome.ell);
    check("|degree| in {1,3}", std::abs(sol.degree) == 1 || std::abs(sol.degree) == 3, sol.degree);
    if (sol.degree_watchdog)
      std::printf("  ** watchdog: |degree| = 3 observed at v=%.17g **\n", sol.outcome.v);
    const WindingReport w = winding(p, sol.outcome.v, ctl);
    const double gap = std::fabs(std::floor(w.omega) - sol.outcome.nodal);
    check("winding |floor(omega)-N|<=1", gap <= 1.0, gap);
  }
  emit(g, run_record(g.config_echo({{"command", "verify"},
                                    {"pair", to_json(p)},
                                    {"nodal", nodal_range}}),
                     results));
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shooting solver for equivariant harmonic self-maps of spheres"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  app.set_config("--config");

  GlobalOpts g;
  app.add_option("--format", g.format, "output format: json|csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--out", g.out, "write the run record to this path");
  app.add_option("--rel-tol", g.rel_tol, "integrator relative tolerance");
  app.add_option("--abs-tol", g.abs_tol, "integrator absolute tolerance");
  app.add_option("--eps", g.eps, "command-specific epsilon");
  app.add_option("--x-max", g.x_max, "integration range limit");
  app.add_option("--threads", g.threads, "worker threads for sweeps (0 = all)");

  auto add_pair = [&](CLI::App* cmd, bool required = true) {
    auto* opt = cmd->add_option("--pair", g.pairs, "multiplicity pair m0,m1 (repeatable)");
    if (required) opt->required();
  };

  auto* c_constants = app.add_subcommand("constants", "structural constants of a pair");
  add_pair(c_constants);

  auto* c_table1 = app.add_subcommand("table1", "largest admissible m1 for m0 = 2..5");

  double v = 1.0;
  bool deep = false;
  auto* c_shoot = app.add_subcommand("shoot", "classify one shot");
  add_pair(c_shoot);
  c_shoot->add_option("--v", v, "initial slope")->required();
  c_shoot->add_flag("--deep", deep, "use the deep precision lane");

  int nodal_k = 0;
  auto* c_solve = app.add_subcommand("solve", "solve the BVP with prescribed nodal number");
  add_pair(c_solve);
  c_solve->add_option("--nodal", nodal_k, "nodal number")->required();

  std::string grid_spec;
  auto* c_sweep = app.add_subcommand("sweep", "shots over a slope grid");
  add_pair(c_sweep);
  c_sweep->add_option("--grid", grid_spec, "lo:hi:n[:log]")->required();

  double omega_v = 1.0;
  auto* c_omega = app.add_subcommand("omega", "winding number of one shot");
  add_pair(c_omega);
  c_omega->add_option("--v", omega_v, "initial slope")->required();

  auto* c_limit = app.add_subcommand("limit", "large-velocity limit profile for m0");
  add_pair(c_limit);

  std::string nodal_range = "0..0";
  auto* c_verify = app.add_subcommand("verify", "property suite over solved nodal numbers");
  add_pair(c_verify);
  c_verify->add_option("--nodal", nodal_range, "nodal number or range a..b")->required();

  std::string interval;  // accepted for config-file compatibility
  app.add_option("--interval", interval, "t interval t0,t1 for limit checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*c_constants) return cmd_constants(g);
    if (*c_table1) return cmd_table1(g);
    if (*c_shoot) return cmd_shoot(g, v, deep);
    if (*c_solve) return cmd_solve(g, nodal_k);
    if (*c_sweep) return cmd_sweep(g, grid_spec);
    if (*c_omega) return cmd_omega(g, omega_v);
    if (*c_limit) return cmd_limit(g);
    if (*c_verify) return cmd_verify(g, nodal_range);
  } catch (const std::domain_error& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 2;
  } catch (const NoConvergence& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}

#pragma once

// Winding numbers of the reflected profile, the linearized angle equation
// and the resulting nodal bound for m0 >= 6, the large-velocity limit
// profile psi, the phase-space distance rho, and the reflection that turns
// one family of equal-multiplicity solutions into another.

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "hsm/coefficients.hpp"
#include "hsm/integrate.hpp"
#include "hsm/shooting.hpp"

namespace hsm {

struct UndefinedLift : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NoSettle : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// winding number of the reflected profile phi(x) = r(-x) - pi/2
// ---------------------------------------------------------------------------

struct WindingReport {
  MultPair pair;
  double v = 0;
  double theta_start = 0;  ///< continuous angle at x = -d+ (principal arctan there)
  double theta_end = 0;    ///< settled limit value
  double omega = 0;        ///< -(theta_end - theta_start) / pi
  bool substituted_start = false;  ///< trajectory did not reach d+; lift starts at its end
  double start_x = 0;              ///< reflected coordinate where the lift actually starts
  double max_step_angle = 0;       ///< largest per-step angle change seen while lifting
  /// (x_reflected, theta) along the lift, ascending in the reflected coordinate
  std::vector<std::pair<double, double>> theta_samples;
};

namespace detail {

/// Quintic Hermite between two samples, with the curvature at both ends
/// supplied by the equation itself.
inline std::pair<double, double> quintic_state(const MultPair& p, const Sample& a, const Sample& b,
                                               double x) {
  const double h = b.x - a.x;
  const double s = (x - a.x) / h;
  const double s2 = s * s, s3 = s2 * s, s4 = s3 * s, s5 = s4 * s;
  const double y0 = a.r, y1 = b.r;
  const double d0 = h * a.rp, d1 = h * b.rp;
  const double c0 = h * h * rhs(p, a.x, a.r, a.rp);
  const double c1 = h * h * rhs(p, b.x, b.r, b.rp);
  const double H0 = 1 - 10 * s3 + 15 * s4 - 6 * s5;
  const double H1 = s - 6 * s3 + 8 * s4 - 3 * s5;
  const double H2 = 0.5 * s2 - 1.5 * s3 + 1.5 * s4 - 0.5 * s5;
  const double H3 = 10 * s3 - 15 * s4 + 6 * s5;
  const double H4 = -4 * s3 + 7 * s4 - 3 * s5;
  const double H5 = 0.5 * s3 - s4 + 0.5 * s5;
  const double r = y0 * H0 + d0 * H1 + c0 * H2 + y1 * H3 + d1 * H4 + c1 * H5;
  const double G0 = -30 * s2 + 60 * s3 - 30 * s4;
  const double G1 = 1 - 18 * s2 + 32 * s3 - 15 * s4;
  const double G2 = s - 4.5 * s2 + 6 * s3 - 2.5 * s4;
  const double G3 = 30 * s2 - 60 * s3 + 30 * s4;
  const double G4 = -12 * s2 + 28 * s3 - 15 * s4;
  const double G5 = 1.5 * s2 - 4 * s3 + 2.5 * s4;
  const double rp = (y0 * G0 + d0 * G1 + c0 * G2 + y1 * G3 + d1 * G4 + c1 * G5) / h;
  return {r, rp};
}

/// Interpolated (r, r') at x inside the sample range.
inline std::pair<double, double> state_at(const Trajectory& t, double x) {
  const auto& s = t.samples;
  if (s.empty() || x < s.front().x - 1e-12 || x > s.back().x + 1e-12)
    throw std::domain_error("state_at: x outside the trajectory range");
  auto it = std::lower_bound(s.begin(), s.end(), x,
                             [](const Sample& a, double xv) { return a.x < xv; });
  if (it == s.begin()) return {it->r, it->rp};
  if (it == s.end()) return {s.back().r, s.back().rp};
  const Sample& b = *it;
  const Sample& a = *(it - 1);
  if (b.x == a.x) return {b.r, b.rp};
  return quintic_state(t.pair, a, b, x);
}

inline double wrap_pm_pi(double d) {
  const double pi_v = std::acos(-1.0);
  while (d > pi_v) d -= 2 * pi_v;
  while (d <= -pi_v) d += 2 * pi_v;
  return d;
}

}  // namespace detail

/// Winding number of phi_v(x) = r_v(-x) - pi/2 over [-d+, infinity): lift
/// theta = arctan(phi'/phi) continuously along the reflected profile and
/// normalize the total rotation by pi. The lift walks the stored shot
/// trajectory from x = d+ down to the singular end, extended by the series
/// below the handoff point.
inline WindingReport winding_from_shot(const ShotOutcome& shot) {
  const MultPair p = shot.pair;
  const double v = shot.v;
  const StructuralConstants sc = constants(p);
  const double half_pi = std::acos(-1.0) / 2.0;

  WindingReport rep;
  rep.pair = p;
  rep.v = v;

  const Trajectory& traj = shot.trajectory;
  if (traj.samples.size() < 2) throw UndefinedLift("winding: trajectory carries no samples");

  double walk_top = sc.d_plus;  // original-coordinate start of the lift
  if (traj.samples.back().x < sc.d_plus) {
    walk_top = traj.samples.back().x;
    rep.substituted_start = true;
  }
  rep.start_x = -walk_top;

  // collect (phi, phi') pairs walking the original coordinate downward
  std::vector<std::array<double, 3>> pts;  // reflected x, phi, phi'
  auto add_point = [&](double x_orig, double r, double rp) {
    pts.push_back({-x_orig, r - half_pi, -rp});
  };
  {
    auto [r0, rp0] = detail::state_at(traj, walk_top);
    add_point(walk_top, r0, rp0);
    for (auto it = traj.samples.rbegin(); it != traj.samples.rend(); ++it)
      if (it->x < walk_top) add_point(it->x, it->r, it->rp);
  }
  // series extension below the handoff point, out to the settled regime
  if (!shot.constant_zero) {
    const double x_lo = traj.samples.front().x;
    const SeriesStart<double> series = series_at_zero<double>(p, v);
    for (double x = x_lo - 0.25; x > -45.0; x -= 0.25) {
      const double t = std::atan(std::exp(x));
      const XState<double> st = to_x_state(series, t);
      add_point(st.x, st.r, st.rp);
      if (std::hypot(st.rp, st.r) < 1e-14 * half_pi) break;
    }
  }

  // continuous lift
  double raw_prev = 0, theta = 0;
  bool first = true;
  for (const auto& q : pts) {
    const double phi = q[1], phip = q[2];
    const double norm = std::hypot(phi, phip);
    if (norm < 1e-300) throw UndefinedLift("winding: phi and phi' vanish simultaneously");
    const double raw = std::atan2(phip, phi);
    if (first) {
      theta = std::atan(phip / phi);  // principal branch at the left endpoint of I
      first = false;
    } else {
      const double d = detail::wrap_pm_pi(raw - raw_prev);
      rep.max_step_angle = std::max(rep.max_step_angle, std::fabs(d));
      theta += d;
    }
    raw_prev = raw;
    rep.theta_samples.push_back({q[0], theta});
  }

  // the walk ascends in the reflected coordinate, so samples are in order
  rep.theta_start = rep.theta_samples.front().second;
  rep.theta_end = rep.theta_samples.back().second;
  rep.omega = -(rep.theta_end - rep.theta_start) / std::acos(-1.0);
  return rep;
}

inline WindingReport winding(const MultPair& p, double v, const IntegratorControls& ctl = {}) {
  IntegratorControls dense = ctl;
  dense.sample_dx = std::min(ctl.sample_dx, 0.02);
  return winding_from_shot(shoot(p, v, dense));
}

// ---------------------------------------------------------------------------
// linearized angle equation
// ---------------------------------------------------------------------------

namespace detail {

/// Taylor stepper for theta' = -sin^2 th + (1/2) alpha_sw(x) sin 2 th - m0 cos^2 th,
/// written through s = sin 2 th, c = cos 2 th:
///   theta' = -(1+m0)/2 + ((1-m0)/2) c + (1/2) alpha_sw s.
template <class Real>
struct ThetaJet {
  int N = 0;
  std::vector<Real> T, Th, S, C;

  void resize(int order) {
    N = order;
    T.assign(N + 1, Real(0));
    Th.assign(N + 1, Real(0));
    S.assign(N + 1, Real(0));
    C.assign(N + 1, Real(0));
  }

  void build(const MultPair& p, Real x0, Real th0) {
    const MultPair sw = p.swapped();
    const Real ca = Real(sw.m0 + sw.m1 - 2) / Real(2);
    const Real da = Real(sw.m1 - sw.m0) / Real(2);
    const Real m0 = Real(p.m0);
    T[0] = rmath::tanh(x0);
    Th[0] = th0;
    S[0] = rmath::sin(Real(2) * th0);
    C[0] = rmath::cos(Real(2) * th0);
    for (int k = 0; k + 1 <= N; ++k) {
      Real tt(0);
      for (int i = 0; i <= k; ++i) tt += T[i] * T[k - i];
      T[k + 1] = ((k == 0 ? Real(1) : Real(0)) - tt) / Real(k + 1);

      Real as(0);
      for (int i = 0; i <= k; ++i) as += (ca * T[i] + (i == 0 ? da : Real(0))) * S[k - i];
      Real rhs = Real(0.5) * as + Real(0.5) * (Real(1) - m0) * C[k];
      if (k == 0) rhs -= Real(0.5) * (Real(1) + m0);
      Th[k + 1] = rhs / Real(k + 1);

      Real cth(0), sth(0);
      for (int i = 0; i <= k; ++i) {
        const Real thp = Real(k - i + 1) * Th[k - i + 1];
        cth += C[i] * thp;
        sth += S[i] * thp;
      }
      S[k + 1] = Real(2) * cth / Real(k + 1);
      C[k + 1] = -Real(2) * sth / Real(k + 1);
    }
  }

  Real suggest_step(Real tol) const {
    const Real aN = rmath::fabs(Th[N]);
    const Real aN1 = N >= 1 ? rmath::fabs(Th[N - 1]) : Real(0);
    Real h(1e30);
    if (aN > Real(0)) h = std::min(h, rmath::exp(rmath::log(tol / aN) / Real(N)));
    if (aN1 > Real(0)) h = std::min(h, rmath::exp(rmath::log(tol / aN1) / Real(N - 1)));
    return Real(0.8) * h;
  }

  Real at(Real dx) const {
    Real r(0);
    for (int k = N; k >= 0; --k) r = r * dx + Th[k];
    return r;
  }

  Real deriv_at(Real dx) const {
    Real r(0);
    for (int k = N; k >= 1; --k) r = r * dx + Real(k) * Th[k];
    return r;
  }
};

}  // namespace detail

struct LinearizedResult {
  double theta_limit = 0;
  double x_settled = 0;
};

/// Integrate the linearized angle equation from (x_init, theta_init) until
/// |theta'| stays below 1e-10; the settled value is the limit. Throws
/// NoSettle when the range ends first (for m0 <= 5 the angle never settles:
/// the equation has no real fixed direction there).
inline LinearizedResult linearized_theta(const MultPair& p, double theta_init, double x_init,
                                         const IntegratorControls& ctl = {}) {
  detail::ThetaJet<double> jet;
  jet.resize(14);
  double x = x_init, th = theta_init;
  int calm = 0;
  const double x_stop = std::max(ctl.x_max, x_init + 10.0);
  while (x < x_stop) {
    jet.build(p, x, th);
    const double tol = ctl.abs_tol + ctl.rel_tol * std::max(1.0, std::fabs(th));
    double h = std::min({jet.suggest_step(tol), ctl.max_dx, x_stop - x});
    if (!(h > 0)) break;
    th = jet.at(h);
    x += h;
    if (std::fabs(jet.deriv_at(h)) < 1e-10) {
      if (++calm >= 3) return {th, x};
    } else {
      calm = 0;
    }
  }
  throw NoSettle("linearized_theta: no settled limit before x_max for " + p.str());
}

/// Evaluate theta_L on an explicit grid (matched comparison runs): returns
/// theta_L at each grid point, starting from theta_init at grid.front().
inline std::vector<double> linearized_theta_on_grid(const MultPair& p, double theta_init,
                                                    const std::vector<double>& grid,
                                                    const IntegratorControls& ctl = {}) {
  std::vector<double> out;
  out.reserve(grid.size());
  detail::ThetaJet<double> jet;
  jet.resize(14);
  double x = grid.front(), th = theta_init;
  out.push_back(th);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    while (x < grid[i] - 1e-14) {
      jet.build(p, x, th);
      const double tol = ctl.abs_tol + ctl.rel_tol * std::max(1.0, std::fabs(th));
      double h = std::min({jet.suggest_step(tol), ctl.max_dx, grid[i] - x});
      if (!(h > 0)) throw NoSettle("linearized_theta_on_grid: step underflow");
      th = jet.at(h);
      x += h;
    }
    out.push_back(th);
  }
  return out;
}

/// Explicit nodal-count bound for m0 >= 6:
///   N0 + 1 with N0 = 2 - (x0 + d+) l1 / pi,  l1 = -(2 m0 + m1 + 1)/2,
///   x0 = artanh((4 sqrt(m0) + m1 - m0)/(m0 + m1 - 2)),
/// the slack-2pi case of the two settled-rotation estimates (the looser one).
inline double nodal_upper_bound(const MultPair& p) {
  if (p.m0 < 6) throw std::domain_error("nodal_upper_bound: requires m0 >= 6");
  const double arg = (4.0 * std::sqrt(double(p.m0)) + p.m1 - p.m0) / double(p.m0 + p.m1 - 2);
  if (!(arg > -1.0 && arg < 1.0))
    throw std::domain_error("nodal_upper_bound: artanh argument outside (-1,1)");
  const double x0 = std::atanh(arg);
  const double l1 = -0.5 * (2.0 * p.m0 + p.m1 + 1.0);
  const StructuralConstants sc = constants(p);
  const double n0 = 2.0 - (x0 + sc.d_plus) * l1 / std::acos(-1.0);
  return n0 + 1.0;
}

// ---------------------------------------------------------------------------
// large-velocity limit profile
// ---------------------------------------------------------------------------

struct LimitProfile {
  int m0 = 0;
  std::vector<std::array<double, 3>> samples;  ///< (x, psi, psi')
  double tail_value = 0;
};

struct LimitProfileControls {
  double x_start = -20.0;
  double x_end = 30.0;
  double rel_tol = 1e-12;
  double abs_tol = 1e-14;
};

namespace detail {

/// Taylor stepper for psi'' + (m0-1) psi' + (m0/2) sin 2 psi = 0.
template <class Real>
struct PsiJet {
  int N = 0;
  std::vector<Real> P, S, C;

  void resize(int order) {
    N = order;
    P.assign(N + 2, Real(0));
    S.assign(N + 1, Real(0));
    C.assign(N + 1, Real(0));
  }

  void build(int m0, Real p0, Real pp0) {
    P[0] = p0;
    P[1] = pp0;
    S[0] = rmath::sin(Real(2) * p0);
    C[0] = rmath::cos(Real(2) * p0);
    for (int k = 0; k + 1 <= N; ++k) {
      P[k + 2] = (-Real(m0 - 1) * Real(k + 1) * P[k + 1] - Real(m0) / Real(2) * S[k]) /
                 (Real(k + 1) * Real(k + 2));
      Real cpp(0), spp(0);
      for (int i = 0; i <= k; ++i) {
        const Real pp = Real(k - i + 1) * P[k - i + 1];
        cpp += C[i] * pp;
        spp += S[i] * pp;
      }
      S[k + 1] = Real(2) * cpp / Real(k + 1);
      C[k + 1] = -Real(2) * spp / Real(k + 1);
    }
  }

  Real suggest_step(Real tol) const {
    const Real aN = rmath::fabs(P[N]);
    const Real aN1 = rmath::fabs(P[N + 1]);
    Real h(1e30);
    if (aN > Real(0)) h = std::min(h, rmath::exp(rmath::log(tol / aN) / Real(N)));
    if (aN1 > Real(0)) h = std::min(h, rmath::exp(rmath::log(tol / aN1) / Real(N + 1)));
    return Real(0.8) * h;
  }

  Real at(Real dx) const {
    Real r(0);
    for (int k = N + 1; k >= 0; --k) r = r * dx + P[k];
    return r;
  }

  Real deriv_at(Real dx) const {
    Real r(0);
    for (int k = N + 1; k >= 1; --k) r = r * dx + Real(k) * P[k];
    return r;
  }
};

}  // namespace detail

/// The boundary-layer profile: psi'' + (m0-1) psi' + (m0/2) sin 2 psi = 0
/// seeded by psi ~ -pi/2 + e^x far to the left. For 2 <= m0 <= 5 the tail
/// dies at 0 in an oscillatory way; the tail value at x_end is reported.
inline LimitProfile limit_profile(int m0, const LimitProfileControls& ctl = {}) {
  if (m0 < 2) throw std::domain_error("limit_profile: requires m0 >= 2");
  const double pi_v = std::acos(-1.0);
  LimitProfile prof;
  prof.m0 = m0;
  detail::PsiJet<double> jet;
  jet.resize(16);
  double x = ctl.x_start;
  double psi = -pi_v / 2 + std::exp(ctl.x_start);
  double psip = std::exp(ctl.x_start);
  prof.samples.push_back({x, psi, psip});
  while (x < ctl.x_end) {
    jet.build(m0, psi, psip);
    const double tol = ctl.abs_tol + ctl.rel_tol * std::max(1.0, std::fabs(psi));
    double h = std::min({jet.suggest_step(tol), 0.5, ctl.x_end - x});
    if (!(h > 0)) throw std::runtime_error("limit_profile: step underflow");
    psi = jet.at(h);
    psip = jet.deriv_at(h);
    x += h;
    prof.samples.push_back({x, psi, psip});
    if (std::fabs(psi) > pi_v)
      throw std::runtime_error("limit_profile: profile left [-pi, pi], diverged");
  }
  prof.tail_value = psi;
  return prof;
}

// ---------------------------------------------------------------------------
// phase-space distance and the large-velocity limit check
// ---------------------------------------------------------------------------

/// rho(x) = sqrt((r - pi/2)^2 + r'^2) from the interpolated trajectory state.
inline double rho(const MultPair& /*pair*/, const Trajectory& traj, double x) {
  auto [r, rp] = detail::state_at(traj, x);
  return std::hypot(r - std::acos(-1.0) / 2.0, rp);
}

/// Supremum of rho over [x_lo, x_hi], sub-sampled between stored samples.
inline double sup_rho(const Trajectory& traj, double x_lo, double x_hi, int subdiv = 8) {
  const auto& s = traj.samples;
  if (s.empty()) throw std::domain_error("sup_rho: empty trajectory");
  x_lo = std::max(x_lo, s.front().x);
  x_hi = std::min(x_hi, s.back().x);
  if (!(x_lo < x_hi)) throw std::domain_error("sup_rho: window misses the trajectory range");
  double best = 0;
  const MultPair p = traj.pair;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    if (s[i + 1].x < x_lo || s[i].x > x_hi) continue;
    for (int j = 0; j <= subdiv; ++j) {
      const double x = s[i].x + (s[i + 1].x - s[i].x) * j / subdiv;
      if (x < x_lo || x > x_hi) continue;
      best = std::max(best, rho(p, traj, x));
    }
  }
  return best;
}

struct LimitCheckReport {
  std::vector<double> sup_values;  ///< per solution, in input order
  bool strictly_decreasing = true;
  bool final_below_eps = false;
};

/// Verifies the large-velocity concentration: sup rho over the x-image of
/// (t0, t1) should fall as v grows and end below eps. Solutions must share
/// the pair and come sorted by increasing v.
inline LimitCheckReport limiting_convergence_check(const std::vector<BvpSolution>& solutions,
                                                   double t0, double t1, double eps) {
  LimitCheckReport rep;
  if (solutions.empty()) return rep;
  for (std::size_t i = 1; i < solutions.size(); ++i) {
    if (!(solutions[i].outcome.v > solutions[i - 1].outcome.v))
      throw std::domain_error("limiting_convergence_check: solutions not sorted by v");
    if (!(solutions[i].outcome.pair == solutions[0].outcome.pair))
      throw std::domain_error("limiting_convergence_check: mixed pairs");
  }
  const double x_lo = std::log(std::tan(t0));
  const double x_hi = std::log(std::tan(t1));
  for (const BvpSolution& sol : solutions)
    rep.sup_values.push_back(sup_rho(sol.outcome.trajectory, x_lo, x_hi));
  for (std::size_t i = 1; i < rep.sup_values.size(); ++i)
    if (!(rep.sup_values[i] < rep.sup_values[i - 1])) rep.strictly_decreasing = false;
  rep.final_below_eps = rep.sup_values.back() < eps;
  return rep;
}

// ---------------------------------------------------------------------------
// reflection for equal multiplicities
// ---------------------------------------------------------------------------

namespace detail {

/// Re-integration defect of a sampled trajectory: propagate each sample to
/// its successor with substepped classical RK4 and report the worst endpoint
/// mismatch. An honest consistency check that does not reuse the stored
/// derivative chain.
inline double reintegration_defect(const MultPair& p, const std::vector<Sample>& s,
                                   double substep = 0.005) {
  double worst = 0;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    double x = s[i].x, r = s[i].r, rp = s[i].rp;
    const double span = s[i + 1].x - x;
    const int n = std::max(1, (int)std::ceil(span / substep));
    const double h = span / n;
    for (int j = 0; j < n; ++j) {
      const auto f = [&](double xx, double rr, double pp) { return rhs(p, xx, rr, pp); };
      const double k1r = rp, k1p = f(x, r, rp);
      const double k2r = rp + 0.5 * h * k1p, k2p = f(x + 0.5 * h, r + 0.5 * h * k1r, rp + 0.5 * h * k1p);
      const double k3r = rp + 0.5 * h * k2p, k3p = f(x + 0.5 * h, r + 0.5 * h * k2r, rp + 0.5 * h * k2p);
      const double k4r = rp + h * k3p, k4p = f(x + h, r + h * k3r, rp + h * k3p);
      r += h / 6 * (k1r + 2 * k2r + 2 * k3r + k4r);
      rp += h / 6 * (k1p + 2 * k2p + 2 * k3p + k4p);
      x += h;
    }
    worst = std::max(worst, std::hypot(r - s[i + 1].r, rp - s[i + 1].rp));
  }
  return worst;
}

}  // namespace detail

/// Reflected solution s(x) = (2k+1) pi/2 - r(-x) for equal multiplicities.
/// The reflected trajectory is revalidated by a re-integration defect check,
/// and its nodal count, boundary level and degree are recomputed. The
/// shooting slope of the reflection equals the decay coefficient of r at its
/// converged end and is reported as an estimate from the final sample.
inline BvpSolution reflect_mm(const BvpSolution& solution, int k, double* defect_out = nullptr) {
  const MultPair p = solution.outcome.pair;
  if (p.m0 != p.m1) throw std::domain_error("reflect_mm: requires m0 = m1");
  const Trajectory& orig = solution.outcome.trajectory;
  if (orig.samples.size() < 2) throw std::domain_error("reflect_mm: trajectory carries no samples");
  const double pi_v = std::acos(-1.0);
  const double level_k = (2 * k + 1) * pi_v / 2;

  Trajectory refl;
  refl.pair = p;
  for (auto it = orig.samples.rbegin(); it != orig.samples.rend(); ++it) {
    Sample s;
    s.x = -it->x;
    s.r = level_k - it->r;
    s.rp = it->rp;
    const double b = rmath::to_double(beta(p, s.x));
    s.w = 0.5 * s.rp * s.rp + b * std::sin(s.r) * std::sin(s.r);
    s.v = 0.5 * s.rp * s.rp - b * std::cos(s.r) * std::cos(s.r);
    refl.samples.push_back(s);
  }
  refl.x_end = refl.samples.back().x;
  refl.termination = {Fate::Kind::Converged, k};

  const double defect = detail::reintegration_defect(p, refl.samples);
  if (defect_out) *defect_out = defect;

  // nodal count and crossing events of the reflection, from sample signs
  int nodal = 0;
  for (std::size_t i = 0; i + 1 < refl.samples.size(); ++i) {
    const double f0 = refl.samples[i].r - pi_v / 2;
    const double f1 = refl.samples[i + 1].r - pi_v / 2;
    if ((f0 > 0) != (f1 > 0)) {
      ++nodal;
      Event e;
      e.kind = Event::Kind::HalfPiCross;
      e.level = 0;
      e.direction = refl.samples[i].rp > 0 ? 1 : -1;
      e.x = refl.samples[i].x;
      e.r = refl.samples[i].r;
      e.rp = refl.samples[i].rp;
      refl.events.push_back(e);
    }
  }

  // decay coefficient of r at its converged end ~ shooting slope of s;
  // the combination (m1 delta + r') e^x / (m1+1) cancels the growing mode
  const Sample& last = orig.samples.back();
  const int ell = solution.outcome.ell.value_or(0);
  const double level = (2 * ell + 1) * pi_v / 2;
  const double sigma =
      (p.m1 * (level - last.r) + last.rp) * std::exp(last.x) / (p.m1 + 1);

  BvpSolution out;
  out.outcome.pair = p;
  out.outcome.v = sigma;
  out.outcome.fate = refl.termination;
  out.outcome.nodal = nodal;
  out.outcome.ell = k;
  out.outcome.trajectory = std::move(refl);
  for (const Event& e : out.outcome.trajectory.events) out.outcome.crossings.push_back(e);
  out.v_lo = out.v_hi = sigma;
  out.degree = brouwer_degree(k, p);
  out.degree_watchdog = std::abs(out.degree) == 3;
  out.deep_lane_used = solution.deep_lane_used;
  return out;
}

}  // namespace hsm

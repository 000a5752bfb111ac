#pragma once

// Adaptive integration of r'' = alpha(x) r' - beta(x) sin 2r by Taylor
// series (jets). Per step the solution jet is generated from the recurrences
//
//   T' = 1 - T^2           (T = tanh x),
//   S' = 2 C r', C' = -2 S r'  (S = sin 2r, C = cos 2r),
//   (k+1)(k+2) r[k+2] = (alpha r')[k] - (beta S)[k],
//
// so the dense output is the jet polynomial itself and the same code runs
// at any precision lane. Termination uses the structural gates: r' beyond
// +-B past c forces divergence, a half-level crossing past d+ forces
// divergence in the crossing direction, and entering a small phase-space
// ball around a half-level equilibrium past max(d+, 0) classifies the shot
// as converged to that level (the only bounded fate available to a
// non-constant solution).

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "hsm/coefficients.hpp"
#include "hsm/pair.hpp"
#include "hsm/real.hpp"
#include "hsm/series.hpp"

namespace hsm {

struct OdeStateX {
  double x = 0, r = 0, rp = 0;
};

struct Event {
  enum class Kind { HalfPiCross, DerivBlowupTrigger, StripeEscape, ConvergenceWindow };
  Kind kind{};
  int level = 0;      ///< ell for level events: the crossed/approached (2 ell + 1) pi/2
  int direction = 0;  ///< sign of r' at the event
  double x = 0, r = 0, rp = 0;
};

struct Fate {
  enum class Kind { Converged, BlowUpPlus, BlowUpMinus, ReachedXMax, StepFailure };
  Kind kind = Kind::ReachedXMax;
  int ell = 0;  ///< boundary level, meaningful for Converged only

  bool operator==(const Fate&) const = default;
};

inline const char* fate_name(Fate::Kind k) {
  switch (k) {
    case Fate::Kind::Converged: return "converged";
    case Fate::Kind::BlowUpPlus: return "blowup_plus";
    case Fate::Kind::BlowUpMinus: return "blowup_minus";
    case Fate::Kind::ReachedXMax: return "xmax";
    case Fate::Kind::StepFailure: return "step_failure";
  }
  return "?";
}

struct Sample {
  double x = 0, r = 0, rp = 0;
  double w = 0;  ///< W = r'^2/2 + beta sin^2 r
  double v = 0;  ///< V = r'^2/2 - beta cos^2 r
};

struct Trajectory {
  MultPair pair;
  double v = 0;  ///< shooting slope that produced this trajectory (if any)
  std::vector<Sample> samples;
  std::vector<Event> events;
  Fate termination;
  double x_end = 0;
  bool tail_cross_pending = false;  ///< diverging with the pi/2 crossing still ahead
};

struct IntegratorControls {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double eps_conv = 1e-3;  ///< phase-space ball radius for the converged classification
  double x_max = 60.0;
  double max_dx = 0.5;
  double sample_dx = 0.25;
  double event_x_tol = 1e-12;
  bool continue_after_converged = false;  ///< keep integrating (samples only) after the seal
  int jet_order = 0;                      ///< 0 = auto per lane

  IntegratorControls tightened(double factor) const {
    IntegratorControls c = *this;
    c.rel_tol *= factor;
    c.abs_tol *= factor;
    return c;
  }
};

/// Right-hand side r'' of the x-form equation.
template <class Real>
Real rhs(const MultPair& p, Real x, Real r, Real rp) {
  return alpha(p, x) * rp - beta(p, x) * rmath::sin(Real(2) * r);
}

inline double rhs(const MultPair& p, const OdeStateX& s) { return rhs(p, s.x, s.r, s.rp); }

namespace detail {

template <class Real>
struct OdeJet {
  int N = 0;
  std::vector<Real> T, R, S, C;  // R has degree N+1, the others N

  void resize(int order) {
    N = order;
    T.assign(N + 1, Real(0));
    R.assign(N + 2, Real(0));
    S.assign(N + 1, Real(0));
    C.assign(N + 1, Real(0));
  }

  void build(const MultPair& p, Real x0, Real r0, Real rp0) {
    const Real ca = Real(p.m0 + p.m1 - 2) / Real(2);
    const Real da = Real(p.m1 - p.m0) / Real(2);
    const Real cb = Real(p.m0 + p.m1) / Real(4);
    const Real db = Real(p.m1 - p.m0) / Real(4);
    T[0] = rmath::tanh(x0);
    R[0] = r0;
    R[1] = rp0;
    S[0] = rmath::sin(Real(2) * r0);
    C[0] = rmath::cos(Real(2) * r0);
    for (int k = 0; k + 1 <= N; ++k) {
      Real tt(0);
      for (int i = 0; i <= k; ++i) tt += T[i] * T[k - i];
      T[k + 1] = ((k == 0 ? Real(1) : Real(0)) - tt) / Real(k + 1);

      Real ar(0), bs(0), crp(0), srp(0);
      for (int i = 0; i <= k; ++i) {
        const Real ai = ca * T[i] + (i == 0 ? da : Real(0));
        const Real bi = cb * T[i] + (i == 0 ? db : Real(0));
        const Real rp_k = Real(k - i + 1) * R[k - i + 1];
        ar += ai * rp_k;
        bs += bi * S[k - i];
        crp += C[i] * rp_k;
        srp += S[i] * rp_k;
      }
      R[k + 2] = (ar - bs) / (Real(k + 1) * Real(k + 2));
      S[k + 1] = Real(2) * crp / Real(k + 1);
      C[k + 1] = -Real(2) * srp / Real(k + 1);
    }
  }

  /// Step size from the decay of the top two coefficients.
  Real suggest_step(Real tol) const {
    const Real aN = rmath::fabs(R[N]);
    const Real aN1 = rmath::fabs(R[N + 1]);
    Real h(1e30);
    if (aN > Real(0)) h = std::min(h, rmath::exp(rmath::log(tol / aN) / Real(N)));
    if (aN1 > Real(0)) h = std::min(h, rmath::exp(rmath::log(tol / aN1) / Real(N + 1)));
    return Real(0.8) * h;
  }

  Real r_at(Real dx) const {
    Real r(0);
    for (int k = N + 1; k >= 0; --k) r = r * dx + R[k];
    return r;
  }

  Real rp_at(Real dx) const {
    Real r(0);
    for (int k = N + 1; k >= 1; --k) r = r * dx + Real(k) * R[k];
    return r;
  }
};

template <class Real>
int default_jet_order() {
  return sizeof(Real) > 8 ? 30 : 16;
}

// Bisection for a root of (jet r - L) inside [lo, hi] where the sign changes.
template <class Real>
Real refine_level_crossing(const OdeJet<Real>& jet, Real L, Real lo, Real hi, Real xtol) {
  Real flo = jet.r_at(lo) - L;
  for (int it = 0; it < 200 && hi - lo > xtol; ++it) {
    const Real mid = Real(0.5) * (lo + hi);
    const Real fm = jet.r_at(mid) - L;
    if ((fm > Real(0)) == (flo > Real(0))) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return Real(0.5) * (lo + hi);
}

template <class Real>
Real refine_slope_crossing(const OdeJet<Real>& jet, Real level, Real lo, Real hi, Real xtol) {
  Real flo = jet.rp_at(lo) - level;
  for (int it = 0; it < 200 && hi - lo > xtol; ++it) {
    const Real mid = Real(0.5) * (lo + hi);
    const Real fm = jet.rp_at(mid) - level;
    if ((fm > Real(0)) == (flo > Real(0))) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return Real(0.5) * (lo + hi);
}

}  // namespace detail

/// Integrate from a Real-precision start state. The returned trajectory is
/// stored in double regardless of lane; classification decisions are made
/// at lane precision.
template <class Real>
Trajectory integrate(const MultPair& p, const XState<Real>& start, const IntegratorControls& ctl) {
  if (p.m1 < 2) throw std::domain_error("integrate: requires m1 >= 2");
  const StructuralConstants sc = constants(p);
  const Real big_b = Real(sc.big_b);
  const Real c_gate = std::isnan(sc.c) ? Real(1e30) : Real(sc.c);
  const Real d_plus = Real(sc.d_plus);
  const Real conv_gate = std::max(Real(0), d_plus);
  const Real half_pi = rmath::pi<Real>() / Real(2);
  const Real pi_v = rmath::pi<Real>();
  const Real eps_conv = Real(ctl.eps_conv);

  Trajectory traj;
  traj.pair = p;

  auto push_sample = [&](Real x, Real r, Real rp) {
    const Real b = beta(p, x);
    const Real sr = rmath::sin(r);
    const Real cr = rmath::cos(r);
    Sample s;
    s.x = rmath::to_double(x);
    s.r = rmath::to_double(r);
    s.rp = rmath::to_double(rp);
    s.w = rmath::to_double(Real(0.5) * rp * rp + b * sr * sr);
    s.v = rmath::to_double(Real(0.5) * rp * rp - b * cr * cr);
    traj.samples.push_back(s);
  };

  // nearest half-level (2 ell + 1) pi/2: boundaries sit at multiples of pi
  auto nearest_level = [&](Real r) { return (int)rmath::to_double(rmath::floor(r / pi_v)); };

  Real x = start.x, r = start.r, rp = start.rp;
  push_sample(x, r, rp);

  const int order = ctl.jet_order > 0 ? ctl.jet_order : detail::default_jet_order<Real>();
  detail::OdeJet<Real> jet;
  jet.resize(order);

  bool sealed = false;  // fate decided; in continue mode integration goes on for samples
  const Real xtol = Real(ctl.event_x_tol);

  // A diverging trajectory still crosses pi/2 once more if it sits strictly
  // on the far side when the fate is sealed (the crossing "at infinity").
  const Real tail_tol = Real(1e-6);
  auto pending_tail = [&](Fate::Kind kind, Real r_end) {
    return (kind == Fate::Kind::BlowUpPlus && r_end < half_pi - tail_tol) ||
           (kind == Fate::Kind::BlowUpMinus && r_end > half_pi + tail_tol);
  };

  // immediate classification of the start state
  if (x > c_gate && rmath::fabs(rp) > big_b) {
    traj.termination = {rp > Real(0) ? Fate::Kind::BlowUpPlus : Fate::Kind::BlowUpMinus, 0};
    traj.events.push_back({Event::Kind::DerivBlowupTrigger, 0, rp > Real(0) ? 1 : -1,
                           rmath::to_double(x), rmath::to_double(r), rmath::to_double(rp)});
    traj.x_end = rmath::to_double(x);
    traj.tail_cross_pending = pending_tail(traj.termination.kind, r);
    return traj;
  }

  while (true) {
    if (rmath::to_double(x) >= ctl.x_max) {
      if (!sealed) traj.termination = {Fate::Kind::ReachedXMax, 0};
      break;
    }
    jet.build(p, x, r, rp);
    const Real tol = Real(ctl.abs_tol) +
                     Real(ctl.rel_tol) * std::max(rmath::fabs(r), std::max(rmath::fabs(rp), Real(1)));
    Real h = jet.suggest_step(tol);
    h = std::min(h, Real(ctl.max_dx));
    h = std::min(h, Real(ctl.x_max) - x);
    if (!(h > Real(0)) || h < Real(1e-13) * std::max(Real(1), rmath::fabs(x))) {
      if (!sealed) traj.termination = {Fate::Kind::StepFailure, 0};
      traj.x_end = rmath::to_double(x);
      return traj;
    }

    // node scan over the step for events and the convergence ball
    constexpr int kNodes = 16;
    Real nr[kNodes + 1], nrp[kNodes + 1], nx[kNodes + 1];
    for (int j = 0; j <= kNodes; ++j) {
      const Real dx = h * Real(j) / Real(kNodes);
      nx[j] = dx;
      nr[j] = jet.r_at(dx);
      nrp[j] = jet.rp_at(dx);
    }

    struct StepEvent {
      Real dx;
      Event::Kind kind;
      int level;
      int direction;
    };
    std::vector<StepEvent> evs;

    if (!sealed) {
      // half-level crossings
      Real rmin = nr[0], rmax = nr[0];
      for (int j = 1; j <= kNodes; ++j) {
        rmin = std::min(rmin, nr[j]);
        rmax = std::max(rmax, nr[j]);
      }
      const int lo_l = nearest_level(rmin) - 1;
      const int hi_l = nearest_level(rmax) + 1;
      for (int ell = lo_l; ell <= hi_l; ++ell) {
        const Real L = Real(2 * ell + 1) * half_pi;
        for (int j = 0; j < kNodes; ++j) {
          const Real f0 = nr[j] - L, f1 = nr[j + 1] - L;
          if (f0 == Real(0) && j == 0) continue;  // boundary touch handled by previous step
          if ((f0 > Real(0)) != (f1 > Real(0))) {
            const Real dxc = detail::refine_level_crossing(jet, L, nx[j], nx[j + 1], xtol);
            const int dir = jet.rp_at(dxc) > Real(0) ? 1 : -1;
            evs.push_back({dxc, Event::Kind::HalfPiCross, ell, dir});
          }
        }
      }
      // derivative blow-up triggers: |r'| crossing B from below, past c
      for (int j = 0; j < kNodes; ++j) {
        if (x + nx[j + 1] <= c_gate) continue;
        if (nrp[j] <= big_b && nrp[j + 1] > big_b) {
          const Real dxc = detail::refine_slope_crossing(jet, big_b, nx[j], nx[j + 1], xtol);
          evs.push_back({dxc, Event::Kind::DerivBlowupTrigger, 0, 1});
        }
        if (nrp[j] >= -big_b && nrp[j + 1] < -big_b) {
          const Real dxc = detail::refine_slope_crossing(jet, -big_b, nx[j], nx[j + 1], xtol);
          evs.push_back({dxc, Event::Kind::DerivBlowupTrigger, 0, -1});
        }
      }
      // convergence ball entry at nodes
      for (int j = 1; j <= kNodes; ++j) {
        if (x + nx[j] < conv_gate) continue;
        const int ell = nearest_level(nr[j]);
        const Real L = Real(2 * ell + 1) * half_pi;
        if (rmath::hypot(nr[j] - L, nrp[j]) < eps_conv) {
          evs.push_back({nx[j], Event::Kind::ConvergenceWindow, ell, 0});
          break;
        }
      }
      std::sort(evs.begin(), evs.end(), [](const StepEvent& a, const StepEvent& b) { return a.dx < b.dx; });
    }

    Real step_end = h;
    std::optional<Fate> terminal;

    for (const StepEvent& e : evs) {
      const Real ex = x + e.dx;
      const Real er = jet.r_at(e.dx);
      const Real erp = jet.rp_at(e.dx);
      if (e.kind == Event::Kind::HalfPiCross) {
        traj.events.push_back({Event::Kind::HalfPiCross, e.level, e.direction, rmath::to_double(ex),
                               rmath::to_double(er), rmath::to_double(erp)});
        if (ex >= d_plus) {
          traj.events.push_back({Event::Kind::StripeEscape, e.level, e.direction, rmath::to_double(ex),
                                 rmath::to_double(er), rmath::to_double(erp)});
          terminal = Fate{e.direction > 0 ? Fate::Kind::BlowUpPlus : Fate::Kind::BlowUpMinus, 0};
          step_end = e.dx;
          break;
        }
      } else if (e.kind == Event::Kind::DerivBlowupTrigger) {
        if (ex <= c_gate) continue;
        traj.events.push_back({Event::Kind::DerivBlowupTrigger, 0, e.direction, rmath::to_double(ex),
                               rmath::to_double(er), rmath::to_double(erp)});
        terminal = Fate{e.direction > 0 ? Fate::Kind::BlowUpPlus : Fate::Kind::BlowUpMinus, 0};
        step_end = e.dx;
        break;
      } else if (e.kind == Event::Kind::ConvergenceWindow) {
        traj.events.push_back({Event::Kind::ConvergenceWindow, e.level, 0, rmath::to_double(ex),
                               rmath::to_double(er), rmath::to_double(erp)});
        traj.termination = {Fate::Kind::Converged, e.level};
        sealed = true;
        if (!ctl.continue_after_converged) {
          terminal = traj.termination;
          step_end = e.dx;
        }
        break;  // remaining events in this step are past the seal
      }
    }

    // dense samples across the accepted part of the step
    const double sdx = std::max(ctl.sample_dx, 1e-6);
    for (double dxa = sdx; dxa < rmath::to_double(step_end); dxa += sdx)
      push_sample(x + Real(dxa), jet.r_at(Real(dxa)), jet.rp_at(Real(dxa)));
    const Real rx = jet.r_at(step_end), rpx = jet.rp_at(step_end);
    push_sample(x + step_end, rx, rpx);

    x = x + step_end;
    r = rx;
    rp = rpx;

    if (terminal && terminal->kind != Fate::Kind::Converged) {
      traj.termination = *terminal;
      traj.tail_cross_pending = pending_tail(terminal->kind, r);
      break;
    }
    if (terminal && terminal->kind == Fate::Kind::Converged) break;
  }

  traj.x_end = traj.samples.back().x;
  return traj;
}

/// Convenience double-lane entry point.
inline Trajectory integrate(const MultPair& p, const OdeStateX& start, const IntegratorControls& ctl) {
  XState<double> s{start.x, start.r, start.rp};
  return integrate<double>(p, s, ctl);
}

/// Monotonicity report for the two Lyapunov functions: W must not decrease
/// on samples right of Z^alpha, V must not increase left of it.
struct LyapunovReport {
  double max_w_violation = 0;  ///< largest per-step decrease of W for x >= Z^alpha
  double max_v_violation = 0;  ///< largest per-step increase of V for x <= Z^alpha
};

inline LyapunovReport lyapunov_check(const Trajectory& traj) {
  if (traj.samples.empty()) throw std::domain_error("lyapunov_check: empty trajectory");
  const StructuralConstants sc = constants(traj.pair);
  const double za = sc.z_alpha.as_double();
  LyapunovReport rep;
  for (std::size_t i = 0; i + 1 < traj.samples.size(); ++i) {
    const Sample& a = traj.samples[i];
    const Sample& b = traj.samples[i + 1];
    if (a.x >= za) rep.max_w_violation = std::max(rep.max_w_violation, a.w - b.w);
    if (b.x <= za) rep.max_v_violation = std::max(rep.max_v_violation, b.v - a.v);
  }
  return rep;
}

/// Slope bounds for trajectories that converge to a half-level:
/// |r'| <= sqrt(m1) right of Z^beta, sqrt(m1+1) right of Z^alpha,
/// sqrt(m0) left of Z^alpha. Reports the worst excess over each bound;
/// negative excess means the bound held with that margin.
struct DerivBoundReport {
  double excess_sqrt_m1 = -1e300;
  double excess_sqrt_m1p1 = -1e300;
  double excess_sqrt_m0 = -1e300;

  double worst() const { return std::max({excess_sqrt_m1, excess_sqrt_m1p1, excess_sqrt_m0}); }
};

inline DerivBoundReport derivative_bound_check(const Trajectory& traj) {
  if (traj.termination.kind != Fate::Kind::Converged)
    throw std::domain_error("derivative_bound_check: trajectory did not converge");
  const StructuralConstants sc = constants(traj.pair);
  const double za = sc.z_alpha.as_double();
  const double zb = sc.z_beta;
  DerivBoundReport rep;
  const double b1 = std::sqrt(double(traj.pair.m1));
  const double b2 = std::sqrt(double(traj.pair.m1 + 1));
  const double b0 = std::sqrt(double(traj.pair.m0));
  for (const Sample& s : traj.samples) {
    const double a = std::fabs(s.rp);
    if (s.x >= zb) rep.excess_sqrt_m1 = std::max(rep.excess_sqrt_m1, a - b1);
    if (s.x >= za) rep.excess_sqrt_m1p1 = std::max(rep.excess_sqrt_m1p1, a - b2);
    if (s.x <= za) rep.excess_sqrt_m0 = std::max(rep.excess_sqrt_m0, a - b0);
  }
  return rep;
}

}  // namespace hsm

#pragma once

// Shooting from the singular endpoint t = 0: classify the fate of the slope-v
// solution, count its intersections with pi/2, locate the slopes where the
// nodal count steps from k to k+1, and extract boundary-value solutions at
// those transitions. Solutions are certified by an actual converged shot
// inside the transition bracket; if the double lane cannot produce one (the
// saddle has to be tracked deeper than double roundoff allows), the bisection
// continues in the __float128 lane inside the double bracket.

#include <atomic>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "hsm/integrate.hpp"
#include "hsm/pair.hpp"
#include "hsm/series.hpp"

namespace hsm {

struct NoConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ShotOutcome {
  MultPair pair;
  double v = 0;
  Fate fate;
  int nodal = 0;  ///< crossings of pi/2, including a pending one at infinity for divergent shots
  std::vector<Event> crossings;  ///< recorded half-level crossing events
  std::optional<int> ell;        ///< boundary level when converged
  bool constant_zero = false;    ///< v = 0: the identically-zero solution, excluded from searches
  Trajectory trajectory;
};

struct ShootOptions {
  int series_order = 0;  ///< 0 = per-lane default
};

template <class Real>
ShotOutcome shoot(const MultPair& p, Real v, const IntegratorControls& ctl,
                  const ShootOptions& opt = {}) {
  if (p.m1 < 2) throw std::domain_error("shoot: requires m1 >= 2");
  ShotOutcome out;
  out.pair = p;
  out.v = rmath::to_double(v);

  if (v == Real(0)) {
    out.constant_zero = true;
    out.fate = {Fate::Kind::ReachedXMax, 0};
    out.trajectory.pair = p;
    out.trajectory.termination = out.fate;
    out.trajectory.samples.push_back({-ctl.x_max, 0, 0, 0, -rmath::to_double(beta(p, -ctl.x_max))});
    out.trajectory.samples.push_back({ctl.x_max, 0, 0, 0, -rmath::to_double(beta(p, ctl.x_max))});
    out.trajectory.x_end = ctl.x_max;
    return out;
  }

  const SeriesStart<Real> series = series_at_zero(p, v, opt.series_order);
  const XState<Real> st = to_x_state(series, series.validity_radius);
  Trajectory traj = integrate(p, st, ctl);
  if (traj.termination.kind == Fate::Kind::ReachedXMax) {
    // undecided: one retry with the range doubled
    IntegratorControls retry = ctl;
    retry.x_max = 2 * ctl.x_max;
    traj = integrate(p, st, retry);
  }
  traj.v = out.v;

  int crossings = 0;
  for (const Event& e : traj.events)
    if (e.kind == Event::Kind::HalfPiCross) {
      out.crossings.push_back(e);
      if (e.level == 0) ++crossings;
    }
  out.nodal = crossings + (traj.tail_cross_pending ? 1 : 0);
  if (traj.termination.kind == Fate::Kind::Converged) out.ell = traj.termination.ell;
  out.fate = traj.termination;
  out.trajectory = std::move(traj);
  return out;
}

inline ShotOutcome shoot(const MultPair& p, double v, const IntegratorControls& ctl = {},
                         const ShootOptions& opt = {}) {
  return shoot<double>(p, v, ctl, opt);
}

/// Brouwer degree of the induced sphere self-map from the boundary level:
/// 2 ell + 1 when both multiplicities are even, -1 when ell and m0 are odd
/// with m1 even, +1 otherwise.
inline int brouwer_degree(int ell, const MultPair& p) {
  const bool m0_even = p.m0 % 2 == 0;
  const bool m1_even = p.m1 % 2 == 0;
  if (m0_even && m1_even) return 2 * ell + 1;
  if (ell % 2 != 0 && !m0_even && m1_even) return -1;
  return 1;
}

struct TransitionBracket {
  double v_lo = 0, v_hi = 0;
  int nodal_lo = 0, nodal_hi = 0;
  bool found = false;
  int shots_used = 0;
  std::string note;
};

namespace detail {

template <class Real>
int nodal_of(const MultPair& p, Real v, const IntegratorControls& ctl, int& counter) {
  ++counter;
  return shoot(p, v, ctl).nodal;
}

}  // namespace detail

/// Bracket [v_lo, v_hi] with nodal(v_lo) = k and nodal(v_hi) = k+1. The
/// expansion phase doubles v until the count exceeds k; absence of any
/// increase up to v_ceiling is reported as not-found (the expected outcome
/// for m0 >= 6 where the count is bounded).
template <class Real>
TransitionBracket nodal_transition(const MultPair& p, int k, Real v_seed,
                                   const IntegratorControls& ctl, double v_ceiling = 1e9,
                                   double bisect_rel = 1e-12) {
  if (!(v_seed > Real(0))) throw std::domain_error("nodal_transition: seed must be positive");
  TransitionBracket tb;
  int shots = 0;

  Real v = v_seed;
  int n = detail::nodal_of(p, v, ctl, shots);
  while (n > k && rmath::to_double(v) > 1e-8) {
    v /= Real(2);
    n = detail::nodal_of(p, v, ctl, shots);
  }
  if (n > k) {
    tb.note = "nodal count exceeds k even for tiny v";
    tb.shots_used = shots;
    return tb;
  }

  Real lo = v, hi = v;
  int n_hi = n;
  while (n_hi <= k) {
    if (n_hi == k) lo = hi;  // keep the largest v seen with count k
    hi *= Real(2);
    if (rmath::to_double(hi) > v_ceiling) {
      tb.note = "no nodal increase up to the v ceiling";
      tb.shots_used = shots;
      return tb;
    }
    n_hi = detail::nodal_of(p, hi, ctl, shots);
  }

  int n_lo = detail::nodal_of(p, lo, ctl, shots);
  while (rmath::to_double(hi - lo) > bisect_rel * rmath::to_double(hi)) {
    const Real mid = Real(0.5) * (lo + hi);
    const int nm = detail::nodal_of(p, mid, ctl, shots);
    if (nm <= k) {
      lo = mid;
      n_lo = nm;
    } else {
      hi = mid;
      n_hi = nm;
    }
  }

  tb.v_lo = rmath::to_double(lo);
  tb.v_hi = rmath::to_double(hi);
  tb.nodal_lo = n_lo;
  tb.nodal_hi = n_hi;
  tb.found = (n_lo == k && n_hi == k + 1);
  if (!tb.found) tb.note = "bracket endpoints do not carry adjacent counts";
  tb.shots_used = shots;
  return tb;
}

struct BvpSolution {
  ShotOutcome outcome;
  double v_lo = 0, v_hi = 0;  ///< certified transition bracket
  int degree = 0;
  bool degree_watchdog = false;  ///< |degree| = 3 observed (never seen in experiments)
  bool deep_lane_used = false;
};

struct SolveOptions {
  double v_seed = 1.0;
  double v_ceiling = 1e9;
  double bisect_rel = 1e-12;       ///< double-lane bisection width
  double deep_bisect_rel = 1e-28;  ///< __float128 continuation width
  bool allow_deep_lane = true;
};

namespace detail {

/// Bisect the nodal predicate inside [lo, hi] at lane precision, keeping the
/// last converged shot with count k seen at a probe point.
template <class Real>
std::optional<ShotOutcome> refine_for_solution(const MultPair& p, int k, Real& lo, Real& hi,
                                               double rel, const IntegratorControls& ctl) {
  std::optional<ShotOutcome> best;
  auto consider = [&](const ShotOutcome& s) {
    if (s.fate.kind == Fate::Kind::Converged && s.nodal == k) best = s;
  };
  consider(shoot(p, lo, ctl));
  while (rmath::to_double(hi - lo) > rel * rmath::to_double(hi)) {
    const Real mid = Real(0.5) * (lo + hi);
    const ShotOutcome s = shoot(p, mid, ctl);
    consider(s);
    if (s.nodal <= k)
      lo = mid;
    else
      hi = mid;
  }
  return best;
}

}  // namespace detail

/// Solution of the boundary value problem with nodal number k, located at the
/// k -> k+1 transition of the shooting count. The returned shot converged to
/// a half-level inside the certified bracket.
inline BvpSolution solve_bvp(const MultPair& p, int k, const IntegratorControls& ctl = {},
                             const SolveOptions& opt = {}) {
  TransitionBracket tb = nodal_transition<double>(p, k, opt.v_seed, ctl, opt.v_ceiling, opt.bisect_rel);
  if (!tb.found && tb.v_hi == 0)
    throw NoConvergence("solve_bvp " + p.str() + " k=" + std::to_string(k) + ": " + tb.note);

  double lo = tb.v_lo, hi = tb.v_hi;
  std::optional<ShotOutcome> best = detail::refine_for_solution<double>(p, k, lo, hi, opt.bisect_rel, ctl);

  BvpSolution sol;
  sol.v_lo = lo;
  sol.v_hi = hi;

  if (!best && opt.allow_deep_lane) {
    // Continue at quad precision. The double bracket sits within the double
    // lane's noise of the true transition but need not contain it, so expand
    // until the endpoint counts bracket the step again at quad precision.
    IntegratorControls deep = ctl;
    deep.rel_tol = std::min(ctl.rel_tol, 1e-24);
    deep.abs_tol = std::min(ctl.abs_tol, 1e-28);
    double pad = std::max(100.0 * (hi - lo), 1e-10 * hi);
    quad qlo(lo), qhi(hi);
    for (int attempt = 0; attempt < 6; ++attempt) {
      qlo = quad(lo) - quad(pad);
      qhi = quad(hi) + quad(pad);
      int dummy = 0;
      if (detail::nodal_of(p, qlo, deep, dummy) <= k && detail::nodal_of(p, qhi, deep, dummy) > k)
        break;
      pad *= 100.0;
    }
    best = detail::refine_for_solution<quad>(p, k, qlo, qhi, opt.deep_bisect_rel, deep);
    sol.v_lo = rmath::to_double(qlo);
    sol.v_hi = rmath::to_double(qhi);
    sol.deep_lane_used = true;
  }
  if (!best)
    throw NoConvergence("solve_bvp " + p.str() + " k=" + std::to_string(k) +
                        ": no converged shot inside the transition bracket [" + std::to_string(lo) +
                        ", " + std::to_string(hi) + "]");

  sol.outcome = *best;
  sol.degree = brouwer_degree(*sol.outcome.ell, p);
  sol.degree_watchdog = std::abs(sol.degree) == 3;
  return sol;
}

struct SweepRow {
  double v = 0;
  Fate fate;
  int nodal = 0;
  std::optional<int> ell;
  std::string error;  ///< per-point failure, recorded inline
};

/// Independent shots over a grid of slopes; rows come back in grid order
/// regardless of the number of worker threads.
inline std::vector<SweepRow> sweep(const MultPair& p, const std::vector<double>& v_grid,
                                   const IntegratorControls& ctl = {}, unsigned threads = 0) {
  std::vector<SweepRow> rows(v_grid.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, std::max<std::size_t>(1, v_grid.size()));
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= v_grid.size()) return;
      SweepRow& row = rows[i];
      row.v = v_grid[i];
      try {
        const ShotOutcome s = shoot(p, v_grid[i], ctl);
        row.fate = s.fate;
        row.nodal = s.nodal;
        row.ell = s.ell;
      } catch (const std::exception& e) {
        row.error = e.what();
        row.fate = {Fate::Kind::StepFailure, 0};
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return rows;
}

/// lo:hi:n grid, linear or logarithmic.
inline std::vector<double> make_grid(double lo, double hi, int n, bool log_spacing) {
  std::vector<double> g;
  g.reserve(n);
  if (n == 1) {
    g.push_back(lo);
    return g;
  }
  for (int i = 0; i < n; ++i) {
    const double f = double(i) / (n - 1);
    g.push_back(log_spacing ? lo * std::pow(hi / lo, f) : lo + f * (hi - lo));
  }
  return g;
}

}  // namespace hsm

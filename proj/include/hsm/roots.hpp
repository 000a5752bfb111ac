#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace hsm {

/// Bisection on a bracketing interval. Requires f(lo) and f(hi) of opposite
/// sign (or one of them zero); returns the midpoint of the final interval.
template <class F>
double bisect(F&& f, double lo, double hi, double xtol = 1e-15, int maxit = 200) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0))
    throw std::invalid_argument("bisect: endpoints do not bracket a sign change");
  for (int it = 0; it < maxit && hi - lo > xtol * std::max(1.0, std::fabs(lo)); ++it) {
    double mid = 0.5 * (lo + hi);
    double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// All roots of f located by sign changes over an explicit grid, each refined
/// by bisection. Grid must be increasing.
template <class F>
std::vector<double> roots_on_grid(F&& f, const std::vector<double>& grid, double xtol = 1e-15) {
  std::vector<double> roots;
  if (grid.size() < 2) return roots;
  double fprev = f(grid.front());
  for (std::size_t i = 1; i < grid.size(); ++i) {
    double fcur = f(grid[i]);
    if (fprev == 0.0)
      roots.push_back(grid[i - 1]);
    else if ((fprev > 0) != (fcur > 0))
      roots.push_back(bisect(f, grid[i - 1], grid[i], xtol));
    fprev = fcur;
  }
  if (fprev == 0.0) roots.push_back(grid.back());
  return roots;
}

/// Geometrically spaced offsets: x0 + lo ... x0 + hi with n points.
inline std::vector<double> geometric_grid(double x0, double lo, double hi, int n) {
  std::vector<double> g;
  g.reserve(n);
  const double ratio = std::log(hi / lo) / (n - 1);
  for (int i = 0; i < n; ++i) g.push_back(x0 + lo * std::exp(ratio * i));
  return g;
}

}  // namespace hsm

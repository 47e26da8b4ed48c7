#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

namespace psys::num {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms = 0.0;  ///< root-mean-square residual of the fit
};

/// Ordinary least squares y ~ intercept + slope * x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Finite-difference weights for the derivative of given order at x0
/// (Fornberg's recursion on arbitrary nodes).
std::vector<double> fd_weights(double x0, std::span<const double> nodes, int order);

/// Derivative of sampled data on a nonuniform grid with a centred stencil
/// of `width` points (shifted one-sided near the ends).
std::vector<double> fd_derivative(std::span<const double> z, std::span<const double> f,
                                  int order, int width = 9);

/// Cumulative integral from z[0] using cubic Hermite panels (values + slopes).
std::vector<double> hermite_cumulative(std::span<const double> z, std::span<const double> f,
                                       std::span<const double> df);

/// Integral over the whole grid using quintic Hermite panels (values, slopes, curvatures).
double hermite_integral(std::span<const double> z, std::span<const double> f,
                        std::span<const double> df, std::span<const double> d2f);

/// Cubic Hermite interpolation; x must lie inside [z.front(), z.back()].
double hermite_interp(std::span<const double> z, std::span<const double> f,
                      std::span<const double> df, double x);

/// Index i with z[i] <= x < z[i+1] (clamped).
std::size_t bracket(std::span<const double> z, double x);

namespace detail {

template <class F>
double gk_panel(F& f, double a, double b, double& err, double& l1) {
  return boost::math::quadrature::gauss_kronrod<double, 21>::integrate(f, a, b, 0, 0.0, &err, &l1);
}

template <class F>
double adapt(F& f, double a, double b, double est, double err, double l1, double tol, double floor, unsigned depth) {
  if (err <= tol * l1 || err <= floor || depth == 0) return est;
  const double m = 0.5 * (a + b);
  double e1, e2, l1a, l1b;
  const double r1 = gk_panel(f, a, m, e1, l1a);
  const double r2 = gk_panel(f, m, b, e2, l1b);
  // the Kronrod estimate bottoms out near roundoff; stop once halving no longer helps
  if (e1 + e2 >= 0.5 * err && err <= 1e-9 * l1) return r1 + r2;
  return adapt(f, a, m, r1, e1, l1a, tol, floor / 2, depth - 1) + adapt(f, m, b, r2, e2, l1b, tol, floor / 2, depth - 1);
}

}  // namespace detail

/// Adaptive Gauss-Kronrod on a finite interval; the error is bounded by tol times the L1 norm of f.
template <class F>
double integrate(F&& f, double a, double b, double tol = 1e-13, unsigned depth = 20, double abs_floor = 0.0) {
  if (a == b) return 0.0;
  double err = 0.0, l1 = 0.0;
  const double est = detail::gk_panel(f, a, b, err, l1);
  return detail::adapt(f, a, b, est, err, l1, tol, std::max(abs_floor, tol * l1), depth);
}

}  // namespace psys::num

#pragma once

#include "psys/spectral.hpp"

#include <functional>
#include <string>
#include <vector>

namespace psys {

/// Source of u_t = u_xx + d_x[(1+t)^{2^{-n}-3/2} f((x - 2 sigma t)/sqrt(1+t))], u(0) = 0.
struct HeatSourceSpec {
  int n = 1;
  int sigma = 1;
  std::string shape = "gaussian";
  std::function<double(double)> f;
  std::function<cplx(double)> fhat;  ///< int f(z) e^{-iqz} dz

  double mass() const;
  /// sup |e^{z^2/8} d^m f| for m = 0..2 by finite differences on [-zmax, zmax].
  std::vector<double> gaussian_weight_sups(double zmax = 30.0) const;
};

/// Shapes: "gaussian" (unit-mass heat kernel at time 1), "dgaussian" (its derivative, zero mass),
/// "skewed" ((1 + z/2) e^{-(z-1)^2/4}/sqrt(4 pi)). sigma in {-2,...,2}.
HeatSourceSpec make_heat_source(const std::string& shape, int n, int sigma);

/// Continuous transform of the full source term (with d_x) at wavenumber k and time s.
cplx heat_source_hat(const HeatSourceSpec& spec, double k, double s);

/// Per-mode quadrature of the Duhamel integral at each t in t_grid.
std::vector<SpectralField> solve_inhom(const HeatSourceSpec& spec, const Grid& grid, const std::vector<double>& t_grid);

/// Physical-space limit profile u_n sampled on the grid (|sigma| = 1).
std::vector<double> un_reference(int n, int sigma, const Grid& grid, double t);
/// Fourier form ik e^{-k^2(1+t)} |k|^{-2^{-n}} (theta(-sigma k) J + theta(sigma k) conj J).
SpectralField un_reference_fourier(int n, int sigma, const Grid& grid, double t);

struct HeatConvergenceReport {
  std::vector<double> t, rem_l2, rem_d_l2, weighted_l2, weighted_d;
  double sup_weighted_l2 = 0, sup_weighted_d = 0;
  double slope = 0;         ///< log-log slope of the unweighted remainder over t >= slope_from
  double slope_from = 10;
  double last_decade_growth = 0;  ///< sup over the last decade / sup before it - 1
  bool stable = false;
};

HeatConvergenceReport convergence_check(const HeatSourceSpec& spec, const Grid& grid, const std::vector<double>& t_grid);

/// Smallest C with |u^ - u_n^| <= (C|k| + t^{-1/2}) e^{-k^2(1+t)} for the Gaussian source on the sampled (k, t).
double pointwise_constant(int n, int sigma, const std::vector<double>& k_grid, const std::vector<double>& t_grid);

/// Geometric grid t0, t0 r, ... up to t1 (t1 included).
std::vector<double> geometric_times(double t0, double t1, double ratio = 1.2);

std::string heat_csv(const HeatConvergenceReport& r);

}  // namespace psys

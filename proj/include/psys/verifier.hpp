#pragma once

#include "psys/profiles.hpp"
#include "psys/solver.hpp"

#include <string>
#include <vector>

namespace psys {

struct DecayFitReport {
  std::string quantity;
  double t_lo = 0, t_hi = 0;
  double slope = 0;
  double residual = 0;  ///< rms of the log-log fit
  double target = 0;
  double tolerance = 0;
  bool upper_only = false;  ///< pass when slope <= target + tolerance
  double residual_cap = 0.1;
  bool pass = false;
};

/// Fits log q against log(1+t) over samples with t in [t_lo, t_hi]; the window must span a decade in 1+t.
DecayFitReport fit_decay(const std::string& quantity, const std::vector<double>& t, const std::vector<double>& q,
                         double t_lo, double t_hi, double target, double tolerance, bool upper_only = false,
                         double residual_cap = 0.1);

/// Everything the expansion needs for one initial condition.
struct ExpansionContext {
  ExpansionCoefficients coeffs;
  BurgersProfile g0_plus, g0_minus;
  std::vector<CorrectionProfile> g_plus, g_minus;
  std::vector<double> d_plus_analytic, d_minus_analytic;
  DFit fit;  ///< fit-mode d_1^+, empty when not requested
  bool fit_used = false;
};

enum class DMode { analytic, fit };

struct ContextOptions {
  int N = 1;
  std::vector<double> z_grid;  ///< empty: graded_grid()
  double tol = 1e-10;
  int max_iter = 50;
  DMode mode = DMode::fit;
  double fit_zlo = 8.0, fit_zhi = 20.0, fit_fraction = 0.5;
  double fit_t_min_fraction = 0.2;  ///< snapshots with t >= fraction * t_final enter the fit
};

/// Masses from the initial snapshot, Hessian constants, profiles, and d_n in the chosen mode.
ExpansionContext build_context(const TrajectoryRecord& traj, const Nonlinearity& nl, const ContextOptions& opt);

struct RemainderSeries {
  std::vector<double> t, u_l2, r0_l2, r1_l2, r1_d_l2, mass_u;
};

/// u, u - u0 and u - u0 - u1 norms at every stored snapshot. Throws on mass mismatch above 1e-6.
RemainderSeries remainder_series(const TrajectoryRecord& traj, const ExpansionContext& ctx);

/// Slope reports on the window [t_final/20, t_final]: the u norm, the N = 0 and N = 1 remainders.
std::vector<DecayFitReport> remainder_pipeline(const TrajectoryRecord& traj, const ExpansionContext& ctx,
                                               RemainderSeries* series = nullptr);

struct TailReport {
  double t = 0;
  double ahead_slope = 0, ahead_rms = 0;
  double behind_gauss = 0;  ///< fitted coefficient of z^2/4 in log|u| on the behind window, -1 for a pure Gaussian
  double behind_slope = 0;  ///< log-log slope on the behind window
  bool ahead_sign_change = false;
  bool inconclusive = false;
  bool algebraic_ahead = false;
  double target = -1.5, tolerance = 0.05;
};

/// Compares the two sides of u at time t; z windows are in x / sqrt(1+t). The ahead window [zlo, zhi] gets a
/// power-law fit, the behind window [-gauss_hi, -gauss_lo] a Gaussian fit (it sinks into roundoff beyond ~10).
TailReport tail_precedence_check(const StateVector& physical, double t, double zlo = 8.0, double zhi = 20.0,
                                 double target = -1.5, double tolerance = 0.05, double gauss_lo = 4.0,
                                 double gauss_hi = 10.0);

// ---- bound kernels ----

struct BoundKernelParams {
  double p1 = 0, q1 = 0, r1 = 0, p2 = 0, q2 = 0, r2 = 0, r3 = 0;
  std::string label;

  static BoundKernelParams B1(double p1, double q1, double p2, double q2);
  void validate() const;
  double beta() const;
  double alpha() const;
  /// Right-hand side of the dominance bound without the constant.
  double rhs(double t) const;
};

double B0(double q, double t);
double B(const BoundKernelParams& p, double t);

struct BoundCheckReport {
  std::string label;
  double C = 0;
  double argt = 0;
  bool finite = false;
  double threshold = 1e6;
};

BoundCheckReport bound_check(const BoundKernelParams& p, const std::vector<double>& t_grid);
BoundCheckReport bound_check_B0(double q, const std::vector<double>& t_grid);

/// Parameter tuples used in the Duhamel estimates.
std::vector<BoundKernelParams> used_bound_tuples(double eps = 0.05);

std::string decay_json(const std::vector<DecayFitReport>& r);

}  // namespace psys

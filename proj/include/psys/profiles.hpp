#pragma once

#include "psys/nonlinearity.hpp"
#include "psys/special.hpp"

#include <vector>

namespace psys {

struct HessianConstants {
  double c_plus = 0, c_minus = 0, c3 = 0;
};

/// c_plus = (1/8)(1,1)H(1,1)^T, c_minus = -(1/8)(1,-1)H(1,-1)^T, c3 = (H_aa - H_bb)/4, so that the quadratic
/// part of g equals c_plus (a+b)^2 - c_minus (a-b)^2 + c3 (a+b)(a-b).
HessianConstants hessian_constants(const Nonlinearity& nl);

struct ExpansionCoefficients {
  double alpha_plus = 0, alpha_minus = 0;
  double c_plus = 0, c_minus = 0, c3 = 0;
  std::vector<double> d_plus, d_minus;  ///< index n-1
  int N = 1;

  double epsilon() const;
  /// Throws when a product |alpha c| exceeds the contraction threshold.
  void validate(double contraction_threshold = 0.1) const;
};

/// Self-similar Burgers profile g'' + z g'/2 + g/2 + gamma (g^2)' = 0 with mass alpha.
struct BurgersProfile {
  ProfileSample sample;
  std::vector<double> scaled;  ///< e^{z^2/4} g on the grid
  double alpha = 0, gamma = 0;

  double value(double z) const;
  double scaled_value(double z) const;
};

BurgersProfile g0_profile(double alpha, double gamma, const std::vector<double>& z);

/// sup on [zlo, zhi] of the Burgers residual using finite-difference derivatives of the samples.
double burgers_residual(const BurgersProfile& g0, double zlo = -1e300, double zhi = 1e300);

struct CorrectionProfile {
  ProfileSample g;  ///< g_n
  ProfileSample R;  ///< g_n minus the f_n base
  int n = 1;
  int sign = 1;  ///< +1: base f_n(-z), -1: base f_n(z)
  int iterations = 0;
  bool converged = false;
  double last_change = 0;
  double contraction = 0;  ///< ratio of the last two successive changes
  double W0 = 0;
};

/// Fixed point of g = f_n(-sign z) + R[g] for L g + 2 gamma (g0 g)' = 0.
CorrectionProfile gn_fixed_point(int n, int sign, const BurgersProfile& g0, double tol = 1e-10, int max_iter = 50,
                                 double contraction_threshold = 0.1);

/// sup on [zlo, zhi] of |L g + 2 gamma (g0 g)'| with finite-difference derivatives.
double linearized_residual(const CorrectionProfile& c, const BurgersProfile& g0, double zlo = -1e300,
                           double zhi = 1e300);

/// Mass with the algebraic tail of f_n beyond the grid added back.
double correction_mass(const CorrectionProfile& c);

/// g_n at arbitrary z: cubic interpolation inside the grid, f_n asymptotics on the algebraic side beyond it.
double correction_value(const CorrectionProfile& c, double z);

/// Terms of the expansion in the characteristic frame sampled at x.
struct ExpansionFields {
  std::vector<double> u0, u1, v0, v1;
};

ExpansionFields build_expansion_terms(const ExpansionCoefficients& coeffs, const BurgersProfile& g0_plus,
                                      const BurgersProfile& g0_minus, const std::vector<CorrectionProfile>& g_plus,
                                      const std::vector<CorrectionProfile>& g_minus, const std::vector<double>& x,
                                      double t);

/// 2^{-1-2^{-n}} / sqrt(4 pi).
double kappa(int n);

/// d_n from the recursion driven by the opposite family; fills coeffs.d_plus / d_minus up to coeffs.N.
void d_analytic(ExpansionCoefficients& coeffs, const BurgersProfile& g0_plus, const BurgersProfile& g0_minus,
                const std::vector<CorrectionProfile>& g_plus, const std::vector<CorrectionProfile>& g_minus);

/// Measured remainder r(x) at time t on the characteristic-frame grid.
struct RemainderSnapshot {
  double t = 0;
  std::vector<double> x;
  std::vector<double> r;
};

struct DFit {
  double d = 0;
  std::vector<double> per_time;  ///< single-snapshot estimates
  double spread = 0;             ///< max relative deviation of per_time from d
  std::size_t points = 0;
};

/// Least-squares coefficient of (1+t)^{-(1-2^{-(n+1)})} g_n(x/sqrt(1+t)) in the remainders, using only the
/// algebraic-tail window zlo <= sign z <= min(zhi, zhi_fraction * 2t/sqrt(1+t)).
DFit d_fit(const std::vector<RemainderSnapshot>& snaps, const CorrectionProfile& g, double zlo, double zhi,
           double zhi_fraction = 0.5);

}  // namespace psys

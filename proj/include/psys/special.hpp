#pragma once

#include "psys/spectral.hpp"

#include <string>
#include <vector>

namespace psys {

/// rho_{p,q}(z) = (1+z^2)^{p/2} e^{z^2/4} for z >= 0 and (1+z^2)^{q/2} for z <= 0.
/// With gaussian_both the left side also carries e^{z^2/4}.
struct EnvelopeDescriptor {
  double p = 0.0;
  double q = 0.0;
  bool gaussian_both = false;
  bool mirrored = false;  ///< weight evaluated at -z

  double log_rho(double z) const;
};

/// A function sampled on a strictly increasing z-grid with derivative samples.
struct ProfileSample {
  std::vector<double> z;
  std::vector<double> v;
  std::vector<double> d1, d2, d3;  ///< empty when not available
  EnvelopeDescriptor envelope;
  int n = 0;
  double tol = 0.0;
  std::string label;

  std::size_t size() const { return z.size(); }
  int max_order() const { return d3.size() == z.size() ? 3 : d2.size() == z.size() ? 2 : d1.size() == z.size() ? 1 : 0; }
};

struct FnValues {
  double d[4] = {0, 0, 0, 0};  ///< f, f', f'', f'''
  double log_scale = 0.0;      ///< values are stored times exp(-log_scale)
};

/// Derivatives of f_n at z up to max_order. Values are returned unscaled.
FnValues eval_fn(int n, double z, int max_order = 3);
/// Same but multiplied by e^{z^2/4} for z > 0, so the Gaussian side never underflows.
FnValues eval_fn_scaled(int n, double z, int max_order = 3);

/// Exact value 2^{2^{-n}} Gamma((1 + 2^{-n})/2).
double fn_at_zero(int n);

/// Integral of f_n over (-inf, -Z] from the large-|z| expansion (Z >= 10).
double fn_left_tail_integral(int n, double Z);
/// Leading terms of f_n(-w) for large w.
double fn_left_asymptotic(int n, double w);

/// Samples f_n(sign * z) on the grid (sign = -1 mirrors the profile).
ProfileSample sample_fn(int n, const std::vector<double>& z, int sign = 1);

/// sup over grid samples inside [zlo, zhi] of |f'' + z f'/2 + (1 - 2^{-(n+1)}) f|.
double ode_residual(const ProfileSample& p, int n, double zlo = -1e300, double zhi = 1e300);

/// Mass by quintic Hermite panels plus an optional algebraic left/right tail of f_n.
double profile_mass(const ProfileSample& p, double left_tail = 0.0, double right_tail = 0.0);

struct EnvelopeResult {
  std::vector<double> per_order;  ///< sup of rho_m |quantity_m| for each m
  double sum_sup = 0.0;           ///< sup over z of the sum over m
  bool ok = true;
};

enum class EnvelopeQuantity { value, flux };  // d^m f, or d^m (z f + 2 f')

/// Weighted sups against envelopes; envelopes[m] is used for derivative order m.
EnvelopeResult envelope_check(const ProfileSample& p, const std::vector<EnvelopeDescriptor>& envelopes,
                              EnvelopeQuantity q, double C_max);

/// The two f_n envelope families evaluated with underflow-free scaled samples on [-zmax, zmax].
EnvelopeResult fn_envelope_constants(int n, EnvelopeQuantity q, double zmax, std::size_t samples, double C_max);

/// J_n(z) = int_0^z e^{2is} s^{2^{-n}-1} ds.
cplx eval_Jn(int n, double z);
cplx Jn_infinity(int n);
/// J_n(infinity) from Richardson extrapolation of J_n at z = m pi.
cplx Jn_extrapolated(int n, int levels = 6);

struct TailFit {
  double slope = 0.0;
  double rms = 0.0;
  bool sign_change = false;
  std::size_t points = 0;
};

/// Least-squares slope of log|v| against log|z| for samples with z in [zlo, zhi].
TailFit tail_exponent_fit(const ProfileSample& p, double zlo, double zhi);

/// Default profile grid on [-zmax, zmax], spacing h0 at 0 graded quadratically to h1 at the ends.
std::vector<double> graded_grid(double zmax = 60.0, double h0 = 1e-3, double h1 = 0.1);

std::string profile_csv(const ProfileSample& p, int n_for_residual);

namespace serial {
ProfileSample sample_fn(int n, const std::vector<double>& z, int sign = 1);
}

}  // namespace psys

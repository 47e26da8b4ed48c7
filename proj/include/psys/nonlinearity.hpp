#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>

namespace psys {

/// Flux terms of the viscous system: b_t = a_x + (g(a,b))_x + 2 (b_xx + (f(a,b) b_x)_x).
struct Nonlinearity {
  std::string id;
  std::function<double(double, double)> g;
  std::function<double(double, double)> f;
  std::optional<std::array<double, 4>> hessian;  ///< analytic Hessian of g at 0 (aa, ab, ba, bb)
  bool zero = false;                             ///< g = f = 0, lets the solver skip the products
};

/// Known ids: "default" (g = a^2, f = a), "zero", "a2" (g = a^2, f = 0), "sum2" (g = (a+b)^2, f = 0),
/// "cubic" (g = a^2 + a b^2, f = a b). Throws std::invalid_argument otherwise.
Nonlinearity make_nonlinearity(const std::string& id);

/// Hessian of g at the origin, analytic if supplied, else central differences with step h.
std::array<double, 4> hessian_at_zero(const Nonlinearity& nl, double h = 1e-5);

struct AdmissibilityReport {
  double g0 = 0, grad_g = 0, f0 = 0;  ///< |g(0)|, |grad g(0)|, |f(0)|
  double cubic_constant = 0;          ///< sup |g - g_0| / |z|^3 over sampled points
  double linear_constant = 0;         ///< sup |f| / |z|
  bool ok = false;
};

/// Sampled admissibility checks on the disc |z| <= radius.
AdmissibilityReport check_admissible(const Nonlinearity& nl, double radius = 0.1, double tol = 1e-10);

}  // namespace psys

#include "psys/nonlinearity.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace psys {

Nonlinearity make_nonlinearity(const std::string& id) {
  Nonlinearity nl;
  nl.id = id;
  if (id == "default") {
    nl.g = [](double a, double) { return a * a; };
    nl.f = [](double a, double) { return a; };
    nl.hessian = std::array<double, 4>{2, 0, 0, 0};
  } else if (id == "zero") {
    nl.g = [](double, double) { return 0.0; };
    nl.f = [](double, double) { return 0.0; };
    nl.hessian = std::array<double, 4>{0, 0, 0, 0};
    nl.zero = true;
  } else if (id == "a2") {
    nl.g = [](double a, double) { return a * a; };
    nl.f = [](double, double) { return 0.0; };
    nl.hessian = std::array<double, 4>{2, 0, 0, 0};
  } else if (id == "sum2") {
    nl.g = [](double a, double b) { return (a + b) * (a + b); };
    nl.f = [](double, double) { return 0.0; };
    nl.hessian = std::array<double, 4>{2, 2, 2, 2};
  } else if (id == "cubic") {
    nl.g = [](double a, double b) { return a * a + a * b * b; };
    nl.f = [](double a, double b) { return a * b; };
  } else {
    throw std::invalid_argument("unknown nonlinearity '" + id + "'");
  }
  return nl;
}

std::array<double, 4> hessian_at_zero(const Nonlinearity& nl, double h) {
  if (nl.hessian) return *nl.hessian;
  const auto& g = nl.g;
  const double g00 = g(0, 0);
  const double haa = (g(h, 0) - 2 * g00 + g(-h, 0)) / (h * h);
  const double hbb = (g(0, h) - 2 * g00 + g(0, -h)) / (h * h);
  const double hab = (g(h, h) - g(h, -h) - g(-h, h) + g(-h, -h)) / (4 * h * h);
  return {haa, hab, hab, hbb};
}

AdmissibilityReport check_admissible(const Nonlinearity& nl, double radius, double tol) {
  AdmissibilityReport r;
  const double h = 1e-6;
  r.g0 = std::abs(nl.g(0, 0));
  r.f0 = std::abs(nl.f(0, 0));
  const double ga = (nl.g(h, 0) - nl.g(-h, 0)) / (2 * h);
  const double gb = (nl.g(0, h) - nl.g(0, -h)) / (2 * h);
  r.grad_g = std::hypot(ga, gb);
  const auto H = hessian_at_zero(nl);
  for (int ir = 1; ir <= 10; ++ir) {
    const double rad = radius * ir / 10.0;
    for (int ia = 0; ia < 16; ++ia) {
      const double th = 2 * std::numbers::pi * ia / 16.0;
      const double a = rad * std::cos(th), b = rad * std::sin(th);
      const double quad = 0.5 * (H[0] * a * a + (H[1] + H[2]) * a * b + H[3] * b * b);
      r.cubic_constant = std::max(r.cubic_constant, std::abs(nl.g(a, b) - quad) / (rad * rad * rad));
      r.linear_constant = std::max(r.linear_constant, std::abs(nl.f(a, b)) / rad);
    }
  }
  // the gradient check carries O(h^2) truncation from any cubic part
  r.ok = r.g0 <= tol && r.f0 <= tol && r.grad_g <= std::max(tol, 10 * h * h * r.cubic_constant) &&
         std::isfinite(r.cubic_constant) && std::isfinite(r.linear_constant);
  return r;
}

}  // namespace psys

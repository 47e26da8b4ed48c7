#include <doctest.h>

#include "psys/numerics.hpp"
#include "psys/special.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <numbers>

using namespace psys;

namespace {

// Direct quadrature of int_0^inf (xi+z) e^{-(xi+z)^2/4} xi^{beta-1} dxi, split at 1 so that
// tanh-sinh takes the endpoint singularity and exp-sinh the tail.
double fn_oracle(int n, double z) {
  const double beta = std::ldexp(1.0, -n);
  auto f = [&](double xi) { return (xi + z) * std::exp(-(xi + z) * (xi + z) / 4) * std::pow(xi, beta - 1); };
  boost::math::quadrature::tanh_sinh<double> ts;
  boost::math::quadrature::exp_sinh<double> es;
  const double mid = std::max(1.0, -z);
  return ts.integrate(f, 0.0, mid) + es.integrate([&](double s) { return f(mid + s); });
}

}  // namespace

TEST_CASE("value at zero from the Gamma function") {
  for (int n = 1; n <= 6; ++n) {
    const double beta = std::ldexp(1.0, -n);
    const double want = std::pow(2.0, beta) * std::tgamma((1 + beta) / 2);
    CHECK(fn_at_zero(n) == doctest::Approx(want).epsilon(1e-15));
    CHECK(std::abs(eval_fn(n, 0.0, 0).d[0] - want) <= 1e-10);
  }
}

TEST_CASE("slope at zero: 2^{beta-1} Gamma(beta/2) (1 - beta)") {
  for (int n = 1; n <= 4; ++n) {
    const double beta = std::ldexp(1.0, -n);
    const double want = std::pow(2.0, beta - 1) * std::tgamma(beta / 2) * (1 - beta);
    CHECK(eval_fn(n, 0.0, 1).d[1] == doctest::Approx(want).epsilon(1e-11));
  }
}

TEST_CASE("agrees with independent double-exponential quadrature") {
  for (int n = 1; n <= 3; ++n)
    for (double z : {-40.0, -7.5, -1.0, 0.3, 2.0, 6.0}) {
      const double ref = fn_oracle(n, z);
      const double got = eval_fn(n, z, 0).d[0];
      CHECK_MESSAGE(std::abs(got - ref) <= 1e-10 * std::max(1.0, std::abs(ref)), "n=" << n << " z=" << z);
    }
}

TEST_CASE("derivatives agree with finite differences of values") {
  const int n = 2;
  for (double z : {-5.0, -0.7, 1.1, 4.0}) {
    // wide enough that value roundoff (~1e-13) stays far below the tolerance after h^-3
    const double h = 0.05;
    std::vector<double> nodes, vals;
    for (int i = -4; i <= 4; ++i) {
      nodes.push_back(z + i * h);
      vals.push_back(eval_fn(n, z + i * h, 0).d[0]);
    }
    const auto v = eval_fn(n, z);
    for (int m = 1; m <= 3; ++m) {
      const auto w = num::fd_weights(z, nodes, m);
      double fd = 0;
      for (std::size_t i = 0; i < w.size(); ++i) fd += w[i] * vals[i];
      CHECK_MESSAGE(std::abs(fd - v.d[m]) <= 1e-6 * std::max(1.0, std::abs(v.d[m])), "m=" << m << " z=" << z);
    }
  }
}

TEST_CASE("ODE residual and zero mass on the profile grid") {
  const auto z = graded_grid(60.0, 0.02, 0.1);
  for (int n = 1; n <= 2; ++n) {
    const auto p = sample_fn(n, z);
    CHECK(ode_residual(p, n, -10, 10) <= 1e-8);
    CHECK(std::abs(profile_mass(p, fn_left_tail_integral(n, 60.0))) <= 1e-8);
  }
}

TEST_CASE("scaled evaluation avoids underflow on the Gaussian side") {
  const auto s = eval_fn_scaled(1, 40.0, 0);
  const auto u = eval_fn(1, 40.0, 0);
  CHECK(std::isfinite(s.d[0]));
  CHECK(s.d[0] > 0);
  CHECK(std::abs(std::log(s.d[0]) - std::log(u.d[0]) - 400.0) < 1e-6);
}

TEST_CASE("left tail expansion") {
  for (int n = 1; n <= 3; ++n)
    for (double w : {30.0, 80.0}) {
      const double ref = fn_oracle(n, -w);
      CHECK(std::abs(fn_left_asymptotic(n, w) - ref) <= 1e-6 * std::abs(ref));
    }
}

TEST_CASE("mirrored sampling") {
  const std::vector<double> z = {-2.0, -0.5, 0.0, 1.0, 3.0};
  const auto a = sample_fn(1, z, -1);
  for (std::size_t i = 0; i < z.size(); ++i) CHECK(a.v[i] == doctest::Approx(eval_fn(1, -z[i], 0).d[0]));
}

TEST_CASE("parallel sampling equals serial") {
  const auto z = graded_grid(20.0, 0.2, 0.5);
  const auto a = sample_fn(3, z), b = serial::sample_fn(3, z);
  CHECK(a.v == b.v);
  CHECK(a.d3 == b.d3);
}

TEST_CASE("weighted envelopes are finite") {
  for (int n = 1; n <= 2; ++n) {
    CHECK(fn_envelope_constants(n, EnvelopeQuantity::value, 40.0, 801, 1e6).ok);
    CHECK(fn_envelope_constants(n, EnvelopeQuantity::flux, 40.0, 801, 1e6).ok);
  }
}

TEST_CASE("J_n limit: Gamma(beta) 2^{-beta} e^{i pi beta / 2}") {
  for (int n = 1; n <= 4; ++n) {
    const double beta = std::ldexp(1.0, -n);
    const cplx want = std::tgamma(beta) * std::pow(2.0, -beta) * std::polar(1.0, std::numbers::pi * beta / 2);
    CHECK(std::abs(Jn_infinity(n) - want) < 1e-13);
    CHECK(std::abs(Jn_extrapolated(n) - want) < 1e-9);
  }
}

TEST_CASE("J_n convergence rate") {
  for (int n = 1; n <= 3; ++n) {
    const double beta = std::ldexp(1.0, -n);
    double worst = 0;
    for (double z = 0.1; z <= 500; z *= 1.1) worst = std::max(worst, std::pow(z, 1 - beta) * std::abs(eval_Jn(n, z) - Jn_infinity(n)));
    CHECK(worst <= 0.5 + 1e-9);
  }
  // small z: J ~ z^beta / beta
  CHECK(std::abs(eval_Jn(1, 1e-6) - cplx(2e-3, 0)) < 1e-8);
}

TEST_CASE("large n: 2^{-n} f_n approaches z e^{-z^2/4}") {
  double sup = 0;
  for (double z = -8; z <= 8; z += 0.25) sup = std::max(sup, std::abs(std::ldexp(eval_fn(14, z, 0).d[0], -14) - z * std::exp(-z * z / 4)));
  CHECK(sup <= 1e-3);
}

TEST_CASE("tail exponent of f_n on the algebraic side") {
  std::vector<double> z;
  for (double x = -200; x <= -20; x += 1) z.push_back(x);
  const auto p = sample_fn(1, z);
  const auto fit = tail_exponent_fit(p, -200, -20);
  CHECK(std::abs(fit.slope + 1.5) <= 0.03);
}

TEST_CASE("rejects invalid index") {
  CHECK_THROWS(eval_fn(0, 1.0));
  CHECK_THROWS(eval_fn(21, 1.0));
}

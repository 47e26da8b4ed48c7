#include <doctest.h>

#include "psys/numerics.hpp"
#include "psys/profiles.hpp"

#include <cmath>
#include <numbers>
#include <string>

using namespace psys;

namespace {

const std::vector<double>& grid() {
  static const auto z = graded_grid(60.0, 0.02, 0.1);
  return z;
}

// trapezoid on the sample grid; the profiles decay fast enough that this is an independent check of mass
double trapezoid(const std::vector<double>& z, const std::vector<double>& v) {
  double s = 0;
  for (std::size_t i = 0; i + 1 < z.size(); ++i) s += 0.5 * (z[i + 1] - z[i]) * (v[i] + v[i + 1]);
  return s;
}

}  // namespace

TEST_CASE("Hessian constants reproduce the quadratic part") {
  for (const char* id : {"default", "a2", "sum2", "cubic"}) {
    const auto nl = make_nonlinearity(id);
    const auto c = hessian_constants(nl);
    // g(a,b) ~ c+ (a+b)^2 - c- (a-b)^2 + c3 (a+b)(a-b) near 0
    for (auto [a, b] : {std::pair{1e-3, 0.0}, std::pair{0.0, 1e-3}, std::pair{7e-4, -4e-4}}) {
      const double q = c.c_plus * (a + b) * (a + b) - c.c_minus * (a - b) * (a - b) + c.c3 * (a + b) * (a - b);
      // cubic terms (a b^2 for "cubic") leave an O(|(a,b)|^3) remainder
      const double r = std::abs(a) + std::abs(b);
      CHECK_MESSAGE(std::abs(nl.g(a, b) - q) <= 1e-8 * (a * a + b * b) + r * r * r, std::string(id));
    }
  }
  const auto s = hessian_constants(make_nonlinearity("sum2"));
  CHECK(s.c_plus == doctest::Approx(1.0));
  CHECK(s.c_minus == doctest::Approx(0.0));
  CHECK(s.c3 == doctest::Approx(0.0));
  const auto d = hessian_constants(make_nonlinearity("default"));
  CHECK(d.c_plus == doctest::Approx(0.25));
  CHECK(d.c_minus == doctest::Approx(-0.25));
  CHECK(d.c3 == doctest::Approx(0.5));
}

TEST_CASE("g0 has the requested mass and solves the Burgers profile equation") {
  for (auto [alpha, gamma] : {std::pair{0.5, 0.25}, std::pair{0.3, -0.25}, std::pair{0.1, 0.0}, std::pair{-0.4, 1.0}}) {
    const auto g = g0_profile(alpha, gamma, grid());
    CHECK(trapezoid(g.sample.z, g.sample.v) == doctest::Approx(alpha).epsilon(1e-4));
    CHECK(num::hermite_integral(g.sample.z, g.sample.v, g.sample.d1, g.sample.d2) ==
          doctest::Approx(alpha).epsilon(1e-12));
    CHECK(burgers_residual(g, -20, 20) <= 1e-8);
  }
}

TEST_CASE("g0 from the Cole-Hopf logarithm") {
  // g0 = (1/gamma) d/dz log(1 + T erf(z/2)), T = tanh(alpha gamma / 2)
  const double alpha = 0.5, gamma = 0.25, T = std::tanh(alpha * gamma / 2);
  const auto g = g0_profile(alpha, gamma, grid());
  for (double z : {-3.0, -0.4, 0.0, 1.5, 5.0}) {
    const double h = 1e-4;
    auto lg = [&](double x) { return std::log(1 + T * std::erf(x / 2)); };
    const double fd = (lg(z + h) - lg(z - h)) / (2 * h) / gamma;
    CHECK(g.value(z) == doctest::Approx(fd).epsilon(1e-7));
  }
}

TEST_CASE("g0 rejects profiles near the pole") {
  CHECK_THROWS(g0_profile(20.0, 0.5, grid()));
}

TEST_CASE("without nonlinearity g_n is the bare f_n") {
  const auto g0 = g0_profile(0.3, 0.0, grid());
  for (int sign : {1, -1}) {
    const auto c = gn_fixed_point(1, sign, g0);
    CHECK(c.converged);
    double m = 0;
    for (std::size_t i = 0; i < c.g.size(); ++i) m = std::max(m, std::abs(c.g.v[i] - eval_fn(1, -sign * c.g.z[i], 0).d[0]));
    CHECK(m < 1e-12);
  }
}

TEST_CASE("g_1 fixed point") {
  const double alpha = 0.4, gamma = 0.25;
  const auto g0 = g0_profile(alpha, gamma, grid());
  for (int sign : {1, -1}) {
    const auto c = gn_fixed_point(1, sign, g0);
    CHECK(c.converged);
    CHECK(c.iterations <= 50);
    CHECK(linearized_residual(c, g0, -20, 20) <= 1e-6);
    CHECK(std::abs(correction_mass(c)) <= 1e-6);
    // the base shape carries the algebraic tail; the correction is lower order there
    const double far = sign * 55.0;
    CHECK(std::abs(correction_value(c, far) - eval_fn(1, -sign * far, 0).d[0]) <
          0.05 * std::abs(eval_fn(1, -sign * far, 0).d[0]));
  }
}

TEST_CASE("g_n mirror symmetry: g_-(z; gamma) = g_+(-z; -gamma)") {
  const auto gp = g0_profile(0.3, 0.25, grid());
  const auto gm = g0_profile(0.3, -0.25, grid());
  // (z -> -z, gamma -> -gamma) maps the Burgers profile to its mirror
  CHECK(gp.value(1.3) == doctest::Approx(gm.value(-1.3)).epsilon(1e-14));
  const auto a = gn_fixed_point(1, 1, gp);
  const auto b = gn_fixed_point(1, -1, gm);
  for (double z : {-4.0, -1.0, 0.0, 2.0, 7.0}) CHECK(correction_value(a, z) == doctest::Approx(correction_value(b, -z)).epsilon(1e-8));
}

TEST_CASE("fixed point refuses strong nonlinearity") {
  const auto g0 = g0_profile(1.0, 0.5, grid());
  CHECK_THROWS(gn_fixed_point(1, 1, g0));
}

TEST_CASE("kappa") {
  CHECK(kappa(1) == doctest::Approx(std::pow(2.0, -1.5) / std::sqrt(4 * std::numbers::pi)));
  CHECK(kappa(2) == doctest::Approx(std::pow(2.0, -1.25) / std::sqrt(4 * std::numbers::pi)));
}

TEST_CASE("d_1 for Gaussian profiles") {
  // gamma = 0: g0 = alpha e^{-z^2/4} / sqrt(4 pi), so int g0^2 = alpha^2 / (2 sqrt(2 pi))
  ExpansionCoefficients c;
  c.alpha_plus = 0.2;
  c.alpha_minus = 0.1;
  c.c_plus = 0.25;
  c.c_minus = -0.25;
  const auto gp = g0_profile(c.alpha_plus, 0.0, grid());
  const auto gm = g0_profile(c.alpha_minus, 0.0, grid());
  d_analytic(c, gp, gm, {}, {});
  const double im = c.alpha_minus * c.alpha_minus / (2 * std::sqrt(2 * std::numbers::pi));
  const double ip = c.alpha_plus * c.alpha_plus / (2 * std::sqrt(2 * std::numbers::pi));
  CHECK(c.d_plus[0] == doctest::Approx(-c.c_minus * im * kappa(1)).epsilon(1e-12));
  CHECK(c.d_minus[0] == doctest::Approx(c.c_plus * ip * kappa(1)).epsilon(1e-12));
}

TEST_CASE("expansion coefficients validation") {
  ExpansionCoefficients c;
  c.alpha_plus = 1.0;
  c.c_plus = 0.5;
  CHECK_THROWS(c.validate(0.1));
  c.alpha_plus = 0.1;
  CHECK_NOTHROW(c.validate(0.1));
  CHECK(c.epsilon() == doctest::Approx(0.125));
}

TEST_CASE("d_fit recovers a planted coefficient") {
  const auto g0 = g0_profile(0.3, -0.25, grid());
  const auto c = gn_fixed_point(1, 1, g0);
  std::vector<RemainderSnapshot> snaps;
  for (double t : {300.0, 500.0, 800.0}) {
    RemainderSnapshot s;
    s.t = t;
    for (double x = -400; x <= 400; x += 0.5) {
      s.x.push_back(x);
      s.r.push_back(0.7 * std::pow(1 + t, -0.75) * correction_value(c, x / std::sqrt(1 + t)));
    }
    snaps.push_back(s);
  }
  const auto f = d_fit(snaps, c, 8.0, 20.0);
  CHECK(f.d == doctest::Approx(0.7).epsilon(1e-6));
  CHECK(f.spread < 1e-6);
  CHECK(f.per_time.size() == 3);
}

TEST_CASE("expansion terms are translated profiles") {
  ExpansionCoefficients c;
  c.alpha_plus = 0.2;
  c.alpha_minus = 0.1;
  c.c_plus = 0.25;
  c.c_minus = -0.25;
  c.d_plus = {0.01};
  c.d_minus = {-0.02};
  const auto gp = g0_profile(c.alpha_plus, c.c_plus, grid());
  const auto gm = g0_profile(c.alpha_minus, c.c_minus, grid());
  std::vector<CorrectionProfile> cp = {gn_fixed_point(1, 1, gm)}, cm = {gn_fixed_point(1, -1, gp)};
  const std::vector<double> x = {-30.0, -3.0, 0.0, 4.0, 25.0};
  const double t = 99.0;
  const auto e = build_expansion_terms(c, gp, gm, cp, cm, x, t);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double z = x[i] / 10.0;
    CHECK(e.u0[i] == doctest::Approx(gp.value(z) / 10.0).epsilon(1e-10));
    CHECK(e.v0[i] == doctest::Approx(gm.value(z) / 10.0).epsilon(1e-10));
    CHECK(e.u1[i] == doctest::Approx(0.01 * std::pow(100.0, -0.75) * correction_value(cp[0], z)).epsilon(1e-10));
  }
}

#include <doctest.h>

#include "psys/heat.hpp"
#include "psys/solver.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <numbers>
#include <string>

using namespace psys;

namespace {

// Physical source d_x[(1+s)^{beta-3/2} f((x - 2 sigma s)/sqrt(1+s))] transformed by FFT.
SpectralField source_fft(const HeatSourceSpec& spec, const Grid& g, double s) {
  const double beta = std::ldexp(1.0, -spec.n);
  std::vector<double> v(g.n);
  for (std::size_t j = 0; j < g.n; ++j)
    v[j] = std::pow(1 + s, beta - 1.5) * spec.f((g.x(j) - 2 * spec.sigma * s) / std::sqrt(1 + s));
  return derivative(transform_forward(v, g), 1);
}

double max_diff(const SpectralField& a, const SpectralField& b) {
  double m = 0;
  for (std::size_t j = 0; j < a.c.size(); ++j) m = std::max(m, std::abs(a.c[j] - b.c[j]));
  return m;
}

}  // namespace

TEST_CASE("source masses") {
  CHECK(make_heat_source("gaussian", 1, 1).mass() == doctest::Approx(1.0));
  CHECK(std::abs(make_heat_source("dgaussian", 1, 1).mass()) < 1e-15);
  // (1 + z/2) e^{-(z-1)^2/4} / sqrt(4 pi): mass 1 + 1/2 = 3/2
  CHECK(make_heat_source("skewed", 2, -1).mass() == doctest::Approx(1.5).epsilon(1e-9));
  CHECK_THROWS(make_heat_source("box", 1, 1));
  CHECK_THROWS(make_heat_source("gaussian", 1, 3));
}

TEST_CASE("source transform agrees with the FFT of the physical source") {
  const Grid g(1024, 80.0);
  for (std::string shape : {"gaussian", "dgaussian", "skewed"})
    for (int sigma : {1, -1})
      for (double s : {0.0, 3.0}) {
        const auto spec = make_heat_source(shape, 1, sigma);
        const auto F = source_fft(spec, g, s);
        double m = 0;
        for (std::size_t j = 0; j < g.n; ++j) {
          if (j == g.n / 2) continue;
          m = std::max(m, std::abs(continuous_coeff(F, j) - heat_source_hat(spec, g.k(j), s)));
        }
        CHECK_MESSAGE(m < 1e-9, shape << " sigma=" << sigma << " s=" << s);
      }
}

TEST_CASE("Duhamel quadrature agrees with a time stepper") {
  const Grid g(512, 60.0);
  const auto spec = make_heat_source("gaussian", 1, 1);
  const double T = 4.0;
  const auto sol = solve_inhom(spec, g, {1.0, T});
  const auto ref = heat_forced(g, [&](double s) { return source_fft(spec, g, s); }, T, 0.005);
  CHECK(max_diff(sol.back(), ref) < 1e-9);
}

TEST_CASE("limit profile against the inverse Fourier integral") {
  // u(x) = (1/pi) Re int_0^inf i k^{1-beta} e^{-k^2(1+t)} J_sel e^{ikx} dk, J = Gamma(beta) 2^{-beta} e^{i pi beta/2}
  const Grid g(2048, 200.0);
  boost::math::quadrature::tanh_sinh<double> ts;
  for (int n : {1, 2})
    for (int sigma : {1, -1}) {
      const double t = 30.0, beta = std::ldexp(1.0, -n);
      const cplx J = std::tgamma(beta) * std::pow(2.0, -beta) * std::exp(cplx(0, std::numbers::pi * beta / 2));
      const cplx sel = sigma > 0 ? std::conj(J) : J;
      const auto phys = un_reference(n, sigma, g, t);
      for (std::size_t j = 800; j < 1300; j += 61) {
        const double x = g.x(j);
        const double u = ts.integrate(
                             [&](double k) {
                               return (cplx(0, 1) * std::pow(k, 1 - beta) * std::exp(-k * k * (1 + t)) * sel *
                                       std::exp(cplx(0, k * x)))
                                   .real();
                             },
                             0.0, 8.0 / std::sqrt(1 + t)) /
                         std::numbers::pi;
        CHECK_MESSAGE(phys[j] == doctest::Approx(u).epsilon(1e-8), "n=" << n << " sigma=" << sigma << " x=" << x);
      }
    }
}

TEST_CASE("limit profile: grid Fourier form matches up to the wrapped tail") {
  // the |z|^{-2+beta} tail wraps around the periodic box; near the centre that is a slowly varying offset
  const Grid g(2048, 200.0);
  for (int n : {1, 2})
    for (int sigma : {1, -1}) {
      const double t = 30.0;
      const auto phys = un_reference(n, sigma, g, t);
      const auto four = transform_inverse(un_reference_fourier(n, sigma, g, t));
      const std::size_t mid = g.n / 2;
      const double offset = four[mid] - phys[mid];
      double m = 0, peak = 0;
      for (std::size_t j = 0; j < g.n; ++j) {
        peak = std::max(peak, std::abs(phys[j]));
        if (std::abs(g.x(j)) <= 30) m = std::max(m, std::abs(four[j] - phys[j] - offset));
      }
      CHECK_MESSAGE(m < 5e-3 * peak, "n=" << n << " sigma=" << sigma);
    }
}

TEST_CASE("remainder decays faster than the limit profile") {
  const Grid g(4096, 400.0);
  const auto spec = make_heat_source("gaussian", 1, 1);
  const auto r = convergence_check(spec, g, geometric_times(1.0, 100.0, 1.5));
  CHECK(r.slope < -0.6);
  for (double v : r.rem_l2) CHECK(std::isfinite(v));
}

TEST_CASE("pointwise constant is finite and grid stable") {
  auto measure = [](int nk, int nt) {
    std::vector<double> ks, ts;
    for (int i = 1; i <= nk; ++i) ks.push_back(1.0 * i / nk);
    for (int i = 1; i <= nt; ++i) ts.push_back(std::expm1(std::log1p(100.0) * i / nt));
    return pointwise_constant(1, 1, ks, ts);
  };
  const double a = measure(20, 20), b = measure(40, 40);
  CHECK(std::isfinite(a));
  CHECK(std::abs(a - b) <= 0.1 * std::abs(b));
}

TEST_CASE("Gaussian-weighted sups of the source") {
  const auto w = make_heat_source("gaussian", 1, 1).gaussian_weight_sups();
  // e^{z^2/8} e^{-z^2/4} / sqrt(4 pi) peaks at z = 0
  CHECK(w[0] == doctest::Approx(1 / std::sqrt(4 * std::numbers::pi)).epsilon(1e-9));
  for (double v : w) CHECK(std::isfinite(v));
}

TEST_CASE("geometric times") {
  const auto t = geometric_times(1.0, 100.0, 2.0);
  CHECK(t.front() == 1.0);
  CHECK(t.back() == 100.0);
  for (std::size_t i = 1; i < t.size(); ++i) CHECK(t[i] > t[i - 1]);
}

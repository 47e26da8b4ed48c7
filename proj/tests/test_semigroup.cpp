#include <doctest.h>

#include "psys/semigroup.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

using namespace psys;

namespace {

Eigen::Matrix2cd generator(double k) {
  Eigen::Matrix2cd L;
  L << 0.0, cplx(0, k), cplx(0, k), -2 * k * k;
  return L;
}

double dist(const Mat2& a, const Eigen::Matrix2cd& b) {
  double m = 0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
  return m;
}

double dist(const Mat2& a, const Mat2& b) {
  double m = 0;
  for (int i = 0; i < 4; ++i) m = std::max(m, std::abs(a.m[i] - b.m[i]));
  return m;
}

}  // namespace

TEST_CASE("closed form matches the matrix exponential") {
  for (double k : {-3.0, -1.2, -0.999, -0.4, 0.0, 1e-3, 0.5, 0.9999, 1.0, 1.0001, 2.0, 5.0})
    for (double t : {0.0, 0.01, 0.3, 1.0, 4.0}) {
      const Eigen::Matrix2cd ref = (generator(k) * t).exp();
      CHECK_MESSAGE(dist(eval_eLt(k, t), ref) < 1e-12, "k=" << k << " t=" << t);
    }
}

TEST_CASE("identity at t = 0") {
  for (double k : {-2.0, -1.0, -0.3, 0.0, 0.7, 1.0, 3.0}) CHECK(dist(eval_eLt(k, 0.0), Mat2::identity()) <= 1e-15);
}

TEST_CASE("semigroup property") {
  for (double k : {-2.5, -1.0, -0.6, 0.05, 0.8, 1.0, 1.3})
    for (double s : {0.1, 1.7})
      for (double t : {0.4, 3.0}) CHECK(dist(eval_eLt(k, s) * eval_eLt(k, t), eval_eLt(k, s + t)) < 1e-9);
}

TEST_CASE("continuity across the branch at |k| = 1") {
  for (double t : {0.5, 2.0, 10.0})
    for (double k0 : {-1.0, 1.0}) {
      const double h = 1e-9;
      CHECK(dist(eval_eLt(k0 - h, t), eval_eLt(k0 + h, t)) < 1e-8);
      CHECK(dist(eval_eLt(k0, t), eval_eLt(k0 + h, t)) < 1e-8);
    }
}

TEST_CASE("large |k| and large t stay finite") {
  const Mat2 e = eval_eLt(50.0, 1e3);
  for (const auto& v : e.m) CHECK(std::isfinite(std::abs(v)));
  CHECK_THROWS(eval_eLt(1.0, -1.0));
}

TEST_CASE("determinant equals exp(trace t)") {
  for (double k : {0.3, 1.0, 2.0})
    for (double t : {0.5, 2.0}) CHECK(std::abs(det(eval_eLt(k, t)) - std::exp(-2 * k * k * t)) < 1e-13);
}

TEST_CASE("decoupled propagator diagonalises the undamped part") {
  // as k -> 0 the coupled flow is a pair of translations: S e^{Lt} S^{-1} -> e^{L0 t}
  const double k = 1e-4, t = 5.0;
  const Mat2 S = mix_S();
  const Mat2 lhs = S * eval_eLt(k, t);
  const Mat2 rhs = eval_eL0t(k, t) * S;
  CHECK(dist(lhs, rhs) < 1e-3);
}

TEST_CASE("kernel constants are finite") {
  std::vector<double> ks, ts;
  for (int i = -200; i <= 200; ++i) ks.push_back(i * 0.05);
  for (int i = 0; i <= 60; ++i) ts.push_back(std::expm1(i * 0.12));
  const auto r = kernel_bound_check(ks, ts);
  CHECK(r.finite);
  CHECK(r.C[0][0] >= 1.0);
}

TEST_CASE("intertwining defect is finite and grid stable") {
  auto build = [](int nk, int nt) {
    std::vector<double> ks, ts;
    for (int i = 0; i <= nk; ++i) ks.push_back(-3.0 + 6.0 * i / nk);
    for (int i = 0; i <= nt; ++i) ts.push_back(std::expm1(std::log1p(1e3) * i / nt));
    return intertwining_defect(ks, ts);
  };
  const auto a = build(600, 200), b = build(1200, 400);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      CHECK(std::isfinite(a.sup[i][j]));
      CHECK(std::abs(a.sup[i][j] - b.sup[i][j]) <= 0.1 * b.sup[i][j]);
    }
}

TEST_CASE("apply_eLt: parallel equals serial and matches per-mode evaluation") {
  Grid g(1024, 50.0);
  StateVector z{SpectralField(g), SpectralField(g)};
  std::vector<double> a(g.n), b(g.n);
  for (std::size_t j = 0; j < g.n; ++j) {
    a[j] = std::exp(-g.x(j) * g.x(j) / 4);
    b[j] = 0.3 * g.x(j) * a[j];
  }
  z.first = transform_forward(a, g);
  z.second = transform_forward(b, g);
  const auto p = apply_eLt(z, 2.5), s = serial::apply_eLt(z, 2.5);
  CHECK(p.first.c == s.first.c);
  CHECK(p.second.c == s.second.c);
  const std::size_t j = 7;
  const Mat2 e = eval_eLt(g.k(j), 2.5);
  CHECK(std::abs(p.first.c[j] - (e(0, 0) * z.first.c[j] + e(0, 1) * z.second.c[j])) < 1e-15);
  // mass of a is conserved by the linear flow
  CHECK(mass(p.first) == doctest::Approx(mass(z.first)).epsilon(1e-13));
}

#include "psys/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace psys {

Mat2 Mat2::identity() {
  Mat2 r;
  r(0, 0) = 1.0;
  r(1, 1) = 1.0;
  return r;
}

Mat2 operator*(const Mat2& a, const Mat2& b) {
  Mat2 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r(i, j) = a(i, 0) * b(0, j) + a(i, 1) * b(1, j);
  return r;
}

Mat2 operator-(const Mat2& a, const Mat2& b) {
  Mat2 r;
  for (int i = 0; i < 4; ++i) r.m[i] = a.m[i] - b.m[i];
  return r;
}

cplx det(const Mat2& a) { return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0); }

namespace {

constexpr double branch_band = 1e-4;

// cos(sqrt(X)) and sin(sqrt(X))/sqrt(X) as power series in X.
void even_series(double X, double& c, double& s) {
  c = 0.0;
  s = 0.0;
  double term_c = 1.0, term_s = 1.0;
  for (int j = 0; j <= 8; ++j) {
    c += term_c;
    s += term_s;
    term_c *= -X / ((2.0 * j + 1.0) * (2.0 * j + 2.0));
    term_s *= -X / ((2.0 * j + 2.0) * (2.0 * j + 3.0));
  }
}

Mat2 assemble(double k, double decay, double cos_part, double sin_over_delta) {
  Mat2 r;
  r(0, 0) = decay * (cos_part + k * sin_over_delta);
  r(0, 1) = cplx(0.0, decay * sin_over_delta);
  r(1, 0) = r(0, 1);
  r(1, 1) = decay * (cos_part - k * sin_over_delta);
  return r;
}

}  // namespace

Mat2 eval_eLt(double k, double t) {
  if (t < 0) throw std::invalid_argument("eval_eLt: negative time");
  const double d2 = (1.0 - k) * (1.0 + k);  // Delta^2 without cancellation
  const double theta = k * t;
  const double X = theta * theta * d2;
  if (std::abs(d2) < branch_band && std::abs(X) <= 1.0) {
    double c, s;
    even_series(X, c, s);
    return assemble(k, std::exp(-k * k * t), c, theta * s);
  }
  if (d2 > 0) {
    const double delta = std::sqrt(d2);
    const double ph = theta * delta;
    return assemble(k, std::exp(-k * k * t), std::cos(ph), std::sin(ph) / delta);
  }
  // |k| > 1: combine exponents so that exp(-k^2 t) cosh(k t Delta') cannot overflow.
  const double dp = std::sqrt(-d2);
  const double ak = std::abs(k);
  const double slow = -ak * t / (ak + dp);  // -k^2 t + |k| t Delta'
  const double fast = -k * k * t - ak * t * dp;
  const double ep = std::exp(slow), em = std::exp(fast);
  const double ch = 0.5 * (ep + em);
  double sh = 0.5 * (ep - em) / dp;  // exp(-k^2 t) sinh(|k| t Delta') / Delta'
  if (k < 0) sh = -sh;
  return assemble(k, 1.0, ch, sh);
}

Mat2 eval_eL0t(double k, double t) {
  Mat2 r;
  const double d = std::exp(-k * k * t);
  r(0, 0) = d * cplx(std::cos(k * t), std::sin(k * t));
  r(1, 1) = d * cplx(std::cos(k * t), -std::sin(k * t));
  return r;
}

Mat2 mix_S() {
  Mat2 r;
  r(0, 0) = 1.0;
  r(0, 1) = 1.0;
  r(1, 0) = 1.0;
  r(1, 1) = -1.0;
  return r;
}

StateVector apply_eLt(const StateVector& z, double t) {
  StateVector r{SpectralField(z.first.grid), SpectralField(z.second.grid), z.frame};
  const long n = static_cast<long>(z.first.grid.n);
#pragma omp parallel for schedule(static)
  for (long j = 0; j < n; ++j) {
    const Mat2 e = eval_eLt(z.first.grid.k(j), t);
    r.first.c[j] = e(0, 0) * z.first.c[j] + e(0, 1) * z.second.c[j];
    r.second.c[j] = e(1, 0) * z.first.c[j] + e(1, 1) * z.second.c[j];
  }
  enforce_hermitian(r.first);
  enforce_hermitian(r.second);
  return r;
}

namespace serial {

StateVector apply_eLt(const StateVector& z, double t) {
  StateVector r{SpectralField(z.first.grid), SpectralField(z.second.grid), z.frame};
  for (std::size_t j = 0; j < z.first.grid.n; ++j) {
    const Mat2 e = eval_eLt(z.first.grid.k(j), t);
    r.first.c[j] = e(0, 0) * z.first.c[j] + e(0, 1) * z.second.c[j];
    r.second.c[j] = e(1, 0) * z.first.c[j] + e(1, 1) * z.second.c[j];
  }
  enforce_hermitian(r.first);
  enforce_hermitian(r.second);
  return r;
}

}  // namespace serial

KernelBoundReport kernel_bound_check(std::span<const double> k_grid, std::span<const double> t_grid) {
  if (k_grid.empty() || t_grid.empty()) throw std::invalid_argument("kernel_bound_check: empty grid");
  KernelBoundReport r;
  for (double k : k_grid) {
    const double off = 1.0 / std::sqrt(1.0 + k * k);
    for (double t : t_grid) {
      const Mat2 e = eval_eLt(k, t);
      const double env = std::exp(-std::min(k * k, 1.0) * t / 4.0);
      const double w[2][2] = {{1.0, off}, {off, 1.0}};
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r.C[i][j] = std::max(r.C[i][j], std::abs(e(i, j)) / (env * w[i][j]));
      if (t > 0) {
        const double denv = env / std::sqrt(t);
        r.C_deriv[0] = std::max(r.C_deriv[0], std::abs(k * e(0, 1)) / denv);
        r.C_deriv[1] = std::max(r.C_deriv[1], std::abs(k * e(1, 1)) / (denv * off));
      }
    }
  }
  for (int i = 0; i < 2; ++i) {
    r.finite = r.finite && r.C_deriv[i] < r.threshold && std::isfinite(r.C_deriv[i]);
    for (int j = 0; j < 2; ++j) r.finite = r.finite && r.C[i][j] < r.threshold && std::isfinite(r.C[i][j]);
  }
  return r;
}

DefectReport intertwining_defect(std::span<const double> k_grid, std::span<const double> t_grid) {
  DefectReport r;
  const Mat2 S = mix_S();
  for (double k : k_grid) {
    for (double t : t_grid) {
      double d[2][2];
      if (std::abs(k) <= 1.0) {
        const Mat2 diff = S * eval_eLt(k, t) - eval_eL0t(k, t) * S;
        const double w = std::sqrt(1.0 + t) * std::exp(0.5 * k * k * t);
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) d[i][j] = w * std::abs(diff(i, j));
      } else {
        // the projector removes S e^{Lt}; only e^{L0 t} S remains, of modulus e^{-k^2 t}
        const double w = std::sqrt(1.0 + t) * std::exp(-0.5 * k * k * t);
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) d[i][j] = w * std::abs(S(i, j));
      }
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          if (d[i][j] > r.sup[i][j]) {
            r.sup[i][j] = d[i][j];
            r.argk[i][j] = k;
            r.argt[i][j] = t;
          }
    }
  }
  return r;
}

std::string kernel_bound_csv(const KernelBoundReport& r, std::size_t nk, std::size_t nt) {
  std::ostringstream os;
  os.precision(12);
  os << "entry,nk,nt,C\n";
  const char* names[2][2] = {{"11", "12"}, {"21", "22"}};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) os << names[i][j] << ',' << nk << ',' << nt << ',' << r.C[i][j] << '\n';
  os << "d1," << nk << ',' << nt << ',' << r.C_deriv[0] << '\n';
  os << "d2," << nk << ',' << nt << ',' << r.C_deriv[1] << '\n';
  return os.str();
}

std::string defect_csv(const DefectReport& r, std::size_t nk, std::size_t nt) {
  std::ostringstream os;
  os.precision(12);
  os << "entry,nk,nt,sup,k_at_sup,t_at_sup\n";
  const char* names[2][2] = {{"11", "12"}, {"21", "22"}};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      os << names[i][j] << ',' << nk << ',' << nt << ',' << r.sup[i][j] << ',' << r.argk[i][j] << ','
         << r.argt[i][j] << '\n';
  return os.str();
}

}  // namespace psys

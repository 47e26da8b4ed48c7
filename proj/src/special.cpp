#include "psys/special.hpp"

#include "psys/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace psys {

namespace {

constexpr double sqrt_4pi = 3.5449077018110320546;  // sqrt(4 pi)

// d^m/dy^m of y e^{-y^2/4}, without the Gaussian factor.
inline double poly(int m, double y) {
  const double y2 = y * y;
  switch (m) {
    case 0: return y;
    case 1: return 1.0 - 0.5 * y2;
    case 2: return y * (-1.5 + 0.25 * y2);
    default: return -1.5 + 1.5 * y2 - 0.125 * y2 * y2;
  }
}

void check_n(int n) {
  if (n < 1 || n > 20) throw std::invalid_argument("f_n: n must lie in [1, 20]");
}

// Value times exp(z^2/4) for z > 0, plain value otherwise.
double fn_scaled_order(int n, double z, int m) {
  const double beta = std::ldexp(1.0, -n);
  const double N = std::ldexp(1.0, n);
  const bool shifted = z > 0;
  auto expo = [&](double xi) { return shifted ? -xi * (xi + 2.0 * z) / 4.0 : -(xi + z) * (xi + z) / 4.0; };
  const double reach = 14.5;
  const double lo = std::max(0.0, -z - reach);
  const double hi = shifted ? -z + std::sqrt(z * z + 4.0 * reach * reach) : -z + reach;
  double total = 0.0;

  // Near xi = 0: xi = s^{2^n} turns xi^{beta-1} dxi into 2^n ds.
  const double a = std::min(hi, 1.0);
  if (lo < a) {
    auto g = [&](double s) {
      const double xi = s > 0 ? std::exp(N * std::log(s)) : 0.0;
      return N * poly(m, xi + z) * std::exp(expo(xi));
    };
    std::vector<double> cuts = {a};
    for (double c : {0.1, 1e-2, 1e-3, 1e-4, 1e-6, 1e-9, 1e-12})
      if (c < a && c > lo) cuts.push_back(c);
    cuts.push_back(lo);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const double s1 = std::pow(cuts[i + 1], beta), s2 = std::pow(cuts[i], beta);
      total += num::integrate(g, s1, s2, 1e-13, 20, 1e-15 * std::abs(total));
    }
  }
  // Away from the endpoint the integrand is smooth with Gaussian decay around xi = -z.
  const double b0 = std::max(lo, 1.0);
  if (b0 < hi) {
    auto g = [&](double xi) { return poly(m, xi + z) * std::exp(expo(xi)) * std::pow(xi, beta - 1.0); };
    std::vector<double> cuts = {b0};
    for (double c : {-z - 4.0, -z, -z + 4.0})
      if (c > b0 && c < hi) cuts.push_back(c);
    cuts.push_back(hi);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
      total += num::integrate(g, cuts[i], cuts[i + 1], 1e-13, 20, 1e-15 * std::abs(total));
  }
  return total;
}

}  // namespace

double EnvelopeDescriptor::log_rho(double z) const {
  if (mirrored) z = -z;
  const double lz = std::log1p(z * z) / 2.0;
  if (z >= 0) return p * lz + z * z / 4.0;
  return q * lz + (gaussian_both ? z * z / 4.0 : 0.0);
}

FnValues eval_fn_scaled(int n, double z, int max_order) {
  check_n(n);
  FnValues r;
  r.log_scale = z > 0 ? z * z / 4.0 : 0.0;
  for (int m = 0; m <= max_order; ++m) r.d[m] = fn_scaled_order(n, z, m);
  return r;
}

FnValues eval_fn(int n, double z, int max_order) {
  FnValues r = eval_fn_scaled(n, z, max_order);
  if (r.log_scale > 0) {
    const double s = std::exp(-r.log_scale);
    for (int m = 0; m <= max_order; ++m) r.d[m] *= s;
    r.log_scale = 0.0;
  }
  return r;
}

double fn_at_zero(int n) {
  const double beta = std::ldexp(1.0, -n);
  return std::pow(2.0, beta) * std::tgamma((1.0 + beta) / 2.0);
}

namespace {

// Coefficients a_p of f_n(-w) ~ sum_p a_p w^{beta - 2p}.
std::vector<double> left_coefficients(int n, int terms) {
  const double beta = std::ldexp(1.0, -n);
  std::vector<double> a;
  double dfact = 1.0;  // (2p-1)!!
  for (int p = 1; p <= terms; ++p) {
    const int j = 2 * p - 1;
    double binom = 1.0;
    for (int i = 0; i < j; ++i) binom *= (beta - 1.0 - i) / (i + 1.0);
    if (p > 1) dfact *= (2.0 * p - 1.0);
    a.push_back(binom * sqrt_4pi * dfact * std::ldexp(1.0, p));
  }
  return a;
}

}  // namespace

double fn_left_asymptotic(int n, double w) {
  const double beta = std::ldexp(1.0, -n);
  const auto a = left_coefficients(n, 5);
  double s = 0;
  for (std::size_t p = 0; p < a.size(); ++p) s += a[p] * std::pow(w, beta - 2.0 * (p + 1));
  return s;
}

double fn_left_tail_integral(int n, double Z) {
  const double beta = std::ldexp(1.0, -n);
  const auto a = left_coefficients(n, 5);
  double s = 0;
  for (std::size_t p = 0; p < a.size(); ++p) {
    const double e = beta - 2.0 * (p + 1) + 1.0;
    s += a[p] * std::pow(Z, e) / (-e);
  }
  return s;
}

namespace {

ProfileSample make_fn_profile(int n, const std::vector<double>& z, int sign) {
  ProfileSample p;
  p.z = z;
  p.n = n;
  p.tol = 1e-14;
  p.label = sign > 0 ? "f_n(z)" : "f_n(-z)";
  const double beta = std::ldexp(1.0, -n);
  p.envelope = EnvelopeDescriptor{beta - 1.0, 2.0 - beta, false};
  p.envelope.mirrored = sign < 0;
  const std::size_t m = z.size();
  p.v.resize(m);
  p.d1.resize(m);
  p.d2.resize(m);
  p.d3.resize(m);
  return p;
}

void fill_fn_sample(ProfileSample& p, std::size_t i, int n, int sign) {
  const FnValues f = eval_fn(n, sign * p.z[i], 3);
  p.v[i] = f.d[0];
  p.d1[i] = sign * f.d[1];
  p.d2[i] = f.d[2];
  p.d3[i] = sign * f.d[3];
}

}  // namespace

ProfileSample sample_fn(int n, const std::vector<double>& z, int sign) {
  check_n(n);
  ProfileSample p = make_fn_profile(n, z, sign);
  const long m = static_cast<long>(z.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (long i = 0; i < m; ++i) fill_fn_sample(p, i, n, sign);
  return p;
}

namespace serial {
ProfileSample sample_fn(int n, const std::vector<double>& z, int sign) {
  check_n(n);
  ProfileSample p = make_fn_profile(n, z, sign);
  for (std::size_t i = 0; i < z.size(); ++i) fill_fn_sample(p, i, n, sign);
  return p;
}
}  // namespace serial

double ode_residual(const ProfileSample& p, int n, double zlo, double zhi) {
  if (p.max_order() < 2) throw std::invalid_argument("ode_residual: profile lacks second derivatives");
  const double lam = 1.0 - std::ldexp(1.0, -(n + 1));
  double r = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p.z[i] < zlo || p.z[i] > zhi) continue;
    r = std::max(r, std::abs(p.d2[i] + 0.5 * p.z[i] * p.d1[i] + lam * p.v[i]));
  }
  return r;
}

double profile_mass(const ProfileSample& p, double left_tail, double right_tail) {
  double core;
  if (p.max_order() >= 2) {
    core = num::hermite_integral(p.z, p.v, p.d1, p.d2);
  } else if (p.max_order() == 1) {
    core = num::hermite_cumulative(p.z, p.v, p.d1).back();
  } else {
    core = 0;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) core += 0.5 * (p.z[i + 1] - p.z[i]) * (p.v[i] + p.v[i + 1]);
  }
  return core + left_tail + right_tail;
}

namespace {

double quantity(const ProfileSample& p, std::size_t i, int m, EnvelopeQuantity q) {
  const double* d[4] = {&p.v[i], p.d1.empty() ? nullptr : &p.d1[i], p.d2.empty() ? nullptr : &p.d2[i],
                        p.d3.empty() ? nullptr : &p.d3[i]};
  if (q == EnvelopeQuantity::value) return *d[m];
  const double prev = m > 0 ? *d[m - 1] : 0.0;
  return p.z[i] * *d[m] + m * prev + 2.0 * *d[m + 1];
}

}  // namespace

EnvelopeResult envelope_check(const ProfileSample& p, const std::vector<EnvelopeDescriptor>& envelopes,
                              EnvelopeQuantity q, double C_max) {
  const int orders = static_cast<int>(envelopes.size());
  const int need = q == EnvelopeQuantity::value ? orders - 1 : orders;
  if (need > p.max_order()) throw std::invalid_argument("envelope_check: missing derivative samples");
  EnvelopeResult r;
  r.per_order.assign(orders, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    double sum = 0;
    for (int m = 0; m < orders; ++m) {
      const double val = std::abs(quantity(p, i, m, q));
      if (val < 1e-290) continue;  // underflowed sample carries no information
      const double term = std::exp(envelopes[m].log_rho(p.z[i]) + std::log(val));
      r.per_order[m] = std::max(r.per_order[m], term);
      sum += term;
    }
    r.sum_sup = std::max(r.sum_sup, sum);
  }
  r.ok = std::isfinite(r.sum_sup) && r.sum_sup <= C_max;
  return r;
}

EnvelopeResult fn_envelope_constants(int n, EnvelopeQuantity q, double zmax, std::size_t samples, double C_max) {
  const double beta = std::ldexp(1.0, -n);
  const int orders = q == EnvelopeQuantity::value ? 4 : 3;
  EnvelopeResult r;
  r.per_order.assign(orders, 0.0);
  std::vector<double> sums(samples, 0.0);
  std::vector<std::vector<double>> terms(samples, std::vector<double>(orders, 0.0));
  const long ns = static_cast<long>(samples);
#pragma omp parallel for schedule(dynamic, 16)
  for (long i = 0; i < ns; ++i) {
    const double z = -zmax + 2.0 * zmax * static_cast<double>(i) / static_cast<double>(samples - 1);
    const FnValues f = eval_fn_scaled(n, z, 3);  // Gaussian factor already removed for z > 0
    for (int m = 0; m < orders; ++m) {
      double val;
      if (q == EnvelopeQuantity::value) {
        val = f.d[m];
      } else {
        val = z * f.d[m] + m * (m > 0 ? f.d[m - 1] : 0.0) + 2.0 * f.d[m + 1];
      }
      const double pw = q == EnvelopeQuantity::value ? (z >= 0 ? beta - 1.0 - m : 2.0 + m - beta)
                                                     : (z >= 0 ? beta - m : 1.0 + m - beta);
      terms[i][m] = std::pow(1.0 + z * z, pw / 2.0) * std::abs(val);
    }
  }
  for (std::size_t i = 0; i < samples; ++i) {
    double s = 0;
    for (int m = 0; m < orders; ++m) {
      r.per_order[m] = std::max(r.per_order[m], terms[i][m]);
      s += terms[i][m];
    }
    r.sum_sup = std::max(r.sum_sup, s);
  }
  r.ok = std::isfinite(r.sum_sup) && r.sum_sup <= C_max;
  return r;
}

cplx eval_Jn(int n, double z) {
  check_n(n);
  if (z < 0) throw std::invalid_argument("eval_Jn: negative argument");
  if (z == 0) return 0.0;
  const double beta = std::ldexp(1.0, -n);
  const double N = std::ldexp(1.0, n);
  const double a = std::min(z, 1.0);
  double re = 0, im = 0;
  {
    auto arg = [&](double u) { return u > 0 ? 2.0 * std::exp(N * std::log(u)) : 0.0; };
    std::vector<double> cuts = {a};
    for (double c : {0.1, 1e-2, 1e-3, 1e-4, 1e-6, 1e-9, 1e-12})
      if (c < a) cuts.push_back(c);
    cuts.push_back(0.0);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const double u1 = std::pow(cuts[i + 1], beta), u2 = std::pow(cuts[i], beta);
      re += N * num::integrate([&](double u) { return std::cos(arg(u)); }, u1, u2, 1e-13);
      im += N * num::integrate([&](double u) { return std::sin(arg(u)); }, u1, u2, 1e-13);
    }
  }
  if (z > 1.0) {
    const double panel = std::numbers::pi / 4.0;
    const std::size_t np = static_cast<std::size_t>(std::ceil((z - 1.0) / panel));
    const double h = (z - 1.0) / static_cast<double>(np);
    for (std::size_t i = 0; i < np; ++i) {
      const double s1 = 1.0 + h * i, s2 = (i + 1 == np) ? z : s1 + h;
      re += num::integrate([&](double s) { return std::cos(2 * s) * std::pow(s, beta - 1); }, s1, s2, 1e-13, 10);
      im += num::integrate([&](double s) { return std::sin(2 * s) * std::pow(s, beta - 1); }, s1, s2, 1e-13, 10);
    }
  }
  return {re, im};
}

cplx Jn_infinity(int n) {
  const double beta = std::ldexp(1.0, -n);
  const double mag = std::tgamma(beta) * std::pow(2.0, -beta);
  return mag * cplx(std::cos(std::numbers::pi * beta / 2), std::sin(std::numbers::pi * beta / 2));
}

cplx Jn_extrapolated(int n, int levels) {
  const double beta = std::ldexp(1.0, -n);
  std::vector<cplx> R(levels);
  for (int j = 0; j < levels; ++j) R[j] = eval_Jn(n, std::numbers::pi * 8.0 * std::ldexp(1.0, j));
  // at z = m pi the error is a pure series in z^{beta-1-i}
  for (int i = 0; i + 1 < levels; ++i) {
    const double f = std::pow(2.0, beta - 1.0 - i);
    for (int j = 0; j + 1 < levels - i; ++j) R[j] = (R[j + 1] - f * R[j]) / (1.0 - f);
  }
  return R[0];
}

TailFit tail_exponent_fit(const ProfileSample& p, double zlo, double zhi) {
  std::vector<double> x, y;
  TailFit r;
  int sign = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p.z[i] < zlo || p.z[i] > zhi || p.z[i] == 0.0) continue;
    const double v = p.v[i];
    if (v == 0.0) continue;
    const int s = v > 0 ? 1 : -1;
    if (sign != 0 && s != sign) r.sign_change = true;
    sign = s;
    x.push_back(std::log(std::abs(p.z[i])));
    y.push_back(std::log(std::abs(v)));
  }
  r.points = x.size();
  if (x.size() < 2) return r;
  const auto fit = num::fit_line(x, y);
  r.slope = fit.slope;
  r.rms = fit.rms;
  return r;
}

std::vector<double> graded_grid(double zmax, double h0, double h1) {
  std::vector<double> pos = {0.0};
  double z = 0.0;
  while (true) {
    const double r = z / zmax;
    const double h = h0 + (h1 - h0) * r * r;
    if (z + 1.5 * h >= zmax) break;
    z += h;
    pos.push_back(z);
  }
  pos.push_back(zmax);
  std::vector<double> g;
  g.reserve(2 * pos.size() - 1);
  for (std::size_t i = pos.size(); i-- > 1;) g.push_back(-pos[i]);
  for (double v : pos) g.push_back(v);
  return g;
}

std::string profile_csv(const ProfileSample& p, int n_for_residual) {
  std::ostringstream os;
  os.precision(15);
  os << "z,f,df,d2f,residual\n";
  const double lam = 1.0 - std::ldexp(1.0, -(n_for_residual + 1));
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d1 = p.d1.empty() ? 0.0 : p.d1[i];
    const double d2 = p.d2.empty() ? 0.0 : p.d2[i];
    os << p.z[i] << ',' << p.v[i] << ',' << d1 << ',' << d2 << ',' << (d2 + 0.5 * p.z[i] * d1 + lam * p.v[i])
       << '\n';
  }
  return os.str();
}

}  // namespace psys

#include "psys/profiles.hpp"

#include "psys/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace psys {

namespace {
const double inv_sqrt_pi = 1.0 / std::sqrt(std::numbers::pi);
}

HessianConstants hessian_constants(const Nonlinearity& nl) {
  const auto rep = check_admissible(nl);
  if (!rep.ok) throw std::invalid_argument("hessian_constants: nonlinearity '" + nl.id + "' is not admissible");
  const auto H = hessian_at_zero(nl);
  const double hab = 0.5 * (H[1] + H[2]);
  HessianConstants c;
  c.c_plus = (H[0] + 2 * hab + H[3]) / 8.0;
  c.c_minus = -(H[0] - 2 * hab + H[3]) / 8.0;
  c.c3 = (H[0] - H[3]) / 4.0;
  return c;
}

double ExpansionCoefficients::epsilon() const { return std::ldexp(1.0, -(N + 2)); }

void ExpansionCoefficients::validate(double threshold) const {
  if (N < 1) throw std::invalid_argument("expansion order N must be >= 1");
  if (std::abs(alpha_plus * c_plus) > threshold || std::abs(alpha_minus * c_minus) > threshold)
    throw std::invalid_argument("|alpha c| exceeds the contraction threshold");
}

// ---- g0 ----

namespace {

struct G0Closed {
  double amp;  // g0 e^{z^2/4} (1 + T erf(z/2)) = amp
  double T;
  double scaled(double z) const { return amp / (1.0 + T * std::erf(z / 2.0)); }
  double value(double z) const { return scaled(z) * std::exp(-z * z / 4.0); }
};

G0Closed g0_closed(double alpha, double gamma) {
  if (gamma == 0.0) return {alpha * inv_sqrt_pi / 2.0, 0.0};
  const double T = std::tanh(alpha * gamma / 2.0);
  return {T * inv_sqrt_pi / gamma, T};
}

}  // namespace

double BurgersProfile::value(double z) const { return g0_closed(alpha, gamma).value(z); }
double BurgersProfile::scaled_value(double z) const { return g0_closed(alpha, gamma).scaled(z); }

BurgersProfile g0_profile(double alpha, double gamma, const std::vector<double>& z) {
  const G0Closed c = g0_closed(alpha, gamma);
  if (1.0 - std::abs(c.T) < 0.1) throw std::invalid_argument("g0_profile: denominator 1 + tanh(alpha gamma/2) erf falls below 0.1");
  BurgersProfile p;
  p.alpha = alpha;
  p.gamma = gamma;
  auto& s = p.sample;
  s.z = z;
  s.label = "g0";
  s.envelope = EnvelopeDescriptor{0.0, 0.0, true};
  const std::size_t m = z.size();
  s.v.resize(m);
  s.d1.resize(m);
  s.d2.resize(m);
  s.d3.resize(m);
  p.scaled.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double zi = z[i];
    const double g = c.value(zi);
    // g' = -z g/2 - gamma g^2 is the once-integrated profile equation
    const double g1 = -0.5 * zi * g - gamma * g * g;
    const double g2 = -0.5 * g - 0.5 * zi * g1 - 2 * gamma * g * g1;
    const double g3 = -g1 - 0.5 * zi * g2 - 2 * gamma * (g1 * g1 + g * g2);
    p.scaled[i] = c.scaled(zi);
    s.v[i] = g;
    s.d1[i] = g1;
    s.d2[i] = g2;
    s.d3[i] = g3;
  }
  return p;
}

double burgers_residual(const BurgersProfile& g0, double zlo, double zhi) {
  const auto& s = g0.sample;
  const auto d1 = num::fd_derivative(s.z, s.v, 1);
  const auto d2 = num::fd_derivative(s.z, s.v, 2);
  std::vector<double> sq(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) sq[i] = s.v[i] * s.v[i];
  const auto dsq = num::fd_derivative(s.z, sq, 1);
  double r = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.z[i] < zlo || s.z[i] > zhi) continue;
    r = std::max(r, std::abs(d2[i] + 0.5 * s.z[i] * d1[i] + 0.5 * s.v[i] + g0.gamma * dsq[i]));
  }
  return r;
}

// ---- g_n ----

namespace {

bool symmetric_grid(const std::vector<double>& z) {
  const std::size_t m = z.size();
  for (std::size_t i = 0; i < m; ++i)
    if (std::abs(z[i] + z[m - 1 - i]) > 1e-12 * (1.0 + std::abs(z[i]))) return false;
  return true;
}

ProfileSample mirror(const ProfileSample& p) {
  ProfileSample r = p;
  const std::size_t m = p.size();
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = m - 1 - i;
    r.v[i] = p.v[j];
    r.d1[i] = -p.d1[j];
    r.d2[i] = p.d2[j];
    r.d3[i] = -p.d3[j];
  }
  r.envelope.mirrored = !p.envelope.mirrored;
  r.label = "f_n(-z)";
  return r;
}

// Integral of f from z[i] to z.back() with cubic Hermite panels, accumulated from the right.
std::vector<double> hermite_cumulative_right(const std::vector<double>& z, const std::vector<double>& f,
                                             const std::vector<double>& df) {
  const std::size_t m = z.size();
  std::vector<double> out(m, 0.0);
  for (std::size_t i = m - 1; i-- > 0;) {
    const double h = z[i + 1] - z[i];
    out[i] = out[i + 1] + h / 2 * (f[i] + f[i + 1]) + h * h / 12 * (df[i] - df[i + 1]);
  }
  return out;
}

}  // namespace

CorrectionProfile gn_fixed_point(int n, int sign, const BurgersProfile& g0, double tol, int max_iter,
                                 double contraction_threshold) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("gn_fixed_point: sign must be +1 or -1");
  if (std::abs(g0.alpha * g0.gamma) > contraction_threshold)
    throw std::invalid_argument("gn_fixed_point: |alpha gamma| outside the contraction regime");
  const auto& z = g0.sample.z;
  const std::size_t m = z.size();
  const double beta = std::ldexp(1.0, -n);
  const double lam = 1.0 - beta / 2.0;
  const double gam = g0.gamma;

  const ProfileSample y1 = sample_fn(n, z, 1);
  const ProfileSample y2 = symmetric_grid(z) ? mirror(y1) : sample_fn(n, z, -1);
  const ProfileSample& base = sign > 0 ? y2 : y1;

  CorrectionProfile out;
  out.n = n;
  out.sign = sign;
  out.W0 = -2.0 * fn_at_zero(n) * eval_fn(n, 0.0, 1).d[1];

  const auto& G = g0.sample;
  std::vector<double> gv = base.v, gd1 = base.d1, gd2 = base.d2;
  std::vector<double> A(m), dA(m), B(m), dB(m);
  std::vector<double> R(m, 0.0), R1(m, 0.0), R2(m, 0.0), R3(m, 0.0);
  std::vector<double> weight(m);
  for (std::size_t i = 0; i < m; ++i) weight[i] = std::pow(1.0 + z[i] * z[i], (2.0 - beta) / 2.0);

  double prev_change = 0;
  for (int it = 1; it <= max_iter; ++it) {
    out.iterations = it;
    if (gam != 0.0) {
      for (std::size_t i = 0; i < m; ++i) {
        const double s = g0.scaled[i];
        const double f2 = z[i] * y2.v[i] + 2 * y2.d1[i];
        const double f1 = z[i] * y1.v[i] + 2 * y1.d1[i];
        A[i] = s * f2 * gv[i];
        B[i] = s * f1 * gv[i];
        // (z y + 2 y')' = (1 - 2 lam) y for solutions of L y = 0
        dA[i] = -gam * G.v[i] * A[i] + s * ((1 - 2 * lam) * y2.v[i] * gv[i] + f2 * gd1[i]);
        dB[i] = -gam * G.v[i] * B[i] + s * ((1 - 2 * lam) * y1.v[i] * gv[i] + f1 * gd1[i]);
      }
      const auto I1 = num::hermite_cumulative(z, A, dA);
      const auto I2 = hermite_cumulative_right(z, B, dB);
      const double k = -gam / out.W0;
      for (std::size_t i = 0; i < m; ++i) {
        const double zg = G.v[i] * gv[i];
        const double zg1 = G.d1[i] * gv[i] + G.v[i] * gd1[i];
        const double zg2 = G.d2[i] * gv[i] + 2 * G.d1[i] * gd1[i] + G.v[i] * gd2[i];
        R[i] = k * (y1.v[i] * I1[i] + y2.v[i] * I2[i]);
        R1[i] = k * (y1.d1[i] * I1[i] + y2.d1[i] * I2[i]) - 2 * gam * zg;
        R2[i] = k * (y1.d2[i] * I1[i] + y2.d2[i] * I2[i]) + gam * z[i] * zg - 2 * gam * zg1;
        R3[i] = k * (y1.d3[i] * I1[i] + y2.d3[i] * I2[i]) - gam * zg * (z[i] * z[i] / 2 - 2 * lam) +
                gam * (zg + z[i] * zg1) - 2 * gam * zg2;
      }
    }
    double change = 0;
    for (std::size_t i = 0; i < m; ++i) {
      const double gnew = base.v[i] + R[i];
      change = std::max(change, weight[i] * std::abs(gnew - gv[i]));
      gv[i] = gnew;
      gd1[i] = base.d1[i] + R1[i];
      gd2[i] = base.d2[i] + R2[i];
    }
    out.last_change = change;
    if (it > 1 && prev_change > 0) out.contraction = change / prev_change;
    prev_change = change;
    if (change < tol) {
      out.converged = true;
      break;
    }
  }

  out.R.z = z;
  out.R.v = R;
  out.R.d1 = R1;
  out.R.d2 = R2;
  out.R.d3 = R3;
  out.R.n = n;
  out.R.tol = tol;
  out.R.label = sign > 0 ? "R_n+" : "R_n-";
  out.R.envelope = EnvelopeDescriptor{-(1.0 - beta), -(1.0 - beta), true};

  out.g = base;
  out.g.n = n;
  out.g.tol = tol;
  out.g.label = sign > 0 ? "g_n+" : "g_n-";
  for (std::size_t i = 0; i < m; ++i) {
    out.g.v[i] += R[i];
    out.g.d1[i] += R1[i];
    out.g.d2[i] += R2[i];
    out.g.d3[i] += R3[i];
  }
  return out;
}

double linearized_residual(const CorrectionProfile& c, const BurgersProfile& g0, double zlo, double zhi) {
  const auto& z = c.g.z;
  const double lam = 1.0 - std::ldexp(1.0, -(c.n + 1));
  const auto d1 = num::fd_derivative(z, c.g.v, 1);
  const auto d2 = num::fd_derivative(z, c.g.v, 2);
  std::vector<double> prod(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) prod[i] = g0.sample.v[i] * c.g.v[i];
  const auto dprod = num::fd_derivative(z, prod, 1);
  double r = 0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (z[i] < zlo || z[i] > zhi) continue;
    r = std::max(r, std::abs(d2[i] + 0.5 * z[i] * d1[i] + lam * c.g.v[i] + 2 * g0.gamma * dprod[i]));
  }
  return r;
}

double correction_mass(const CorrectionProfile& c) {
  const double zmax = c.g.z.back(), zmin = c.g.z.front();
  const double left = c.sign < 0 ? fn_left_tail_integral(c.n, -zmin) : 0.0;
  const double right = c.sign > 0 ? fn_left_tail_integral(c.n, zmax) : 0.0;
  return profile_mass(c.g, left, right);
}

double correction_value(const CorrectionProfile& c, double z) {
  const auto& s = c.g;
  if (z >= s.z.front() && z <= s.z.back()) return num::hermite_interp(s.z, s.v, s.d1, z);
  // beyond the grid only the algebraic side of the base survives
  if (c.sign > 0 && z > 0) return fn_left_asymptotic(c.n, z);
  if (c.sign < 0 && z < 0) return fn_left_asymptotic(c.n, -z);
  return 0.0;
}

ExpansionFields build_expansion_terms(const ExpansionCoefficients& coeffs, const BurgersProfile& g0_plus,
                                      const BurgersProfile& g0_minus, const std::vector<CorrectionProfile>& g_plus,
                                      const std::vector<CorrectionProfile>& g_minus, const std::vector<double>& x,
                                      double t) {
  if (t < 0) throw std::invalid_argument("build_expansion_terms: negative time");
  const double st = std::sqrt(1.0 + t);
  const std::size_t m = x.size();
  ExpansionFields e;
  e.u0.assign(m, 0.0);
  e.u1.assign(m, 0.0);
  e.v0.assign(m, 0.0);
  e.v1.assign(m, 0.0);
  const int N = std::min<int>(coeffs.N, std::min(g_plus.size(), g_minus.size()));
  const long ml = static_cast<long>(m);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < ml; ++i) {
    const double zz = x[i] / st;
    e.u0[i] = g0_plus.value(zz) / st;
    e.v0[i] = g0_minus.value(zz) / st;
    for (int n = 1; n <= N; ++n) {
      const double pw = std::pow(1.0 + t, -(1.0 - std::ldexp(1.0, -(n + 1))));
      const double dp = n <= static_cast<int>(coeffs.d_plus.size()) ? coeffs.d_plus[n - 1] : 0.0;
      const double dm = n <= static_cast<int>(coeffs.d_minus.size()) ? coeffs.d_minus[n - 1] : 0.0;
      if (dp != 0.0) e.u1[i] += pw * dp * correction_value(g_plus[n - 1], zz);
      if (dm != 0.0) e.v1[i] += pw * dm * correction_value(g_minus[n - 1], zz);
    }
  }
  return e;
}

double kappa(int n) { return std::pow(2.0, -1.0 - std::ldexp(1.0, -n)) / std::sqrt(4 * std::numbers::pi); }

namespace {

// Mass of p * q from quintic Hermite panels (both carry derivatives to order 2).
double product_mass(const ProfileSample& p, const ProfileSample& q) {
  const std::size_t m = p.size();
  std::vector<double> v(m), d1(m), d2(m);
  for (std::size_t i = 0; i < m; ++i) {
    v[i] = p.v[i] * q.v[i];
    d1[i] = p.d1[i] * q.v[i] + p.v[i] * q.d1[i];
    d2[i] = p.d2[i] * q.v[i] + 2 * p.d1[i] * q.d1[i] + p.v[i] * q.d2[i];
  }
  return num::hermite_integral(p.z, v, d1, d2);
}

}  // namespace

void d_analytic(ExpansionCoefficients& c, const BurgersProfile& g0_plus, const BurgersProfile& g0_minus,
                const std::vector<CorrectionProfile>& g_plus, const std::vector<CorrectionProfile>& g_minus) {
  c.d_plus.assign(c.N, 0.0);
  c.d_minus.assign(c.N, 0.0);
  // u is driven by -c_minus (v^2)_x moving with speed +2, v by -c_plus (u^2)_x moving with speed -2
  c.d_plus[0] = -c.c_minus * product_mass(g0_minus.sample, g0_minus.sample) * kappa(1);
  c.d_minus[0] = c.c_plus * product_mass(g0_plus.sample, g0_plus.sample) * kappa(1);
  for (int n = 1; n < c.N; ++n) {
    if (static_cast<int>(g_minus.size()) < n || static_cast<int>(g_plus.size()) < n)
      throw std::invalid_argument("d_analytic: missing correction profiles");
    c.d_plus[n] = -2 * c.c_minus * c.d_minus[n - 1] * product_mass(g0_minus.sample, g_minus[n - 1].g) * kappa(n + 1);
    c.d_minus[n] = 2 * c.c_plus * c.d_plus[n - 1] * product_mass(g0_plus.sample, g_plus[n - 1].g) * kappa(n + 1);
  }
}

DFit d_fit(const std::vector<RemainderSnapshot>& snaps, const CorrectionProfile& g, double zlo, double zhi,
           double zhi_fraction) {
  if (snaps.empty()) throw std::invalid_argument("d_fit: no snapshots");
  const double lam = 1.0 - std::ldexp(1.0, -(g.n + 1));
  DFit f;
  double num_total = 0, den_total = 0;
  for (const auto& s : snaps) {
    const double st = std::sqrt(1.0 + s.t);
    const double hi = std::min(zhi, zhi_fraction * 2.0 * s.t / st);
    if (hi <= zlo) throw std::invalid_argument("d_fit: trajectory too short for the tail window");
    const double pw = std::pow(1.0 + s.t, -lam);
    double num = 0, den = 0;
    std::size_t pts = 0;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double z = s.x[i] / st;
      const double side = g.sign * z;
      if (side < zlo || side > hi) continue;
      const double phi = pw * correction_value(g, z);
      num += phi * s.r[i];
      den += phi * phi;
      ++pts;
    }
    if (den == 0.0) throw std::invalid_argument("d_fit: empty window");
    f.per_time.push_back(num / den);
    f.points += pts;
    // each time enters with equal weight
    num_total += num / den;
    den_total += 1.0;
  }
  f.d = num_total / den_total;
  for (double d : f.per_time) f.spread = std::max(f.spread, std::abs(d - f.d) / std::max(std::abs(f.d), 1e-300));
  return f;
}

}  // namespace psys

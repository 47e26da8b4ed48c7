#include "psys/heat.hpp"

#include "psys/numerics.hpp"
#include "psys/special.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace psys {

namespace {

const double inv_sqrt_4pi = 1.0 / std::sqrt(4.0 * std::numbers::pi);

}  // namespace

double HeatSourceSpec::mass() const { return fhat(0.0).real(); }

std::vector<double> HeatSourceSpec::gaussian_weight_sups(double zmax) const {
  const std::size_t m = 4001;
  std::vector<double> z(m), v(m);
  for (std::size_t i = 0; i < m; ++i) {
    z[i] = -zmax + 2 * zmax * static_cast<double>(i) / static_cast<double>(m - 1);
    v[i] = f(z[i]);
  }
  std::vector<double> out(3, 0.0);
  for (int d = 0; d <= 2; ++d) {
    const auto dv = d == 0 ? v : num::fd_derivative(z, v, d);
    for (std::size_t i = 0; i < m; ++i) out[d] = std::max(out[d], std::exp(z[i] * z[i] / 8) * std::abs(dv[i]));
  }
  return out;
}

HeatSourceSpec make_heat_source(const std::string& shape, int n, int sigma) {
  if (n < 1) throw std::invalid_argument("heat source: n must be >= 1");
  if (sigma < -2 || sigma > 2) throw std::invalid_argument("heat source: sigma must lie in {-2,...,2}");
  HeatSourceSpec s;
  s.n = n;
  s.sigma = sigma;
  s.shape = shape;
  if (shape == "gaussian") {
    s.f = [](double z) { return std::exp(-z * z / 4) * inv_sqrt_4pi; };
    s.fhat = [](double q) { return cplx(std::exp(-q * q), 0.0); };
  } else if (shape == "dgaussian") {
    s.f = [](double z) { return -0.5 * z * std::exp(-z * z / 4) * inv_sqrt_4pi; };
    s.fhat = [](double q) { return cplx(0.0, q * std::exp(-q * q)); };
  } else if (shape == "skewed") {
    s.f = [](double z) { return (1 + z / 2) * std::exp(-(z - 1) * (z - 1) / 4) * inv_sqrt_4pi; };
    // (3/2 + w/2) e^{-w^2/4}/sqrt(4 pi) shifted by w = z - 1
    s.fhat = [](double q) { return std::exp(cplx(-q * q, -q)) * cplx(1.5, -q); };
  } else {
    throw std::invalid_argument("unknown heat source shape '" + shape + "'");
  }
  return s;
}

cplx heat_source_hat(const HeatSourceSpec& spec, double k, double s) {
  const double beta = std::ldexp(1.0, -spec.n);
  const double r = std::sqrt(1 + s);
  // f((x - 2 sigma s)/r) has transform r fhat(k r) e^{-2 i k sigma s}
  const double ph = -2.0 * k * spec.sigma * s;
  return cplx(0, k) * std::pow(1 + s, beta - 1.5) * r * spec.fhat(k * r) * cplx(std::cos(ph), std::sin(ph));
}

std::vector<SpectralField> solve_inhom(const HeatSourceSpec& spec, const Grid& grid, const std::vector<double>& t_grid) {
  for (std::size_t i = 0; i < t_grid.size(); ++i)
    if (t_grid[i] < 0 || (i && t_grid[i] < t_grid[i - 1])) throw std::invalid_argument("solve_inhom: t_grid must be increasing and nonnegative");
  const std::size_t n = grid.n;
  const std::size_t nt = t_grid.size();
  std::vector<std::vector<cplx>> hat(nt, std::vector<cplx>(n, 0.0));
  const long nn = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic, 32)
  for (long j = 0; j < nn; ++j) {
    const double k = grid.k(j);
    if (k == 0.0 || static_cast<std::size_t>(j) == n / 2) continue;
    const double k2 = k * k;
    const double panel = spec.sigma == 0 ? 1e300 : std::numbers::pi / (4 * std::abs(k * spec.sigma));
    cplx u = 0.0;
    double t_prev = 0.0;
    for (std::size_t i = 0; i < nt; ++i) {
      const double t1 = t_grid[i];
      if (t1 > t_prev) {
        const double decay = std::exp(-k2 * (t1 - t_prev));
        u *= decay;
        const double s_lo = t_prev;
        const double probe = std::abs(heat_source_hat(spec, k, t1)) + decay * std::abs(heat_source_hat(spec, k, s_lo));
        if (probe > 1e-22) {
          const std::size_t np = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil((t1 - s_lo) / panel)));
          const double h = (t1 - s_lo) / static_cast<double>(np);
          for (std::size_t p = 0; p < np; ++p) {
            const double a = s_lo + h * p, b = p + 1 == np ? t1 : a + h;
            auto re = [&](double s) { return (std::exp(-k2 * (t1 - s)) * heat_source_hat(spec, k, s)).real(); };
            auto im = [&](double s) { return (std::exp(-k2 * (t1 - s)) * heat_source_hat(spec, k, s)).imag(); };
            u += cplx(num::integrate(re, a, b, 1e-12, 12), num::integrate(im, a, b, 1e-12, 12));
          }
        }
        t_prev = t1;
      }
      hat[i][j] = u;
    }
  }
  std::vector<SpectralField> out;
  out.reserve(nt);
  for (std::size_t i = 0; i < nt; ++i) out.push_back(from_continuous(grid, hat[i]));
  return out;
}

std::vector<double> un_reference(int n, int sigma, const Grid& grid, double t) {
  if (sigma != 1 && sigma != -1) throw std::invalid_argument("un_reference: sigma must be +1 or -1");
  const double lam = 1.0 - std::ldexp(1.0, -(n + 1));
  const double kap = std::pow(2.0, -1.0 - std::ldexp(1.0, -n)) * inv_sqrt_4pi;
  const double st = std::sqrt(1 + t);
  const double pre = sigma * std::pow(1 + t, -lam) * kap;
  std::vector<double> out(grid.n);
  const long nn = static_cast<long>(grid.n);
#pragma omp parallel for schedule(dynamic, 64)
  for (long j = 0; j < nn; ++j) {
    const double z = -sigma * grid.x(j) / st;
    out[j] = z > 40 ? 0.0 : pre * eval_fn(n, z, 0).d[0];
  }
  return out;
}

SpectralField un_reference_fourier(int n, int sigma, const Grid& grid, double t) {
  if (sigma != 1 && sigma != -1) throw std::invalid_argument("un_reference_fourier: sigma must be +1 or -1");
  const double beta = std::ldexp(1.0, -n);
  const cplx J = Jn_infinity(n);
  std::vector<cplx> hat(grid.n, 0.0);
  for (std::size_t j = 0; j < grid.n; ++j) {
    const double k = grid.k(j);
    if (k == 0.0 || j == grid.n / 2) continue;
    const cplx sel = sigma * k > 0 ? std::conj(J) : J;
    hat[j] = cplx(0, k) * std::exp(-k * k * (1 + t)) * std::pow(std::abs(k), -beta) * sel;
  }
  return from_continuous(grid, hat);
}

HeatConvergenceReport convergence_check(const HeatSourceSpec& spec, const Grid& grid, const std::vector<double>& t_grid) {
  if (spec.sigma != 1 && spec.sigma != -1) throw std::invalid_argument("convergence_check: sigma must be +1 or -1");
  HeatConvergenceReport r;
  const auto sol = solve_inhom(spec, grid, t_grid);
  const double M = spec.mass();
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    const double t = t_grid[i];
    const SpectralField rem = sol[i] - M * un_reference_fourier(spec.n, spec.sigma, grid, t);
    const double l2 = l2_norm_spectral(rem);
    const double dl2 = l2_norm_spectral(derivative(rem, 1));
    r.t.push_back(t);
    r.rem_l2.push_back(l2);
    r.rem_d_l2.push_back(dl2);
    r.weighted_l2.push_back(std::pow(1 + t, 0.75) / std::log(2 + t) * l2);
    r.weighted_d.push_back(std::pow(1 + t, 1.25) / std::log(2 + t) * dl2);
  }
  r.sup_weighted_l2 = *std::max_element(r.weighted_l2.begin(), r.weighted_l2.end());
  r.sup_weighted_d = *std::max_element(r.weighted_d.begin(), r.weighted_d.end());
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < r.t.size(); ++i)
    if (r.t[i] >= r.slope_from && r.rem_l2[i] > 0) {
      lx.push_back(std::log(1 + r.t[i]));
      ly.push_back(std::log(r.rem_l2[i]));
    }
  if (lx.size() >= 2) r.slope = num::fit_line(lx, ly).slope;
  const double t_end = r.t.back();
  double early[2] = {0, 0}, late[2] = {0, 0};
  for (std::size_t i = 0; i < r.t.size(); ++i) {
    double* bucket = r.t[i] >= t_end / 10 ? late : early;
    bucket[0] = std::max(bucket[0], r.weighted_l2[i]);
    bucket[1] = std::max(bucket[1], r.weighted_d[i]);
  }
  r.last_decade_growth = 0;
  for (int q = 0; q < 2; ++q)
    if (early[q] > 0) r.last_decade_growth = std::max(r.last_decade_growth, late[q] / early[q] - 1.0);
  r.stable = r.last_decade_growth < 0.05;
  return r;
}

double pointwise_constant(int n, int sigma, const std::vector<double>& k_grid, const std::vector<double>& t_grid) {
  const double beta = std::ldexp(1.0, -n);
  const cplx J = Jn_infinity(n);
  double C = 0;
  const long nk = static_cast<long>(k_grid.size());
#pragma omp parallel for schedule(dynamic, 1) reduction(max : C)
  for (long a = 0; a < nk; ++a) {
    const double k = k_grid[a];
    if (k == 0.0) continue;
    const double w = 2.0 * k * sigma;
    const double panel = std::numbers::pi / (8 * std::abs(k));
    cplx I = 0.0;
    double t_prev = 0.0;
    const cplx lim = std::pow(std::abs(k), -beta) * (sigma * k > 0 ? std::conj(J) : J);
    for (double t : t_grid) {
      if (t > t_prev) {
        const std::size_t np = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil((t - t_prev) / panel)));
        const double h = (t - t_prev) / static_cast<double>(np);
        for (std::size_t p = 0; p < np; ++p) {
          const double lo = t_prev + h * p, hi = p + 1 == np ? t : lo + h;
          I += cplx(num::integrate([&](double s) { return std::pow(1 + s, beta - 1) * std::cos(w * s); }, lo, hi, 1e-13, 10),
                    num::integrate([&](double s) { return -std::pow(1 + s, beta - 1) * std::sin(w * s); }, lo, hi, 1e-13, 10));
        }
        t_prev = t;
      }
      if (t <= 0) continue;
      // e^{-k^2(1+t)} cancels on both sides of the bound
      const double diff = std::abs(k) * std::abs(I - lim);
      C = std::max(C, (diff - 1.0 / std::sqrt(t)) / std::abs(k));
    }
  }
  return std::max(C, 0.0);
}

std::vector<double> geometric_times(double t0, double t1, double ratio) {
  std::vector<double> ts;
  for (double t = t0; t < t1 * (1 - 1e-12); t *= ratio) ts.push_back(t);
  ts.push_back(t1);
  return ts;
}

std::string heat_csv(const HeatConvergenceReport& r) {
  std::ostringstream os;
  os.precision(15);
  os << "t,rem_l2,rem_d_l2,weighted_l2,weighted_d\n";
  for (std::size_t i = 0; i < r.t.size(); ++i)
    os << r.t[i] << ',' << r.rem_l2[i] << ',' << r.rem_d_l2[i] << ',' << r.weighted_l2[i] << ',' << r.weighted_d[i] << '\n';
  return os.str();
}

}  // namespace psys

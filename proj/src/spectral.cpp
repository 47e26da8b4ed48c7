#include "psys/spectral.hpp"

#include "psys/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace psys {

namespace fft {
namespace {

struct Plans {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

std::mutex plan_mutex;
std::map<std::size_t, Plans> plan_cache;

const Plans& plans_for(std::size_t n) {
  std::lock_guard<std::mutex> lock(plan_mutex);
  auto it = plan_cache.find(n);
  if (it != plan_cache.end()) return it->second;
  auto* buf_in = fftw_alloc_complex(n);
  auto* buf_out = fftw_alloc_complex(n);
  // ESTIMATE keeps plans (and therefore rounding) identical from run to run.
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  Plans p;
  p.fwd = fftw_plan_dft_1d(static_cast<int>(n), buf_in, buf_out, FFTW_FORWARD, flags);
  p.bwd = fftw_plan_dft_1d(static_cast<int>(n), buf_in, buf_out, FFTW_BACKWARD, flags);
  fftw_free(buf_in);
  fftw_free(buf_out);
  return plan_cache.emplace(n, p).first->second;
}

}  // namespace

void forward(const std::complex<double>* in, std::complex<double>* out, std::size_t n) {
  const auto& p = plans_for(n);
  fftw_execute_dft(p.fwd, reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

void backward(const std::complex<double>* in, std::complex<double>* out, std::size_t n) {
  const auto& p = plans_for(n);
  fftw_execute_dft(p.bwd, reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

}  // namespace fft

Grid::Grid(std::size_t n_points, double L) : n(n_points), half_length(L) {
  if (n_points < 2 || (n_points & (n_points - 1)) != 0)
    throw std::invalid_argument("Grid: n_points must be a power of two");
  if (!(L > 0)) throw std::invalid_argument("Grid: half length must be positive");
}

double Grid::k(std::size_t j) const {
  return std::numbers::pi * static_cast<double>(index(j)) / half_length;
}

std::vector<double> Grid::xs() const {
  std::vector<double> v(n);
  for (std::size_t j = 0; j < n; ++j) v[j] = x(j);
  return v;
}

std::vector<double> Grid::ks() const {
  std::vector<double> v(n);
  for (std::size_t j = 0; j < n; ++j) v[j] = k(j);
  return v;
}

SpectralField transform_forward(std::span<const double> samples, const Grid& grid) {
  if (samples.size() != grid.n) throw std::invalid_argument("transform_forward: length mismatch");
  std::vector<cplx> in(samples.begin(), samples.end());
  SpectralField f(grid);
  fft::forward(in.data(), f.c.data(), grid.n);
  const double inv = 1.0 / static_cast<double>(grid.n);
  for (auto& v : f.c) v *= inv;
  enforce_hermitian(f);
  return f;
}

std::vector<double> transform_inverse(const SpectralField& field) {
  std::vector<cplx> out(field.grid.n);
  fft::backward(field.c.data(), out.data(), field.grid.n);
  std::vector<double> r(field.grid.n);
  for (std::size_t j = 0; j < r.size(); ++j) r[j] = out[j].real();
  return r;
}

SpectralField from_continuous(const Grid& grid, const std::vector<cplx>& fhat) {
  SpectralField f(grid);
  const double inv = 1.0 / (2.0 * grid.half_length);
  for (std::size_t j = 0; j < grid.n; ++j) {
    const double sign = (grid.index(j) % 2 == 0) ? 1.0 : -1.0;
    f.c[j] = sign * inv * fhat[j];
  }
  enforce_hermitian(f);
  return f;
}

cplx continuous_coeff(const SpectralField& f, std::size_t j) {
  const double sign = (f.grid.index(j) % 2 == 0) ? 1.0 : -1.0;
  return sign * 2.0 * f.grid.half_length * f.c[j];
}

void enforce_hermitian(SpectralField& f) {
  const std::size_t n = f.grid.n;
  f.c[0] = cplx(f.c[0].real(), 0.0);
  f.c[n / 2] = cplx(f.c[n / 2].real(), 0.0);
  for (std::size_t j = 1; j < n / 2; ++j) {
    const cplx avg = 0.5 * (f.c[j] + std::conj(f.c[n - j]));
    f.c[j] = avg;
    f.c[n - j] = std::conj(avg);
  }
}

namespace {

cplx ik_power(double k, int order) {
  cplx m(1.0, 0.0);
  for (int i = 0; i < order; ++i) m *= cplx(0.0, k);
  return m;
}

}  // namespace

SpectralField derivative(const SpectralField& f, int order) {
  SpectralField r(f.grid);
  const std::size_t n = f.grid.n;
  const long nn = static_cast<long>(n);
#pragma omp parallel for schedule(static)
  for (long j = 0; j < nn; ++j) r.c[j] = ik_power(f.grid.k(j), order) * f.c[j];
  if (order % 2 == 1) r.c[n / 2] = 0.0;
  return r;
}

SpectralField translate(const SpectralField& f, double shift) {
  SpectralField r(f.grid);
  const long nn = static_cast<long>(f.grid.n);
#pragma omp parallel for schedule(static)
  for (long j = 0; j < nn; ++j) {
    const double ph = f.grid.k(j) * shift;
    r.c[j] = f.c[j] * cplx(std::cos(ph), std::sin(ph));
  }
  // A real field cannot carry a phase-shifted Nyquist mode; keep its real projection.
  const std::size_t ny = f.grid.n / 2;
  r.c[ny] = cplx(f.c[ny].real() * std::cos(f.grid.k(ny) * shift), 0.0);
  return r;
}

namespace serial {

SpectralField derivative(const SpectralField& f, int order) {
  SpectralField r(f.grid);
  for (std::size_t j = 0; j < f.grid.n; ++j) r.c[j] = ik_power(f.grid.k(j), order) * f.c[j];
  if (order % 2 == 1) r.c[f.grid.n / 2] = 0.0;
  return r;
}

SpectralField translate(const SpectralField& f, double shift) {
  SpectralField r(f.grid);
  for (std::size_t j = 0; j < f.grid.n; ++j) {
    const double ph = f.grid.k(j) * shift;
    r.c[j] = f.c[j] * cplx(std::cos(ph), std::sin(ph));
  }
  const std::size_t ny = f.grid.n / 2;
  r.c[ny] = cplx(f.c[ny].real() * std::cos(f.grid.k(ny) * shift), 0.0);
  return r;
}

}  // namespace serial

SpectralField project_low(const SpectralField& f) {
  SpectralField r = f;
  for (std::size_t j = 0; j < f.grid.n; ++j)
    if (std::abs(f.grid.k(j)) > 1.0) r.c[j] = 0.0;
  return r;
}

SpectralField project_high(const SpectralField& f) {
  SpectralField r = f;
  for (std::size_t j = 0; j < f.grid.n; ++j)
    if (std::abs(f.grid.k(j)) <= 1.0) r.c[j] = 0.0;
  return r;
}

void dealias(SpectralField& f) {
  const long cut = static_cast<long>(f.grid.n / 3);
  for (std::size_t j = 0; j < f.grid.n; ++j)
    if (std::labs(f.grid.index(j)) > cut) f.c[j] = 0.0;
}

double mass(const SpectralField& f) { return 2.0 * f.grid.half_length * f.c[0].real(); }

double l2_norm_spectral(const SpectralField& f) {
  double s = 0;
  for (const auto& v : f.c) s += std::norm(v);
  return std::sqrt(2.0 * f.grid.half_length * s);
}

double lp_norm(std::span<const double> f, double dx, double p) {
  double s = 0;
  for (double v : f) s += std::pow(std::abs(v), p);
  return std::pow(s * dx, 1.0 / p);
}

double sup_norm(std::span<const double> f) {
  double m = 0;
  for (double v : f) m = std::max(m, std::abs(v));
  return m;
}

NormReport norms(const SpectralField& f, double t) {
  NormReport r;
  r.t = t;
  const double dx = f.grid.dx();
  const auto v0 = transform_inverse(f);
  const auto v1 = transform_inverse(derivative(f, 1));
  const auto v2 = transform_inverse(derivative(f, 2));
  r.l1 = lp_norm(v0, dx, 1);
  r.l2 = lp_norm(v0, dx, 2);
  r.linf = sup_norm(v0);
  r.d1_l1 = lp_norm(v1, dx, 1);
  r.d1_l2 = lp_norm(v1, dx, 2);
  r.d1_linf = sup_norm(v1);
  r.d2_l1 = lp_norm(v2, dx, 1);
  r.d2_l2 = lp_norm(v2, dx, 2);
  r.d2_linf = sup_norm(v2);
  for (const auto& c : f.c) r.sup_fourier = std::max(r.sup_fourier, 2.0 * f.grid.half_length * std::abs(c));
  double w = 0;
  for (std::size_t j = 0; j < f.grid.n; ++j) {
    const double x = f.grid.x(j);
    w += x * x * x * x * v0[j] * v0[j];
  }
  r.weighted_x2 = std::sqrt(w * dx);
  return r;
}

SpectralField operator+(const SpectralField& a, const SpectralField& b) {
  SpectralField r(a.grid);
  for (std::size_t j = 0; j < a.c.size(); ++j) r.c[j] = a.c[j] + b.c[j];
  return r;
}

SpectralField operator-(const SpectralField& a, const SpectralField& b) {
  SpectralField r(a.grid);
  for (std::size_t j = 0; j < a.c.size(); ++j) r.c[j] = a.c[j] - b.c[j];
  return r;
}

SpectralField operator*(double s, const SpectralField& a) {
  SpectralField r(a.grid);
  for (std::size_t j = 0; j < a.c.size(); ++j) r.c[j] = s * a.c[j];
  return r;
}

}  // namespace psys

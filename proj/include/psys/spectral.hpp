#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace psys {

using cplx = std::complex<double>;

/// Uniform periodic grid on [-L, L) with power-of-two size.
struct Grid {
  std::size_t n = 0;
  double half_length = 0.0;

  Grid() = default;
  Grid(std::size_t n_points, double L);

  double dx() const { return 2.0 * half_length / static_cast<double>(n); }
  double x(std::size_t j) const { return -half_length + static_cast<double>(j) * dx(); }
  /// Wavenumber of FFT slot j (slot n/2 is the Nyquist mode, stored as negative).
  double k(std::size_t j) const;
  long index(std::size_t j) const { return j < n / 2 ? static_cast<long>(j) : static_cast<long>(j) - static_cast<long>(n); }
  std::vector<double> xs() const;
  std::vector<double> ks() const;
  bool operator==(const Grid& o) const { return n == o.n && half_length == o.half_length; }
};

/// Fourier coefficients c_j with f(x) = sum_j c_j exp(i k_j (x + L)); c_0 is the mean.
struct SpectralField {
  Grid grid;
  std::vector<cplx> c;

  SpectralField() = default;
  explicit SpectralField(const Grid& g) : grid(g), c(g.n, cplx(0.0, 0.0)) {}
};

enum class Frame { physical, characteristic };

/// Pair (a, b) in the physical frame or (u, v) in the characteristic frame.
struct StateVector {
  SpectralField first;
  SpectralField second;
  Frame frame = Frame::physical;
};

struct NormReport {
  double t = 0.0;
  double l1 = 0, l2 = 0, linf = 0;
  double d1_l1 = 0, d1_l2 = 0, d1_linf = 0;
  double d2_l1 = 0, d2_l2 = 0, d2_linf = 0;
  double sup_fourier = 0;  ///< sup_k |f^(k)| of the continuous transform
  double weighted_x2 = 0;  ///< ||x^2 f||_2
};

SpectralField transform_forward(std::span<const double> samples, const Grid& grid);
std::vector<double> transform_inverse(const SpectralField& field);

/// Sets c_j from a continuous transform fhat(k) = int f(x) e^{-ikx} dx.
SpectralField from_continuous(const Grid& grid, const std::vector<cplx>& fhat);
/// Continuous transform value at slot j implied by the coefficients.
cplx continuous_coeff(const SpectralField& f, std::size_t j);

void enforce_hermitian(SpectralField& f);

SpectralField derivative(const SpectralField& f, int order);
SpectralField translate(const SpectralField& f, double shift);
SpectralField project_low(const SpectralField& f);
SpectralField project_high(const SpectralField& f);

/// Zeroes all modes with |index| > n/3 (two-thirds rule).
void dealias(SpectralField& f);

double mass(const SpectralField& f);
double l2_norm_spectral(const SpectralField& f);
NormReport norms(const SpectralField& f, double t);

SpectralField operator+(const SpectralField& a, const SpectralField& b);
SpectralField operator-(const SpectralField& a, const SpectralField& b);
SpectralField operator*(double s, const SpectralField& a);

/// Physical-space L^p helpers on grid samples.
double lp_norm(std::span<const double> f, double dx, double p);
double sup_norm(std::span<const double> f);

namespace serial {
SpectralField derivative(const SpectralField& f, int order);
SpectralField translate(const SpectralField& f, double shift);
}  // namespace serial

}  // namespace psys

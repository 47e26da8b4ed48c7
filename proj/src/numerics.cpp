#include "psys/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace psys::num {

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw std::invalid_argument("fit_line: need at least two points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) { mx += x[i]; my += y[i]; }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit r;
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = y[i] - r.intercept - r.slope * x[i];
    ss += e * e;
  }
  r.rms = std::sqrt(ss / n);
  return r;
}

std::vector<double> fd_weights(double x0, std::span<const double> nodes, int order) {
  const int n = static_cast<int>(nodes.size());
  const int m = order;
  // c[j][k]: weight of node j for derivative k
  std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));
  double c1 = 1.0, c4 = nodes[0] - x0;
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = nodes[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (int j = 0; j < n; ++j) w[j] = c[j][m];
  return w;
}

std::vector<double> fd_derivative(std::span<const double> z, std::span<const double> f,
                                  int order, int width) {
  const std::size_t n = z.size();
  if (n < static_cast<std::size_t>(width)) throw std::invalid_argument("fd_derivative: grid too short");
  std::vector<double> out(n);
  const std::size_t half = width / 2;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t lo = i >= half ? i - half : 0;
    lo = std::min(lo, n - width);
    const auto w = fd_weights(z[i], z.subspan(lo, width), order);
    double s = 0;
    for (int j = 0; j < width; ++j) s += w[j] * f[lo + j];
    out[i] = s;
  }
  return out;
}

std::vector<double> hermite_cumulative(std::span<const double> z, std::span<const double> f,
                                       std::span<const double> df) {
  std::vector<double> out(z.size(), 0.0);
  for (std::size_t i = 0; i + 1 < z.size(); ++i) {
    const double h = z[i + 1] - z[i];
    out[i + 1] = out[i] + 0.5 * h * (f[i] + f[i + 1]) + h * h / 12.0 * (df[i] - df[i + 1]);
  }
  return out;
}

double hermite_integral(std::span<const double> z, std::span<const double> f,
                        std::span<const double> df, std::span<const double> d2f) {
  double s = 0;
  for (std::size_t i = 0; i + 1 < z.size(); ++i) {
    const double h = z[i + 1] - z[i];
    s += 0.5 * h * (f[i] + f[i + 1]) + h * h / 10.0 * (df[i] - df[i + 1]) +
         h * h * h / 120.0 * (d2f[i] + d2f[i + 1]);
  }
  return s;
}

std::size_t bracket(std::span<const double> z, double x) {
  auto it = std::upper_bound(z.begin(), z.end(), x);
  std::size_t i = it == z.begin() ? 0 : static_cast<std::size_t>(it - z.begin()) - 1;
  return std::min(i, z.size() - 2);
}

double hermite_interp(std::span<const double> z, std::span<const double> f,
                      std::span<const double> df, double x) {
  const std::size_t i = bracket(z, x);
  const double h = z[i + 1] - z[i];
  const double s = (x - z[i]) / h;
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
  return h00 * f[i] + h10 * h * df[i] + h01 * f[i + 1] + h11 * h * df[i + 1];
}

}  // namespace psys::num

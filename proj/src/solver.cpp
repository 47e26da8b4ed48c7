#include "psys/solver.hpp"

#include "psys/fft.hpp"
#include "psys/numerics.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace psys {

Scheme parse_scheme(const std::string& s) {
  if (s == "if-rk4" || s == "if_rk4") return Scheme::if_rk4;
  if (s == "etd-heun" || s == "etd_heun") return Scheme::etd_heun;
  throw std::invalid_argument("unknown scheme '" + s + "'");
}

std::string to_string(Scheme s) { return s == Scheme::if_rk4 ? "if-rk4" : "etd-heun"; }

std::size_t SimConfig::steps() const {
  if (t_final <= 0) return 0;
  return static_cast<std::size_t>(std::ceil(t_final / dt - 1e-9));
}

double SimConfig::step_size() const {
  const std::size_t n = steps();
  return n == 0 ? dt : t_final / static_cast<double>(n);
}

std::vector<double> SimConfig::schedule() const {
  std::vector<double> ts = snapshot_times;
  if (ts.empty()) {
    for (double t = 1.0; t < t_final; t *= snapshot_ratio) ts.push_back(t);
  }
  ts.push_back(0.0);
  ts.push_back(t_final);
  const double h = step_size();
  for (double& t : ts) t = std::round(std::clamp(t, 0.0, t_final) / h) * h;
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end(), [&](double a, double b) { return std::abs(a - b) < 0.5 * h; }), ts.end());
  return ts;
}

void SimConfig::validate() const {
  if (n_points < 16 || (n_points & (n_points - 1)) != 0) throw std::invalid_argument("n_points must be a power of two >= 16");
  if (!(half_length > 0)) throw std::invalid_argument("half_length must be positive");
  if (!(dt > 0)) throw std::invalid_argument("dt must be positive");
  if (t_final < 0) throw std::invalid_argument("t_final must be nonnegative");
  const double dx = 2 * half_length / static_cast<double>(n_points);
  if (dt > 0.5 * dx) throw std::invalid_argument("dt exceeds 0.5 dx");
  const double need = x_support + 2 * t_final + 10 * std::sqrt(t_final);
  if (half_length < need) {
    std::ostringstream os;
    os << "domain rule violated: half_length " << half_length << " < " << need;
    throw std::invalid_argument(os.str());
  }
  if (!(dealias_fraction > 0 && dealias_fraction <= 1)) throw std::invalid_argument("dealias_fraction must lie in (0, 1]");
}

StateVector gaussian_initial(const Grid& grid, double eps0, double b_ratio) {
  std::vector<double> a(grid.n), b(grid.n);
  for (std::size_t j = 0; j < grid.n; ++j) {
    const double x = grid.x(j);
    a[j] = eps0 * std::exp(-x * x / 4);
    b[j] = b_ratio * a[j];
  }
  return {transform_forward(a, grid), transform_forward(b, grid), Frame::physical};
}

namespace {

// phi_1(Lh) and phi_2(Lh) as integrals of e^{Lh(1-s)} and s e^{Lh(1-s)} over [0, 1].
void etd_phis(double k, double h, Mat2& p1, Mat2& p2) {
  using quad = boost::math::quadrature::gauss<double, 10>;
  p1 = Mat2{};
  p2 = Mat2{};
  // panels refine geometrically toward s = 1 where stiff modes concentrate
  double lo = 0.0;
  for (int j = 1; j <= 14; ++j) {
    const double hi = j == 14 ? 1.0 : 1.0 - std::ldexp(1.0, -j);
    for (int e = 0; e < 4; ++e) {
      const int r = e / 2, c = e % 2;
      auto re = [&](double s) { return eval_eLt(k, h * (1 - s))(r, c).real(); };
      auto im = [&](double s) { return eval_eLt(k, h * (1 - s))(r, c).imag(); };
      auto sre = [&](double s) { return s * re(s); };
      auto sim = [&](double s) { return s * im(s); };
      p1.m[e] += cplx(quad::integrate(re, lo, hi), quad::integrate(im, lo, hi));
      p2.m[e] += cplx(quad::integrate(sre, lo, hi), quad::integrate(sim, lo, hi));
    }
    lo = hi;
  }
}

inline void apply(const Mat2& M, cplx& x, cplx& y) {
  const cplx nx = M.m[0] * x + M.m[1] * y;
  const cplx ny = M.m[2] * x + M.m[3] * y;
  x = nx;
  y = ny;
}

}  // namespace

Stepper::Stepper(const Grid& grid, double dt, Scheme scheme, const Nonlinearity& nl, double dealias_fraction)
    : grid_(grid), dt_(dt), scheme_(scheme), nl_(nl) {
  const std::size_t n = grid.n;
  keep_.resize(n);
  const double cut = dealias_fraction * static_cast<double>(n) / 2.0;
  for (std::size_t j = 0; j < n; ++j) keep_[j] = std::abs(static_cast<double>(grid.index(j))) <= cut ? 1 : 0;
  if (scheme == Scheme::if_rk4) {
    half_.resize(n);
    full_.resize(n);
  } else {
    full_.resize(n);
    phi1_.resize(n);
    phi2_.resize(n);
  }
  const long nl_modes = static_cast<long>(n);
#pragma omp parallel for schedule(static)
  for (long j = 0; j < nl_modes; ++j) {
    const double k = grid.k(j);
    full_[j] = eval_eLt(k, dt);
    if (scheme == Scheme::if_rk4) {
      half_[j] = eval_eLt(k, dt / 2);
    } else {
      etd_phis(k, dt, phi1_[j], phi2_[j]);
    }
  }
}

SpectralField Stepper::nonlinear(const StateVector& z) const {
  const std::size_t n = grid_.n;
  SpectralField out(grid_);
  if (nl_.zero) return out;
  std::vector<cplx> packed(n), ab(n), bx(n), h(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double k = grid_.k(j);
    packed[j] = z.first.c[j] + cplx(0, 1) * z.second.c[j];
    bx[j] = j == n / 2 ? cplx(0) : cplx(0, k) * z.second.c[j];
  }
  fft::backward(packed.data(), ab.data(), n);
  fft::backward(bx.data(), packed.data(), n);
  const long nn = static_cast<long>(n);
#pragma omp parallel for schedule(static)
  for (long j = 0; j < nn; ++j) {
    const double a = ab[j].real(), b = ab[j].imag(), d = packed[j].real();
    h[j] = nl_.g(a, b) + 2.0 * nl_.f(a, b) * d;
  }
  fft::forward(h.data(), out.c.data(), n);
  const double inv = 1.0 / static_cast<double>(n);
  for (std::size_t j = 0; j < n; ++j) {
    out.c[j] = keep_[j] && j != n / 2 ? cplx(0, grid_.k(j)) * out.c[j] * inv : cplx(0);
  }
  enforce_hermitian(out);
  return out;
}

StateVector Stepper::step(const StateVector& z) const {
  const std::size_t n = grid_.n;
  const double h = dt_;
  StateVector out = z;
  if (scheme_ == Scheme::if_rk4) {
    const SpectralField k1 = nonlinear(z);
    StateVector w = z;
    for (std::size_t j = 0; j < n; ++j) {
      w.second.c[j] += 0.5 * h * k1.c[j];
      apply(half_[j], w.first.c[j], w.second.c[j]);
    }
    const SpectralField k2 = nonlinear(w);
    StateVector ez = z;
    for (std::size_t j = 0; j < n; ++j) apply(half_[j], ez.first.c[j], ez.second.c[j]);
    w = ez;
    for (std::size_t j = 0; j < n; ++j) w.second.c[j] += 0.5 * h * k2.c[j];
    const SpectralField k3 = nonlinear(w);
    w = ez;
    for (std::size_t j = 0; j < n; ++j) {
      cplx x = 0, y = h * k3.c[j];
      apply(half_[j], x, y);
      apply(half_[j], w.first.c[j], w.second.c[j]);  // e^{Lh} z
      w.first.c[j] += x;
      w.second.c[j] += y;
    }
    const SpectralField k4 = nonlinear(w);
    for (std::size_t j = 0; j < n; ++j) {
      cplx x = z.first.c[j], y = z.second.c[j];
      apply(full_[j], x, y);
      cplx p = 0, q = h / 6 * k1.c[j];
      apply(full_[j], p, q);
      cplx r = 0, s = h / 3 * (k2.c[j] + k3.c[j]);
      apply(half_[j], r, s);
      out.first.c[j] = x + p + r;
      out.second.c[j] = y + q + s + h / 6 * k4.c[j];
    }
  } else {
    const SpectralField n0 = nonlinear(z);
    StateVector a = z;
    for (std::size_t j = 0; j < n; ++j) {
      apply(full_[j], a.first.c[j], a.second.c[j]);
      a.first.c[j] += h * phi1_[j].m[1] * n0.c[j];
      a.second.c[j] += h * phi1_[j].m[3] * n0.c[j];
    }
    const SpectralField n1 = nonlinear(a);
    out = a;
    for (std::size_t j = 0; j < n; ++j) {
      const cplx dn = n1.c[j] - n0.c[j];
      out.first.c[j] += h * phi2_[j].m[1] * dn;
      out.second.c[j] += h * phi2_[j].m[3] * dn;
    }
  }
  enforce_hermitian(out.first);
  enforce_hermitian(out.second);
  return out;
}

StateVector to_characteristic_frame(const StateVector& z, double t) {
  if (z.frame != Frame::physical) throw std::invalid_argument("to_characteristic_frame: state not in physical frame");
  return {translate(z.first + z.second, -t), translate(z.first - z.second, t), Frame::characteristic};
}

StateVector from_characteristic_frame(const StateVector& uv, double t) {
  if (uv.frame != Frame::characteristic) throw std::invalid_argument("from_characteristic_frame: wrong frame");
  const SpectralField p = translate(uv.first, t);
  const SpectralField m = translate(uv.second, -t);
  return {0.5 * (p + m), 0.5 * (p - m), Frame::physical};
}

namespace {

double weighted_energy(const StateVector& z) {
  const auto a = transform_inverse(z.first);
  const auto b = transform_inverse(z.second);
  const Grid& g = z.first.grid;
  double s = 0;
  for (std::size_t j = 0; j < g.n; ++j) {
    const double x = g.x(j);
    s += x * x * x * x * (a[j] * a[j] + b[j] * b[j]);
  }
  return 0.5 * s * g.dx();
}

Snapshot make_snapshot(const StateVector& z, double t, bool keep) {
  Snapshot s;
  s.t = t;
  const StateVector uv = to_characteristic_frame(z, t);
  s.a = norms(z.first, t);
  s.b = norms(z.second, t);
  s.u = norms(uv.first, t);
  s.v = norms(uv.second, t);
  s.weighted = weighted_energy(z);
  s.mass_a = mass(z.first);
  s.mass_b = mass(z.second);
  if (keep) s.state = z;
  return s;
}

bool finite_state(const StateVector& z) {
  for (std::size_t j = 0; j < z.first.c.size(); ++j)
    if (!std::isfinite(std::abs(z.first.c[j])) || !std::isfinite(std::abs(z.second.c[j]))) return false;
  return true;
}

}  // namespace

TrajectoryRecord run(const SimConfig& config, const StateVector& initial) {
  config.validate();
  const Grid grid = config.grid();
  if (!(initial.first.grid == grid) || !(initial.second.grid == grid))
    throw std::invalid_argument("run: initial data grid differs from the configured grid");
  const Nonlinearity nl = make_nonlinearity(config.nonlinearity);
  if (!check_admissible(nl).ok) throw std::invalid_argument("run: nonlinearity not admissible");
  TrajectoryRecord rec;
  rec.steps = config.steps();
  rec.dt = config.step_size();
  const auto sched = config.schedule();
  const Stepper stepper(grid, rec.dt, config.scheme, nl, config.dealias_fraction);

  StateVector z = initial;
  const double m0a = mass(z.first), m0b = mass(z.second);
  std::size_t next = 0;
  auto maybe_snapshot = [&](std::size_t step) {
    const double t = static_cast<double>(step) * rec.dt;
    while (next < sched.size() && std::abs(sched[next] - t) < 0.5 * rec.dt) {
      rec.snaps.push_back(make_snapshot(z, t, config.keep_states));
      const auto& s = rec.snaps.back();
      rec.max_mass_drift = std::max({rec.max_mass_drift, std::abs(s.mass_a - m0a), std::abs(s.mass_b - m0b)});
      ++next;
    }
  };
  maybe_snapshot(0);
  for (std::size_t s = 1; s <= rec.steps; ++s) {
    StateVector zn = stepper.step(z);
    if (s % 64 == 0 || s == rec.steps) {
      if (!finite_state(zn)) {
        rec.aborted = true;
        rec.abort_reason = "non-finite state at t = " + std::to_string(static_cast<double>(s) * rec.dt);
        break;
      }
    }
    z = std::move(zn);
    maybe_snapshot(s);
  }
  std::vector<double> ts, logs;
  for (const auto& s : rec.snaps)
    if (s.weighted > 0) {
      ts.push_back(s.t);
      logs.push_back(std::log(s.weighted));
    }
  if (ts.size() >= 2) rec.growth_rate = num::fit_line(ts, logs).slope;
  return rec;
}

SpectralField heat_forced(const Grid& grid, const std::function<SpectralField(double)>& forcing, double t_final,
                          double dt) {
  const std::size_t steps = static_cast<std::size_t>(std::ceil(t_final / dt - 1e-9));
  const double h = steps ? t_final / static_cast<double>(steps) : dt;
  const std::size_t n = grid.n;
  std::vector<double> e1(n), e2(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double k = grid.k(j);
    e1[j] = std::exp(-k * k * h / 2);
    e2[j] = e1[j] * e1[j];
  }
  SpectralField w(grid);
  for (std::size_t s = 0; s < steps; ++s) {
    const double t = static_cast<double>(s) * h;
    const SpectralField f0 = forcing(t), fm = forcing(t + h / 2), f1 = forcing(t + h);
    for (std::size_t j = 0; j < n; ++j)
      w.c[j] = e2[j] * w.c[j] + h / 6 * (e2[j] * f0.c[j] + 4 * e1[j] * fm.c[j] + f1.c[j]);
  }
  enforce_hermitian(w);
  return w;
}

std::string trajectory_csv(const TrajectoryRecord& r) {
  std::ostringstream os;
  os.precision(15);
  os << "t,l2_a,l2_b,l2_u,l2_v,d1_l2_u,d2_l2_u,linf_u,l1_u,weighted,mass_a,mass_b,w_l2,w_d1,w_d2\n";
  for (const auto& s : r.snaps) {
    const double t = s.t;
    const double za = std::hypot(s.a.l2, s.b.l2);
    const double zd1 = std::hypot(s.a.d1_l2, s.b.d1_l2);
    const double zd2 = std::hypot(s.a.d2_l2, s.b.d2_l2);
    os << t << ',' << s.a.l2 << ',' << s.b.l2 << ',' << s.u.l2 << ',' << s.v.l2 << ',' << s.u.d1_l2 << ','
       << s.u.d2_l2 << ',' << s.u.linf << ',' << s.u.l1 << ',' << s.weighted << ',' << s.mass_a << ',' << s.mass_b
       << ',' << std::pow(1 + t, 0.25) * za << ',' << std::pow(1 + t, 0.75) * zd1 << ','
       << std::pow(1 + t, 1.25) / std::log(2 + t) * zd2 << '\n';
  }
  return os.str();
}

}  // namespace psys

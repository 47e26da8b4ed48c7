#include "psys/verifier.hpp"

#include "psys/numerics.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace psys {

DecayFitReport fit_decay(const std::string& quantity, const std::vector<double>& t, const std::vector<double>& q,
                         double t_lo, double t_hi, double target, double tolerance, bool upper_only,
                         double residual_cap) {
  DecayFitReport r;
  r.quantity = quantity;
  r.t_lo = t_lo;
  r.t_hi = t_hi;
  r.target = target;
  r.tolerance = tolerance;
  r.upper_only = upper_only;
  r.residual_cap = residual_cap;
  if ((1 + t_hi) < 10 * (1 + t_lo) * (1 - 1e-9)) throw std::invalid_argument("fit_decay: window shorter than a decade in 1+t");
  std::vector<double> x, y;
  bool all_zero = true;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_lo - 1e-9 || t[i] > t_hi + 1e-9) continue;
    if (q[i] != 0) all_zero = false;
    if (q[i] <= 0) continue;
    x.push_back(std::log(1 + t[i]));
    y.push_back(std::log(q[i]));
  }
  if (all_zero && !t.empty()) {
    // an identically vanishing quantity satisfies every decay bound
    r.slope = -INFINITY;
    r.pass = true;
    return r;
  }
  if (x.size() < 3) throw std::invalid_argument("fit_decay: fewer than three samples in the window");
  const auto f = num::fit_line(x, y);
  r.slope = f.slope;
  r.residual = f.rms;
  const bool slope_ok = upper_only ? r.slope <= target + tolerance : std::abs(r.slope - target) <= tolerance;
  r.pass = slope_ok && r.residual <= residual_cap;
  return r;
}

// ---- expansion context ----

ExpansionContext build_context(const TrajectoryRecord& traj, const Nonlinearity& nl, const ContextOptions& opt) {
  if (traj.snaps.empty()) throw std::invalid_argument("build_context: empty trajectory");
  const Snapshot& s0 = traj.snaps.front();
  if (!s0.state.first.c.size()) throw std::invalid_argument("build_context: trajectory holds no states");
  ExpansionContext ctx;
  auto& c = ctx.coeffs;
  c.alpha_plus = mass(s0.state.first + s0.state.second);
  c.alpha_minus = mass(s0.state.first - s0.state.second);
  const auto h = hessian_constants(nl);
  c.c_plus = h.c_plus;
  c.c_minus = h.c_minus;
  c.c3 = h.c3;
  c.N = opt.N;
  c.validate();
  const auto z = opt.z_grid.empty() ? graded_grid() : opt.z_grid;
  ctx.g0_plus = g0_profile(c.alpha_plus, c.c_plus, z);
  ctx.g0_minus = g0_profile(c.alpha_minus, c.c_minus, z);
  for (int n = 1; n <= opt.N; ++n) {
    ctx.g_plus.push_back(gn_fixed_point(n, 1, ctx.g0_plus, opt.tol, opt.max_iter));
    ctx.g_minus.push_back(gn_fixed_point(n, -1, ctx.g0_minus, opt.tol, opt.max_iter));
  }
  d_analytic(c, ctx.g0_plus, ctx.g0_minus, ctx.g_plus, ctx.g_minus);
  ctx.d_plus_analytic = c.d_plus;
  ctx.d_minus_analytic = c.d_minus;
  if (opt.mode == DMode::fit) {
    const double t_final = traj.snaps.back().t;
    std::vector<RemainderSnapshot> rs;
    for (const auto& s : traj.snaps) {
      if (s.t < opt.fit_t_min_fraction * t_final || s.t <= 0 || !s.state.first.c.size()) continue;
      const StateVector uv = to_characteristic_frame(s.state, s.t);
      RemainderSnapshot r;
      r.t = s.t;
      r.x = uv.first.grid.xs();
      r.r = transform_inverse(uv.first);
      const double st = std::sqrt(1 + s.t);
      for (std::size_t i = 0; i < r.x.size(); ++i) r.r[i] -= ctx.g0_plus.value(r.x[i] / st) / st;
      rs.push_back(std::move(r));
    }
    // all-zero remainders carry no tail to fit
    bool any = false;
    for (const auto& r : rs)
      for (double v : r.r)
        if (v != 0.0) any = true;
    if (!rs.empty() && any) {
      ctx.fit = d_fit(rs, ctx.g_plus[0], opt.fit_zlo, opt.fit_zhi, opt.fit_fraction);
      c.d_plus[0] = ctx.fit.d;
      ctx.fit_used = true;
    } else if (rs.empty()) {
      throw std::invalid_argument("build_context: trajectory too short for fit mode");
    }
  }
  return ctx;
}

RemainderSeries remainder_series(const TrajectoryRecord& traj, const ExpansionContext& ctx) {
  RemainderSeries out;
  for (const auto& s : traj.snaps) {
    if (!s.state.first.c.size()) continue;
    const StateVector uv = to_characteristic_frame(s.state, s.t);
    const Grid& g = uv.first.grid;
    const double mu = mass(uv.first);
    if (std::abs(mu - ctx.coeffs.alpha_plus) > 1e-6) {
      std::ostringstream os;
      os << "mass mismatch at t = " << s.t << ": " << mu << " vs " << ctx.coeffs.alpha_plus;
      throw std::runtime_error(os.str());
    }
    const auto x = g.xs();
    const auto u = transform_inverse(uv.first);
    const ExpansionFields e = build_expansion_terms(ctx.coeffs, ctx.g0_plus, ctx.g0_minus, ctx.g_plus, ctx.g_minus, x, s.t);
    std::vector<double> r0(g.n), r1(g.n);
    for (std::size_t j = 0; j < g.n; ++j) {
      r0[j] = u[j] - e.u0[j];
      r1[j] = r0[j] - e.u1[j];
    }
    out.t.push_back(s.t);
    out.u_l2.push_back(lp_norm(u, g.dx(), 2));
    out.r0_l2.push_back(lp_norm(r0, g.dx(), 2));
    out.r1_l2.push_back(lp_norm(r1, g.dx(), 2));
    out.r1_d_l2.push_back(l2_norm_spectral(derivative(transform_forward(r1, g), 1)));
    out.mass_u.push_back(mu);
  }
  return out;
}

std::vector<DecayFitReport> remainder_pipeline(const TrajectoryRecord& traj, const ExpansionContext& ctx,
                                               RemainderSeries* series) {
  const RemainderSeries rs = remainder_series(traj, ctx);
  if (series) *series = rs;
  if (rs.t.empty()) throw std::invalid_argument("remainder_pipeline: no stored states");
  const double t_hi = rs.t.back();
  const double t_lo = (1 + t_hi) / 20 - 1;
  const bool linear = ctx.coeffs.c_plus == 0 && ctx.coeffs.c_minus == 0;
  const double eps1 = std::ldexp(1.0, -3);
  std::vector<DecayFitReport> out;
  out.push_back(fit_decay("u_l2", rs.t, rs.u_l2, t_lo, t_hi, -0.25, 0.03));
  if (linear) {
    out.push_back(fit_decay("remainder_N0_l2", rs.t, rs.r0_l2, t_lo, t_hi, -0.75, 0.05, true));
  } else {
    out.push_back(fit_decay("remainder_N0_l2", rs.t, rs.r0_l2, t_lo, t_hi, -0.5, 0.05));
  }
  out.push_back(fit_decay("remainder_N1_l2", rs.t, rs.r1_l2, t_lo, t_hi, -(0.75 - eps1), 0.05, true));
  out.push_back(fit_decay("remainder_N1_d_l2", rs.t, rs.r1_d_l2, t_lo, t_hi, -(1.25 - eps1), 0.05, true));
  return out;
}

TailReport tail_precedence_check(const StateVector& physical, double t, double zlo, double zhi, double target,
                                 double tolerance, double gauss_lo, double gauss_hi) {
  TailReport r;
  r.t = t;
  r.target = target;
  r.tolerance = tolerance;
  const StateVector uv = to_characteristic_frame(physical, t);
  const Grid& g = uv.first.grid;
  const auto u = transform_inverse(uv.first);
  const double st = std::sqrt(1 + t);
  double umax = 0;
  for (double v : u) umax = std::max(umax, std::abs(v));
  // below ~1e-12 of the peak the samples are roundoff
  const double floor = 1e-12 * umax;
  std::vector<double> lx, ly, bz2, blx, bly, az2, aly;
  int sign = 0;
  for (std::size_t j = 0; j < g.n; ++j) {
    const double z = g.x(j) / st;
    const double v = u[j];
    if (z >= zlo && z <= zhi && std::abs(v) > floor) {
      const int sg = v > 0 ? 1 : -1;
      if (sign && sg != sign) r.ahead_sign_change = true;
      sign = sg;
      lx.push_back(std::log(z));
      ly.push_back(std::log(std::abs(v)));
    }
    if (z >= gauss_lo && z <= gauss_hi && std::abs(v) > floor) {
      az2.push_back(z * z / 4);
      aly.push_back(std::log(std::abs(v)));
    } else if (-z >= gauss_lo && -z <= gauss_hi && std::abs(v) > floor) {
      bz2.push_back(z * z / 4);
      blx.push_back(std::log(-z));
      bly.push_back(std::log(std::abs(v)));
    }
  }
  if (umax == 0 || lx.size() < 3 || bz2.size() < 3) {
    r.inconclusive = true;
    return r;
  }
  const auto f = num::fit_line(lx, ly);
  r.ahead_slope = f.slope;
  r.ahead_rms = f.rms;
  r.behind_gauss = num::fit_line(bz2, bly).slope;
  r.behind_slope = num::fit_line(blx, bly).slope;
  const bool gaussian_behind = std::abs(r.behind_gauss + 1.0) <= 0.25;
  // Gaussian on both sides: no algebraic tail to locate
  if (gaussian_behind && az2.size() >= 3 && std::abs(num::fit_line(az2, aly).slope + 1.0) <= 0.25) {
    r.inconclusive = true;
    return r;
  }
  r.algebraic_ahead = !r.ahead_sign_change && std::abs(r.ahead_slope - target) <= tolerance && gaussian_behind;
  return r;
}

// ---- bound kernels ----

BoundKernelParams BoundKernelParams::B1(double p1, double q1, double p2, double q2) {
  BoundKernelParams p;
  p.p1 = p1;
  p.q1 = q1;
  p.p2 = p2;
  p.q2 = q2;
  return p;
}

void BoundKernelParams::validate() const {
  if (!(p2 >= 0 && p2 < 1)) throw std::invalid_argument("bound kernel: need 0 <= p2 < 1");
  if (!(r2 >= 0 && r2 <= 1 - p2 + 1e-15)) throw std::invalid_argument("bound kernel: need 0 <= r2 <= 1 - p2");
  if (p1 < 0 || q1 < 0 || q2 < 0 || r1 < 0) throw std::invalid_argument("bound kernel: p1, q1, q2, r1 must be >= 0");
  if (r3 != 0 && r3 != 1) throw std::invalid_argument("bound kernel: r3 must be 0 or 1");
}

double BoundKernelParams::beta() const { return std::min(p1 + std::min(q1 - 1, 0.0) + r1, p2 + q2 + r2 - 1); }

double BoundKernelParams::alpha() const {
  const double d1 = std::abs(q1 - 1) < 1e-12 ? 1.0 : 0.0;
  const double d2 = std::abs(p2 + r2 - 1) < 1e-12 ? 1.0 : 0.0;
  return std::max(d1, d2 + r3);
}

double BoundKernelParams::rhs(double t) const {
  const double b = beta();
  const double lg = std::pow(std::log(2 + t), alpha());
  if (p1 <= 1) return lg * std::pow(1 + t, -b);
  return lg * std::pow(t, -(p1 - 1)) * std::pow(1 + t, -(b - p1 + 1));
}

namespace {

// int over [a, b] with breakpoints at decades from a, for integrands varying on the scale of the offset.
template <class F>
double integrate_graded(F&& f, double a, double b) {
  double total = 0, lo = a;
  for (double step = 1.0; lo < b; step *= 10) {
    const double hi = std::min(b, a + step);
    total += num::integrate(f, lo, hi, 1e-12, 20);
    lo = hi;
  }
  return total;
}

}  // namespace

double B0(double q, double t) {
  if (t < 0) throw std::invalid_argument("B0: negative time");
  if (t == 0) return 0.0;
  // s = t - w^2 removes the inverse square root
  auto f = [&](double w) { return 2.0 * std::exp(-w * w / 8) * std::pow(1 + t - w * w, -q); };
  return integrate_graded(f, 0.0, std::sqrt(t));
}

double B(const BoundKernelParams& p, double t) {
  p.validate();
  if (t < 0) throw std::invalid_argument("B: negative time");
  if (t == 0) return 0.0;
  auto first = [&](double s) { return std::pow(1 + s, -p.q1) * std::pow(t - s, -p.p1) * std::pow(1 + t - s, -p.r1); };
  const double I1 = integrate_graded(first, 0.0, t / 2);
  // w = (t-s)^{1-p2} absorbs the endpoint singularity at s = t
  const double e = 1.0 / (1 - p.p2);
  auto second = [&](double w) {
    const double d = std::pow(w, e);
    const double s = t - d;
    return e * std::pow(1 + s, -p.q2) * std::pow(std::log(2 + s), p.r3) * std::pow(1 + d, -p.r2);
  };
  const double wmax = std::pow(t / 2, 1 - p.p2);
  const double I2 = integrate_graded(second, 0.0, wmax);
  return I1 + I2;
}

BoundCheckReport bound_check(const BoundKernelParams& p, const std::vector<double>& t_grid) {
  p.validate();
  if (t_grid.empty()) throw std::invalid_argument("bound_check: empty time grid");
  BoundCheckReport r;
  r.label = p.label;
  for (double t : t_grid) {
    if (t <= 0) continue;
    const double ratio = B(p, t) / p.rhs(t);
    if (!(ratio <= r.C)) {
      r.C = ratio;
      r.argt = t;
    }
  }
  r.finite = std::isfinite(r.C) && r.C < r.threshold;
  return r;
}

BoundCheckReport bound_check_B0(double q, const std::vector<double>& t_grid) {
  BoundCheckReport r;
  std::ostringstream os;
  os << "B0[" << q << "]";
  r.label = os.str();
  for (double t : t_grid) {
    if (t <= 0) continue;
    const double ratio = B0(q, t) * std::pow(1 + t, q);
    if (!(ratio <= r.C)) {
      r.C = ratio;
      r.argt = t;
    }
  }
  r.finite = std::isfinite(r.C) && r.C < r.threshold;
  return r;
}

std::vector<BoundKernelParams> used_bound_tuples(double eps) {
  std::vector<BoundKernelParams> v;
  auto add = [&](BoundKernelParams p, const std::string& label) {
    p.label = label;
    v.push_back(p);
  };
  auto full = [](double p1, double q1, double r1, double p2, double q2, double r2, double r3) {
    BoundKernelParams p;
    p.p1 = p1;
    p.q1 = q1;
    p.r1 = r1;
    p.p2 = p2;
    p.q2 = q2;
    p.r2 = r2;
    p.r3 = r3;
    return p;
  };
  add(BoundKernelParams::B1(0.5, 0.5, 0.5, 0.5), "B1(1/2,1/2;1/2,1/2)");
  add(BoundKernelParams::B1(0.5, 0.75, 0.5, 0.75), "B1(1/2,3/4;1/2,3/4)");
  add(BoundKernelParams::B1(1.0, 0.75, 0.5, 1.25), "B1(1,3/4;1/2,5/4)");
  add(full(1.5, 0.75, 0, 0.5, 1.25, 0.5, 0), "B(3/2,3/4,0;1/2,5/4,1/2,0)");
  add(BoundKernelParams::B1(0.75, 1.0, 0.75, 1.0), "B1(3/4,1;3/4,1)");
  add(BoundKernelParams::B1(0.75, 1.5, 0.75, 1.5), "B1(3/4,3/2;3/4,3/2)");
  add(full(1.25, 1.0, 0, 0.75, 1.5, 0, 1), "B(5/4,1,0;3/4,3/2,0,1)");
  add(full(0.5, 0.75, 0.5, 0.5, 0.75, 0.5, 0), "B(1/2,3/4,1/2;1/2,3/4,1/2,0)");
  add(full(1.0, 0.75, 0.5, 0.5, 1.25, 0.5, 0), "B(1,3/4,1/2;1/2,5/4,1/2,0)");
  for (int a = 0; a <= 1; ++a) {
    const double h = a / 2.0;
    const std::string s = a ? "a=1" : "a=0";
    add(BoundKernelParams::B1(1.75 + h, 0.0, 0.75, 1 + h), "B1(7/4+a/2,0;3/4,1+a/2) " + s);
    add(BoundKernelParams::B1(1.25 + h, 0.5, 0.75, 1 + h), "B1(5/4+a/2,1/2;3/4,1+a/2) " + s);
    add(BoundKernelParams::B1(0.75 + h, 1.0, 0.75, 1 + h), "B1(3/4+a/2,1;3/4,1+a/2) " + s);
    add(BoundKernelParams::B1(0.75 + h, 1.0 - eps, 0.75, 1 + h - eps), "B1(3/4+a/2,1-eps;3/4,1+a/2-eps) " + s);
  }
  return v;
}

std::string decay_json(const std::vector<DecayFitReport>& r) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& d : r) {
    j.push_back({{"quantity", d.quantity},
                 {"t_lo", d.t_lo},
                 {"t_hi", d.t_hi},
                 {"slope", std::isfinite(d.slope) ? nlohmann::json(d.slope) : nlohmann::json(nullptr)},
                 {"residual", d.residual},
                 {"target", d.target},
                 {"tolerance", d.tolerance},
                 {"upper_only", d.upper_only},
                 {"pass", d.pass}});
  }
  return j.dump(2);
}

}  // namespace psys

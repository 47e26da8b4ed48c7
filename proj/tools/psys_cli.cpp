#include "psys/config.hpp"
#include "psys/heat.hpp"
#include "psys/numerics.hpp"
#include "psys/profiles.hpp"
#include "psys/solver.hpp"
#include "psys/special.hpp"
#include "psys/verifier.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace psys;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr int kSchema = 1;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const std::map<std::string, std::set<std::string>> kAllowed = {
    {"special", {"n", "zmin", "zmax", "h"}},
    {"profiles", {"alpha", "gamma", "n", "zmax", "h0", "h1", "tol", "max_iter", "threshold"}},
    {"simulate",
     {"n_points", "half_length", "dt", "t_final", "snapshot_ratio", "snapshot_times", "eps0", "b_ratio", "x_support",
      "scheme", "dealias_fraction", "nonlinearity", "seed", "snapshot_csv"}},
    {"heat", {"n", "sigma", "shape", "n_points", "half_length", "t0", "t1", "ratio"}},
    {"verify", {"N", "mode", "fit_zlo", "fit_zhi", "fit_fraction", "fit_t_min_fraction", "t_sample", "zmax", "h0", "h1"}},
    {"bounds", {"t_max", "points", "eps"}},
};

// Collects files and verdicts, then writes manifest.json next to them.
class Run {
 public:
  Run(std::string sub, fs::path dir, const Config& cfg) : sub_(std::move(sub)), dir_(std::move(dir)), cfg_(cfg) {
    fs::create_directories(dir_);
    start_ = std::chrono::steady_clock::now();
  }

  void write(const std::string& name, const std::string& body) {
    std::ofstream(dir_ / name) << body;
    files_.push_back(name);
  }
  void verdict(const std::string& name, bool pass, json detail = json::object()) {
    detail["pass"] = pass;
    verdicts_[name] = detail;
    all_pass_ = all_pass_ && pass;
    std::cout << (pass ? "PASS " : "FAIL ") << name << '\n';
  }
  int finish() {
    json m;
    m["schema_version"] = kSchema;
    m["artifact_version"] = kVersion;
    m["subcommand"] = sub_;
    json c = json::object();
    for (const auto& [s, kv] : cfg_.entries())
      for (const auto& [k, v] : kv) c[s][k] = v;
    m["config"] = c;
    m["wall_clock_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    m["outputs"] = files_;
    m["verdicts"] = verdicts_;
    m["all_pass"] = all_pass_;
    std::ofstream(dir_ / "manifest.json") << m.dump(2) << '\n';
    std::cout << "wrote " << files_.size() << " files to " << dir_.string() << '\n';
    return all_pass_ ? 0 : 1;
  }

 private:
  std::string sub_;
  fs::path dir_;
  const Config& cfg_;
  std::vector<std::string> files_;
  json verdicts_ = json::object();
  bool all_pass_ = true;
  std::chrono::steady_clock::time_point start_;
};

std::pair<double, double> parse_range(const std::string& s) {
  const auto c = s.find(':');
  if (c == std::string::npos) throw UsageError("--range expects a:b, got '" + s + "'");
  try {
    const double a = std::stod(s.substr(0, c)), b = std::stod(s.substr(c + 1));
    if (!(a < b)) throw UsageError("--range needs a < b");
    return {a, b};
  } catch (const std::logic_error&) {
    throw UsageError("--range expects numbers, got '" + s + "'");
  }
}

std::vector<double> uniform(double a, double b, double h) {
  std::vector<double> z;
  const auto m = static_cast<std::size_t>(std::llround((b - a) / h));
  for (std::size_t i = 0; i <= m; ++i) z.push_back(a + (b - a) * static_cast<double>(i) / static_cast<double>(m));
  return z;
}

SimConfig sim_config(const Config& c) {
  SimConfig s;
  s.n_points = static_cast<std::size_t>(c.get_int("simulate", "n_points", static_cast<long>(s.n_points)));
  s.half_length = c.get_double("simulate", "half_length", s.half_length);
  s.dt = c.get_double("simulate", "dt", s.dt);
  s.t_final = c.get_double("simulate", "t_final", s.t_final);
  s.snapshot_ratio = c.get_double("simulate", "snapshot_ratio", s.snapshot_ratio);
  s.snapshot_times = c.get_list("simulate", "snapshot_times", {});
  s.eps0 = c.get_double("simulate", "eps0", s.eps0);
  s.b_ratio = c.get_double("simulate", "b_ratio", s.b_ratio);
  s.x_support = c.get_double("simulate", "x_support", s.x_support);
  s.scheme = parse_scheme(c.get("simulate", "scheme", to_string(s.scheme)));
  s.dealias_fraction = c.get_double("simulate", "dealias_fraction", s.dealias_fraction);
  s.nonlinearity = c.get("simulate", "nonlinearity", s.nonlinearity);
  s.seed = static_cast<unsigned>(c.get_int("simulate", "seed", 0));
  s.validate();
  return s;
}

std::string snapshot_csv(const Snapshot& s) {
  std::ostringstream os;
  os.precision(15);
  os << "x,a,b\n";
  const auto a = transform_inverse(s.state.first), b = transform_inverse(s.state.second);
  for (std::size_t j = 0; j < a.size(); ++j) os << s.state.first.grid.x(j) << ',' << a[j] << ',' << b[j] << '\n';
  return os.str();
}

std::string tag(double t) {
  std::ostringstream os;
  os.precision(6);
  os << std::fixed << t;
  return os.str();
}

json report_json(const DecayFitReport& r) {
  return {{"quantity", r.quantity}, {"t_lo", r.t_lo},     {"t_hi", r.t_hi},           {"slope", r.slope},
          {"residual", r.residual}, {"target", r.target}, {"tolerance", r.tolerance}, {"upper_only", r.upper_only}};
}

// ---- subcommands ----

int cmd_special(const Config& cfg, Run& run, int n, const std::string& range) {
  auto [a, b] = std::pair{cfg.get_double("special", "zmin", -20.0), cfg.get_double("special", "zmax", 20.0)};
  if (!range.empty()) std::tie(a, b) = parse_range(range);
  if (n < 1) throw UsageError("--n must be >= 1");
  const auto z = uniform(a, b, cfg.get_double("special", "h", 0.05));
  const auto p = sample_fn(n, z);
  run.write("fn_" + std::to_string(n) + ".csv", profile_csv(p, n));
  const double res = ode_residual(p, n, std::max(a, -10.0), std::min(b, 10.0));
  run.verdict("ode_residual", res <= 1e-8, {{"sup", res}});
  if (a <= 0 && b >= 0) {
    const double err = std::abs(eval_fn(n, 0.0, 0).d[0] - fn_at_zero(n));
    run.verdict("value_at_zero", err <= 1e-10, {{"error", err}});
  }
  return run.finish();
}

std::string correction_csv(const CorrectionProfile& c, const BurgersProfile& g0, double mass) {
  const auto& z = c.g.z;
  const auto d1 = num::fd_derivative(z, c.g.v, 1), d2 = num::fd_derivative(z, c.g.v, 2);
  const auto h0 = num::fd_derivative(z, g0.sample.v, 1);
  const double lam = 1.0 - std::ldexp(1.0, -(c.n + 1));
  std::ostringstream os;
  os.precision(15);
  os << "z,g,R,dg,residual,mass\n";
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double r = d2[i] + 0.5 * z[i] * d1[i] + lam * c.g.v[i] +
                     2 * g0.gamma * (h0[i] * c.g.v[i] + g0.sample.v[i] * d1[i]);
    os << z[i] << ',' << c.g.v[i] << ',' << c.R.v[i] << ',' << d1[i] << ',' << r << ',' << mass << '\n';
  }
  return os.str();
}

std::string burgers_csv(const BurgersProfile& g) {
  const auto& z = g.sample.z;
  const auto d1 = num::fd_derivative(z, g.sample.v, 1), d2 = num::fd_derivative(z, g.sample.v, 2);
  std::ostringstream os;
  os.precision(15);
  os << "z,g0,dg0,residual\n";
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double v = g.sample.v[i];
    os << z[i] << ',' << v << ',' << d1[i] << ',' << d2[i] + 0.5 * z[i] * d1[i] + 0.5 * v + 2 * g.gamma * v * d1[i]
       << '\n';
  }
  return os.str();
}

int cmd_profiles(const Config& cfg, Run& run) {
  const double alpha = cfg.get_double("profiles", "alpha", 0.5);
  const double gamma = cfg.get_double("profiles", "gamma", 0.25);
  const int N = static_cast<int>(cfg.get_int("profiles", "n", 1));
  const double thr = cfg.get_double("profiles", "threshold", 0.1);
  const auto z = graded_grid(cfg.get_double("profiles", "zmax", 60.0), cfg.get_double("profiles", "h0", 0.02),
                             cfg.get_double("profiles", "h1", 0.1));
  const auto g0 = g0_profile(alpha, gamma, z);
  run.write("g0.csv", burgers_csv(g0));
  const double bres = burgers_residual(g0, -20, 20);
  run.verdict("g0_residual", bres <= 1e-8, {{"sup", bres}});
  if (std::abs(alpha * gamma) > thr) {
    std::cout << "skipping g_n: |alpha gamma| = " << std::abs(alpha * gamma) << " above threshold " << thr << '\n';
    return run.finish();
  }
  for (int n = 1; n <= N; ++n)
    for (int sign : {1, -1}) {
      const auto c = gn_fixed_point(n, sign, g0, cfg.get_double("profiles", "tol", 1e-10),
                                    static_cast<int>(cfg.get_int("profiles", "max_iter", 50)), thr);
      const std::string name = "g" + std::to_string(n) + (sign > 0 ? "_plus" : "_minus");
      const double mass = correction_mass(c);
      run.write(name + ".csv", correction_csv(c, g0, mass));
      const double res = linearized_residual(c, g0, -20, 20);
      run.verdict(name + "_converged", c.converged, {{"iterations", c.iterations}, {"change", c.last_change}});
      run.verdict(name + "_residual", res <= 1e-6, {{"sup", res}});
      run.verdict(name + "_mass", std::abs(mass) <= 1e-6, {{"mass", mass}});
      const auto tf = sign > 0 ? tail_exponent_fit(c.g, 20, 60) : tail_exponent_fit(c.g, -60, -20);
      const double target = -2.0 + std::ldexp(1.0, -n);
      run.verdict(name + "_tail", std::abs(tf.slope - target) <= 0.05, {{"slope", tf.slope}, {"target", target}});
    }
  return run.finish();
}

int cmd_simulate(const Config& cfg, Run& run) {
  const auto sc = sim_config(cfg);
  const auto tr = psys::run(sc, gaussian_initial(sc.grid(), sc.eps0, sc.b_ratio));
  run.write("norms.csv", trajectory_csv(tr));
  const std::string which = cfg.get("simulate", "snapshot_csv", "final");
  if (which != "none" && which != "final" && which != "all") throw UsageError("snapshot_csv must be none, final or all");
  for (std::size_t i = 0; i < tr.snaps.size(); ++i) {
    if (which == "none" || (which == "final" && i + 1 != tr.snaps.size())) continue;
    run.write("snapshot_t" + tag(tr.snaps[i].t) + ".csv", snapshot_csv(tr.snaps[i]));
  }
  run.verdict("completed", !tr.aborted, {{"reason", tr.abort_reason}, {"steps", tr.steps}});
  const double per_k = tr.max_mass_drift * 1000.0 / std::max<double>(1.0, static_cast<double>(tr.steps));
  run.verdict("mass_drift", per_k <= 1e-9, {{"max_drift", tr.max_mass_drift}, {"per_1000_steps", per_k}});
  return run.finish();
}

int cmd_heat(const Config& cfg, Run& run) {
  const int n = static_cast<int>(cfg.get_int("heat", "n", 1));
  const int sigma = static_cast<int>(cfg.get_int("heat", "sigma", 1));
  const auto spec = make_heat_source(cfg.get("heat", "shape", "gaussian"), n, sigma);
  const Grid grid(static_cast<std::size_t>(cfg.get_int("heat", "n_points", 1 << 14)),
                  cfg.get_double("heat", "half_length", 2500.0));
  const auto ts = geometric_times(cfg.get_double("heat", "t0", 1.0), cfg.get_double("heat", "t1", 1000.0),
                                  cfg.get_double("heat", "ratio", 1.2));
  const auto r = convergence_check(spec, grid, ts);
  run.write("heat.csv", heat_csv(r));
  run.verdict("remainder_slope", r.slope <= -0.75 + 0.05, {{"slope", r.slope}, {"from", r.slope_from}});
  run.verdict("weighted_stable", r.stable,
              {{"sup_l2", r.sup_weighted_l2}, {"sup_d", r.sup_weighted_d}, {"growth", r.last_decade_growth}});
  return run.finish();
}

int cmd_verify(const Config& cfg, Run& run) {
  const auto sc = sim_config(cfg);
  const auto nl = make_nonlinearity(sc.nonlinearity);
  const auto tr = psys::run(sc, gaussian_initial(sc.grid(), sc.eps0, sc.b_ratio));
  run.write("norms.csv", trajectory_csv(tr));
  if (tr.aborted) {
    run.verdict("completed", false, {{"reason", tr.abort_reason}});
    return run.finish();
  }
  ContextOptions opt;
  opt.N = static_cast<int>(cfg.get_int("verify", "N", 1));
  const std::string mode = cfg.get("verify", "mode", "fit");
  if (mode != "fit" && mode != "analytic") throw UsageError("verify mode must be fit or analytic");
  opt.mode = mode == "fit" ? DMode::fit : DMode::analytic;
  opt.fit_zlo = cfg.get_double("verify", "fit_zlo", opt.fit_zlo);
  opt.fit_zhi = cfg.get_double("verify", "fit_zhi", opt.fit_zhi);
  opt.fit_fraction = cfg.get_double("verify", "fit_fraction", opt.fit_fraction);
  opt.fit_t_min_fraction = cfg.get_double("verify", "fit_t_min_fraction", opt.fit_t_min_fraction);
  opt.z_grid = graded_grid(cfg.get_double("verify", "zmax", 60.0), cfg.get_double("verify", "h0", 0.02),
                           cfg.get_double("verify", "h1", 0.1));
  const auto ctx = build_context(tr, nl, opt);
  RemainderSeries s;
  const auto reports = remainder_pipeline(tr, ctx, &s);

  std::ostringstream os;
  os.precision(15);
  os << "t,u_l2,r0_l2,r1_l2,r1_d_l2,mass_u\n";
  for (std::size_t i = 0; i < s.t.size(); ++i)
    os << s.t[i] << ',' << s.u_l2[i] << ',' << s.r0_l2[i] << ',' << s.r1_l2[i] << ',' << s.r1_d_l2[i] << ','
       << s.mass_u[i] << '\n';
  run.write("remainders.csv", os.str());

  json out;
  out["reports"] = json::parse(decay_json(reports));
  out["alpha_plus"] = ctx.coeffs.alpha_plus;
  out["alpha_minus"] = ctx.coeffs.alpha_minus;
  for (const auto& r : reports) run.verdict(r.quantity, r.pass, report_json(r));

  if (!ctx.coeffs.d_plus.empty() && !ctx.d_plus_analytic.empty()) {
    const double dfit = ctx.fit_used ? ctx.fit.d : ctx.coeffs.d_plus[0];
    const double dan = ctx.d_plus_analytic[0];
    out["d1_plus"] = {{"used", ctx.coeffs.d_plus[0]}, {"analytic", dan}, {"fit", ctx.fit.d}, {"fit_spread", ctx.fit.spread}};
    if (ctx.fit_used) {
      const double rel = std::abs(dan - dfit) / std::max(std::abs(dfit), 1e-300);
      run.verdict("d1_analytic_vs_fit", rel <= 0.1, {{"relative", rel}});
    }
  }

  const double ts = cfg.get_double("verify", "t_sample", 500.0);
  const Snapshot* best = nullptr;
  for (const auto& sn : tr.snaps)
    if (!best || std::abs(sn.t - ts) < std::abs(best->t - ts)) best = &sn;
  if (best && !best->state.first.c.empty()) {
    const auto tp = tail_precedence_check(best->state, best->t);
    json tj = {{"t", tp.t},
               {"ahead_slope", tp.ahead_slope},
               {"ahead_rms", tp.ahead_rms},
               {"behind_gauss", tp.behind_gauss},
               {"behind_slope", tp.behind_slope},
               {"inconclusive", tp.inconclusive}};
    out["tail"] = tj;
    if (!nl.zero) run.verdict("tail_ahead", tp.algebraic_ahead, tj);
  }
  run.write("verify.json", out.dump(2) + "\n");
  return run.finish();
}

int cmd_bounds(const Config& cfg, Run& run) {
  const double tmax = cfg.get_double("bounds", "t_max", 1000.0);
  const auto pts = static_cast<std::size_t>(cfg.get_int("bounds", "points", 60));
  std::vector<double> ts = {0.0};
  for (std::size_t i = 0; i < pts; ++i)
    ts.push_back(std::expm1(std::log1p(tmax) * static_cast<double>(i + 1) / static_cast<double>(pts)));
  std::ostringstream os;
  os.precision(15);
  os << "label,C,argt,finite\n";
  auto record = [&](const BoundCheckReport& r) {
    os << r.label << ',' << r.C << ',' << r.argt << ',' << r.finite << '\n';
    run.verdict(r.label, r.finite, {{"C", r.C}, {"argt", r.argt}});
  };
  for (double q : {0.75, 1.25}) record(bound_check_B0(q, ts));
  for (const auto& p : used_bound_tuples(cfg.get_double("bounds", "eps", 0.05))) record(bound_check(p, ts));
  run.write("bounds.csv", os.str());
  return run.finish();
}

fs::path out_dir(const std::string& flag, const std::string& sub) {
  if (!flag.empty()) return flag;
  if (const char* root = std::getenv("PSYS_OUT")) return fs::path(root) / sub;
  return fs::path("psys_out") / sub;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"p-system asymptotics toolkit"};
  app.require_subcommand(1);
  std::string config_path, out;
  app.add_option("-c,--config", config_path, "key = value config file")->check(CLI::ExistingFile);
  app.add_option("-o,--out", out, "output directory (default $PSYS_OUT/<subcommand>)");

  int n = 1;
  std::string range;
  auto* special = app.add_subcommand("special", "tabulate f_n and its derivatives");
  special->add_option("--n", n, "index n >= 1");
  special->add_option("--range", range, "z interval a:b");
  auto* profiles = app.add_subcommand("profiles", "Burgers profile g0 and corrections g_n");
  auto* simulate = app.add_subcommand("simulate", "pseudospectral run of the viscous system");
  auto* heat = app.add_subcommand("heat", "inhomogeneous heat equation convergence");
  auto* verify = app.add_subcommand("verify", "simulate and check remainder decay and tails");
  auto* bounds = app.add_subcommand("bounds", "bound kernel dominance constants");
  for (auto* s : {special, profiles, simulate, heat, verify, bounds}) {
    s->add_option("-c,--config", config_path, "key = value config file")->check(CLI::ExistingFile);
    s->add_option("-o,--out", out, "output directory");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  const std::string sub = app.get_subcommands().front()->get_name();
  try {
    Config cfg;
    if (!config_path.empty()) {
      cfg = Config::load(config_path);
      cfg.restrict_keys(kAllowed);
    }
    Run run(sub, out_dir(out, sub), cfg);
    if (sub == "special") return cmd_special(cfg, run, n, range);
    if (sub == "profiles") return cmd_profiles(cfg, run);
    if (sub == "simulate") return cmd_simulate(cfg, run);
    if (sub == "heat") return cmd_heat(cfg, run);
    if (sub == "verify") return cmd_verify(cfg, run);
    return cmd_bounds(cfg, run);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

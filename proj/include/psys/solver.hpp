#pragma once

#include "psys/nonlinearity.hpp"
#include "psys/semigroup.hpp"
#include "psys/spectral.hpp"

#include <functional>
#include <string>
#include <vector>

namespace psys {

enum class Scheme { if_rk4, etd_heun };

Scheme parse_scheme(const std::string& s);
std::string to_string(Scheme s);

struct SimConfig {
  std::size_t n_points = 1u << 15;
  double half_length = 2500.0;
  double dt = 0.076;
  double t_final = 1000.0;
  std::vector<double> snapshot_times;  ///< empty: geometric schedule from snapshot_ratio
  double snapshot_ratio = 1.2;
  double eps0 = 0.05;
  double b_ratio = 0.3;     ///< b0 = b_ratio * a0
  double x_support = 20.0;  ///< half width of the initial support used by the domain rule
  Scheme scheme = Scheme::if_rk4;
  double dealias_fraction = 2.0 / 3.0;
  std::string nonlinearity = "default";
  unsigned seed = 0;
  bool keep_states = true;  ///< store the full state at each snapshot

  Grid grid() const { return Grid(n_points, half_length); }
  /// Number of steps and the step size that lands exactly on t_final.
  std::size_t steps() const;
  double step_size() const;
  /// Snapshot times rounded to the step lattice (always includes 0 and t_final).
  std::vector<double> schedule() const;
  /// Domain rule, power-of-two grid, dt <= 0.5 dx. Throws std::invalid_argument.
  void validate() const;
};

/// a0 = eps0 e^{-x^2/4}, b0 = b_ratio a0.
StateVector gaussian_initial(const Grid& grid, double eps0, double b_ratio);

struct Snapshot {
  double t = 0;
  StateVector state;  ///< physical frame, empty when keep_states is off
  NormReport a, b, u, v;
  double weighted = 0;  ///< N(t) = ||x^2 (a, b)||^2 / 2
  double mass_a = 0, mass_b = 0;
};

struct TrajectoryRecord {
  std::vector<Snapshot> snaps;
  std::size_t steps = 0;
  double dt = 0;
  double max_mass_drift = 0;
  bool aborted = false;
  std::string abort_reason;
  double growth_rate = 0;  ///< fitted B in log N(t) <= A + B t
};

/// One time step for the nonlinear system with precomputed propagators.
class Stepper {
 public:
  Stepper(const Grid& grid, double dt, Scheme scheme, const Nonlinearity& nl, double dealias_fraction = 2.0 / 3.0);

  StateVector step(const StateVector& z) const;
  /// Nonlinear term (0, ik h^) with h = g(a,b) + 2 f(a,b) b_x, dealiased.
  SpectralField nonlinear(const StateVector& z) const;
  double dt() const { return dt_; }

 private:
  Grid grid_;
  double dt_;
  Scheme scheme_;
  Nonlinearity nl_;
  std::vector<char> keep_;  ///< dealias mask
  std::vector<Mat2> half_, full_, phi1_, phi2_;
};

TrajectoryRecord run(const SimConfig& config, const StateVector& initial);

/// u(x) = a(x-t) + b(x-t), v(x) = a(x+t) - b(x+t).
StateVector to_characteristic_frame(const StateVector& z, double t);
StateVector from_characteristic_frame(const StateVector& uv, double t);

/// Integrating-factor RK4 for w_t = w_xx + F(t) with w(0) = 0 and F given in Fourier space.
SpectralField heat_forced(const Grid& grid, const std::function<SpectralField(double)>& forcing, double t_final,
                          double dt);

std::string trajectory_csv(const TrajectoryRecord& r);

}  // namespace psys

#pragma once

#include "psys/spectral.hpp"

#include <array>
#include <span>
#include <string>
#include <vector>

namespace psys {

/// 2x2 complex matrix, row major.
struct Mat2 {
  std::array<cplx, 4> m{};

  cplx& operator()(int i, int j) { return m[2 * i + j]; }
  const cplx& operator()(int i, int j) const { return m[2 * i + j]; }
  static Mat2 identity();
};

Mat2 operator*(const Mat2& a, const Mat2& b);
Mat2 operator-(const Mat2& a, const Mat2& b);
cplx det(const Mat2& a);

/// Symbol of the linear propagator of (a, b) at wavenumber k after time t.
Mat2 eval_eLt(double k, double t);
/// Symbol of the decoupled translating heat propagators for (u, v).
Mat2 eval_eL0t(double k, double t);
Mat2 mix_S();

/// Applies exp(L t) mode by mode to a physical-frame state.
StateVector apply_eLt(const StateVector& z, double t);

struct KernelBoundReport {
  double C[2][2] = {{0, 0}, {0, 0}};
  double C_deriv[2] = {0, 0};  ///< components of exp(Lt)(0, ik)^T
  bool finite = true;          ///< all constants below the violation threshold
  double threshold = 1e6;
};

KernelBoundReport kernel_bound_check(std::span<const double> k_grid, std::span<const double> t_grid);

struct DefectReport {
  double sup[2][2] = {{0, 0}, {0, 0}};
  double argk[2][2] = {{0, 0}, {0, 0}};
  double argt[2][2] = {{0, 0}, {0, 0}};
};

/// sup over the grids of sqrt(1+t) e^{k^2 t/2} |(P S e^{Lt} - e^{L0 t} S)_{ij}|.
DefectReport intertwining_defect(std::span<const double> k_grid, std::span<const double> t_grid);

std::string kernel_bound_csv(const KernelBoundReport& r, std::size_t nk, std::size_t nt);
std::string defect_csv(const DefectReport& r, std::size_t nk, std::size_t nt);

namespace serial {
StateVector apply_eLt(const StateVector& z, double t);
}

}  // namespace psys

#pragma once

#include <functional>

#include "fvps/grids.hpp"
#include "fvps/spectral.hpp"
#include "fvps/states.hpp"

namespace fvps {

/// relativistic: kernel weighted by eps (chi for odd components).
/// unity: weight forced to 1, i.e. the textbook Wigner transform of the branch wavefunction.
enum class EpsMode { relativistic, unity };

/// W_[+], W_[-] (real) and W_{+}, W_{-} (complex) on one phase-space grid.
struct WignerComponents {
  PhaseSpaceGrid grid;
  RealField even_plus;
  RealField even_minus;
  ComplexField odd_plus;
  ComplexField odd_minus;
  EpsMode mode = EpsMode::relativistic;
};

/// W_[b](p_k, q_j) = (2 dp / 2 pi hbar) sum_m (-1)^m eps(p_{k+m}, p_{k-m}) phi*(p_{k+m}) phi(p_{k-m}) e^{-2 pi i m j / n}
/// i.e. the lag integral over P = 2 m dp. Requires a lag-conjugate grid whose
/// momentum axis is the state's grid. Throws DomainError for an empty branch.
RealField wigner_even(const ChargeBranchState& state, Branch branch, const PhaseSpaceGrid& grid,
                      EpsMode mode = EpsMode::relativistic);

/// W_{o}: chi-weighted cross term phi_o^*(p + P/2) phi_{-o}(p - P/2). Vanishes for single-branch states.
ComplexField wigner_odd(const ChargeBranchState& state, Branch ordering, const PhaseSpaceGrid& grid,
                        EpsMode mode = EpsMode::relativistic);

WignerComponents wigner_components(const ChargeBranchState& state, const PhaseSpaceGrid& grid,
                                   EpsMode mode = EpsMode::relativistic);

/// int A W dp dq with A sampled on the same grid.
double expectation(const RealField& symbol, const RealField& w, const PhaseSpaceGrid& grid);
double expectation(const std::function<double(double p, double q)>& symbol, const RealField& w,
                   const PhaseSpaceGrid& grid);

struct Moments {
  double norm = 0.0;
  double mean_q = 0.0;
  double mean_p = 0.0;
  double var_q = 0.0;
  double var_p = 0.0;
  /// Set when var_q < 0; reported, never clipped.
  bool var_q_negative = false;
};

Moments moments(const RealField& w, const PhaseSpaceGrid& grid);

/// Momentum marginal int W dq.
std::vector<double> momentum_marginal(const RealField& w, const PhaseSpaceGrid& grid);

/// Kernel K(k, m) = rho(p_{k+m}, p_{k-m}) recovered from W by the inverse
/// position transform; column index m + n/2 for m in [-n/2, n/2).
ComplexField reconstruct_kernel(const RealField& w, const PhaseSpaceGrid& grid);

struct PurityReport {
  double max_deviation = 0.0;    ///< max |LHS - RHS| over the window
  double max_abs_lhs = 0.0;
  double max_abs_rhs = 0.0;
  double phase_curvature = 0.0;  ///< max |mixed derivative of arg rho|, diagnostic only
  std::size_t points = 0;
  double worst_p1 = 0.0;
  double worst_p2 = 0.0;
  bool pure(double tol) const { return max_deviation < tol; }
};

/// Mixed derivative of ln|rho(p1, p2)| against -c^4 p1 p2 / (E1 E2 (E1 + E2)^2).
/// Central differences at lag steps h = 1, 2 with Richardson extrapolation; only
/// stencils where |rho| > 1e-6 max|rho| are used. Throws UndefinedLogError when
/// no stencil qualifies.
PurityReport purity_check(const RealField& w, const PhaseSpaceGrid& grid);

/// eps(p_a, p_b) >= 1.
double interference_gain(double p_a, double p_b, const UnitSystem& units = {});

struct InterferenceReport {
  double predicted = 0.0;  ///< eps(p_a, p_b)
  double measured = 0.0;   ///< |K_rel| / |K_unity| at (p_a, p_b)
};

/// Superpose two packets of position width sigma centred on momentum nodes
/// p_a, p_b (which must be grid nodes an even number of steps apart), build both
/// Wigner functions and compare the reconstructed off-diagonal kernels.
InterferenceReport measure_interference_gain(double p_a, double p_b, double sigma, const PhaseSpaceGrid& grid);

/// Share of int |W1 - W2| dp dq carried by rows with |p| < p_cut.
double difference_mass_fraction(const RealField& w1, const RealField& w2, const PhaseSpaceGrid& grid, double p_cut);

}  // namespace fvps

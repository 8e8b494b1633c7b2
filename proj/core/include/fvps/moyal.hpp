#pragma once

#include <array>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "fvps/grids.hpp"
#include "fvps/states.hpp"

namespace fvps {

using MomentumFunction = std::function<cplx(double)>;
using EnergyFunction = std::function<double(double)>;

/// Scalar (dim 1) or 2x2 (dim 2) Weyl symbol on a lag-conjugate phase-space grid.
///
/// Three storage kinds:
///  - sampled: complex fields on the grid; zero outside the momentum range;
///  - momentum: analytic functions of p, evaluated exactly at shifted momenta;
///  - position: q times a constant matrix.
/// Components are stored row-major (index 2*r + c for dim 2).
class Symbol {
 public:
  enum class Kind { sampled, momentum, position };

  static Symbol sampled(const PhaseSpaceGrid& grid, ComplexField field);
  static Symbol sampled(const PhaseSpaceGrid& grid, std::array<ComplexField, 4> fields);
  static Symbol from_real(const PhaseSpaceGrid& grid, const RealField& field);
  static Symbol momentum(const PhaseSpaceGrid& grid, MomentumFunction f);
  static Symbol momentum(const PhaseSpaceGrid& grid, std::array<MomentumFunction, 4> f);
  static Symbol position(const PhaseSpaceGrid& grid);
  static Symbol position(const PhaseSpaceGrid& grid, const Eigen::Matrix2cd& coefficient);
  static Symbol constant(const PhaseSpaceGrid& grid, cplx value);
  /// Sample f(p, q) on the grid.
  static Symbol from_function(const PhaseSpaceGrid& grid, const std::function<cplx(double, double)>& f);

  const PhaseSpaceGrid& grid() const { return grid_; }
  Kind kind() const { return kind_; }
  int dim() const { return dim_; }

  /// Component (r, c) evaluated on the grid.
  ComplexField field(int r = 0, int c = 0) const;
  /// Real part of a scalar symbol.
  RealField real_field() const;
  /// Momentum-kind component at an arbitrary momentum.
  cplx at_momentum(int r, int c, double p) const;
  const Eigen::Matrix2cd& position_coefficient() const { return coef_; }

  friend Symbol operator+(const Symbol& a, const Symbol& b);
  friend Symbol operator-(const Symbol& a, const Symbol& b);
  friend Symbol operator*(cplx s, const Symbol& a);

 private:
  Symbol(PhaseSpaceGrid grid, Kind kind, int dim) : grid_(std::move(grid)), kind_(kind), dim_(dim) {}

  PhaseSpaceGrid grid_;
  Kind kind_;
  int dim_;
  std::vector<ComplexField> fields_;
  std::vector<MomentumFunction> funcs_;
  Eigen::Matrix2cd coef_ = Eigen::Matrix2cd::Zero();
};

/// Moyal product in the mixed (p, position-mode) representation. A position
/// mode e^{i 2 s dp q / hbar} of one factor shifts the momentum argument of the
/// other by s dp, so the product is exact on the lattice; sampled factors are
/// zero beyond the grid, momentum-kind factors are evaluated analytically.
Symbol star_product(const Symbol& a, const Symbol& b);
/// (A*B - B*A) / (i hbar)
Symbol moyal_bracket(const Symbol& a, const Symbol& b);
/// A*B + B*A (no hbar scaling).
Symbol anti_moyal_bracket(const Symbol& a, const Symbol& b);
/// dA/dq dB/dp - dA/dp dB/dq (matrix products in order). Spectral in q,
/// eighth-order central differences in p.
Symbol poisson_bracket(const Symbol& a, const Symbol& b);

/// Max over rows of the Frobenius norm of the component difference, skipping
/// `edge` rows at each momentum boundary.
double symbol_distance(const Symbol& a, const Symbol& b, std::size_t edge = 0);

using SymbolFactory = std::function<Symbol(const PhaseSpaceGrid&)>;

struct ClassicalLimitReport {
  std::vector<double> hbar;
  std::vector<double> gap;
  /// Least-squares slope of log(gap) against log(hbar); NaN when the gap vanishes.
  double exponent = 0.0;
  bool identically_zero = false;
};

/// Moyal-vs-Poisson gap over an hbar scan. Each hbar gets a lag-conjugate grid of
/// n points on a fixed position window [-q_max, q_max), so dp = pi hbar/(2 q_max).
ClassicalLimitReport classical_limit_gap(const SymbolFactory& a, const SymbolFactory& b,
                                         const std::vector<double>& hbars, std::size_t n = 64,
                                         double q_max = 3.141592653589793);

/// E(p) = sqrt(m^2 c^4 + c^2 p^2) for the grid units.
EnergyFunction relativistic_energy(const UnitSystem& units);
/// Energy generating the evolution of a charge branch: +E for plus, -E for minus
/// (the minus amplitude is the negative-frequency component).
EnergyFunction branch_energy(const EnergyFunction& e, Branch branch);

/// Exact propagator of dW/dt = {E, W}_M: position mode s is multiplied by
/// exp(-(i/hbar)[E(p + s dp) - E(p - s dp)] t).
RealField evolve_even(const RealField& w, const PhaseSpaceGrid& grid, const EnergyFunction& e, double t);
ComplexField evolve_even(const ComplexField& w, const PhaseSpaceGrid& grid, const EnergyFunction& e, double t);

/// Exact propagator of the odd components: dW_{o}/dt = o (i/hbar) (E*W + W*E),
/// so mode s picks up exp(o i [E(p + s dp) + E(p - s dp)] t / hbar) with o = +1
/// for the plus ordering and -1 for minus.
ComplexField evolve_odd(const ComplexField& w, Branch ordering, const PhaseSpaceGrid& grid, const EnergyFunction& e,
                        double t);

/// Explicit midpoint (RK2) integration of dW/dt = {E, W}_M, stepped in the
/// lag-mode representation where the bracket with a momentum symbol is diagonal.
/// Stability requires dt * omega_max <= 0.5 with omega_max the largest
/// |E(p + s dp) - E(p - s dp)|/hbar over cells carrying weight; violations and
/// norm growth raise StepSizeError.
RealField evolve_timestep_reference(const RealField& w, const PhaseSpaceGrid& grid, const EnergyFunction& e, double t,
                                    int steps);

/// omega_max used by the stability check above.
double max_mode_frequency(const RealField& w, const PhaseSpaceGrid& grid, const EnergyFunction& e);

struct EffectiveMass {
  double lambda = 0.0;
  double p_bar = 0.0;
  double velocity = 0.0;  ///< drift of the mean position
  double ratio = 0.0;     ///< p_bar / (m velocity)
  std::size_t grid_points = 0;
};

/// Coherent packet of width lambda_c/lambda and mean momentum p_bar, evolved for
/// time t with the exact propagator; the mean-position drift defines m_eff.
EffectiveMass effective_mass_ratio(double lambda, double p_bar, double t, const UnitSystem& units = {});

}  // namespace fvps

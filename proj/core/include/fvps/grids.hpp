#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace fvps {

using cplx = std::complex<double>;

/// Row-major fields on a phase-space grid: row index = momentum node, column
/// index = position node.
using RealField = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ComplexField = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Mass, speed of light and reduced Planck constant. Natural units by default.
struct UnitSystem {
  double mass = 1.0;
  double c = 1.0;
  double hbar = 1.0;

  double compton_length() const { return hbar / (mass * c); }
  double rest_energy() const { return mass * c * c; }
  /// Momentum scale m*c.
  double momentum_scale() const { return mass * c; }

  /// Throws DomainError unless all three constants are strictly positive.
  void validate() const;

  bool operator==(const UnitSystem& other) const = default;
};

/// Uniform momentum lattice p_k = -p_max + k*dp, dp = 2*p_max/n, n a power of two.
class MomentumGrid {
 public:
  MomentumGrid(std::size_t n_points, double p_max);

  std::size_t size() const { return n_; }
  double p_max() const { return p_max_; }
  double spacing() const { return dp_; }
  double node(std::ptrdiff_t k) const { return -p_max_ + static_cast<double>(k) * dp_; }
  std::vector<double> nodes() const;

  /// Index of the node closest to p (clamped to the grid).
  std::size_t nearest(double p) const;

  bool operator==(const MomentumGrid& other) const = default;

 private:
  std::size_t n_;
  double p_max_;
  double dp_;
};

/// Uniform periodic position axis q_j = -q_max + j*dq, q_max = n*dq/2.
struct PositionAxis {
  std::size_t n = 0;
  double spacing = 0.0;

  double q_max() const { return 0.5 * static_cast<double>(n) * spacing; }
  double node(std::ptrdiff_t j) const { return -q_max() + static_cast<double>(j) * spacing; }
  std::vector<double> nodes() const;

  bool operator==(const PositionAxis& other) const = default;
};

/// Position axis conjugate to a momentum grid for wavefunction transforms:
/// dq * dp * n = 2*pi*hbar.
PositionAxis conjugate_position_axis(const MomentumGrid& grid, const UnitSystem& units);

/// Phase-space lattice used by Wigner fields and Moyal products.
///
/// Wigner fields are built from lag momenta P = 2*m*dp, so the position axis
/// is conjugate to the lag step: dq * (2*dp) * n_q = 2*pi*hbar. With that
/// choice every Bopp shift hbar*k/2 of a position mode lands exactly on a
/// momentum node.
class PhaseSpaceGrid {
 public:
  PhaseSpaceGrid(MomentumGrid momentum, PositionAxis position, UnitSystem units);

  /// Lag-conjugate grid with n_q = n_p.
  static PhaseSpaceGrid conjugate_to(const MomentumGrid& momentum, const UnitSystem& units);

  /// Lag-conjugate grid with a prescribed position window [-q_max, q_max);
  /// the momentum spacing follows from conjugacy.
  static PhaseSpaceGrid with_position_window(std::size_t n, double q_max, const UnitSystem& units);

  const MomentumGrid& momentum() const { return momentum_; }
  const PositionAxis& position() const { return position_; }
  const UnitSystem& units() const { return units_; }
  std::size_t n_p() const { return momentum_.size(); }
  std::size_t n_q() const { return position_.n; }
  double cell_area() const { return momentum_.spacing() * position_.spacing; }

  bool is_conjugate() const;
  /// Throws ConfigurationError if the grid is not lag-conjugate.
  void require_conjugate(const char* operation) const;

  bool operator==(const PhaseSpaceGrid& other) const = default;

 private:
  MomentumGrid momentum_;
  PositionAxis position_;
  UnitSystem units_;
};

/// Default momentum half-width: max(20*m*c, 10*hbar/sigma).
double default_p_max(double sigma, const UnitSystem& units);

/// Smallest lag-conjugate grid (n a power of two, n >= 64) of half-width
/// p_max whose spacing resolves a packet of position width sigma
/// (dp < hbar/(4 sigma)) and whose position window covers |q| <= q_extent.
PhaseSpaceGrid fit_phase_space_grid(double sigma, double p_max, double q_extent, const UnitSystem& units);

/// Periodic trapezoid sum over the momentum grid.
double quadrature(std::span<const double> values, const MomentumGrid& grid);
cplx quadrature(std::span<const cplx> values, const MomentumGrid& grid);

enum class Direction { forward, inverse };

/// Unitary momentum <-> position transform.
///
/// forward:  psi(q_j) = (2*pi*hbar)^(-1/2) sum_k phi(p_k) exp(+i p_k q_j / hbar) dp
/// inverse:  phi(p_k) = (2*pi*hbar)^(-1/2) sum_j psi(q_j) exp(-i p_k q_j / hbar) dq
std::vector<cplx> fourier_pair(std::span<const cplx> values, Direction direction,
                               const MomentumGrid& grid, const PositionAxis& axis,
                               const UnitSystem& units);

/// Derivative of periodic samples with spacing h via the discrete Fourier
/// transform (Nyquist mode dropped).
std::vector<cplx> periodic_derivative(std::span<const cplx> values, double spacing);

}  // namespace fvps

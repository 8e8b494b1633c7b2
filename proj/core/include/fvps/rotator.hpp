#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "fvps/fv_matrix.hpp"
#include "fvps/spectral.hpp"
#include "fvps/states.hpp"

namespace fvps {

/// Charged particle in a uniform magnetic field, truncated to Landau levels 0..n_max.
struct RotatorModel {
  double b = 1.0;
  std::size_t n_max = 64;
  /// Longitudinal momentum grid for the translational coupling.
  std::optional<MomentumGrid> pz;
  UnitSystem units{};

  EnergyModel energy_model() const;
  /// Ladder length sqrt(hbar/(m omega)).
  double ell() const;
  double omega() const;
  /// Throws DomainError unless b > 0.
  void validate() const;
};

/// Positive-branch (FW upper block) matrices of the even ladder operators.
struct EvenLadder {
  Eigen::MatrixXcd lower;
  Eigen::MatrixXcd raise;
};

/// Even part of a (x) I_2 on the doubled Landau basis, read in the FW frame.
/// The first superdiagonal is sqrt(n+1) f(n+1). ResolutionError below 16 levels.
EvenLadder even_ladder(const RotatorModel& model);

struct DeformedCommutator {
  /// Diagonal of [A, A^dagger] for n = 0..n_max-1 (the last level is cut by truncation).
  Eigen::VectorXd diagonal;
  double max_off_diagonal = 0.0;
  /// max |diag - 1|
  double deviation() const;
};

DeformedCommutator deformed_commutator(const RotatorModel& model);

enum class Spectrum { relativistic, equal_spacing };

/// r(t) = sqrt(2) ell |<A(t)>|, centroid x + i y = sqrt(2) ell <A(t)>.
/// Lengths in units of the Compton wavelength.
struct OrbitSeries {
  std::vector<double> times;
  std::vector<double> r;
  std::vector<double> x;
  std::vector<double> y;
  double omega = 0.0;

  std::size_t size() const { return times.size(); }
  /// (max r - min r) / (max r + min r); zero for an identically vanishing orbit.
  double modulation_depth() const;
};

/// Orbit from the Fock phases exp(-i E_n t / hbar). equal_spacing replaces the
/// spectrum by hbar omega (n + 1/2). Throws SamplingError unless dt gives at
/// least 8 samples per period of the fastest level spacing; TruncationError if
/// the expansion tail is not negligible.
OrbitSeries orbit_series(const FockExpansion& state, const RotatorModel& model, double t_max, double dt,
                         Spectrum spectrum = Spectrum::relativistic, unsigned jobs = 1);

/// Independent pipeline: the FV state is propagated by the eigendecomposition
/// of the doubled Hamiltonian and <A> is the eta-metric expectation of the even
/// ladder operator.
OrbitSeries orbit_series_fv(const FockExpansion& state, const RotatorModel& model, const std::vector<double>& times);

struct SpectralPeak {
  double frequency = 0.0;  ///< angular
  double amplitude = 0.0;
};

struct ModulationSpectrum {
  std::vector<double> frequency;  ///< angular frequency of each bin
  std::vector<double> magnitude;
  /// Local maxima above `significance` times the largest one, by decreasing amplitude.
  std::vector<SpectralPeak> peaks;
  /// Set when the series spans fewer than 4 periods of the dominant peak.
  bool resolution_warning = false;

  std::optional<SpectralPeak> dominant() const;
  std::optional<SpectralPeak> lowest() const;
};

/// Detrended (linear fit removed), Hann-windowed magnitude spectrum of r(t).
ModulationSpectrum modulation_spectrum(const std::vector<double>& values, double dt, double significance = 0.1);
ModulationSpectrum modulation_spectrum(const OrbitSeries& series, double significance = 0.1);

/// Damping of the first collapse: r(t) ~ r0 exp(-t^2 / (2 tau^2)) fitted on the
/// initial descent; returns 1/tau. This is a dephasing envelope, not dissipation.
double collapse_rate(const OrbitSeries& series);

/// Spectral norm of [A_even, Z_even] on Landau levels 0..n_max x the p_z grid
/// (default 32 nodes on [-4, 4) mc). ConfigurationError above 2048 doubled modes.
double translational_coupling(const RotatorModel& model);

}  // namespace fvps

#pragma once

#include "fvps/grids.hpp"

namespace fvps {

/// Free particle, or the Landau problem with dimensionless field strength
/// b = hbar*omega/(m c^2), omega = eB/(mc).
struct EnergyModel {
  enum class Kind { free, landau };

  UnitSystem units{};
  Kind kind = Kind::free;
  double b = 0.0;

  static EnergyModel free_particle(const UnitSystem& units = {}) { return {units, Kind::free, 0.0}; }
  static EnergyModel landau(double b, const UnitSystem& units = {});

  /// Cyclotron frequency b*m*c^2/hbar (zero for the free particle).
  double cyclotron_frequency() const { return b * units.rest_energy() / units.hbar; }
  /// Magnetic length sqrt(hbar/(m omega)); infinite when b == 0.
  double magnetic_length() const;
};

/// E(p) = sqrt(m^2 c^4 + c^2 p^2).
double energy(double p, const UnitSystem& units = {});

/// epsilon and chi expressed through two energies:
///   eps = (E1 + E2) / (2 sqrt(E1 E2)),  chi = (E1 - E2) / (2 sqrt(E1 E2)).
/// chi >= 0 when E1 >= E2 (sign convention).
double eps_from_energies(double e1, double e2);
double chi_from_energies(double e1, double e2);

double eps_factor(double p1, double p2, const UnitSystem& units = {});
double chi_factor(double p1, double p2, const UnitSystem& units = {});

/// Right-hand side of the pure-state condition for the even Wigner component:
///   -c^4 p1 p2 / (E1 E2 (E1 + E2)^2).
double purity_rhs(double p1, double p2, const UnitSystem& units = {});

/// E_n(p_z) = m c^2 sqrt(1 + (p_z/mc)^2 + (2n+1) b).
double landau_energy(int n, double p_z, const EnergyModel& model);

/// E_{n+1} - E_n evaluated without cancellation.
double landau_spacing(int n, double p_z, const EnergyModel& model);

/// f(n) = eps(E_{n-1}, E_n) on the Landau spectrum; n >= 1.
double deformation_f(int n, const EnergyModel& model, double p_z = 0.0);

}  // namespace fvps

#include "fvps/spectral.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "fvps/errors.hpp"

namespace fvps {

EnergyModel EnergyModel::landau(double b, const UnitSystem& units) {
  if (!(b >= 0.0) || !std::isfinite(b)) throw DomainError("EnergyModel::landau: b must be finite and >= 0");
  units.validate();
  return {units, Kind::landau, b};
}

double EnergyModel::magnetic_length() const {
  const double omega = cyclotron_frequency();
  if (omega <= 0.0) return std::numeric_limits<double>::infinity();
  return std::sqrt(units.hbar / (units.mass * omega));
}

double energy(double p, const UnitSystem& units) {
  const double mc2 = units.rest_energy();
  return std::hypot(mc2, units.c * p);
}

double eps_from_energies(double e1, double e2) { return (e1 + e2) / (2.0 * std::sqrt(e1 * e2)); }

double chi_from_energies(double e1, double e2) { return (e1 - e2) / (2.0 * std::sqrt(e1 * e2)); }

double eps_factor(double p1, double p2, const UnitSystem& units) {
  return eps_from_energies(energy(p1, units), energy(p2, units));
}

double chi_factor(double p1, double p2, const UnitSystem& units) {
  return chi_from_energies(energy(p1, units), energy(p2, units));
}

double purity_rhs(double p1, double p2, const UnitSystem& units) {
  const double e1 = energy(p1, units);
  const double e2 = energy(p2, units);
  const double c4 = std::pow(units.c, 4);
  const double s = e1 + e2;
  return -c4 * p1 * p2 / (e1 * e2 * s * s);
}

namespace {

double landau_argument(int n, double p_z, const EnergyModel& model) {
  if (n < 0) throw DomainError("landau level index must be >= 0, got " + std::to_string(n));
  const double x = p_z / model.units.momentum_scale();
  return 1.0 + x * x + (2.0 * n + 1.0) * model.b;
}

}  // namespace

double landau_energy(int n, double p_z, const EnergyModel& model) {
  return model.units.rest_energy() * std::sqrt(landau_argument(n, p_z, model));
}

double landau_spacing(int n, double p_z, const EnergyModel& model) {
  const double lo = std::sqrt(landau_argument(n, p_z, model));
  const double hi = std::sqrt(landau_argument(n + 1, p_z, model));
  return model.units.rest_energy() * 2.0 * model.b / (lo + hi);
}

double deformation_f(int n, const EnergyModel& model, double p_z) {
  if (n < 1) throw DomainError("deformation_f: n must be >= 1, got " + std::to_string(n));
  const double lo = landau_energy(n - 1, p_z, model);
  const double gap = landau_spacing(n - 1, p_z, model);
  // eps - 1 = (sqrt(E2) - sqrt(E1))^2 / (2 sqrt(E1 E2)); keep the small difference exact.
  const double hi = lo + gap;
  const double root_gap = gap / (std::sqrt(hi) + std::sqrt(lo));
  return 1.0 + root_gap * root_gap / (2.0 * std::sqrt(lo * hi));
}

}  // namespace fvps

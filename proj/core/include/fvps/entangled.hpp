#pragma once

#include <cstddef>
#include <vector>

#include "fvps/grids.hpp"

namespace fvps {

enum class Statistics { bose, fermi };
enum class Kinematics { nonrelativistic, relativistic };

/// Two identical particles in Gaussian packets of common width sigma centred at
/// q1 and q2 (zero mean momentum); phi(p) ~ exp(-sigma^2 p^2 / (2 hbar^2)).
struct PairState {
  double q1 = 0.0;
  double q2 = 0.0;
  double sigma = 1.0;
  Statistics statistics = Statistics::bose;
};

struct PairEnergy {
  double total = 0.0;        ///< kinetic energy of the pair, rest energy removed
  double direct = 0.0;       ///< sum of the two single-packet energies
  double correlation = 0.0;  ///< total - direct
  double overlap = 0.0;      ///< <a|b>
  bool coincident_limit = false;
};

/// Packets closer than this (in units of sigma) use the coincident-centre limit for fermions.
inline constexpr double kCoincidentSeparation = 1e-4;

/// Single-particle kinetic energy p^2/2m or E(p) - mc^2 per particle, exchange
/// term included. Coincident fermions switch to the Gram-Schmidt limit
/// phi_0(x1) phi_1(x2) - phi_1(x1) phi_0(x2) with phi_1 the first displaced
/// number state. Throws DomainError for sigma <= 0 or non-finite centres.
PairEnergy pair_energy(const PairState& pair, Kinematics kinematics, const UnitSystem& units = {});

/// Energy of one packet of width sigma in number state n (0 or 1).
double packet_energy(double sigma, int n, Kinematics kinematics, const UnitSystem& units = {});

/// Coincident minus far-separated fermion pair energy: <1|T|1> - <0|T|0>.
/// Equals hbar^2/(2 m sigma^2) without relativity.
double overlap_penalty(double sigma, Kinematics kinematics, const UnitSystem& units = {});

struct PenaltyRow {
  double sigma = 0.0;
  double nonrelativistic = 0.0;
  double relativistic = 0.0;
  double ratio() const { return relativistic / nonrelativistic; }
};

/// overlap_penalty for both kinematics over a sigma list (evaluated in parallel).
std::vector<PenaltyRow> penalty_curve(const std::vector<double>& sigmas, const UnitSystem& units = {},
                                      unsigned jobs = 1);

/// Least-squares slope of log(penalty) against log(sigma) for one column.
double penalty_exponent(const std::vector<PenaltyRow>& rows, Kinematics kinematics);

}  // namespace fvps

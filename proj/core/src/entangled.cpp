#include "fvps/entangled.hpp"

#include <cmath>
#include <numbers>
#include <thread>

#include "fvps/errors.hpp"

namespace fvps {

namespace {

constexpr std::size_t kNodes = 2048;
constexpr double kSpan = 14.0;  // p_max in units of hbar/sigma

double kinetic(double p, Kinematics k, const UnitSystem& u) {
  if (k == Kinematics::nonrelativistic) return p * p / (2.0 * u.mass);
  // E - mc^2 without cancellation
  const double cp2 = u.c * u.c * p * p;
  return cp2 / (std::sqrt(u.rest_energy() * u.rest_energy() + cp2) + u.rest_energy());
}

// Integrals of |phi_0|^2, p^2 |phi_0|^2 type weights against the kinetic energy,
// and the cross term carrying exp(i d p / hbar).
struct Moments {
  double t0 = 0.0;        // <0|T|0>
  double t1 = 0.0;        // <1|T|1>
  double cross_t = 0.0;   // <a|T|b>, real for symmetric packets
  double cross_1 = 0.0;   // <a|b>
};

Moments integrate(double sigma, double d, Kinematics k, const UnitSystem& u) {
  const double hbar = u.hbar;
  const MomentumGrid g(kNodes, kSpan * hbar / sigma);
  // |phi_0(p)|^2 = sigma / (sqrt(pi) hbar) exp(-sigma^2 p^2 / hbar^2)
  const double norm0 = sigma / (std::sqrt(std::numbers::pi) * hbar);
  Moments m;
  for (std::size_t i = 0; i < kNodes; ++i) {
    const double p = g.node(static_cast<std::ptrdiff_t>(i));
    const double w0 = norm0 * std::exp(-sigma * sigma * p * p / (hbar * hbar));
    const double w1 = w0 * 2.0 * sigma * sigma * p * p / (hbar * hbar);
    const double t = kinetic(p, k, u);
    const double c = std::cos(d * p / hbar);
    m.t0 += w0 * t;
    m.t1 += w1 * t;
    m.cross_t += w0 * t * c;
    m.cross_1 += w0 * c;
  }
  const double dp = g.spacing();
  m.t0 *= dp;
  m.t1 *= dp;
  m.cross_t *= dp;
  m.cross_1 *= dp;
  return m;
}

void validate(const PairState& pair, const UnitSystem& units) {
  units.validate();
  if (!(pair.sigma > 0.0)) throw DomainError("pair_energy: sigma must be positive");
  if (!std::isfinite(pair.q1) || !std::isfinite(pair.q2)) throw DomainError("pair_energy: centres must be finite");
}

}  // namespace

double packet_energy(double sigma, int n, Kinematics kinematics, const UnitSystem& units) {
  units.validate();
  if (!(sigma > 0.0)) throw DomainError("packet_energy: sigma must be positive");
  if (n != 0 && n != 1) throw DomainError("packet_energy: only n = 0 and n = 1 are provided");
  const auto m = integrate(sigma, 0.0, kinematics, units);
  return n == 0 ? m.t0 : m.t1;
}

PairEnergy pair_energy(const PairState& pair, Kinematics kinematics, const UnitSystem& units) {
  validate(pair, units);
  const double d = pair.q1 - pair.q2;
  const double sep = std::abs(d) / pair.sigma;
  PairEnergy out;
  if (pair.statistics == Statistics::fermi && sep < kCoincidentSeparation) {
    // orthogonalised limit: one particle in phi_0, the other in phi_1
    const auto m = integrate(pair.sigma, 0.0, kinematics, units);
    out.total = m.t0 + m.t1;
    out.direct = 2.0 * m.t0;
    out.correlation = out.total - out.direct;
    out.overlap = 1.0;
    out.coincident_limit = true;
    return out;
  }
  // beyond the quadrature's aliasing range the exchange terms vanish to double precision
  const auto m = integrate(pair.sigma, sep > 200.0 ? 0.0 : d, kinematics, units);
  const double s = sep > 200.0 ? 0.0 : m.cross_1;
  const double cross = sep > 200.0 ? 0.0 : m.cross_t;
  const double sign = pair.statistics == Statistics::bose ? 1.0 : -1.0;
  out.direct = 2.0 * m.t0;
  out.total = (out.direct + sign * 2.0 * cross * s) / (1.0 + sign * s * s);
  out.correlation = out.total - out.direct;
  out.overlap = s;
  return out;
}

double overlap_penalty(double sigma, Kinematics kinematics, const UnitSystem& units) {
  const auto close = pair_energy({0.0, 0.0, sigma, Statistics::fermi}, kinematics, units);
  return close.total - close.direct;
}

std::vector<PenaltyRow> penalty_curve(const std::vector<double>& sigmas, const UnitSystem& units, unsigned jobs) {
  for (double s : sigmas)
    if (!(s > 0.0)) throw DomainError("penalty_curve: sigma values must be positive");
  std::vector<PenaltyRow> rows(sigmas.size());
  auto fill = [&](std::size_t i) {
    rows[i] = {sigmas[i], overlap_penalty(sigmas[i], Kinematics::nonrelativistic, units),
               overlap_penalty(sigmas[i], Kinematics::relativistic, units)};
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(1, sigmas.size()))));
  if (jobs == 1) {
    for (std::size_t i = 0; i < sigmas.size(); ++i) fill(i);
    return rows;
  }
  std::vector<std::thread> pool;
  for (unsigned j = 0; j < jobs; ++j) {
    pool.emplace_back([&, j] {
      for (std::size_t i = j; i < sigmas.size(); i += jobs) fill(i);
    });
  }
  for (auto& t : pool) t.join();
  return rows;
}

double penalty_exponent(const std::vector<PenaltyRow>& rows, Kinematics kinematics) {
  if (rows.size() < 2) throw DomainError("penalty_exponent: need at least two rows");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& r : rows) {
    const double x = std::log(r.sigma);
    const double y = std::log(kinematics == Kinematics::relativistic ? r.relativistic : r.nonrelativistic);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const auto n = static_cast<double>(rows.size());
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace fvps

#include "fvps/grids.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <string>

#include "fft.hpp"
#include "fvps/errors.hpp"

namespace fvps {

void UnitSystem::validate() const {
  if (!(mass > 0.0) || !(c > 0.0) || !(hbar > 0.0)) {
    throw DomainError("UnitSystem: mass, c and hbar must be strictly positive");
  }
}

MomentumGrid::MomentumGrid(std::size_t n_points, double p_max) : n_(n_points), p_max_(p_max) {
  if (n_points < 8 || !std::has_single_bit(n_points)) {
    throw ConfigurationError("MomentumGrid: n_points must be a power of two >= 8, got " +
                             std::to_string(n_points));
  }
  if (!(p_max > 0.0) || !std::isfinite(p_max)) {
    throw ConfigurationError("MomentumGrid: p_max must be positive and finite");
  }
  dp_ = 2.0 * p_max_ / static_cast<double>(n_);
}

std::vector<double> MomentumGrid::nodes() const {
  std::vector<double> out(n_);
  for (std::size_t k = 0; k < n_; ++k) out[k] = node(static_cast<std::ptrdiff_t>(k));
  return out;
}

std::size_t MomentumGrid::nearest(double p) const {
  const double x = std::round((p + p_max_) / dp_);
  return static_cast<std::size_t>(std::clamp(x, 0.0, static_cast<double>(n_ - 1)));
}

std::vector<double> PositionAxis::nodes() const {
  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j) out[j] = node(static_cast<std::ptrdiff_t>(j));
  return out;
}

PositionAxis conjugate_position_axis(const MomentumGrid& grid, const UnitSystem& units) {
  units.validate();
  const double n = static_cast<double>(grid.size());
  return {grid.size(), 2.0 * std::numbers::pi * units.hbar / (n * grid.spacing())};
}

PhaseSpaceGrid::PhaseSpaceGrid(MomentumGrid momentum, PositionAxis position, UnitSystem units)
    : momentum_(momentum), position_(position), units_(units) {
  units_.validate();
  if (position_.n < 8 || !(position_.spacing > 0.0)) {
    throw ConfigurationError("PhaseSpaceGrid: position axis needs n >= 8 and positive spacing");
  }
}

PhaseSpaceGrid PhaseSpaceGrid::conjugate_to(const MomentumGrid& momentum, const UnitSystem& units) {
  units.validate();
  const double n = static_cast<double>(momentum.size());
  const double dq = std::numbers::pi * units.hbar / (n * momentum.spacing());
  return PhaseSpaceGrid(momentum, PositionAxis{momentum.size(), dq}, units);
}

PhaseSpaceGrid PhaseSpaceGrid::with_position_window(std::size_t n, double q_max, const UnitSystem& units) {
  units.validate();
  if (!(q_max > 0.0)) throw ConfigurationError("with_position_window: q_max must be positive");
  const double dq = 2.0 * q_max / static_cast<double>(n);
  const double dp = std::numbers::pi * units.hbar / (static_cast<double>(n) * dq);
  return PhaseSpaceGrid(MomentumGrid(n, 0.5 * static_cast<double>(n) * dp), PositionAxis{n, dq}, units);
}

bool PhaseSpaceGrid::is_conjugate() const {
  if (position_.n != momentum_.size()) return false;
  const double product = position_.spacing * 2.0 * momentum_.spacing() * static_cast<double>(position_.n);
  const double target = 2.0 * std::numbers::pi * units_.hbar;
  return std::abs(product - target) <= 1e-10 * target;
}

void PhaseSpaceGrid::require_conjugate(const char* operation) const {
  if (!is_conjugate()) {
    throw ConfigurationError(std::string(operation) +
                             ": phase-space grid is not conjugate (need n_q = n_p and dq*2dp*n = 2*pi*hbar)");
  }
}

double default_p_max(double sigma, const UnitSystem& units) {
  if (!(sigma > 0.0)) throw DomainError("default_p_max: sigma must be positive");
  return std::max(20.0 * units.momentum_scale(), 10.0 * units.hbar / sigma);
}

PhaseSpaceGrid fit_phase_space_grid(double sigma, double p_max, double q_extent, const UnitSystem& units) {
  units.validate();
  if (!(sigma > 0.0) || !(p_max > 0.0)) throw DomainError("fit_phase_space_grid: sigma and p_max must be positive");
  std::size_t n = 64;
  for (;; n *= 2) {
    const double dp = 2.0 * p_max / static_cast<double>(n);
    const double q_max = std::numbers::pi * units.hbar / (2.0 * dp);
    if (dp < units.hbar / (4.0 * sigma) && q_max >= q_extent) break;
    if (n > (std::size_t{1} << 16)) throw ResolutionError("fit_phase_space_grid: required grid exceeds 65536 nodes");
  }
  return PhaseSpaceGrid::conjugate_to(MomentumGrid(n, p_max), units);
}

double quadrature(std::span<const double> values, const MomentumGrid& grid) {
  if (values.size() != grid.size()) throw DimensionError("quadrature: values length does not match grid");
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum * grid.spacing();
}

cplx quadrature(std::span<const cplx> values, const MomentumGrid& grid) {
  if (values.size() != grid.size()) throw DimensionError("quadrature: values length does not match grid");
  cplx sum = 0.0;
  for (const cplx& v : values) sum += v;
  return sum * grid.spacing();
}

std::vector<cplx> fourier_pair(std::span<const cplx> values, Direction direction, const MomentumGrid& grid,
                               const PositionAxis& axis, const UnitSystem& units) {
  units.validate();
  const std::size_t n = grid.size();
  if (values.size() != n) throw DimensionError("fourier_pair: values length does not match grid");
  const double target = 2.0 * std::numbers::pi * units.hbar;
  if (axis.n != n || std::abs(axis.spacing * grid.spacing() * static_cast<double>(n) - target) > 1e-10 * target) {
    throw ConfigurationError("fourier_pair: momentum grid and position axis are not conjugate");
  }
  // exp(i p_k q_j / hbar) = exp(i n pi / 2) (-1)^(j+k) exp(2 pi i jk / n)
  const double sign = direction == Direction::forward ? 1.0 : -1.0;
  const cplx global = std::polar(1.0, sign * std::numbers::pi * static_cast<double>(n) / 2.0);
  const double weight = (direction == Direction::forward ? grid.spacing() : axis.spacing) / std::sqrt(target);

  std::vector<cplx> in(n), out(n);
  for (std::size_t k = 0; k < n; ++k) in[k] = (k % 2 ? -1.0 : 1.0) * values[k];
  detail::dft(in, out, direction == Direction::forward ? +1 : -1);
  for (std::size_t j = 0; j < n; ++j) out[j] *= (j % 2 ? -1.0 : 1.0) * global * weight;
  return out;
}

std::vector<cplx> periodic_derivative(std::span<const cplx> values, double spacing) {
  const std::size_t n = values.size();
  std::vector<cplx> spec(n), out(n);
  detail::dft(values, spec, -1);
  const double base = 2.0 * std::numbers::pi / (static_cast<double>(n) * spacing);
  for (std::size_t k = 0; k < n; ++k) {
    const auto s = static_cast<std::ptrdiff_t>(k) - (k > n / 2 ? static_cast<std::ptrdiff_t>(n) : 0);
    spec[k] *= (2 * k == n) ? cplx(0.0) : cplx(0.0, base * static_cast<double>(s)) / static_cast<double>(n);
  }
  detail::dft(spec, out, +1);
  return out;
}

}  // namespace fvps

#include "fvps/states.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "fvps/errors.hpp"

namespace fvps {

namespace {

double sum_norm(const std::vector<cplx>& v, double dp) {
  double s = 0.0;
  for (const auto& x : v) s += std::norm(x);
  return s * dp;
}

void normalize(std::vector<cplx>& v, double dp) {
  const double n = sum_norm(v, dp);
  if (!(n > 0.0)) throw DomainError("state amplitude vanishes on the grid");
  const double s = 1.0 / std::sqrt(n);
  for (auto& x : v) x *= s;
}

void check_resolution(const MomentumGrid& grid, double sigma, double p_extent, double q_bar, const UnitSystem& units,
                      const char* who) {
  units.validate();
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError(std::string(who) + ": sigma must be positive");
  if (!(grid.spacing() < units.hbar / (4.0 * sigma))) {
    throw ResolutionError(std::string(who) + ": momentum spacing " + std::to_string(grid.spacing()) +
                          " does not resolve sigma (need dp < hbar/(4 sigma) = " +
                          std::to_string(units.hbar / (4.0 * sigma)) + ")");
  }
  if (!(grid.p_max() > p_extent)) {
    throw ResolutionError(std::string(who) + ": p_max " + std::to_string(grid.p_max()) +
                          " does not contain the packet support (need > " + std::to_string(p_extent) + ")");
  }
  const double window = std::numbers::pi * units.hbar / grid.spacing();
  if (!(std::abs(q_bar) + 6.0 * sigma < window)) {
    throw ResolutionError(std::string(who) + ": position offset aliases on this momentum spacing");
  }
}

// Normalised Hermite functions h_0..h_n at x.
std::vector<double> hermite_functions(int n, double x) {
  std::vector<double> h(static_cast<std::size_t>(n) + 1);
  h[0] = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * x * x);
  if (n >= 1) h[1] = std::sqrt(2.0) * x * h[0];
  for (int k = 1; k < n; ++k) {
    h[k + 1] = std::sqrt(2.0 / (k + 1)) * x * h[k] - std::sqrt(static_cast<double>(k) / (k + 1)) * h[k - 1];
  }
  return h;
}

Eigen::VectorXcd fw_vector(const ChargeBranchState& s, Branch b) {
  const auto n = static_cast<Eigen::Index>(s.grid().size());
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(2 * n);
  const auto& a = s.amplitude(b);
  const Eigen::Index off = b == Branch::plus ? 0 : n;
  for (Eigen::Index k = 0; k < n; ++k) v(off + k) = a[static_cast<std::size_t>(k)];
  return v;
}

}  // namespace

// ---------------------------------------------------------------- ChargeBranchState

ChargeBranchState::ChargeBranchState(MomentumGrid grid, std::vector<cplx> plus, std::vector<cplx> minus)
    : grid_(grid), plus_(std::move(plus)), minus_(std::move(minus)) {
  if (plus_.empty()) plus_.assign(grid_.size(), 0.0);
  if (minus_.empty()) minus_.assign(grid_.size(), 0.0);
  if (plus_.size() != grid_.size() || minus_.size() != grid_.size()) {
    throw DimensionError("ChargeBranchState: amplitude length does not match grid");
  }
}

ChargeBranchState ChargeBranchState::single(MomentumGrid grid, Branch branch, std::vector<cplx> amplitude) {
  if (branch == Branch::plus) return ChargeBranchState(grid, std::move(amplitude), {});
  return ChargeBranchState(grid, {}, std::move(amplitude));
}

ChargeBranchState ChargeBranchState::two_branch(const ChargeBranchState& plus_part,
                                                const ChargeBranchState& minus_part) {
  if (!(plus_part.grid() == minus_part.grid())) throw DimensionError("two_branch: states live on different grids");
  return ChargeBranchState(plus_part.grid(), plus_part.amplitude(Branch::plus), minus_part.amplitude(Branch::minus));
}

double ChargeBranchState::branch_norm(Branch b) const { return sum_norm(amplitude(b), grid_.spacing()); }

std::optional<Branch> ChargeBranchState::occupied_branch() const {
  const bool p = has_branch(Branch::plus), m = has_branch(Branch::minus);
  if (p == m) return std::nullopt;
  return p ? Branch::plus : Branch::minus;
}

// ---------------------------------------------------------------- Gaussians

double sigma_from_lambda(double lambda, const UnitSystem& units) {
  if (!(lambda > 0.0)) throw DomainError("localization parameter must be positive");
  return units.compton_length() / lambda;
}

double lambda_from_sigma(double sigma, const UnitSystem& units) {
  if (!(sigma > 0.0)) throw DomainError("sigma must be positive");
  return units.compton_length() / sigma;
}

ChargeBranchState gaussian_state(const GaussianSpec& spec, const MomentumGrid& grid, const UnitSystem& units) {
  check_resolution(grid, spec.sigma, std::abs(spec.p_bar) + 6.0 * units.hbar / spec.sigma, spec.q_bar, units,
                   "gaussian_state");
  std::vector<cplx> a(grid.size());
  const double s2 = spec.sigma * spec.sigma / (2.0 * units.hbar * units.hbar);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double p = grid.node(static_cast<std::ptrdiff_t>(k));
    a[k] = std::exp(-s2 * (p - spec.p_bar) * (p - spec.p_bar)) * std::polar(1.0, -spec.q_bar * p / units.hbar);
  }
  normalize(a, grid.spacing());
  return ChargeBranchState::single(grid, spec.branch, std::move(a));
}

PhaseCenter coherent_center(const CoherentSpec& spec, const UnitSystem& units) {
  if (!(spec.sigma > 0.0)) throw DomainError("coherent state width must be positive");
  return {std::numbers::sqrt2 * spec.sigma * spec.alpha.real(),
          std::numbers::sqrt2 * units.hbar * spec.alpha.imag() / spec.sigma};
}

ChargeBranchState free_coherent_state(const CoherentSpec& spec, const MomentumGrid& grid, const UnitSystem& units) {
  const auto c = coherent_center(spec, units);
  return gaussian_state({spec.sigma, c.p_bar, c.q_bar, spec.branch}, grid, units);
}

OperatorMatrix even_annihilation_operator(double sigma, const MomentumGrid& grid, const UnitSystem& units) {
  if (!(sigma > 0.0)) throw DomainError("even_annihilation_operator: sigma must be positive");
  const auto model = EnergyModel::free_particle(units);
  const MomentumBasis basis{grid};
  const auto lambda = sign_operator(build_hamiltonian(model, basis), units.rest_energy());
  const auto a = cplx(1.0 / (std::numbers::sqrt2 * sigma)) * position_operator(grid, units) +
                 cplx(0.0, sigma / (std::numbers::sqrt2 * units.hbar)) * momentum_operator(grid);
  return even_part(a, lambda);
}

namespace {

struct CoherentAction {
  Eigen::VectorXcd residual_fw;
  Eigen::VectorXcd image_fw;
};

CoherentAction coherent_action(const ChargeBranchState& state, const CoherentSpec& spec, const UnitSystem& units) {
  const auto b = state.occupied_branch();
  if (!b) throw DomainError("coherent check needs a single-branch state");
  const auto& grid = state.grid();
  const auto model = EnergyModel::free_particle(units);
  const auto fw = fw_transform(model, MomentumBasis{grid});
  const Eigen::VectorXcd psi = fw.inverse.apply(fw_vector(state, *b));
  const auto a = even_annihilation_operator(spec.sigma, grid, units);
  const Eigen::VectorXcd image = a.apply(psi);
  return {to_fw(image - spec.alpha * psi, fw), to_fw(image, fw)};
}

}  // namespace

double coherent_eigen_residual(const ChargeBranchState& state, const CoherentSpec& spec, const UnitSystem& units) {
  const auto act = coherent_action(state, spec, units);
  return std::sqrt(act.residual_fw.squaredNorm() * state.grid().spacing());
}

double opposite_branch_leakage(const ChargeBranchState& state, const CoherentSpec& spec, const UnitSystem& units) {
  const auto act = coherent_action(state, spec, units);
  const auto n = static_cast<Eigen::Index>(state.grid().size());
  const Eigen::VectorXcd other = *state.occupied_branch() == Branch::plus ? act.image_fw.tail(n) : act.image_fw.head(n);
  return std::sqrt(other.squaredNorm() * state.grid().spacing());
}

ChargeBranchState displaced_number_state(int n, double q_bar, double p_bar, double sigma, const MomentumGrid& grid,
                                         const UnitSystem& units, Branch branch) {
  if (n < 0 || n > 12) throw DomainError("displaced_number_state: n must lie in [0, 12], got " + std::to_string(n));
  const double spread = (6.0 + std::sqrt(2.0 * n + 1.0)) * units.hbar / sigma;
  check_resolution(grid, sigma, std::abs(p_bar) + spread, q_bar, units, "displaced_number_state");
  std::vector<cplx> a(grid.size());
  const cplx phase_n = std::pow(cplx(0.0, -1.0), n);
  const double scale = std::sqrt(sigma / units.hbar);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double p = grid.node(static_cast<std::ptrdiff_t>(k));
    const double x = sigma * (p - p_bar) / units.hbar;
    a[k] = phase_n * scale * hermite_functions(n, x)[static_cast<std::size_t>(n)] *
           std::polar(1.0, -q_bar * p / units.hbar);
  }
  normalize(a, grid.spacing());
  return ChargeBranchState::single(grid, branch, std::move(a));
}

cplx overlap(const ChargeBranchState& a, const ChargeBranchState& b, Branch branch) {
  if (!(a.grid() == b.grid())) throw DimensionError("overlap: states live on different grids");
  cplx s = 0.0;
  const auto& x = a.amplitude(branch);
  const auto& y = b.amplitude(branch);
  for (std::size_t k = 0; k < x.size(); ++k) s += std::conj(x[k]) * y[k];
  return s * a.grid().spacing();
}

double mean_position(const ChargeBranchState& state, Branch branch, const UnitSystem& units) {
  const auto& a = state.amplitude(branch);
  const double norm = state.branch_norm(branch);
  if (!(norm > 0.0)) throw DomainError("mean_position: branch is empty");
  const auto d = periodic_derivative(a, state.grid().spacing());
  cplx s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += std::conj(a[k]) * cplx(0.0, units.hbar) * d[k];
  return s.real() * state.grid().spacing() / norm;
}

double momentum_expectation(const ChargeBranchState& state, const std::function<double(double)>& f, Branch branch) {
  const auto& a = state.amplitude(branch);
  const double norm = state.branch_norm(branch);
  if (!(norm > 0.0)) throw DomainError("momentum_expectation: branch is empty");
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += f(state.grid().node(static_cast<std::ptrdiff_t>(k))) * std::norm(a[k]);
  return s * state.grid().spacing() / norm;
}

double mean_momentum(const ChargeBranchState& state, Branch branch) {
  return momentum_expectation(state, [](double p) { return p; }, branch);
}

// ---------------------------------------------------------------- rotator states

double FockExpansion::norm() const {
  double s = 0.0;
  for (const auto& c : coefficients) s += std::norm(c);
  return s;
}

FockExpansion rotator_coherent_state(cplx alpha, const EnergyModel& model, std::size_t n_max) {
  if (n_max == 0 || n_max > kMaxFockLevels) {
    throw DomainError("rotator_coherent_state: n_max must lie in [1, " + std::to_string(kMaxFockLevels) + "]");
  }
  if (model.kind != EnergyModel::Kind::landau) throw ConfigurationError("rotator_coherent_state: needs a Landau model");
  // log |c_n| up to normalisation; scan past n_max to suggest a cutoff if needed.
  const std::size_t scan = std::max<std::size_t>(n_max, 8 * kMaxFockLevels);
  std::vector<double> logc(scan + 1);
  const double la = std::abs(alpha) > 0.0 ? std::log(std::abs(alpha)) : -std::numeric_limits<double>::infinity();
  logc[0] = 0.0;
  for (std::size_t n = 1; n <= scan; ++n) {
    logc[n] = logc[n - 1] + la - 0.5 * std::log(static_cast<double>(n)) -
              std::log(deformation_f(static_cast<int>(n), model));
  }
  double mx = 0.0;
  for (std::size_t n = 0; n <= scan; ++n) mx = std::max(mx, logc[n]);
  double total = 0.0;
  for (std::size_t n = 0; n <= scan; ++n) total += std::exp(2.0 * (logc[n] - mx));
  auto weight = [&](std::size_t n) { return std::exp(2.0 * (logc[n] - mx)) / total; };

  FockExpansion out;
  out.coefficients.resize(n_max + 1);
  double kept = 0.0;
  for (std::size_t n = 0; n <= n_max; ++n) kept += std::exp(2.0 * (logc[n] - mx));
  const double phase = std::arg(alpha);
  for (std::size_t n = 0; n <= n_max; ++n) {
    out.coefficients[n] = std::polar(std::exp(logc[n] - mx) / std::sqrt(kept), phase * static_cast<double>(n));
  }
  out.tail = std::norm(out.coefficients[n_max]);
  if (!(weight(n_max) < kFockTailThreshold)) {
    std::size_t suggest = n_max;
    while (suggest < scan && !(weight(suggest) < kFockTailThreshold)) ++suggest;
    throw TruncationError("rotator_coherent_state: |c_n_max|^2 = " + std::to_string(weight(n_max)) +
                              " exceeds tail threshold; use n_max >= " + std::to_string(suggest),
                          suggest);
  }
  return out;
}

}  // namespace fvps

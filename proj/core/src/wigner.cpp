#include "fvps/wigner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "fft.hpp"
#include "fvps/errors.hpp"

namespace fvps {

namespace {

void require_state_grid(const ChargeBranchState& state, const PhaseSpaceGrid& grid, const char* op) {
  grid.require_conjugate(op);
  if (!(state.grid() == grid.momentum())) {
    throw ConfigurationError(std::string(op) + ": state grid differs from the phase-space momentum axis");
  }
}

std::size_t wrap(std::ptrdiff_t m, std::size_t n) {
  const auto nn = static_cast<std::ptrdiff_t>(n);
  return static_cast<std::size_t>(((m % nn) + nn) % nn);
}

// Rows of sum_m (-1)^m w(k+m, k-m) a*(k+m) b(k-m) e^{-2 pi i m j/n}, scaled.
template <class Weight>
ComplexField lag_transform(const std::vector<cplx>& a, const std::vector<cplx>& b, const PhaseSpaceGrid& grid,
                           Weight weight) {
  const std::size_t n = grid.n_p();
  const auto half = static_cast<std::ptrdiff_t>(n / 2);
  const double scale = 2.0 * grid.momentum().spacing() / (2.0 * std::numbers::pi * grid.units().hbar);
  ComplexField out(n, n);
  std::vector<cplx> row(n), spec(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::fill(row.begin(), row.end(), cplx(0.0));
    const auto kk = static_cast<std::ptrdiff_t>(k);
    for (std::ptrdiff_t m = -half; m < half; ++m) {
      const auto i1 = kk + m, i2 = kk - m;
      if (i1 < 0 || i2 < 0 || i1 >= static_cast<std::ptrdiff_t>(n) || i2 >= static_cast<std::ptrdiff_t>(n)) continue;
      const cplx v = std::conj(a[static_cast<std::size_t>(i1)]) * b[static_cast<std::size_t>(i2)];
      if (v == cplx(0.0)) continue;
      row[wrap(m, n)] = (m % 2 == 0 ? 1.0 : -1.0) * weight(i1, i2) * v;
    }
    detail::dft(row, spec, -1);
    for (std::size_t j = 0; j < n; ++j) out(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = scale * spec[j];
  }
  return out;
}

}  // namespace

RealField wigner_even(const ChargeBranchState& state, Branch branch, const PhaseSpaceGrid& grid, EpsMode mode) {
  require_state_grid(state, grid, "wigner_even");
  if (!state.has_branch(branch)) throw DomainError("wigner_even: requested charge branch is empty");
  const auto& g = grid.momentum();
  const auto& u = grid.units();
  const auto& a = state.amplitude(branch);
  const ComplexField c = lag_transform(a, a, grid, [&](std::ptrdiff_t i1, std::ptrdiff_t i2) {
    return mode == EpsMode::unity ? 1.0 : eps_factor(g.node(i1), g.node(i2), u);
  });
  return c.real();
}

ComplexField wigner_odd(const ChargeBranchState& state, Branch ordering, const PhaseSpaceGrid& grid, EpsMode mode) {
  require_state_grid(state, grid, "wigner_odd");
  const auto& g = grid.momentum();
  const auto& u = grid.units();
  return lag_transform(state.amplitude(ordering), state.amplitude(opposite(ordering)), grid,
                       [&](std::ptrdiff_t i1, std::ptrdiff_t i2) {
                         return mode == EpsMode::unity ? 1.0 : chi_factor(g.node(i1), g.node(i2), u);
                       });
}

WignerComponents wigner_components(const ChargeBranchState& state, const PhaseSpaceGrid& grid, EpsMode mode) {
  const auto n = static_cast<Eigen::Index>(grid.n_p());
  WignerComponents w{grid, RealField::Zero(n, n), RealField::Zero(n, n), ComplexField::Zero(n, n),
                     ComplexField::Zero(n, n), mode};
  if (state.has_branch(Branch::plus)) w.even_plus = wigner_even(state, Branch::plus, grid, mode);
  if (state.has_branch(Branch::minus)) w.even_minus = wigner_even(state, Branch::minus, grid, mode);
  if (state.has_branch(Branch::plus) && state.has_branch(Branch::minus)) {
    w.odd_plus = wigner_odd(state, Branch::plus, grid, mode);
    w.odd_minus = wigner_odd(state, Branch::minus, grid, mode);
  }
  return w;
}

// ---------------------------------------------------------------- expectations

namespace {

void require_field(const RealField& w, const PhaseSpaceGrid& grid, const char* op) {
  if (static_cast<std::size_t>(w.rows()) != grid.n_p() || static_cast<std::size_t>(w.cols()) != grid.n_q()) {
    throw DimensionError(std::string(op) + ": field shape does not match the grid");
  }
}

}  // namespace

double expectation(const RealField& symbol, const RealField& w, const PhaseSpaceGrid& grid) {
  require_field(w, grid, "expectation");
  require_field(symbol, grid, "expectation");
  return symbol.cwiseProduct(w).sum() * grid.cell_area();
}

double expectation(const std::function<double(double, double)>& symbol, const RealField& w,
                   const PhaseSpaceGrid& grid) {
  require_field(w, grid, "expectation");
  const auto& g = grid.momentum();
  const auto& ax = grid.position();
  double s = 0.0;
  for (Eigen::Index k = 0; k < w.rows(); ++k)
    for (Eigen::Index j = 0; j < w.cols(); ++j) s += symbol(g.node(k), ax.node(j)) * w(k, j);
  return s * grid.cell_area();
}

Moments moments(const RealField& w, const PhaseSpaceGrid& grid) {
  require_field(w, grid, "moments");
  const auto& g = grid.momentum();
  const auto& ax = grid.position();
  Eigen::VectorXd p(w.rows()), q(w.cols());
  for (Eigen::Index k = 0; k < w.rows(); ++k) p(k) = g.node(k);
  for (Eigen::Index j = 0; j < w.cols(); ++j) q(j) = ax.node(j);
  const Eigen::VectorXd row = w.rowwise().sum();  // over q
  const Eigen::VectorXd col = w.colwise().sum();  // over p
  const double da = grid.cell_area();
  Moments m;
  m.norm = row.sum() * da;
  m.mean_p = p.dot(row) * da;
  m.mean_q = q.dot(col) * da;
  m.var_p = p.cwiseAbs2().dot(row) * da - m.mean_p * m.mean_p;
  m.var_q = q.cwiseAbs2().dot(col) * da - m.mean_q * m.mean_q;
  m.var_q_negative = m.var_q < 0.0;
  return m;
}

std::vector<double> momentum_marginal(const RealField& w, const PhaseSpaceGrid& grid) {
  require_field(w, grid, "momentum_marginal");
  std::vector<double> out(static_cast<std::size_t>(w.rows()));
  for (Eigen::Index k = 0; k < w.rows(); ++k) out[static_cast<std::size_t>(k)] = w.row(k).sum() * grid.position().spacing;
  return out;
}

ComplexField reconstruct_kernel(const RealField& w, const PhaseSpaceGrid& grid) {
  require_field(w, grid, "reconstruct_kernel");
  grid.require_conjugate("reconstruct_kernel");
  const std::size_t n = grid.n_p();
  const auto half = static_cast<std::ptrdiff_t>(n / 2);
  const double scale =
      2.0 * std::numbers::pi * grid.units().hbar / (2.0 * grid.momentum().spacing() * static_cast<double>(n));
  ComplexField k_out(n, n);
  std::vector<cplx> row(n), spec(n);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < n; ++j) row[j] = w(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j));
    detail::dft(row, spec, +1);
    for (std::ptrdiff_t m = -half; m < half; ++m) {
      k_out(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(m + half)) =
          (m % 2 == 0 ? 1.0 : -1.0) * scale * spec[wrap(m, n)];
    }
  }
  return k_out;
}

// ---------------------------------------------------------------- purity

PurityReport purity_check(const RealField& w, const PhaseSpaceGrid& grid) {
  const ComplexField kern = reconstruct_kernel(w, grid);
  const auto n = static_cast<std::ptrdiff_t>(grid.n_p());
  const auto half = n / 2;
  const double dp = grid.momentum().spacing();
  const auto& g = grid.momentum();
  const auto& u = grid.units();
  const double mx = kern.cwiseAbs().maxCoeff();
  if (!(mx > 0.0)) throw UndefinedLogError("purity_check: kernel vanishes everywhere");
  const double floor = 1e-6 * mx;

  auto at = [&](std::ptrdiff_t k, std::ptrdiff_t m) -> cplx {
    return kern(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(m + half));
  };
  // True when (k, m) indexes a stored kernel entry above the floor.
  auto usable = [&](std::ptrdiff_t k, std::ptrdiff_t m) {
    if (k < 0 || k >= n || m < -half || m >= half) return false;
    if (k + m < 0 || k + m >= n || k - m < 0 || k - m >= n) return false;
    return std::abs(at(k, m)) > floor;
  };
  struct Mixed {
    double log_mag, phase;
  };
  auto mixed = [&](std::ptrdiff_t k, std::ptrdiff_t m, std::ptrdiff_t h) -> std::optional<Mixed> {
    if (!usable(k, m) || !usable(k + h, m) || !usable(k - h, m) || !usable(k, m + h) || !usable(k, m - h)) {
      return std::nullopt;
    }
    const cplx c = at(k, m);
    const double denom = 4.0 * std::pow(static_cast<double>(h) * dp, 2);
    const double lm = std::log(std::abs(at(k + h, m))) + std::log(std::abs(at(k - h, m))) -
                      std::log(std::abs(at(k, m + h))) - std::log(std::abs(at(k, m - h)));
    const double ph = std::arg(at(k + h, m) / c) + std::arg(at(k - h, m) / c) - std::arg(at(k, m + h) / c) -
                      std::arg(at(k, m - h) / c);
    return Mixed{lm / denom, ph / denom};
  };

  PurityReport r;
  for (std::ptrdiff_t k = 0; k < n; ++k)
    for (std::ptrdiff_t m = -half; m < half; ++m) {
      const auto d1 = mixed(k, m, 1);
      const auto d2 = mixed(k, m, 2);
      if (!d1 || !d2) continue;
      const double lhs = (4.0 * d1->log_mag - d2->log_mag) / 3.0;
      const double ph = (4.0 * d1->phase - d2->phase) / 3.0;
      const double p1 = g.node(k + m), p2 = g.node(k - m);
      const double rhs = purity_rhs(p1, p2, u);
      const double dev = std::abs(lhs - rhs);
      ++r.points;
      r.max_abs_lhs = std::max(r.max_abs_lhs, std::abs(lhs));
      r.max_abs_rhs = std::max(r.max_abs_rhs, std::abs(rhs));
      r.phase_curvature = std::max(r.phase_curvature, std::abs(ph));
      if (dev > r.max_deviation) {
        r.max_deviation = dev;
        r.worst_p1 = p1;
        r.worst_p2 = p2;
      }
    }
  if (r.points == 0) throw UndefinedLogError("purity_check: no stencil lies above the kernel threshold");
  return r;
}

// ---------------------------------------------------------------- interference gain

double interference_gain(double p_a, double p_b, const UnitSystem& units) { return eps_factor(p_a, p_b, units); }

InterferenceReport measure_interference_gain(double p_a, double p_b, double sigma, const PhaseSpaceGrid& grid) {
  const auto& g = grid.momentum();
  const auto& u = grid.units();
  const auto ia = static_cast<std::ptrdiff_t>(g.nearest(p_a));
  const auto ib = static_cast<std::ptrdiff_t>(g.nearest(p_b));
  const double tol = 1e-9 * std::max(1.0, g.p_max());
  if (std::abs(g.node(ia) - p_a) > tol || std::abs(g.node(ib) - p_b) > tol) {
    throw ConfigurationError("measure_interference_gain: both momenta must be grid nodes");
  }
  if ((ia - ib) % 2 != 0) {
    throw ConfigurationError("measure_interference_gain: momenta must be an even number of steps apart");
  }
  const auto sa = gaussian_state({sigma, p_a}, g, u);
  const auto sb = gaussian_state({sigma, p_b}, g, u);
  std::vector<cplx> sum(g.size());
  for (std::size_t k = 0; k < sum.size(); ++k) sum[k] = sa.amplitude(Branch::plus)[k] + sb.amplitude(Branch::plus)[k];
  double nrm = 0.0;
  for (const auto& x : sum) nrm += std::norm(x);
  for (auto& x : sum) x /= std::sqrt(nrm * g.spacing());
  const auto st = ChargeBranchState::single(g, Branch::plus, std::move(sum));

  const auto k_rel = reconstruct_kernel(wigner_even(st, Branch::plus, grid, EpsMode::relativistic), grid);
  const auto k_one = reconstruct_kernel(wigner_even(st, Branch::plus, grid, EpsMode::unity), grid);
  const auto kc = static_cast<Eigen::Index>((ia + ib) / 2);
  const auto mc = static_cast<Eigen::Index>((ia - ib) / 2 + static_cast<std::ptrdiff_t>(g.size() / 2));
  return {eps_factor(p_a, p_b, u), std::abs(k_rel(kc, mc)) / std::abs(k_one(kc, mc))};
}

double difference_mass_fraction(const RealField& w1, const RealField& w2, const PhaseSpaceGrid& grid, double p_cut) {
  require_field(w1, grid, "difference_mass_fraction");
  require_field(w2, grid, "difference_mass_fraction");
  const RealField d = (w1 - w2).cwiseAbs();
  const double total = d.sum();
  if (!(total > 0.0)) return 1.0;
  double inside = 0.0;
  for (Eigen::Index k = 0; k < d.rows(); ++k)
    if (std::abs(grid.momentum().node(k)) < p_cut) inside += d.row(k).sum();
  return inside / total;
}

}  // namespace fvps

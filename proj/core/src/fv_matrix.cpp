#include "fvps/fv_matrix.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <mutex>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "fvps/errors.hpp"

namespace fvps {

namespace detail {
struct SignCache {
  std::once_flag once;
  std::optional<OperatorMatrix> lambda;
  double min_abs_eigenvalue = 0.0;
};
}  // namespace detail

namespace {

using Sparse = OperatorMatrix::Sparse;
using Triplet = Eigen::Triplet<cplx>;
constexpr cplx I{0.0, 1.0};

Sparse to_sparse(const Eigen::MatrixXcd& dense) {
  Sparse s = dense.sparseView(cplx(0.0), 0.0);
  s.makeCompressed();
  return s;
}

void require_same_basis(const OperatorMatrix& a, const OperatorMatrix& b, const char* op) {
  if (a.size() != b.size() || !(a.basis() == b.basis())) {
    throw DimensionError(std::string(op) + ": operands live on different bases");
  }
}

std::size_t pz_count(const BasisSpec& basis) {
  if (const auto* b = std::get_if<OscillatorPzBasis>(&basis)) return b->pz.size();
  return 1;
}

std::size_t level_count(const BasisSpec& basis) {
  if (const auto* b = std::get_if<OscillatorBasis>(&basis)) return b->n_max + 1;
  if (const auto* b = std::get_if<OscillatorPzBasis>(&basis)) return b->n_max + 1;
  return 0;
}

// pi_x^2 + pi_y^2 on levels 0..levels-1, built one level larger and cropped.
Eigen::MatrixXcd transverse_kinetic(std::size_t levels, const EnergyModel& model) {
  const std::size_t big = levels + 1;
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(big, big);
  for (std::size_t n = 0; n + 1 < big; ++n) a(n, n + 1) = std::sqrt(static_cast<double>(n + 1));
  const Eigen::MatrixXcd ad = a.adjoint();
  // m hbar omega = b (m c)^2
  const double scale = std::sqrt(0.5 * model.b) * model.units.momentum_scale();
  const Eigen::MatrixXcd px = scale * (a + ad);
  const Eigen::MatrixXcd py = I * scale * (ad - a);
  const Eigen::MatrixXcd k = px * px + py * py;
  return k.topLeftCorner(levels, levels);
}

}  // namespace

std::size_t mode_count(const BasisSpec& basis) {
  return std::visit(
      [](const auto& b) -> std::size_t {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, MomentumBasis>) return b.grid.size();
        else if constexpr (std::is_same_v<T, OscillatorBasis>) return b.n_max + 1;
        else return (b.n_max + 1) * b.pz.size();
      },
      basis);
}

// ---------------------------------------------------------------- OperatorMatrix

OperatorMatrix::OperatorMatrix(Sparse matrix, BasisSpec basis)
    : m_(std::move(matrix)), basis_(std::move(basis)), cache_(std::make_shared<detail::SignCache>()) {
  if (m_.rows() != m_.cols()) throw DimensionError("OperatorMatrix: matrix must be square");
  const auto expected = 2 * mode_count(basis_);
  if (static_cast<std::size_t>(m_.rows()) != expected) {
    throw DimensionError("OperatorMatrix: size " + std::to_string(m_.rows()) + " does not match basis (2M = " +
                         std::to_string(expected) + ")");
  }
  if (expected > kMaxOracleDimension) {
    throw ConfigurationError("OperatorMatrix: doubled dimension " + std::to_string(expected) + " exceeds " +
                             std::to_string(kMaxOracleDimension));
  }
  m_.makeCompressed();
}

OperatorMatrix OperatorMatrix::from_dense(const Eigen::MatrixXcd& dense, BasisSpec basis) {
  return OperatorMatrix(to_sparse(dense), std::move(basis));
}

OperatorMatrix OperatorMatrix::charge_invariant(const Eigen::MatrixXcd& kernel, BasisSpec basis) {
  const Eigen::MatrixXcd zero = Eigen::MatrixXcd::Zero(kernel.rows(), kernel.cols());
  return from_blocks(kernel, zero, zero, kernel, std::move(basis));
}

OperatorMatrix OperatorMatrix::identity(BasisSpec basis) {
  const auto n = static_cast<Eigen::Index>(2 * mode_count(basis));
  Sparse id(n, n);
  id.setIdentity();
  return OperatorMatrix(std::move(id), std::move(basis));
}

OperatorMatrix OperatorMatrix::from_blocks(const Eigen::MatrixXcd& uu, const Eigen::MatrixXcd& ud,
                                           const Eigen::MatrixXcd& du, const Eigen::MatrixXcd& dd, BasisSpec basis) {
  const Eigen::Index m = uu.rows();
  for (const auto* blk : {&uu, &ud, &du, &dd}) {
    if (blk->rows() != m || blk->cols() != m) throw DimensionError("OperatorMatrix::from_blocks: block shapes differ");
  }
  std::vector<Triplet> t;
  auto push = [&](const Eigen::MatrixXcd& blk, Eigen::Index r0, Eigen::Index c0) {
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j)
        if (blk(i, j) != cplx(0.0)) t.emplace_back(r0 + i, c0 + j, blk(i, j));
  };
  push(uu, 0, 0);
  push(ud, 0, m);
  push(du, m, 0);
  push(dd, m, m);
  Sparse s(2 * m, 2 * m);
  s.setFromTriplets(t.begin(), t.end());
  return OperatorMatrix(std::move(s), std::move(basis));
}

Eigen::MatrixXcd OperatorMatrix::block(int row_charge, int col_charge) const {
  const auto m = static_cast<Eigen::Index>(modes());
  return Eigen::MatrixXcd(m_.block(row_charge * m, col_charge * m, m, m));
}

Eigen::VectorXcd OperatorMatrix::apply(const Eigen::VectorXcd& v) const {
  if (v.size() != m_.cols()) throw DimensionError("OperatorMatrix::apply: vector length mismatch");
  return m_ * v;
}

double OperatorMatrix::max_abs() const {
  double out = 0.0;
  for (Eigen::Index k = 0; k < m_.outerSize(); ++k)
    for (Sparse::InnerIterator it(m_, k); it; ++it) out = std::max(out, std::abs(it.value()));
  return out;
}

OperatorMatrix OperatorMatrix::adjoint() const { return OperatorMatrix(Sparse(m_.adjoint()), basis_); }

OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same_basis(a, b, "operator+");
  return OperatorMatrix(Sparse(a.m_ + b.m_), a.basis_);
}

OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same_basis(a, b, "operator-");
  return OperatorMatrix(Sparse(a.m_ - b.m_), a.basis_);
}

OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same_basis(a, b, "operator*");
  Sparse p = a.m_ * b.m_;
  p.prune(cplx(0.0));
  return OperatorMatrix(std::move(p), a.basis_);
}

OperatorMatrix operator*(cplx s, const OperatorMatrix& a) { return OperatorMatrix(Sparse(s * a.m_), a.basis_); }

// ---------------------------------------------------------------- Hamiltonians

OperatorMatrix charge_metric(const BasisSpec& basis) {
  const auto m = static_cast<Eigen::Index>(mode_count(basis));
  std::vector<Triplet> t;
  for (Eigen::Index i = 0; i < m; ++i) {
    t.emplace_back(i, i, 1.0);
    t.emplace_back(m + i, m + i, -1.0);
  }
  Sparse s(2 * m, 2 * m);
  s.setFromTriplets(t.begin(), t.end());
  return OperatorMatrix(std::move(s), basis);
}

OperatorMatrix fv_hamiltonian(const Eigen::MatrixXcd& kinetic, const UnitSystem& units, BasisSpec basis) {
  units.validate();
  const Eigen::MatrixXcd t = kinetic / (2.0 * units.mass);
  const Eigen::MatrixXcd rest = units.rest_energy() * Eigen::MatrixXcd::Identity(kinetic.rows(), kinetic.cols());
  // tau3 + i tau2 = [[1, 1], [-1, -1]]
  return OperatorMatrix::from_blocks(rest + t, t, -t, -rest - t, std::move(basis));
}

OperatorMatrix build_hamiltonian(const EnergyModel& model, const BasisSpec& basis) {
  model.units.validate();
  const std::size_t m = mode_count(basis);
  if (m < 16) {
    throw ResolutionError("build_hamiltonian: " + std::to_string(m) + " modes cannot resolve the spectrum; use >= 16");
  }
  if (2 * m > kMaxOracleDimension) {
    throw ConfigurationError("build_hamiltonian: doubled dimension exceeds " + std::to_string(kMaxOracleDimension));
  }
  if (const auto* mb = std::get_if<MomentumBasis>(&basis)) {
    if (model.kind != EnergyModel::Kind::free) {
      throw ConfigurationError("build_hamiltonian: the magnetic problem needs an oscillator basis");
    }
    Eigen::MatrixXcd k = Eigen::MatrixXcd::Zero(m, m);
    for (std::size_t i = 0; i < m; ++i) k(i, i) = std::pow(mb->grid.node(static_cast<std::ptrdiff_t>(i)), 2);
    return fv_hamiltonian(k, model.units, basis);
  }
  const std::size_t levels = level_count(basis);
  const std::size_t nz = pz_count(basis);
  const Eigen::MatrixXcd kt = transverse_kinetic(levels, model);
  Eigen::MatrixXcd k = Eigen::MatrixXcd::Zero(m, m);
  for (std::size_t a = 0; a < levels; ++a)
    for (std::size_t b = 0; b < levels; ++b)
      for (std::size_t z = 0; z < nz; ++z) k(a * nz + z, b * nz + z) = kt(a, b);
  if (const auto* ob = std::get_if<OscillatorPzBasis>(&basis)) {
    for (std::size_t a = 0; a < levels; ++a)
      for (std::size_t z = 0; z < nz; ++z) k(a * nz + z, a * nz + z) += std::pow(ob->pz.node(static_cast<std::ptrdiff_t>(z)), 2);
  }
  return fv_hamiltonian(k, model.units, basis);
}

Eigen::VectorXd basis_energies(const EnergyModel& model, const BasisSpec& basis) {
  const std::size_t m = mode_count(basis);
  Eigen::VectorXd e(m);
  if (const auto* mb = std::get_if<MomentumBasis>(&basis)) {
    for (std::size_t i = 0; i < m; ++i) e(i) = energy(mb->grid.node(static_cast<std::ptrdiff_t>(i)), model.units);
    return e;
  }
  const std::size_t nz = pz_count(basis);
  const auto* ob = std::get_if<OscillatorPzBasis>(&basis);
  for (std::size_t a = 0; a < level_count(basis); ++a)
    for (std::size_t z = 0; z < nz; ++z) {
      const double pz = ob ? ob->pz.node(static_cast<std::ptrdiff_t>(z)) : 0.0;
      e(a * nz + z) = landau_energy(static_cast<int>(a), pz, model);
    }
  return e;
}

// ---------------------------------------------------------------- sign operator

namespace {

struct Factorization {
  Sparse lambda;
  double min_abs = 0.0;
};

Factorization factor_sign(const Sparse& h) {
  const auto n = h.rows();
  std::vector<Eigen::Index> parent(n);
  std::iota(parent.begin(), parent.end(), Eigen::Index{0});
  auto find = [&](Eigen::Index x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (Eigen::Index k = 0; k < h.outerSize(); ++k)
    for (Sparse::InnerIterator it(h, k); it; ++it)
      if (it.value() != cplx(0.0)) parent[find(it.row())] = find(it.col());

  std::vector<std::vector<Eigen::Index>> groups(n);
  for (Eigen::Index i = 0; i < n; ++i) groups[find(i)].push_back(i);

  const Eigen::MatrixXcd dense_h(h);
  Factorization out;
  out.min_abs = std::numeric_limits<double>::infinity();
  std::vector<Triplet> t;
  for (const auto& g : groups) {
    if (g.empty()) continue;
    const auto s = static_cast<Eigen::Index>(g.size());
    Eigen::MatrixXcd blk(s, s);
    for (Eigen::Index i = 0; i < s; ++i)
      for (Eigen::Index j = 0; j < s; ++j) blk(i, j) = dense_h(g[i], g[j]);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(blk);
    if (es.info() != Eigen::Success) throw ConditioningError("sign_operator: eigendecomposition failed");
    Eigen::VectorXcd sgn(s);
    for (Eigen::Index i = 0; i < s; ++i) {
      out.min_abs = std::min(out.min_abs, std::abs(es.eigenvalues()(i)));
      sgn(i) = es.eigenvalues()(i).real() >= 0.0 ? 1.0 : -1.0;
    }
    const Eigen::MatrixXcd& v = es.eigenvectors();
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(v);
    const Eigen::MatrixXcd lam = v * sgn.asDiagonal() * lu.inverse();
    for (Eigen::Index i = 0; i < s; ++i)
      for (Eigen::Index j = 0; j < s; ++j)
        if (lam(i, j) != cplx(0.0)) t.emplace_back(g[i], g[j], lam(i, j));
  }
  out.lambda = Sparse(n, n);
  out.lambda.setFromTriplets(t.begin(), t.end());
  return out;
}

}  // namespace

OperatorMatrix sign_operator(const OperatorMatrix& h, double energy_scale) {
  auto& cache = *h.cache_;
  std::call_once(cache.once, [&] {
    Factorization f = factor_sign(h.matrix());
    cache.min_abs_eigenvalue = f.min_abs;
    cache.lambda.emplace(std::move(f.lambda), h.basis());
  });
  if (cache.min_abs_eigenvalue < 1e-12 * energy_scale) {
    throw ConditioningError("sign_operator: H has an eigenvalue of magnitude " +
                            std::to_string(cache.min_abs_eigenvalue) + " (near-singular)");
  }
  return *cache.lambda;
}

OperatorMatrix even_part(const OperatorMatrix& op, const OperatorMatrix& lambda) {
  require_same_basis(op, lambda, "even_part");
  return 0.5 * (op + lambda * op * lambda);
}

OperatorMatrix odd_part(const OperatorMatrix& op, const OperatorMatrix& lambda) {
  require_same_basis(op, lambda, "odd_part");
  return 0.5 * (op - lambda * op * lambda);
}

OperatorMatrix commutator(const OperatorMatrix& a, const OperatorMatrix& b) { return a * b - b * a; }

OperatorMatrix anticommutator(const OperatorMatrix& a, const OperatorMatrix& b) { return a * b + b * a; }

double pseudo_hermiticity_defect(const OperatorMatrix& h) {
  const OperatorMatrix eta = charge_metric(h.basis());
  return (h.adjoint() * eta - eta * h).max_abs();
}

// ---------------------------------------------------------------- FW transform

FwTransform fw_transform(const EnergyModel& model, const BasisSpec& basis) {
  const Eigen::VectorXd e = basis_energies(model, basis);
  const double mc2 = model.units.rest_energy();
  const auto m = e.size();
  std::vector<Triplet> fwd, inv;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double norm = 2.0 * std::sqrt(mc2 * e(i));
    const double a = (e(i) + mc2) / norm;
    const double b = (e(i) - mc2) / norm;
    fwd.insert(fwd.end(), {Triplet(i, i, a), Triplet(i, m + i, b), Triplet(m + i, i, b), Triplet(m + i, m + i, a)});
    inv.insert(inv.end(), {Triplet(i, i, a), Triplet(i, m + i, -b), Triplet(m + i, i, -b), Triplet(m + i, m + i, a)});
  }
  Sparse u(2 * m, 2 * m), ui(2 * m, 2 * m);
  u.setFromTriplets(fwd.begin(), fwd.end());
  ui.setFromTriplets(inv.begin(), inv.end());
  return {OperatorMatrix(std::move(u), basis), OperatorMatrix(std::move(ui), basis)};
}

Eigen::VectorXcd lift_to_fv(const Eigen::VectorXcd& positive, const FwTransform& fw) {
  const auto m = static_cast<Eigen::Index>(fw.inverse.modes());
  if (positive.size() != m) throw DimensionError("lift_to_fv: vector length mismatch");
  Eigen::VectorXcd full = Eigen::VectorXcd::Zero(2 * m);
  full.head(m) = positive;
  return fw.inverse.apply(full);
}

Eigen::VectorXcd to_fw(const Eigen::VectorXcd& fv, const FwTransform& fw) { return fw.forward.apply(fv); }

// ---------------------------------------------------------------- operators

Eigen::MatrixXd spectral_derivative(const MomentumGrid& grid) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  const double scale = std::numbers::pi / (static_cast<double>(n) * grid.spacing());
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index l = 0; l < n; ++l) {
      if (k == l) continue;
      const auto diff = k - l;
      const double sign = (diff % 2 == 0) ? 1.0 : -1.0;
      d(k, l) = scale * sign / std::tan(std::numbers::pi * static_cast<double>(diff) / static_cast<double>(n));
    }
  return d;
}

OperatorMatrix position_operator(const MomentumGrid& grid, const UnitSystem& units) {
  const Eigen::MatrixXcd x = (I * units.hbar) * spectral_derivative(grid).cast<cplx>();
  return OperatorMatrix::charge_invariant(x, MomentumBasis{grid});
}

OperatorMatrix momentum_operator(const MomentumGrid& grid) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) p(k, k) = grid.node(k);
  return OperatorMatrix::charge_invariant(p, MomentumBasis{grid});
}

OperatorMatrix newton_wigner_position(const MomentumGrid& grid, const UnitSystem& units) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  const Eigen::MatrixXcd x = (I * units.hbar) * spectral_derivative(grid).cast<cplx>();
  Eigen::MatrixXcd curv = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double p = grid.node(k);
    const double e = energy(p, units);
    curv(k, k) = I * units.hbar * units.c * units.c * p / (2.0 * e * e);
  }
  return OperatorMatrix::from_blocks(x, curv, curv, x, MomentumBasis{grid});
}

OperatorMatrix lowering_operator(const BasisSpec& basis) {
  const std::size_t levels = level_count(basis);
  if (levels == 0) throw ConfigurationError("lowering_operator: needs an oscillator basis");
  const std::size_t nz = pz_count(basis);
  const auto m = static_cast<Eigen::Index>(levels * nz);
  std::vector<Triplet> t;
  for (std::size_t n = 0; n + 1 < levels; ++n)
    for (std::size_t z = 0; z < nz; ++z) {
      const auto r = static_cast<Eigen::Index>(n * nz + z);
      const auto c = static_cast<Eigen::Index>((n + 1) * nz + z);
      const double v = std::sqrt(static_cast<double>(n + 1));
      t.emplace_back(r, c, v);
      t.emplace_back(m + r, m + c, v);
    }
  Sparse s(2 * m, 2 * m);
  s.setFromTriplets(t.begin(), t.end());
  return OperatorMatrix(std::move(s), basis);
}

OperatorMatrix longitudinal_position(const OscillatorPzBasis& basis, const UnitSystem& units) {
  const Eigen::MatrixXd d = spectral_derivative(basis.pz);
  const std::size_t levels = basis.n_max + 1;
  const std::size_t nz = basis.pz.size();
  const auto m = static_cast<Eigen::Index>(levels * nz);
  std::vector<Triplet> t;
  for (std::size_t n = 0; n < levels; ++n)
    for (std::size_t k = 0; k < nz; ++k)
      for (std::size_t l = 0; l < nz; ++l) {
        if (k == l) continue;
        const cplx v = I * units.hbar * d(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l));
        const auto r = static_cast<Eigen::Index>(n * nz + k);
        const auto c = static_cast<Eigen::Index>(n * nz + l);
        t.emplace_back(r, c, v);
        t.emplace_back(m + r, m + c, v);
      }
  Sparse s(2 * m, 2 * m);
  s.setFromTriplets(t.begin(), t.end());
  return OperatorMatrix(std::move(s), BasisSpec{basis});
}

// ---------------------------------------------------------------- kernel relation

double KernelReport::max_deviation() const { return std::max({even_deviation, odd_deviation, leakage}); }

KernelReport kernel_relation_check(const Eigen::MatrixXcd& kernel, const EnergyModel& model, const BasisSpec& basis) {
  const auto m = static_cast<Eigen::Index>(mode_count(basis));
  if (kernel.rows() != m || kernel.cols() != m) throw DimensionError("kernel_relation_check: kernel shape mismatch");
  const OperatorMatrix h = build_hamiltonian(model, basis);
  const OperatorMatrix lambda = sign_operator(h, model.units.rest_energy());
  const OperatorMatrix op = OperatorMatrix::charge_invariant(kernel, basis);
  const FwTransform fw = fw_transform(model, basis);
  const OperatorMatrix even_fw = fw.forward * even_part(op, lambda) * fw.inverse;
  const OperatorMatrix odd_fw = fw.forward * odd_part(op, lambda) * fw.inverse;

  const Eigen::VectorXd e = basis_energies(model, basis);
  Eigen::MatrixXcd eps_k(m, m), chi_k(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) {
      eps_k(i, j) = kernel(i, j) * eps_from_energies(e(i), e(j));
      chi_k(i, j) = kernel(i, j) * chi_from_energies(e(i), e(j));
    }
  KernelReport r;
  r.even_deviation = std::max((even_fw.block(0, 0) - eps_k).cwiseAbs().maxCoeff(),
                              (even_fw.block(1, 1) - eps_k).cwiseAbs().maxCoeff());
  r.odd_deviation = std::max((odd_fw.block(0, 1) - chi_k).cwiseAbs().maxCoeff(),
                             (odd_fw.block(1, 0) - chi_k).cwiseAbs().maxCoeff());
  r.leakage = std::max({even_fw.block(0, 1).cwiseAbs().maxCoeff(), even_fw.block(1, 0).cwiseAbs().maxCoeff(),
                        odd_fw.block(0, 0).cwiseAbs().maxCoeff(), odd_fw.block(1, 1).cwiseAbs().maxCoeff()});
  return r;
}

KernelReport kernel_relation_check(const OperatorMatrix& op, const EnergyModel& model) {
  const Eigen::MatrixXcd uu = op.block(0, 0);
  const double scale = std::max(1.0, op.max_abs());
  const double tol = 1e-14 * scale;
  if ((uu - op.block(1, 1)).cwiseAbs().maxCoeff() > tol || op.block(0, 1).cwiseAbs().maxCoeff() > tol ||
      op.block(1, 0).cwiseAbs().maxCoeff() > tol) {
    throw DomainError("kernel_relation_check: operator is not charge invariant");
  }
  return kernel_relation_check(uu, model, op.basis());
}

// ---------------------------------------------------------------- utilities

double spectral_norm(const OperatorMatrix& a, double rel_tol, int max_iter) {
  const auto n = static_cast<Eigen::Index>(a.size());
  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> g;
  Eigen::VectorXcd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = cplx(g(rng), g(rng));
  v.normalize();
  const Sparse& m = a.matrix();
  const Sparse mh = m.adjoint();
  double prev = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXcd w = mh * (m * v);
    const double lam = w.norm();
    if (lam == 0.0) return 0.0;
    v = w / lam;
    if (it > 10 && std::abs(lam - prev) <= rel_tol * lam) return std::sqrt(lam);
    prev = lam;
  }
  return std::sqrt(prev);
}

void write_binary(const OperatorMatrix& op, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigurationError("write_binary: cannot open " + path.string());
  const Eigen::MatrixXcd d = op.dense();
  const std::uint64_t dims[2] = {static_cast<std::uint64_t>(d.rows()), static_cast<std::uint64_t>(d.cols())};
  out.write(reinterpret_cast<const char*>(dims), sizeof dims);
  static_assert(std::endian::native == std::endian::little, "binary dump assumes a little-endian host");
  for (Eigen::Index i = 0; i < d.rows(); ++i)
    for (Eigen::Index j = 0; j < d.cols(); ++j) {
      const double pair[2] = {d(i, j).real(), d(i, j).imag()};
      out.write(reinterpret_cast<const char*>(pair), sizeof pair);
    }
}

}  // namespace fvps

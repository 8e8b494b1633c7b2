#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <thread>
#include <vector>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "fvps/errors.hpp"
#include "fvps/fv_matrix.hpp"

using namespace fvps;

namespace {

std::vector<double> sorted_eigs(const OperatorMatrix& h) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(h.dense());
  std::vector<double> out;
  for (auto v : es.eigenvalues()) out.push_back(v.real());
  std::sort(out.begin(), out.end());
  return out;
}

// Positive-branch Gaussian on the grid with FV components.
Eigen::VectorXcd gaussian_fv(const MomentumGrid& g, double q0, double p0, double s, const FwTransform& fw) {
  const auto n = static_cast<Eigen::Index>(g.size());
  Eigen::VectorXcd v(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double p = g.node(k);
    v(k) = std::exp(-s * s * (p - p0) * (p - p0) / 2) * std::polar(1.0, -q0 * p);
  }
  v /= std::sqrt(v.squaredNorm() * g.spacing());
  return lift_to_fv(v, fw);
}

double weighted_norm(const Eigen::VectorXcd& v, double dp) { return std::sqrt(v.squaredNorm() * dp); }

}  // namespace

TEST_CASE("free hamiltonian spectrum") {
  const MomentumGrid g(64, 8.0);
  const auto model = EnergyModel::free_particle();
  const auto h = build_hamiltonian(model, MomentumBasis{g});
  auto eig = sorted_eigs(h);
  std::vector<double> expect;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double e = energy(g.node(static_cast<std::ptrdiff_t>(k)));
    expect.push_back(e);
    expect.push_back(-e);
  }
  std::sort(expect.begin(), expect.end());
  for (std::size_t i = 0; i < eig.size(); ++i) CHECK(std::abs(eig[i] - expect[i]) < 1e-10);
  CHECK(pseudo_hermiticity_defect(h) < 1e-14);
}

TEST_CASE("magnetic hamiltonian spectrum") {
  const auto model = EnergyModel::landau(1.0);
  const auto h = build_hamiltonian(model, OscillatorBasis{64});
  auto eig = sorted_eigs(h);
  std::vector<double> pos;
  for (double e : eig)
    if (e > 0) pos.push_back(e);
  REQUIRE(pos.size() == 65);
  CHECK(std::abs(pos[0] - std::sqrt(2.0)) < 1e-8);
  CHECK(std::abs(pos[1] - 2.0) < 1e-8);
  CHECK(std::abs(pos[2] - std::sqrt(6.0)) < 1e-8);
  CHECK(std::abs(pos[64] - landau_energy(64, 0, model)) < 1e-8);
  CHECK(pseudo_hermiticity_defect(h) < 1e-12);
}

TEST_CASE("zero field reproduces the free spectrum") {
  const MomentumGrid pz(16, 3.0);
  const auto m0 = EnergyModel::landau(0.0);
  auto a = sorted_eigs(build_hamiltonian(m0, OscillatorPzBasis{1, pz}));
  auto b = sorted_eigs(build_hamiltonian(EnergyModel::free_particle(), MomentumBasis{pz}));
  for (std::size_t i = 0; i < b.size(); ++i) {
    CHECK(std::abs(a[2 * i] - b[i]) < 1e-12);
    CHECK(std::abs(a[2 * i + 1] - b[i]) < 1e-12);
  }
}

TEST_CASE("basis size guards") {
  CHECK_THROWS_AS(build_hamiltonian(EnergyModel::free_particle(), MomentumBasis{MomentumGrid(8, 1.0)}), ResolutionError);
  CHECK_THROWS_AS(build_hamiltonian(EnergyModel::landau(1.0), OscillatorPzBasis{63, MomentumGrid(32, 1.0)}),
                  ConfigurationError);
  CHECK_THROWS_AS(build_hamiltonian(EnergyModel::landau(1.0), MomentumBasis{MomentumGrid(32, 1.0)}), ConfigurationError);
}

TEST_CASE("sign operator") {
  const MomentumGrid g(64, 8.0);
  const auto h = build_hamiltonian(EnergyModel::free_particle(), MomentumBasis{g});
  const auto lam = sign_operator(h);
  const auto id = OperatorMatrix::identity(h.basis());
  CHECK((lam * lam - id).max_abs() < 1e-10);
  CHECK(commutator(lam, h).max_abs() < 1e-10);
  CHECK(std::abs(lam.dense().trace()) < 1e-10);

  // In the energy eigenbasis Lambda is diag(+1, -1).
  const auto fw = fw_transform(EnergyModel::free_particle(), h.basis());
  const Eigen::MatrixXcd lfw = (fw.forward * lam * fw.inverse).dense();
  Eigen::VectorXcd expect(lfw.rows());
  expect.head(lfw.rows() / 2).setOnes();
  expect.tail(lfw.rows() / 2).setConstant(-1.0);
  CHECK((lfw - Eigen::MatrixXcd(expect.asDiagonal())).cwiseAbs().maxCoeff() < 1e-12);
  const Eigen::MatrixXcd hfw = (fw.forward * h * fw.inverse).dense();
  CHECK((hfw - Eigen::MatrixXcd(hfw.diagonal().asDiagonal())).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("sign operator on random admissible hamiltonians") {
  std::mt19937 rng(11);
  std::normal_distribution<double> n;
  const MomentumGrid g(16, 2.0);
  for (int trial = 0; trial < 3; ++trial) {
    Eigen::MatrixXcd r(16, 16);
    for (Eigen::Index i = 0; i < 16; ++i)
      for (Eigen::Index j = 0; j < 16; ++j) r(i, j) = {n(rng), n(rng)};
    const Eigen::MatrixXcd k = 0.3 * r.adjoint() * r;
    const auto h = fv_hamiltonian(k, UnitSystem{}, MomentumBasis{g});
    const auto lam = sign_operator(h);
    CHECK((lam * lam - OperatorMatrix::identity(h.basis())).max_abs() < 1e-10);
    CHECK(commutator(lam, h).max_abs() < 1e-10);
    CHECK(std::abs(lam.dense().trace()) < 1e-10);
  }
}

TEST_CASE("near-singular hamiltonian is rejected") {
  const MomentumGrid g(16, 2.0);
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Identity(32, 32);
  d(3, 3) = 0.0;
  const auto h = OperatorMatrix::from_dense(d, MomentumBasis{g});
  CHECK_THROWS_AS(sign_operator(h), ConditioningError);
}

TEST_CASE("sign operator factorization is shared across threads") {
  const MomentumGrid g(64, 8.0);
  const auto h = build_hamiltonian(EnergyModel::free_particle(), MomentumBasis{g});
  std::vector<double> err(4, 1.0);
  std::vector<std::thread> pool;
  for (int t = 0; t < 4; ++t)
    pool.emplace_back([&, t] {
      const auto lam = sign_operator(h);
      err[t] = (lam * lam - OperatorMatrix::identity(h.basis())).max_abs();
    });
  for (auto& th : pool) th.join();
  for (double e : err) CHECK(e < 1e-10);
}

TEST_CASE("even and odd parts") {
  const UnitSystem u;
  const MomentumGrid g(128, 5.0);
  const auto model = EnergyModel::free_particle(u);
  const MomentumBasis basis{g};
  const auto h = build_hamiltonian(model, basis);
  const auto lam = sign_operator(h);
  const auto x = position_operator(g, u);
  const auto xe = even_part(x, lam);
  const auto xo = odd_part(x, lam);

  CHECK((xe + xo - x).max_abs() < 1e-12);
  CHECK(commutator(lam, xe).max_abs() < 1e-10);
  CHECK(anticommutator(lam, xo).max_abs() < 1e-10);
  CHECK((even_part(xe, lam) - xe).max_abs() < 1e-10);
  CHECK(pseudo_hermiticity_defect(x) < 1e-14);
  const auto eta = charge_metric(basis);
  CHECK((xe.adjoint() * eta - eta * xe).max_abs() < 1e-10);
  CHECK((xo.adjoint() * eta - eta * xo).max_abs() < 1e-10);

  const auto p = momentum_operator(g);
  CHECK(odd_part(p, lam).max_abs() < 1e-10);
  const auto id = OperatorMatrix::identity(basis);
  CHECK((even_part(id, lam) - id).max_abs() < 1e-12);
  CHECK(odd_part(id, lam).max_abs() < 1e-12);

  CHECK_THROWS_AS(even_part(x, sign_operator(build_hamiltonian(model, MomentumBasis{MomentumGrid(64, 5.0)}))),
                  DimensionError);
}

TEST_CASE("even position acts as the Newton-Wigner position on smooth states") {
  const UnitSystem u;
  const MomentumGrid g(128, 5.0);
  const auto model = EnergyModel::free_particle(u);
  const MomentumBasis basis{g};
  const auto lam = sign_operator(build_hamiltonian(model, basis));
  const auto xe = even_part(position_operator(g, u), lam);
  const auto nw = newton_wigner_position(g, u);
  const auto fw = fw_transform(model, basis);
  struct Case {
    double q0, p0, s;
  };
  for (auto c : {Case{0, 0, 2}, Case{2, 0.5, 2}, Case{1, 0, 1.5}, Case{-3, 1, 2.5}, Case{5, 0.3, 2}}) {
    const auto v = gaussian_fv(g, c.q0, c.p0, c.s, fw);
    CHECK(weighted_norm(to_fw((xe - nw).apply(v), fw), g.spacing()) < 1e-8);
  }
  // NW position keeps the positive branch positive.
  const auto v = gaussian_fv(g, 1.0, 0.2, 2.0, fw);
  const Eigen::VectorXcd out = to_fw(nw.apply(v), fw);
  CHECK(weighted_norm(out.tail(g.size()), g.spacing()) < 1e-8);
}

TEST_CASE("canonical commutator on interior states") {
  const UnitSystem u;
  const MomentumGrid g(128, 5.0);
  const auto model = EnergyModel::free_particle(u);
  const MomentumBasis basis{g};
  const auto lam = sign_operator(build_hamiltonian(model, basis));
  const auto xe = even_part(position_operator(g, u), lam);
  const auto c = commutator(xe, momentum_operator(g));
  const auto fw = fw_transform(model, basis);
  const auto v = gaussian_fv(g, 0.5, 0.0, 1.5, fw);
  const Eigen::VectorXcd r = c.apply(v) - cplx(0, u.hbar) * v;
  CHECK(r.cwiseAbs().maxCoeff() < 1e-6);
  CHECK(commutator(xe, xe).max_abs() == 0.0);
}

TEST_CASE("kernel relation for charge-invariant symbols") {
  const UnitSystem u;
  const MomentumGrid g(64, 6.0);
  const auto model = EnergyModel::free_particle(u);
  const MomentumBasis basis{g};
  const auto n = static_cast<Eigen::Index>(g.size());

  const Eigen::MatrixXcd pos = cplx(0, 1) * spectral_derivative(g).cast<cplx>();
  CHECK(kernel_relation_check(pos, model, basis).max_deviation() < 1e-8);

  Eigen::MatrixXcd fp = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) fp(k, k) = std::cos(g.node(k));
  const auto rep = kernel_relation_check(fp, model, basis);
  CHECK(rep.max_deviation() < 1e-8);
  const auto lam = sign_operator(build_hamiltonian(model, basis));
  CHECK(odd_part(OperatorMatrix::charge_invariant(fp, basis), lam).max_abs() < 1e-10);

  // Gaussian potential exp(-q^2/2) in momentum representation.
  Eigen::MatrixXcd vg(n, n);
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index l = 0; l < n; ++l) {
      const double d = g.node(k) - g.node(l);
      vg(k, l) = std::exp(-d * d / 2) / std::sqrt(2 * std::numbers::pi) * g.spacing();
    }
  CHECK(kernel_relation_check(OperatorMatrix::charge_invariant(vg, basis), model).max_deviation() < 1e-8);

  const auto not_invariant = newton_wigner_position(g, u);
  CHECK_THROWS_AS(kernel_relation_check(not_invariant, model), DomainError);
}

TEST_CASE("even rotational ladder and longitudinal position do not commute in a field") {
  const MomentumGrid pz(16, 3.0);
  for (double b : {1e-8, 1.0}) {
    const auto model = EnergyModel::landau(b);
    const OscillatorPzBasis basis{11, pz};
    const auto lam = sign_operator(build_hamiltonian(model, basis));
    const auto a = even_part(lowering_operator(basis), lam);
    const auto z = even_part(longitudinal_position(basis, model.units), lam);
    const double norm = spectral_norm(commutator(a, z));
    if (b > 0.5) CHECK(norm > 1e-3);
    else CHECK(norm < 1e-4);
  }
}

TEST_CASE("spectral norm matches dense svd") {
  const MomentumGrid g(16, 2.0);
  std::mt19937 rng(5);
  std::normal_distribution<double> n;
  Eigen::MatrixXcd r(32, 32);
  for (Eigen::Index i = 0; i < 32; ++i)
    for (Eigen::Index j = 0; j < 32; ++j) r(i, j) = {n(rng), n(rng)};
  const auto op = OperatorMatrix::from_dense(r, MomentumBasis{g});
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(r);
  CHECK(spectral_norm(op) == doctest::Approx(svd.singularValues()(0)).epsilon(1e-6));
}

TEST_CASE("binary dump layout") {
  const MomentumGrid g(16, 2.0);
  const auto x = newton_wigner_position(g, UnitSystem{});
  const auto path = std::filesystem::temp_directory_path() / "fvps_dump_test.bin";
  write_binary(x, path);
  std::ifstream in(path, std::ios::binary);
  std::uint64_t dims[2];
  in.read(reinterpret_cast<char*>(dims), sizeof dims);
  CHECK(dims[0] == 32);
  CHECK(dims[1] == 32);
  const Eigen::MatrixXcd d = x.dense();
  double pair[2];
  in.seekg(static_cast<std::streamoff>(sizeof dims + (3 * 32 + 20) * sizeof pair));
  in.read(reinterpret_cast<char*>(pair), sizeof pair);
  CHECK(pair[0] == d(3, 20).real());
  CHECK(pair[1] == d(3, 20).imag());
  CHECK(std::filesystem::file_size(path) == 16 + 32 * 32 * 16);
  std::filesystem::remove(path);
}

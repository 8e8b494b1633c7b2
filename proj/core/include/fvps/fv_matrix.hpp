#pragma once

#include <filesystem>
#include <memory>
#include <variant>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "fvps/grids.hpp"
#include "fvps/spectral.hpp"

namespace fvps {

/// Mode basis of the doubled (charge x mode) space.
struct MomentumBasis {
  MomentumGrid grid;
  bool operator==(const MomentumBasis&) const = default;
};

/// Landau levels n = 0..n_max at p_z = 0.
struct OscillatorBasis {
  std::size_t n_max = 0;
  bool operator==(const OscillatorBasis&) const = default;
};

/// Landau levels n = 0..n_max times a longitudinal momentum grid. Mode index
/// is n * pz.size() + k.
struct OscillatorPzBasis {
  std::size_t n_max = 0;
  MomentumGrid pz;
  bool operator==(const OscillatorPzBasis&) const = default;
};

using BasisSpec = std::variant<MomentumBasis, OscillatorBasis, OscillatorPzBasis>;

/// Number of modes M (the doubled space has dimension 2M).
std::size_t mode_count(const BasisSpec& basis);

/// Largest doubled dimension the dense oracle accepts.
inline constexpr std::size_t kMaxOracleDimension = 2048;

namespace detail {
struct SignCache;
}

/// Operator on the doubled space, stored sparse. Upper charge block first.
/// Values are immutable; the sign-operator factorization of a Hamiltonian is
/// computed once and shared between copies.
class OperatorMatrix {
 public:
  using Sparse = Eigen::SparseMatrix<cplx>;

  OperatorMatrix(Sparse matrix, BasisSpec basis);

  static OperatorMatrix from_dense(const Eigen::MatrixXcd& dense, BasisSpec basis);
  /// I_2 (x) kernel.
  static OperatorMatrix charge_invariant(const Eigen::MatrixXcd& kernel, BasisSpec basis);
  static OperatorMatrix identity(BasisSpec basis);
  /// Block matrix [[uu, ud], [du, dd]].
  static OperatorMatrix from_blocks(const Eigen::MatrixXcd& uu, const Eigen::MatrixXcd& ud,
                                    const Eigen::MatrixXcd& du, const Eigen::MatrixXcd& dd, BasisSpec basis);

  const Sparse& matrix() const { return m_; }
  const BasisSpec& basis() const { return basis_; }
  std::size_t size() const { return static_cast<std::size_t>(m_.rows()); }
  std::size_t modes() const { return size() / 2; }

  Eigen::MatrixXcd dense() const { return Eigen::MatrixXcd(m_); }
  /// Charge block (0 = upper, 1 = lower).
  Eigen::MatrixXcd block(int row_charge, int col_charge) const;
  Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const;
  double max_abs() const;
  OperatorMatrix adjoint() const;

  friend OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b);
  friend OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b);
  friend OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b);
  friend OperatorMatrix operator*(cplx s, const OperatorMatrix& a);

 private:
  friend OperatorMatrix sign_operator(const OperatorMatrix& h, double energy_scale);

  Sparse m_;
  BasisSpec basis_;
  std::shared_ptr<detail::SignCache> cache_;
};

/// eta = diag(+1..+1, -1..-1).
OperatorMatrix charge_metric(const BasisSpec& basis);

/// Feshbach-Villars Hamiltonian m c^2 tau3 + (tau3 + i tau2) (x) K/(2m) for a
/// kinetic matrix K (p^2, or pi_perp^2 + p_z^2 in a field).
OperatorMatrix fv_hamiltonian(const Eigen::MatrixXcd& kinetic, const UnitSystem& units, BasisSpec basis);

/// Hamiltonian of a free particle (momentum basis) or of the Landau problem
/// (oscillator bases). In a field the transverse kinetic matrix is assembled
/// from pi_x^2 + pi_y^2 in a basis with one extra guard level so that the
/// retained block is free of truncation error.
OperatorMatrix build_hamiltonian(const EnergyModel& model, const BasisSpec& basis);

/// Exact energies E(mode) of the positive branch for a model and basis.
Eigen::VectorXd basis_energies(const EnergyModel& model, const BasisSpec& basis);

/// Lambda = H (H^2)^(-1/2) from dense eigendecompositions of the connected
/// blocks of H. Throws ConditioningError when an eigenvalue is below
/// 1e-12 * energy_scale in magnitude.
OperatorMatrix sign_operator(const OperatorMatrix& h, double energy_scale = 1.0);

OperatorMatrix even_part(const OperatorMatrix& op, const OperatorMatrix& lambda);
OperatorMatrix odd_part(const OperatorMatrix& op, const OperatorMatrix& lambda);
OperatorMatrix commutator(const OperatorMatrix& a, const OperatorMatrix& b);
OperatorMatrix anticommutator(const OperatorMatrix& a, const OperatorMatrix& b);

/// max |H^dagger eta - eta H|.
double pseudo_hermiticity_defect(const OperatorMatrix& h);

/// FV -> FW map U = [(E + mc^2) I + (E - mc^2) tau1] / (2 sqrt(mc^2 E)) and its inverse.
struct FwTransform {
  OperatorMatrix forward;
  OperatorMatrix inverse;
};
FwTransform fw_transform(const EnergyModel& model, const BasisSpec& basis);

/// Spectral derivative matrix on a periodic grid:
/// D_kl = (pi/(n dp)) (-1)^(k-l) cot(pi (k-l)/n), D_kk = 0.
Eigen::MatrixXd spectral_derivative(const MomentumGrid& grid);

/// Standard position i hbar d/dp on both charge blocks.
OperatorMatrix position_operator(const MomentumGrid& grid, const UnitSystem& units);
OperatorMatrix momentum_operator(const MomentumGrid& grid);
/// Newton-Wigner position in the FV representation:
/// i hbar d/dp (x) I + i hbar theta'(p) tau1, theta = ln(E/mc^2)/2.
OperatorMatrix newton_wigner_position(const MomentumGrid& grid, const UnitSystem& units);

/// Landau-level lowering operator a (x) I_pz on both charge blocks.
OperatorMatrix lowering_operator(const BasisSpec& basis);
/// Longitudinal position i hbar d/dp_z on both charge blocks.
OperatorMatrix longitudinal_position(const OscillatorPzBasis& basis, const UnitSystem& units);

/// Embed a positive-branch (FW upper block) mode vector into FV components.
Eigen::VectorXcd lift_to_fv(const Eigen::VectorXcd& positive, const FwTransform& fw);
/// Positive and negative FW components of an FV vector.
Eigen::VectorXcd to_fw(const Eigen::VectorXcd& fv, const FwTransform& fw);

struct KernelReport {
  double even_deviation = 0.0;   ///< max |FW diagonal blocks of O_even - eps o K|
  double odd_deviation = 0.0;    ///< max |FW off-diagonal blocks of O_odd - chi o K|
  double leakage = 0.0;          ///< odd content of O_even plus even content of O_odd
  double max_deviation() const;
  bool pass(double tol) const { return max_deviation() < tol; }
};

/// Compare the oracle even/odd parts of I_2 (x) K with eps o K and chi o K.
KernelReport kernel_relation_check(const Eigen::MatrixXcd& kernel, const EnergyModel& model, const BasisSpec& basis);
/// As above; throws DomainError unless op is charge invariant.
KernelReport kernel_relation_check(const OperatorMatrix& op, const EnergyModel& model);

/// Largest singular value by power iteration on A^dagger A.
double spectral_norm(const OperatorMatrix& a, double rel_tol = 1e-12, int max_iter = 20000);

/// Raw dump: uint64 rows, uint64 cols, then row-major little-endian
/// (re, im) float64 pairs.
void write_binary(const OperatorMatrix& op, const std::filesystem::path& path);

}  // namespace fvps

#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "fvps/fv_matrix.hpp"
#include "fvps/grids.hpp"
#include "fvps/spectral.hpp"

namespace fvps {

enum class Branch { plus, minus };

inline int branch_sign(Branch b) { return b == Branch::plus ? 1 : -1; }
inline Branch opposite(Branch b) { return b == Branch::plus ? Branch::minus : Branch::plus; }

/// Momentum-space amplitudes (phi_+, phi_-), one per charge branch.
/// Charge norm = int (|phi_+|^2 - |phi_-|^2) dp.
class ChargeBranchState {
 public:
  ChargeBranchState(MomentumGrid grid, std::vector<cplx> plus, std::vector<cplx> minus);
  static ChargeBranchState single(MomentumGrid grid, Branch branch, std::vector<cplx> amplitude);
  /// Diagnostic state taking phi_+ from plus_part and phi_- from minus_part.
  /// Such states violate charge superselection; they exist for odd Wigner components.
  static ChargeBranchState two_branch(const ChargeBranchState& plus_part, const ChargeBranchState& minus_part);

  const MomentumGrid& grid() const { return grid_; }
  const std::vector<cplx>& amplitude(Branch b) const { return b == Branch::plus ? plus_ : minus_; }

  double branch_norm(Branch b) const;
  double charge_norm() const { return branch_norm(Branch::plus) - branch_norm(Branch::minus); }
  bool has_branch(Branch b) const { return branch_norm(b) > 0.0; }
  /// The occupied branch of a single-branch state; empty for mixed or empty states.
  std::optional<Branch> occupied_branch() const;

 private:
  MomentumGrid grid_;
  std::vector<cplx> plus_;
  std::vector<cplx> minus_;
};

/// phi(p) ~ exp(-sigma^2 (p - p_bar)^2 / (2 hbar^2) - i q_bar p / hbar).
struct GaussianSpec {
  double sigma = 1.0;
  double p_bar = 0.0;
  double q_bar = 0.0;
  Branch branch = Branch::plus;
};

/// sigma = lambda_c / lambda.
double sigma_from_lambda(double lambda, const UnitSystem& units = {});
double lambda_from_sigma(double sigma, const UnitSystem& units = {});

/// Throws ResolutionError unless dp < hbar/(4 sigma), p_max > |p_bar| + 6 hbar/sigma and the
/// position offset is well inside the conjugate window.
ChargeBranchState gaussian_state(const GaussianSpec& spec, const MomentumGrid& grid, const UnitSystem& units = {});

/// alpha = (q_bar/sigma + i sigma p_bar/hbar)/sqrt(2).
struct CoherentSpec {
  cplx alpha{0.0, 0.0};
  double sigma = 1.0;
  Branch branch = Branch::plus;
};

struct PhaseCenter {
  double q_bar = 0.0;
  double p_bar = 0.0;
};
PhaseCenter coherent_center(const CoherentSpec& spec, const UnitSystem& units = {});

/// Eigenstate of the even part of (q/sigma + i sigma p/hbar)/sqrt(2) within one branch.
ChargeBranchState free_coherent_state(const CoherentSpec& spec, const MomentumGrid& grid, const UnitSystem& units = {});

/// Even part of the standard annihilation operator (q/sigma + i sigma p/hbar)/sqrt(2)
/// on the doubled momentum-grid basis.
OperatorMatrix even_annihilation_operator(double sigma, const MomentumGrid& grid, const UnitSystem& units = {});

/// Weighted norm of (A_even - alpha) psi with psi the FV lift of the state's branch.
double coherent_eigen_residual(const ChargeBranchState& state, const CoherentSpec& spec, const UnitSystem& units = {});

/// Norm of the opposite-charge FW component after applying A_even: zero when the
/// state expands over eigenstates of a single charge sign.
double opposite_branch_leakage(const ChargeBranchState& state, const CoherentSpec& spec,
                               const UnitSystem& units = {});

/// Hermite-Gaussian of width sigma displaced to (q_bar, p_bar); n <= 12.
ChargeBranchState displaced_number_state(int n, double q_bar, double p_bar, double sigma, const MomentumGrid& grid,
                                         const UnitSystem& units = {}, Branch branch = Branch::plus);

/// <a|b> over one branch.
cplx overlap(const ChargeBranchState& a, const ChargeBranchState& b, Branch branch = Branch::plus);

/// Newton-Wigner mean position int phi^* i hbar dphi/dp dp (branch normalised).
double mean_position(const ChargeBranchState& state, Branch branch = Branch::plus, const UnitSystem& units = {});
double mean_momentum(const ChargeBranchState& state, Branch branch = Branch::plus);
/// int f(p) |phi(p)|^2 dp over one branch, divided by the branch norm.
double momentum_expectation(const ChargeBranchState& state, const std::function<double(double)>& f,
                            Branch branch = Branch::plus);

/// Coefficients over Landau levels 0..n_max.
struct FockExpansion {
  std::vector<cplx> coefficients;
  /// |c_{n_max}|^2
  double tail = 0.0;

  std::size_t n_max() const { return coefficients.empty() ? 0 : coefficients.size() - 1; }
  double norm() const;
};

inline constexpr double kFockTailThreshold = 1e-12;
inline constexpr std::size_t kMaxFockLevels = 512;

/// c_n = N^-1 alpha^n / (sqrt(n!) f(n)!), f(n)! = f(1)...f(n).
/// Throws TruncationError (with a suggested cutoff) when |c_{n_max}|^2 >= 1e-12.
FockExpansion rotator_coherent_state(cplx alpha, const EnergyModel& model, std::size_t n_max);

}  // namespace fvps

#include "fvps/rotator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <thread>

#include <Eigen/Eigenvalues>

#include "fft.hpp"
#include "fvps/errors.hpp"

namespace fvps {

namespace {

constexpr std::size_t kMinLevels = 16;

// Even ladder as an FV operator together with the basis transform used to read it.
struct LadderOracle {
  OperatorMatrix hamiltonian;
  OperatorMatrix lower_even;
  FwTransform fw;
};

LadderOracle ladder_oracle(const RotatorModel& model, std::size_t levels) {
  const BasisSpec basis = OscillatorBasis{levels - 1};
  const auto em = model.energy_model();
  auto h = build_hamiltonian(em, basis);
  const auto lambda = sign_operator(h, model.units.rest_energy());
  auto a = even_part(lowering_operator(basis), lambda);
  return {std::move(h), std::move(a), fw_transform(em, basis)};
}

std::vector<cplx> padded(const FockExpansion& state, std::size_t levels) {
  std::vector<cplx> c(std::max(levels, state.coefficients.size()), cplx(0.0));
  std::copy(state.coefficients.begin(), state.coefficients.end(), c.begin());
  return c;
}

void require_tight(const FockExpansion& state) {
  if (state.coefficients.empty()) throw DomainError("orbit_series: empty Fock expansion");
  if (state.tail >= kFockTailThreshold) {
    throw TruncationError("orbit_series: Fock expansion tail " + std::to_string(state.tail) + " is not negligible",
                          2 * state.n_max());
  }
}

template <class Fn>
void parallel_for(std::size_t count, unsigned jobs, Fn fn) {
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(1, count / 1024))));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (count + jobs - 1) / jobs;
  for (unsigned j = 0; j < jobs; ++j) {
    const std::size_t lo = j * chunk, hi = std::min(count, lo + chunk);
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

EnergyModel RotatorModel::energy_model() const { return EnergyModel::landau(b, units); }

double RotatorModel::ell() const { return energy_model().magnetic_length(); }

double RotatorModel::omega() const { return energy_model().cyclotron_frequency(); }

void RotatorModel::validate() const {
  units.validate();
  if (!(b > 0.0)) throw DomainError("RotatorModel: field strength b must be positive");
}

EvenLadder even_ladder(const RotatorModel& model) {
  model.validate();
  const std::size_t levels = model.n_max + 1;
  if (levels < kMinLevels) {
    throw ResolutionError("even_ladder: " + std::to_string(levels) + " levels are too few; use n_max >= 15");
  }
  const auto oracle = ladder_oracle(model, levels);
  const Eigen::MatrixXcd fw = (oracle.fw.forward * oracle.lower_even * oracle.fw.inverse).block(0, 0);
  return {fw, fw.adjoint()};
}

double DeformedCommutator::deviation() const {
  return diagonal.size() == 0 ? 0.0 : (diagonal.array() - 1.0).abs().maxCoeff();
}

DeformedCommutator deformed_commutator(const RotatorModel& model) {
  const auto ladder = even_ladder(model);
  const Eigen::MatrixXcd c = ladder.lower * ladder.raise - ladder.raise * ladder.lower;
  const auto keep = c.rows() - 1;  // the top level has no partner above it
  DeformedCommutator out;
  out.diagonal = c.diagonal().head(keep).real();
  for (Eigen::Index i = 0; i < keep; ++i)
    for (Eigen::Index j = 0; j < keep; ++j)
      if (i != j) out.max_off_diagonal = std::max(out.max_off_diagonal, std::abs(c(i, j)));
  return out;
}

double OrbitSeries::modulation_depth() const {
  if (r.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(r.begin(), r.end());
  return *hi + *lo > 0.0 ? (*hi - *lo) / (*hi + *lo) : 0.0;
}

OrbitSeries orbit_series(const FockExpansion& state, const RotatorModel& model, double t_max, double dt,
                         Spectrum spectrum, unsigned jobs) {
  model.validate();
  require_tight(state);
  if (!(dt > 0.0) || !(t_max >= 0.0)) throw SamplingError("orbit_series: need dt > 0 and t_max >= 0");
  const auto em = model.energy_model();
  const std::size_t levels = state.coefficients.size();
  const double hbar = model.units.hbar;
  const double omega = model.omega();

  // level spacings and ladder elements sqrt(n+1) f(n+1)
  std::vector<double> gap(levels > 0 ? levels - 1 : 0);
  std::vector<cplx> weight(gap.size());
  for (std::size_t n = 0; n + 1 < levels; ++n) {
    const int k = static_cast<int>(n);
    gap[n] = spectrum == Spectrum::equal_spacing ? hbar * omega : landau_spacing(k, 0.0, em);
    weight[n] = std::conj(state.coefficients[n]) * state.coefficients[n + 1] * std::sqrt(static_cast<double>(n + 1)) *
                deformation_f(k + 1, em);
  }
  const double fastest = gap.empty() ? hbar * omega : *std::max_element(gap.begin(), gap.end());
  const double period = 2.0 * std::numbers::pi * hbar / fastest;
  if (dt > period / 8.0) {
    throw SamplingError("orbit_series: dt = " + std::to_string(dt) + " gives fewer than 8 samples per period " +
                        std::to_string(period));
  }
  const auto count = static_cast<std::size_t>(std::floor(t_max / dt + 1e-9)) + 1;
  OrbitSeries s;
  s.omega = omega;
  s.times.resize(count);
  s.r.resize(count);
  s.x.resize(count);
  s.y.resize(count);
  const double scale = std::numbers::sqrt2 * model.ell() / model.units.compton_length();
  parallel_for(count, jobs, [&](std::size_t i) {
    const double t = static_cast<double>(i) * dt;
    cplx acc = 0.0;
    for (std::size_t n = 0; n < gap.size(); ++n) acc += weight[n] * std::polar(1.0, -gap[n] * t / hbar);
    acc *= scale;
    s.times[i] = t;
    s.x[i] = acc.real();
    s.y[i] = acc.imag();
    s.r[i] = std::abs(acc);
  });
  return s;
}

OrbitSeries orbit_series_fv(const FockExpansion& state, const RotatorModel& model, const std::vector<double>& times) {
  model.validate();
  require_tight(state);
  const auto c0 = padded(state, kMinLevels);
  const std::size_t levels = c0.size();
  const auto oracle = ladder_oracle(model, levels);
  const Eigen::VectorXcd positive = Eigen::Map<const Eigen::VectorXcd>(c0.data(), static_cast<Eigen::Index>(levels));
  const Eigen::VectorXcd psi0 = lift_to_fv(positive, oracle.fw);

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(oracle.hamiltonian.dense());
  if (es.info() != Eigen::Success) throw ConditioningError("orbit_series_fv: eigendecomposition failed");
  const Eigen::MatrixXcd& v = es.eigenvectors();
  const Eigen::VectorXcd y = v.partialPivLu().solve(psi0);
  const Eigen::MatrixXcd eta_a = charge_metric(OscillatorBasis{levels - 1}).dense() * oracle.lower_even.dense();

  const double hbar = model.units.hbar;
  const double scale = std::numbers::sqrt2 * model.ell() / model.units.compton_length();
  OrbitSeries s;
  s.omega = model.omega();
  s.times = times;
  for (double t : times) {
    Eigen::VectorXcd phased(y.size());
    for (Eigen::Index k = 0; k < y.size(); ++k) phased(k) = y(k) * std::exp(cplx(0.0, -t / hbar) * es.eigenvalues()(k));
    const Eigen::VectorXcd psi = v * phased;
    const cplx a = scale * psi.dot(eta_a * psi);  // dot conjugates the left operand
    s.x.push_back(a.real());
    s.y.push_back(a.imag());
    s.r.push_back(std::abs(a));
  }
  return s;
}

std::optional<SpectralPeak> ModulationSpectrum::dominant() const {
  if (peaks.empty()) return std::nullopt;
  return peaks.front();
}

std::optional<SpectralPeak> ModulationSpectrum::lowest() const {
  if (peaks.empty()) return std::nullopt;
  return *std::min_element(peaks.begin(), peaks.end(),
                           [](const SpectralPeak& a, const SpectralPeak& b) { return a.frequency < b.frequency; });
}

ModulationSpectrum modulation_spectrum(const std::vector<double>& values, double dt, double significance) {
  if (!(dt > 0.0)) throw SamplingError("modulation_spectrum: dt must be positive");
  const std::size_t n = values.size();
  if (n < 8) throw SamplingError("modulation_spectrum: need at least 8 samples");

  // least-squares line
  double st = 0, sv = 0, stt = 0, stv = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto t = static_cast<double>(i);
    st += t;
    sv += values[i];
    stt += t * t;
    stv += t * values[i];
  }
  const auto nn = static_cast<double>(n);
  const double slope = (nn * stv - st * sv) / (nn * stt - st * st);
  const double icept = (sv - slope * st) / nn;

  double level = 0.0;
  for (double v : values) level = std::max(level, std::abs(v));
  std::vector<cplx> in(n), out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double hann = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n - 1));
    in[i] = hann * (values[i] - (icept + slope * static_cast<double>(i)));
  }
  detail::dft(in, out, -1);

  ModulationSpectrum sp;
  const std::size_t half = n / 2;
  const double df = 2.0 * std::numbers::pi / (nn * dt);
  for (std::size_t k = 0; k <= half; ++k) {
    sp.frequency.push_back(df * static_cast<double>(k));
    sp.magnitude.push_back(2.0 * std::abs(out[k]) / nn);
  }
  // residue left by detrending a constant is rounding noise
  const double floor = 1e-9 * std::max(level, 1e-300);
  std::vector<SpectralPeak> cand;
  for (std::size_t k = 1; k < half; ++k) {
    const double m = sp.magnitude[k];
    if (m > sp.magnitude[k - 1] && m >= sp.magnitude[k + 1] && m > floor) cand.push_back({sp.frequency[k], m});
  }
  std::sort(cand.begin(), cand.end(), [](const SpectralPeak& a, const SpectralPeak& b) { return a.amplitude > b.amplitude; });
  if (!cand.empty()) {
    const double top = cand.front().amplitude;
    for (const auto& p : cand)
      if (p.amplitude >= significance * top) sp.peaks.push_back(p);
    const double duration = nn * dt;
    sp.resolution_warning = duration * sp.peaks.front().frequency < 4.0 * 2.0 * std::numbers::pi;
  }
  return sp;
}

ModulationSpectrum modulation_spectrum(const OrbitSeries& series, double significance) {
  if (series.times.size() < 2) throw SamplingError("modulation_spectrum: series too short");
  return modulation_spectrum(series.r, series.times[1] - series.times[0], significance);
}

double collapse_rate(const OrbitSeries& series) {
  if (series.r.size() < 3) throw SamplingError("collapse_rate: series too short");
  const double r0 = series.r.front();
  if (!(r0 > 0.0)) throw DomainError("collapse_rate: zero initial radius");
  // sum over the initial descent of ln(r/r0) = -t^2 / (2 tau^2), fitted through the origin
  double num = 0.0, den = 0.0;
  for (std::size_t i = 1; i < series.r.size(); ++i) {
    if (series.r[i] > series.r[i - 1] || series.r[i] < 0.2 * r0) break;
    const double t2 = series.times[i] * series.times[i];
    num += t2 * std::log(series.r[i] / r0);
    den += t2 * t2;
  }
  if (den == 0.0 || num >= 0.0) return 0.0;
  const double inv_two_tau2 = -num / den;
  return std::sqrt(2.0 * inv_two_tau2);
}

double translational_coupling(const RotatorModel& model) {
  model.validate();
  const MomentumGrid pz = model.pz.value_or(MomentumGrid(32, 4.0 * model.units.momentum_scale()));
  const OscillatorPzBasis joint{model.n_max, pz};
  const BasisSpec basis = joint;
  if (2 * mode_count(basis) > kMaxOracleDimension) {
    throw ConfigurationError("translational_coupling: joint basis exceeds " + std::to_string(kMaxOracleDimension) +
                             " doubled modes");
  }
  const auto h = build_hamiltonian(model.energy_model(), basis);
  const auto lambda = sign_operator(h, model.units.rest_energy());
  const auto a = even_part(lowering_operator(basis), lambda);
  const auto z = even_part(longitudinal_position(joint, model.units), lambda);
  return spectral_norm(commutator(a, z));
}

}  // namespace fvps

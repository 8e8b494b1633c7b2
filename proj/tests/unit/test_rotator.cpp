#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fvps/errors.hpp"
#include "fvps/rotator.hpp"

using namespace fvps;

namespace {

Eigen::MatrixXcd undeformed(std::size_t levels) {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(levels, levels);
  for (std::size_t n = 0; n + 1 < levels; ++n) a(n, n + 1) = std::sqrt(static_cast<double>(n + 1));
  return a;
}

}  // namespace

TEST_CASE("even ladder carries the deformation function") {
  const RotatorModel m{1.0, 40};
  const auto l = even_ladder(m);
  CHECK(std::abs(l.lower(0, 1) - deformation_f(1, m.energy_model())) < 1e-6);
  CHECK(std::abs(l.lower(0, 1).real() - 1.01505) < 1e-5);
  for (int n = 0; n < 40; ++n) {
    CHECK(std::abs(l.lower(n, n + 1) - std::sqrt(n + 1.0) * deformation_f(n + 1, m.energy_model())) < 1e-6);
  }
  // nothing off the first superdiagonal
  Eigen::MatrixXcd rest = l.lower;
  for (int n = 0; n < 40; ++n) rest(n, n + 1) = 0.0;
  CHECK(rest.cwiseAbs().maxCoeff() < 1e-10);
  // annihilates the ground state
  CHECK(l.lower.col(0).norm() < 1e-10);
  CHECK((l.raise - l.lower.adjoint()).norm() == 0.0);

  const auto weak = even_ladder(RotatorModel{1e-8, 40});
  CHECK((weak.lower - undeformed(41)).norm() < 1e-5);

  CHECK_THROWS_AS(even_ladder(RotatorModel{1.0, 10}), ResolutionError);
  CHECK_THROWS_AS(even_ladder(RotatorModel{0.0, 40}), DomainError);
}

TEST_CASE("deformed commutator") {
  const auto c = deformed_commutator(RotatorModel{1.0, 128});
  const double f1 = deformation_f(1, EnergyModel::landau(1.0));
  CHECK(std::abs(c.diagonal(0) - f1 * f1) < 1e-5);
  CHECK(c.diagonal(0) == doctest::Approx(1.0304).epsilon(1e-4));
  CHECK(c.deviation() > 1e-2);
  CHECK(c.max_off_diagonal < 1e-10);
  for (Eigen::Index n = 1; n < c.diagonal.size(); ++n) {
    CHECK(std::abs(c.diagonal(n) - 1.0) < std::abs(c.diagonal(n - 1) - 1.0));
  }
  CHECK(deformed_commutator(RotatorModel{1e-8, 128}).deviation() < 1e-5);

  double prev = 0.0;
  for (double b : {0.1, 0.5, 1.0, 2.0}) {
    const double d = deformed_commutator(RotatorModel{b, 64}).deviation();
    CHECK(d > prev);
    prev = d;
  }
}

TEST_CASE("orbit radius") {
  const RotatorModel m{0.5, 64};
  const auto st = rotator_coherent_state(3.0, m.energy_model(), 64);

  const auto flat = orbit_series(st, m, 2000.0, 0.1, Spectrum::equal_spacing);
  const auto [lo, hi] = std::minmax_element(flat.r.begin(), flat.r.end());
  CHECK((*hi - *lo) / *hi < 1e-10);

  const auto rel = orbit_series(st, m, 2000.0, 0.1);
  CHECK(rel.r.front() == doctest::Approx(std::numbers::sqrt2 * m.ell() * 3.0).epsilon(1e-8));
  CHECK(rel.modulation_depth() > 0.01);
  const auto sp = modulation_spectrum(rel);
  REQUIRE(sp.dominant());
  CHECK(sp.dominant()->frequency < 0.2 * m.omega());
  CHECK(collapse_rate(rel) > 0.0);
  CHECK(collapse_rate(flat) == 0.0);

  const auto vacuum = rotator_coherent_state(0.0, m.energy_model(), 64);
  const auto still = orbit_series(vacuum, m, 100.0, 0.1);
  for (double r : still.r) CHECK(r == 0.0);

  // threads change nothing
  const auto par = orbit_series(st, m, 2000.0, 0.1, Spectrum::relativistic, 4);
  CHECK(par.r == rel.r);

  CHECK_THROWS_AS(orbit_series(st, m, 100.0, 5.0), SamplingError);
  FockExpansion loose = st;
  loose.tail = 1e-3;
  CHECK_THROWS_AS(orbit_series(loose, m, 10.0, 0.1), TruncationError);
}

TEST_CASE("two orbit pipelines agree") {
  const RotatorModel m{1.0, 48};
  const auto st = rotator_coherent_state(cplx(2.0, 1.0), m.energy_model(), 48);
  std::vector<double> ts;
  for (int i = 0; i < 300; ++i) ts.push_back(0.7 * i);
  const auto a = orbit_series(st, m, 0.7 * 299, 0.7);
  const auto b = orbit_series_fv(st, m, ts);
  REQUIRE(a.size() == b.size());
  double err = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    err = std::max({err, std::abs(a.x[i] - b.x[i]), std::abs(a.y[i] - b.y[i]), std::abs(a.r[i] - b.r[i])});
  }
  CHECK(err < 1e-8);
}

TEST_CASE("envelope frequency") {
  double prev = 1e300;
  for (double b : {0.5, 1.0, 2.0}) {
    const RotatorModel m{b, 96};
    const auto st = rotator_coherent_state(3.0, m.energy_model(), 96);
    const double period = 2 * std::numbers::pi / m.omega();
    const auto sp = modulation_spectrum(orbit_series(st, m, 400 * period, period / 16));
    REQUIRE(sp.lowest());
    const double f = sp.lowest()->frequency / m.omega();
    CHECK(f < prev);
    prev = f;
  }
  const RotatorModel weak{1e-4, 64};
  const auto st = rotator_coherent_state(3.0, weak.energy_model(), 64);
  const double period = 2 * std::numbers::pi / weak.omega();
  const auto sp = modulation_spectrum(orbit_series(st, weak, 2.5e9, period / 8, Spectrum::relativistic, 4));
  REQUIRE(sp.dominant());
  CHECK(sp.dominant()->frequency < 1e-3 * weak.omega());
  CHECK_FALSE(sp.resolution_warning);
}

TEST_CASE("modulation spectrum basics") {
  const double dt = 0.05, w = 1.3;
  std::vector<double> s, c(2048, 4.2);
  for (int i = 0; i < 2048; ++i) s.push_back(2.0 + std::sin(w * i * dt));
  const auto sp = modulation_spectrum(s, dt);
  REQUIRE(sp.peaks.size() == 1);
  const double bin = 2 * std::numbers::pi / (2048 * dt);
  CHECK(std::abs(sp.peaks[0].frequency - w) <= bin);
  CHECK(modulation_spectrum(c, dt).peaks.empty());

  std::vector<double> brief;
  for (int i = 0; i < 64; ++i) brief.push_back(std::sin(0.1 * i));
  CHECK(modulation_spectrum(brief, 1.0).resolution_warning);
}

TEST_CASE("translational coupling") {
  CHECK(translational_coupling(RotatorModel{1e-8, 31}) < 1e-4);
  double prev = 0.0;
  for (double b : {0.1, 0.5, 1.0}) {
    const double v = translational_coupling(RotatorModel{b, 31});
    CHECK(v > prev);
    prev = v;
  }
  CHECK(prev > 1e-3);
  RotatorModel big{1.0, 63};
  CHECK_THROWS_AS(translational_coupling(big), ConfigurationError);
}

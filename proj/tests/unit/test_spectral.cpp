#include <cmath>
#include <random>

#include "doctest.h"
#include "fvps/errors.hpp"
#include "fvps/spectral.hpp"

using namespace fvps;

TEST_CASE("energy") {
  CHECK(energy(0.0) == doctest::Approx(1.0));
  CHECK(energy(1.0) == doctest::Approx(1.41421356).epsilon(1e-9));
  CHECK(std::abs(energy(1000.0) / 1000.0 - 1.0) < 1e-3);
  CHECK(energy(-2.5) == energy(2.5));
  const UnitSystem u{2.0, 3.0, 0.5};
  CHECK(energy(0.0, u) == doctest::Approx(18.0));
}

TEST_CASE("eps and chi factors") {
  const double r3 = std::sqrt(3.0);
  CHECK(eps_factor(0.7, 0.7) == 1.0);
  CHECK(chi_factor(0.7, 0.7) == 0.0);
  CHECK(eps_factor(0.0, r3) == doctest::Approx(3.0 / (2.0 * std::sqrt(2.0))).epsilon(1e-12));
  CHECK(eps_factor(0.0, r3) == doctest::Approx(1.06066).epsilon(1e-5));
  CHECK(chi_factor(0.0, r3) == doctest::Approx(-0.35355).epsilon(1e-4));
  CHECK(chi_factor(r3, 0.0) == -chi_factor(0.0, r3));

  std::mt19937 rng(3);
  std::uniform_real_distribution<double> d(-50, 50);
  for (int i = 0; i < 1000; ++i) {
    const double a = d(rng), b = d(rng);
    const double e = eps_factor(a, b), c = chi_factor(a, b);
    CHECK(std::abs(e * e - c * c - 1.0) < 1e-12);
    CHECK(e >= 1.0);
    CHECK(e == eps_factor(b, a));
  }
}

TEST_CASE("log eps mixed derivative equals purity rhs") {
  const double h = 1e-4;
  auto le = [](double a, double b) { return std::log(eps_factor(a, b)); };
  auto mixed = [&](double a, double b) {
    return (le(a + h, b + h) - le(a + h, b - h) - le(a - h, b + h) + le(a - h, b - h)) / (4 * h * h);
  };
  CHECK(mixed(1.0, 1.0) == doctest::Approx(-0.0625).epsilon(1e-6));
  double worst = 0;
  for (int i = 0; i < 32; ++i)
    for (int j = 0; j < 32; ++j) {
      const double a = -3 + 6.0 * i / 31, b = -3 + 6.0 * j / 31;
      worst = std::max(worst, std::abs(mixed(a, b) - purity_rhs(a, b)));
    }
  CHECK(worst < 1e-6);
}

TEST_CASE("purity rhs values") {
  CHECK(purity_rhs(0.0, 3.0) == 0.0);
  CHECK(purity_rhs(1.0, 1.0) == doctest::Approx(-0.0625));
  CHECK(purity_rhs(1.0, -1.0) == doctest::Approx(0.0625));
  CHECK(purity_rhs(0.3, 2.0) == purity_rhs(2.0, 0.3));
}

TEST_CASE("landau spectrum") {
  const auto m = EnergyModel::landau(1.0);
  CHECK(landau_energy(0, 0, m) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(landau_energy(1, 0, m) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(landau_energy(2, 0, m) == doctest::Approx(std::sqrt(6.0)).epsilon(1e-12));
  CHECK(landau_energy(1, 0, m) - landau_energy(0, 0, m) == doctest::Approx(0.58579).epsilon(1e-5));
  CHECK(landau_energy(2, 0, m) - landau_energy(1, 0, m) == doctest::Approx(0.44949).epsilon(1e-5));
  CHECK_THROWS_AS(landau_energy(-1, 0, m), DomainError);
  CHECK_THROWS_AS(EnergyModel::landau(-0.1), DomainError);

  for (int n = 0; n < 60; ++n) {
    CHECK(landau_spacing(n + 1, 0.3, m) < landau_spacing(n, 0.3, m));
    CHECK(landau_energy(n + 1, 0.3, m) > landau_energy(n, 0.3, m));
  }
  const auto weak = EnergyModel::landau(1e-8);
  for (int n : {0, 3, 10}) {
    const double hw = weak.cyclotron_frequency() * weak.units.hbar;
    CHECK(std::abs((landau_energy(n, 0, weak) - 1.0) / hw - (n + 0.5)) < 1e-6);
  }
}

TEST_CASE("deformation function") {
  const auto m = EnergyModel::landau(1.0);
  const double expect = (std::sqrt(2.0) + 2.0) / (2.0 * std::pow(2.0, 0.75));
  CHECK(deformation_f(1, m) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(deformation_f(1, m) == doctest::Approx(1.01505).epsilon(1e-5));
  CHECK_THROWS_AS(deformation_f(0, m), DomainError);
  for (int n = 1; n < 64; ++n) {
    CHECK(deformation_f(n + 1, m) < deformation_f(n, m));
    CHECK(deformation_f(n, m) >= 1.0);
  }
  const auto weak = EnergyModel::landau(1e-8);
  for (int n : {1, 5, 40}) CHECK(std::abs(deformation_f(n, weak) - 1.0) < 1e-6);
  CHECK(deformation_f(3, m) ==
        doctest::Approx(eps_from_energies(landau_energy(2, 0, m), landau_energy(3, 0, m))).epsilon(1e-14));
}

#include <doctest.h>

#include <cmath>
#include <future>
#include <random>

#include "oracles.hpp"
#include "qflux/algebra.hpp"

using namespace qflux;

namespace {

const DeformationSpec kFlat = DeformationSpec::undeformed();
const DeformationSpec kTanUnit = DeformationSpec::kempf_tan(1.0);

DeformationSpec tan_like_series(int odd_terms, Real beta, Real bound) {
  return DeformationSpec::user_series(tangent_odd_coeffs<Real>(odd_terms), beta, bound);
}

}  // namespace

TEST_CASE("deformation function built-ins") {
  CHECK(deformation_function(kFlat, 0.7) == 0.7);
  CHECK(deformation_function(kTanUnit, pi / 4) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(deformation_function(kTanUnit, 0.0) == 0.0);
  // odd, bit-exactly
  CHECK(deformation_function(kTanUnit, -0.3) == -deformation_function(kTanUnit, 0.3));
  CHECK_THROWS_AS((void)deformation_function(kTanUnit, pi / 2), std::domain_error);
  CHECK_THROWS_AS((void)deformation_function(kTanUnit, -2.0), std::domain_error);
}

TEST_CASE("user-series deformation evaluates its truncated series") {
  const auto spec = tan_like_series(8, 1.0, 1.2);
  for (Real u : {0.05, 0.2, 0.4}) {
    CHECK(deformation_function(spec, u) == doctest::Approx(std::tan(u)).epsilon(1e-12));
    CHECK(deformation_derivative(spec, u) ==
          doctest::Approx(1 + std::tan(u) * std::tan(u)).epsilon(1e-12));
  }
}

TEST_CASE("commutator factor") {
  CHECK(commutator_factor(kTanUnit, 0.0) == 1.0);
  CHECK(commutator_factor(kFlat, 5.3) == 1.0);

  // oracle: compose the library inverse with the derivative of tan
  const Real u = std::atan(1.0);
  const Real sec2 = 1.0 / (std::cos(u) * std::cos(u));
  CHECK(sec2 == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(commutator_factor(kTanUnit, 1.0) == doctest::Approx(2.0).epsilon(1e-13));

  SUBCASE("numerical inversion path matches the closed form") {
    const auto spec = tan_like_series(24, 1.0, 0.9);
    for (Real p : {0.1, 0.35, 0.6}) {
      const Real expected = 1 + p * p;  // tan relation: F(P) = 1 + beta P^2
      CHECK(commutator_factor(spec, p) == doctest::Approx(expected).epsilon(1e-10));
    }
    CHECK_THROWS_AS((void)commutator_factor(spec, 100.0), std::domain_error);
  }
}

TEST_CASE("kinetic energy") {
  CHECK(kinetic_energy(kFlat, 1.0) == 0.5);
  CHECK(kinetic_energy(kTanUnit, pi / 4) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(kinetic_energy(kTanUnit, 0.0) == 0.0);
  CHECK_THROWS_AS((void)kinetic_energy(kTanUnit, 2.0), std::domain_error);

  SUBCASE("cross-check against the series form") {
    const auto coeffs = taylor_coefficients(kTanUnit, 16);
    const Real series = kinetic_energy_series(coeffs, 1.0, 1.0, pi / 4, 16);
    CHECK(kinetic_energy(kTanUnit, pi / 4) == doctest::Approx(series).epsilon(1e-9));
  }

  SUBCASE("even in p, bit-exactly") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<Real> draw(0.0, 0.9 * kTanUnit.momentum_bound());
    for (int i = 0; i < 100; ++i) {
      const Real p = draw(rng);
      CHECK(kinetic_energy(kTanUnit, -p) == kinetic_energy(kTanUnit, p));
    }
  }
}

TEST_CASE("kinetic derivative") {
  CHECK(kinetic_derivative(kFlat, 1.0) == 1.0);
  CHECK(kinetic_derivative(kTanUnit, pi / 4) == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(kinetic_derivative(kTanUnit, 0.0) == 0.0);

  SUBCASE("matches a central finite difference of the energy") {
    std::mt19937 rng(11);
    for (const auto& spec : {kFlat, kTanUnit, DeformationSpec::kempf_tan(0.25, 1.0, 2.0)}) {
      const Real window =
          std::isfinite(spec.momentum_bound()) ? 0.9 * spec.momentum_bound() : 3.0;
      std::uniform_real_distribution<Real> draw(-window, window);
      for (int i = 0; i < 100; ++i) {
        const Real p = draw(rng);
        const Real fd =
            oracles::central_derivative([&](Real q) { return kinetic_energy(spec, q); }, p);
        CHECK(kinetic_derivative(spec, p) ==
              doctest::Approx(fd).epsilon(1e-7).scale(std::max(1.0, std::abs(fd))));
      }
    }
  }

  SUBCASE("odd in p, bit-exactly") {
    std::mt19937 rng(13);
    std::uniform_real_distribution<Real> draw(0.0, 0.9 * kTanUnit.momentum_bound());
    for (int i = 0; i < 100; ++i) {
      const Real p = draw(rng);
      CHECK(kinetic_derivative(kTanUnit, -p) == -kinetic_derivative(kTanUnit, p));
    }
  }
}

TEST_CASE("kinetic series partial sums agree with the closed energy") {
  const auto coeffs = taylor_coefficients(kTanUnit, 16);
  std::mt19937 rng(17);
  std::uniform_real_distribution<Real> draw(-0.5, 0.5);  // sqrt(beta)|p| <= 0.5
  for (int i = 0; i < 100; ++i) {
    const Real p = draw(rng);
    const Real closed = kinetic_energy(kTanUnit, p);
    const Real series = kinetic_energy_series(coeffs, 1.0, 1.0, p, 16);
    CHECK(series == doctest::Approx(closed).epsilon(1e-10));
  }
}

TEST_CASE("Taylor coefficients of the kinetic series") {
  SUBCASE("identity deformation") {
    const auto c = taylor_coefficients(kFlat, 3);
    CHECK(c.coeff(1) == 1.0);
    CHECK(c.coeff(2) == 0.0);
    CHECK(c.coeff(3) == 0.0);
  }
  SUBCASE("tan representation") {
    const auto c = taylor_coefficients(kTanUnit, 3);
    CHECK(c.coeff(1) == 1.0);
    CHECK(c.coeff(2) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(c.coeff(3) == doctest::Approx(17.0 / 45.0).epsilon(1e-15));
  }
  SUBCASE("leading coefficient is exactly one for every algebra") {
    CHECK(taylor_coefficients(kFlat, 1).coeff(1) == 1.0);
    CHECK(taylor_coefficients(kTanUnit, 1).coeff(1) == 1.0);
    CHECK(taylor_coefficients(tan_like_series(4, 0.5, 1.0), 1).coeff(1) == 1.0);
  }
  SUBCASE("insufficient user series is rejected") {
    const auto spec = tan_like_series(2, 1.0, 1.0);
    CHECK_THROWS_AS((void)taylor_coefficients(spec, 3), std::invalid_argument);
  }
  SUBCASE("order must be positive") {
    CHECK_THROWS_AS((void)taylor_coefficients(kTanUnit, 0), std::invalid_argument);
  }
}

TEST_CASE("divided-difference kernel") {
  CHECK(divided_difference_kernel(kFlat, 3.0, 1.0) == 2.0);

  const Real p0 = 0.4;
  CHECK(divided_difference_kernel(kTanUnit, p0, p0) == kinetic_derivative(kTanUnit, p0));

  // T even: opposite momenta give an exactly vanishing kernel
  CHECK(divided_difference_kernel(kTanUnit, pi / 4, -pi / 4) == 0.0);

  SUBCASE("symmetric in its arguments, exactly as computed") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<Real> draw(-1.4, 1.4);
    for (int i = 0; i < 200; ++i) {
      const Real p = draw(rng), q = draw(rng);
      CHECK(divided_difference_kernel(kTanUnit, p, q) ==
            divided_difference_kernel(kTanUnit, q, p));
    }
  }

  SUBCASE("continuous across the diagonal switch") {
    const Real eps = default_diagonal_threshold(kTanUnit);
    for (Real p : {-0.9, -0.2, 0.3, 1.1}) {
      const Real v = kinetic_derivative(kTanUnit, p);
      CHECK(divided_difference_kernel(kTanUnit, p, p + 2 * eps) == doctest::Approx(v).epsilon(1e-8));
      CHECK(divided_difference_kernel(kTanUnit, p, p + eps / 2) == doctest::Approx(v).epsilon(1e-8));
    }
  }

  SUBCASE("domain checked") {
    CHECK_THROWS_AS((void)divided_difference_kernel(kTanUnit, 2.0, 0.0), std::domain_error);
  }
}

TEST_CASE("vanishing deformation limit") {
  const auto nearly_flat = DeformationSpec::kempf_tan(1e-12);
  for (Real p : {0.3, 1.0, 2.5}) {
    CHECK(kinetic_energy(nearly_flat, p) == doctest::Approx(p * p / 2).epsilon(1e-9));
  }
  // beta = 0 is an exact branch, not a limit
  const auto flat_tan = DeformationSpec::kempf_tan(0.0);
  CHECK(kinetic_energy(flat_tan, 1.7) == 1.7 * 1.7 / 2);
  CHECK(kinetic_derivative(flat_tan, 1.7) == 1.7);
}

TEST_CASE("spec admissibility") {
  CHECK_THROWS_AS((void)DeformationSpec::user_series({2.0}, 1.0, 1.0), std::invalid_argument);
  // f' = 1 - 30 u^2 turns negative inside the domain
  CHECK_THROWS_AS((void)DeformationSpec::user_series({1.0, -10.0}, 1.0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)DeformationSpec::kempf_tan(-1.0), std::invalid_argument);
  CHECK(kTanUnit.momentum_bound() == doctest::Approx(pi / 2).epsilon(1e-15));
  CHECK(kTanUnit.minimal_length() == 1.0);
}

TEST_CASE("specs are freely shareable across threads") {
  const auto spec = DeformationSpec::kempf_tan(0.5);
  auto worker = [&spec](Real lo) {
    Real acc = 0;
    for (int i = 0; i < 1000; ++i) acc += kinetic_energy(spec, lo + i * 1e-4);
    return acc;
  };
  auto f1 = std::async(std::launch::async, worker, 0.1);
  auto f2 = std::async(std::launch::async, worker, 0.2);
  const Real r1 = f1.get(), r2 = f2.get();
  CHECK(r1 == worker(0.1));
  CHECK(r2 == worker(0.2));
}

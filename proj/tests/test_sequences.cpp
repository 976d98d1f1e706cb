#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "rwapg/schedule.hpp"

using namespace rwapg;

namespace {
constexpr double kGolden = 1.6180339887498948482;  // (1 + sqrt(5))/2
}

TEST_CASE("chambolle-dossal closed forms hit the frozen values") {
  const Schedule s = Schedule::chambolle_dossal(2.0);
  CHECK(s.q() == 0.0);
  CHECK(s.alpha(0) == 1.0);
  CHECK(s.alpha(1) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(s.alpha(2) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(s.alpha(3) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(s.rho(0) == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
  CHECK(s.rho(1) == doctest::Approx(9.0 / 8.0).epsilon(1e-15));

  const Schedule s3 = Schedule::chambolle_dossal(3.0);
  CHECK(s3.alpha(0) == 1.0);
  CHECK(s3.alpha(1) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(s3.alpha(2) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(s3.parameter_a() == 3.0);

  CHECK_THROWS_AS(Schedule::chambolle_dossal(1.9), std::invalid_argument);
  CHECK_THROWS_AS(Schedule::chambolle_dossal(-2.0), std::invalid_argument);
  CHECK(s.max_alpha_index() == std::numeric_limits<long>::max());
}

TEST_CASE("chambolle-dossal relaxation stays at or above one") {
  for (double a : {2.0, 3.0, 5.0, 11.5}) {
    const Schedule s = Schedule::chambolle_dossal(a);
    for (long k = 0; k < 1000; ++k) {
      CHECK(s.rho(k) >= 1.0);
    }
  }
}

TEST_CASE("constant schedule closed forms and admissible range") {
  const Schedule s = Schedule::constant(1.0, 0.25);
  CHECK(s.alpha(0) == 0.5);
  CHECK(s.alpha(777) == 0.5);
  CHECK(s.rho(3) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(s.constant_theta() == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(s.parameter_r() == 1.0);

  // theta = (1 - sqrt(q)/r)(1 - r sqrt(q))/(1 - q) for off-center r.
  const Schedule fast = Schedule::constant(1.2, 0.25);
  const double expected =
      (1.0 - 0.5 / 1.2) * (1.0 - 1.2 * 0.5) / (1.0 - 0.25);
  CHECK(fast.constant_theta() == doctest::Approx(expected).epsilon(1e-15));

  CHECK_THROWS_AS(Schedule::constant(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(Schedule::constant(1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Schedule::constant(0.5, 0.25), std::invalid_argument);  // r = sqrt(q)
  CHECK_THROWS_AS(Schedule::constant(2.0, 0.25), std::invalid_argument);  // r = 1/sqrt(q)
  CHECK_THROWS_AS(Schedule::constant(0.1, 0.25), std::invalid_argument);
}

TEST_CASE("constant schedule dichotomy: relaxation exceeds one exactly for r > 1") {
  const double q = 0.01;
  for (int i = 0; i < 60; ++i) {
    // r sweeps the open admissible interval (sqrt(q), 1/sqrt(q)) = (0.1, 10).
    const double r = 0.11 + (9.78 * i) / 59.0;
    const Schedule s = Schedule::constant(r, q);
    const double rho = s.rho(0);
    if (r > 1.0) {
      CHECK(rho > 1.0);
    } else if (r < 1.0) {
      CHECK(rho < 1.0);
    }
    // One-step decay identity: max(rho, 1)(1 - alpha) = 1 - min(q/alpha, alpha).
    const double alpha = s.alpha(1);
    const double lhs = std::max(rho, 1.0) * (1.0 - alpha);
    const double rhs = 1.0 - std::min(q / alpha, alpha);
    CHECK(std::abs(lhs - rhs) <= 1e-12);
  }
  CHECK(Schedule::constant(1.0, q).rho(5) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("inverted reciprocal schedule follows the classic t-sequence") {
  const Schedule s = Schedule::inverted_fista(300);
  CHECK(s.q() == 0.0);
  CHECK(s.alpha(0) == 1.0);
  CHECK(s.alpha(1) == doctest::Approx(1.0 / kGolden).epsilon(1e-15));
  double t = 1.0;
  for (long k = 1; k <= 300; ++k) {
    t = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    CHECK(std::abs(s.alpha(k) - 1.0 / t) <= 1e-14);
  }
  CHECK(s.max_alpha_index() == 300);
  CHECK_THROWS_AS(s.alpha(301), std::out_of_range);

  // Equality branch of the recursion makes the relaxation exactly one.
  for (long k = 0; k < 100; ++k) {
    CHECK(std::abs(s.rho(k) - 1.0) <= 1e-12);
  }
}

TEST_CASE("inverted schedule check certifies recursion and rolling product") {
  const Schedule s = Schedule::inverted_fista(150);
  const TSequenceReport rep = inverted_fista_check(s, 100);
  CHECK(rep.premises_ok);
  CHECK(rep.recursion_ok);
  CHECK(rep.max_product_deviation <= 1e-12);
  REQUIRE(rep.rolling_product.size() >= 101);
  // Product collapses to alpha_k^2.
  for (long k = 1; k <= 100; ++k) {
    const double a = s.alpha(k);
    CHECK(std::abs(rep.rolling_product[k] / (a * a) - 1.0) <= 1e-12);
  }

  // Schedules violating the premises are reported, not certified: a nonzero
  // curvature ratio is a global violation, a dip of rho below one is indexed.
  const Schedule wrong_q = Schedule::constant(1.0, 0.25);
  const TSequenceReport bad_q = inverted_fista_check(wrong_q, 50);
  CHECK(!bad_q.premises_ok);
  CHECK(!bad_q.reason.empty());

  const Schedule dip = Schedule::custom({1.0, 0.9, 0.3}, 0.0);
  const TSequenceReport bad_rho = inverted_fista_check(dip, 2);
  CHECK(!bad_rho.premises_ok);
  CHECK(bad_rho.first_bad_index == 1);
  CHECK(!bad_rho.reason.empty());
}

TEST_CASE("custom schedules expose their array and derive rho") {
  const std::vector<double> alphas{1.0, 2.0 / 3.0, 0.5, 0.4};
  const Schedule s = Schedule::custom(alphas, 0.0);
  CHECK(s.alpha(0) == 1.0);
  CHECK(s.alpha(3) == 0.4);
  CHECK(s.max_alpha_index() == 3);
  CHECK_THROWS_AS(s.alpha(4), std::out_of_range);
  // Derived rho agrees with the chambolle-dossal closed form it mimics.
  const Schedule cd = Schedule::chambolle_dossal(2.0);
  for (long k = 0; k <= 2; ++k) {
    CHECK(std::abs(s.rho(k) - cd.rho(k)) <= 1e-14);
  }
  CHECK_THROWS_AS(Schedule::custom({}, 0.0), std::invalid_argument);
}

TEST_CASE("rho from consecutive alphas: values and degenerate inputs") {
  CHECK(rho_from_alpha(2.0 / 3.0, 0.5, 0.0) == doctest::Approx(9.0 / 8.0).epsilon(1e-15));
  // q = alpha_next^2 makes the numerator alpha_next^2 (1 - alpha_next)... not
  // a special value; spot-check against the defining recurrence instead.
  const double a_k = 0.3, a_next = 0.25, q = 0.04;
  const double rho = rho_from_alpha(a_k, a_next, q);
  const double residual =
      a_next * a_next - (1.0 - a_next) * rho * a_k * a_k - q * a_next;
  CHECK(std::abs(residual) <= 1e-15);
  CHECK_THROWS_AS(rho_from_alpha(0.5, 1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(rho_from_alpha(0.0, 0.5, 0.0), std::domain_error);
}

TEST_CASE("parameter-free alpha update: frozen value, fixed point, monotone decay") {
  // From alpha = 1 at q = 0 the update lands on the inverse golden ratio.
  CHECK(free_alpha_update(1.0, 0.0) ==
        doctest::Approx(kGolden - 1.0).epsilon(1e-15));
  // sqrt(q) is a fixed point, exactly at representable squares.
  CHECK(free_alpha_update(0.5, 0.25) == 0.5);
  // q = alpha^2 maps back to alpha.
  for (double a : {0.3, 0.6, 0.9}) {
    CHECK(free_alpha_update(a, a * a) == doctest::Approx(a).epsilon(1e-15));
  }
  CHECK_THROWS_AS(free_alpha_update(0.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(free_alpha_update(0.5, -0.1), std::invalid_argument);

  for (double q : {1e-4, 1e-2, 0.25}) {
    double a = 1.0;
    for (int burn = 0; burn < 10; ++burn) a = free_alpha_update(a, q);
    double prev = a;
    for (int k = 0; k < 300; ++k) {
      a = free_alpha_update(a, q);
      CHECK(a <= prev);            // decreasing, settling on the fixed point
      CHECK(a >= std::sqrt(q));    // never crosses it
      if (prev > std::sqrt(q) * (1.0 + 1e-12)) CHECK(a < prev);
      prev = a;
    }
    CHECK(a - std::sqrt(q) < 0.02);  // and approaches it
  }

  // q = 0: the decay follows the O(1/k) law of the reciprocal t-sequence.
  double a = 1.0;
  for (int k = 1; k <= 1000; ++k) {
    a = free_alpha_update(a, 0.0);
    CHECK(a <= 2.0 / static_cast<double>(k + 1));
  }
  CHECK(a > 0.0);
}

TEST_CASE("momentum coefficient agrees with its special forms") {
  SUBCASE("q = 0 collapse") {
    const Schedule s = Schedule::chambolle_dossal(2.0);
    for (long k = 1; k <= 50; ++k) {
      const double primary = momentum_coefficient(s.alpha(k), s.alpha(k + 1), s.rho(k));
      const double collapsed = s.alpha(k + 1) * (1.0 / s.alpha(k) - 1.0);
      CHECK(std::abs(primary - collapsed) <= 1e-12 * (1.0 + std::abs(primary)));
    }
  }
  SUBCASE("strongly convex closed form") {
    const double q = 0.01;
    for (double r : {0.8, 1.0, 1.2}) {
      const Schedule s = Schedule::constant(r, q);
      for (long k = 1; k <= 20; ++k) {
        const double primary =
            momentum_coefficient(s.alpha(k), s.alpha(k + 1), s.rho(k));
        const double closed =
            (s.alpha(k + 1) - q) * (1.0 / s.alpha(k) - 1.0) / (1.0 - q);
        CHECK(std::abs(primary - closed) <= 1e-12 * (1.0 + std::abs(primary)));
      }
      // r = 1 reproduces the familiar (1 - sqrt(q))/(1 + sqrt(q)) weight.
      if (r == 1.0) {
        const double sq = std::sqrt(q);
        CHECK(std::abs(momentum_coefficient(s.alpha(1), s.alpha(2), s.rho(1)) -
                       (1.0 - sq) / (1.0 + sq)) <= 1e-14);
        CHECK(std::abs(s.constant_theta() - (1.0 - sq) / (1.0 + sq)) <= 1e-15);
      }
    }
  }
  CHECK_THROWS_AS(momentum_coefficient(0.0, 0.0, 0.0), std::domain_error);
}

TEST_CASE("decay product: closed forms, log accumulation, underflow") {
  SUBCASE("quadratic decay of the a = 2 schedule") {
    const Schedule s = Schedule::chambolle_dossal(2.0);
    CHECK(bound_factor(s, 0).value == 1.0);
    for (long k = 1; k <= 200; ++k) {
      const double expected = s.alpha(k) * s.alpha(k);  // telescoping product
      const BoundFactor b = bound_factor(s, k);
      CHECK(std::abs(b.value - expected) <= 1e-12 * expected);
      CHECK(!b.underflow);
    }
  }
  SUBCASE("linear decay of the centered constant schedule") {
    const Schedule s = Schedule::constant(1.0, 0.25);
    for (long k = 1; k <= 50; ++k) {
      const double expected = std::pow(0.5, static_cast<double>(k));
      CHECK(std::abs(bound_factor(s, k).value - expected) <= 1e-12 * expected);
    }
  }
  SUBCASE("general constant rate 1 - min(q/alpha, alpha)") {
    const double q = 0.01;
    for (double r : {0.8, 1.2}) {
      const Schedule s = Schedule::constant(r, q);
      const double alpha = s.alpha(1);
      const double rate = 1.0 - std::min(q / alpha, alpha);
      for (long k = 1; k <= 50; ++k) {
        const double expected = std::pow(rate, static_cast<double>(k));
        CHECK(std::abs(bound_factor(s, k).value - expected) <= 1e-11 * expected);
      }
    }
  }
  SUBCASE("underflow is flagged, not folded into zero silently") {
    const Schedule s = Schedule::constant(1.0, 0.25);  // rate 1/2 per step
    const BoundFactor b = bound_factor(s, 1100);
    CHECK(b.underflow);
    CHECK(b.value == 0.0);
    CHECK(std::isfinite(b.log_value));
    CHECK(b.log_value < std::log(1e-300));
    const BoundFactor ok = bound_factor(s, 900);
    CHECK(!ok.underflow);
    CHECK(ok.value > 0.0);
  }
}

TEST_CASE("coupling recurrence residual stays tiny across shipped schedules") {
  std::vector<Schedule> schedules;
  schedules.push_back(Schedule::chambolle_dossal(2.0));
  schedules.push_back(Schedule::chambolle_dossal(3.0));
  schedules.push_back(Schedule::chambolle_dossal(5.0));
  schedules.push_back(Schedule::constant(0.8, 0.01));
  schedules.push_back(Schedule::constant(1.0, 0.01));
  schedules.push_back(Schedule::constant(1.2, 0.01));
  schedules.push_back(Schedule::inverted_fista(10000));
  for (const Schedule& s : schedules) {
    const ValidationReport rep = validate(s, 10000);
    CHECK(rep.valid);
    CHECK(rep.checked_horizon == 10000);
    CHECK(rep.max_recurrence_residual <= 1e-10);
  }
}

TEST_CASE("validation pinpoints the first inadmissible index") {
  const Schedule late = Schedule::custom({1.0, 0.6, 0.5, 1.4, 0.3}, 0.0);
  const ValidationReport rep = validate(late, 4);
  CHECK(!rep.valid);
  CHECK(rep.first_invalid_index == 3);
  CHECK(!rep.reason.empty());

  const Schedule bad_head = Schedule::custom({1.5, 0.6}, 0.0);
  CHECK(validate(bad_head, 1).first_invalid_index == 0);

  // alpha_k <= q violates the strict lower bound.
  const Schedule below = Schedule::custom({1.0, 0.05}, 0.25);
  const ValidationReport rep2 = validate(below, 1);
  CHECK(!rep2.valid);
  CHECK(rep2.first_invalid_index == 1);

  // Horizons beyond the array clamp to what exists.
  const Schedule tiny = Schedule::custom({1.0, 0.5}, 0.0);
  CHECK(validate(tiny, 100).checked_horizon <= 1);
}

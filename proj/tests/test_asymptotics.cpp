#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "tronquee/asymptotics.hpp"
#include "tronquee/validation.hpp"

using namespace tronquee;

TEST_CASE("closed-form F0") {
  CHECK(std::abs(f0_closed_form(Case::PIII_i, 1.0)(1.0) - 2.0) < 1e-15);
  const F0Form p42 = f0_closed_form(Case::PIV_2);
  CHECK(std::abs(p42(2.0) - 1.0) < 1e-15);
  REQUIRE(p42.singular_set.size() == 1);
  CHECK(std::abs(p42.singular_set[0].xi + 2.0) < 1e-15);
  CHECK(f0_closed_form(Case::PIII_ii, 1.0).singular_set[0].order == 2);
  CHECK(f0_closed_form(Case::PIV_1).singular_set.size() == 2);
  CHECK(f0_closed_form(Case::PIV_3, 0.5).singular_set.empty());
  for (Case c : all_cases) {
    const F0Form f = f0_closed_form(generic_spec(c));
    const auto j = f.jet(0.0);
    CAPTURE(to_string(c));
    CHECK(std::abs(j[0]) < 1e-15);
    CHECK(std::abs(j[1] - 1.0) < 1e-15);
  }
  CHECK_THROWS_AS(f0_closed_form(Case::PIII_i, cx(2.0)), Error);
  CHECK_THROWS_AS(f0_closed_form(Case::PIII_ii), Error);
}

TEST_CASE("F0 satisfies its ODE") {
  CHECK(std::abs(f0_ode_residual(Case::PIII_i, 1.0, cx(0.3, 0.1))) < 1e-10);
  double worst = 0.0;
  for (int k = 0; k < 64; ++k) worst = std::max(worst, std::abs(f0_ode_residual(Case::PIV_1, 0.0, std::polar(1.0, 2 * pi * k / 64))));
  CHECK(worst < 1e-9);
  for (cx A : {cx(1.0), cx(-1.0), cx(0, 1), cx(0, -1)})
    CHECK(std::abs(f0_ode_residual(Case::PIII_i, A, cx(0.7, -0.4))) < 1e-10);
  CHECK(std::abs(f0_ode_residual(Case::PIII_ii, std::exp(2.0 * pi * I / 3.0), cx(-1.1, 0.6))) < 1e-10);
  CHECK(std::abs(f0_ode_residual(Case::PIV_2, 0.0, cx(0.5, 2.0))) < 1e-10);
  try {
    f0_ode_residual(Case::PIII_ii, 1.0, 6.0);
    FAIL("expected a domain error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::domain);
  }
  try {
    f0_ode_residual(Case::PIV_3, 0.5, 1.0);
    FAIL("expected not_applicable");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::not_applicable);
  }
}

TEST_CASE("pole-position formula") {
  const PredictionSet s = predict_poles(0.5, 1.0, 6.0, Side::upper, 10, 10);
  REQUIRE(s.poles.size() == 1);
  CHECK(std::abs(s.poles[0].w_pred - cx(-3.8620, 62.0465)) < 1e-4);
  const PredictionSet lo = predict_poles(0.5, 1.0, 6.0, Side::lower, 10, 10);
  CHECK(lo.poles[0].w_pred.imag() < 0);

  const PredictionSet empty = predict_poles(0.5, 0.0, 6.0, Side::upper, 1, 5);
  CHECK(empty.poles.empty());
  CHECK(!empty.reason.empty());

  CHECK_THROWS_AS(predict_poles(0.5, 1.0, 6.0, Side::upper, 5, 3), Error);
  CHECK_THROWS_AS(predict_poles(0.5, 1.0, 0.0, Side::upper, 1, 3), Error);

  // only C / xi_s matters
  const cx lam(0.3, 0.8);
  const auto a = predict_poles(cx(0.2, 0.1), cx(1.0, 0.5), 6.0, Side::upper, 1, 20);
  const auto b = predict_poles(cx(0.2, 0.1), lam * cx(1.0, 0.5), lam * 6.0, Side::upper, 1, 20);
  for (size_t i = 0; i < a.poles.size(); ++i) CHECK(std::abs(a.poles[i].w_pred - b.poles[i].w_pred) < 1e-12);
}

TEST_CASE("refined predictions") {
  // beta = 0: e^{-w} = xi_s / C exactly
  const cx C(2.0, 1.0), xi = 6.0;
  for (int n = 1; n <= 5; ++n) {
    const cx exact = std::log(C / xi) + 2.0 * pi * n * I;
    const RefinedPrediction r = refine_prediction(0.0, C, xi, exact + cx(0.3, 0.2));
    CHECK(r.converged);
    CHECK(std::abs(r.w - exact) < 1e-12);
  }
  // distance between refined and unrefined decreases with n
  double prev = 1e300;
  for (int n = 5; n <= 30; ++n) {
    const cx w = predict_poles(0.5, 1.0, 6.0, Side::upper, n, n).poles[0].w_pred;
    const RefinedPrediction r = refine_prediction(0.5, 1.0, 6.0, w);
    REQUIRE(r.converged);
    const double d = std::abs(r.w - w);
    CHECK(d < prev);
    prev = d;
    // a poor starting guess lands on the same root
    if (n >= 10) CHECK(std::abs(refine_prediction(0.5, 1.0, 6.0, w + 3.0).w - r.w) < 1e-10);
  }
}

TEST_CASE("x-plane predictions") {
  EquationSpec s;
  s.which = Case::PIII_i;
  s.branch_A = 1.0;
  for (const auto& p : predict_poles_x(s, 1.0, Side::upper, 1, 5, 0)) CHECK(std::abs(p.x_pred - p.w_pred / 2.0) < 1e-14);

  s.which = Case::PIII_ii;
  const double K = std::sqrt(27.0 / 4.0);
  for (const auto& p : predict_poles_x(s, 1.0, Side::upper, 1, 5, 0)) {
    const cx x = std::pow(p.w_pred / K, 1.5);
    CHECK(std::abs(p.x_pred - x) < 1e-10 * std::abs(x));
  }
  const EquationSpec p3 = generic_spec(Case::PIV_3);
  try {
    predict_poles_x(p3, 1.0, Side::upper, 1, 5);
    FAIL("expected not_applicable");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::not_applicable);
  }
  // PIV_1 has two interleaved arrays
  const auto two = predict_poles_w(generic_spec(Case::PIV_1), 1.0, Side::upper, 1, 4);
  CHECK(two.poles.size() == 8);
}

TEST_CASE("comparison against predictions") {
  const auto pred = predict_poles(0.5, 1.0, 6.0, Side::upper, 1, 8).poles;
  std::vector<PoleObservation> self;
  for (const auto& p : pred) self.push_back({p.w_pred, 2, 6.0, 1e-12, true, RefineVariable::h});
  const ComparisonReport r = compare_predictions(self, pred);
  CHECK(r.matches.size() == pred.size());
  for (const auto& m : r.matches) CHECK(m.gap == 0.0);

  // observed poles with shrinking offsets, shuffled
  std::vector<PoleObservation> obs;
  for (const auto& p : pred) obs.push_back({p.w_pred + cx(0.5 / p.n, 0.1 / p.n), 2, 6.0, 1e-9, true, RefineVariable::h});
  const ComparisonReport a = compare_predictions(obs, pred);
  std::mt19937 rng(3);
  std::shuffle(obs.begin(), obs.end(), rng);
  const ComparisonReport b = compare_predictions(obs, pred);
  REQUIRE(a.matches.size() == b.matches.size());
  for (size_t i = 0; i < a.matches.size(); ++i) {
    CHECK(a.matches[i].n == b.matches[i].n);
    CHECK(a.matches[i].w_obs == b.matches[i].w_obs);
  }
  CHECK(a.decreasing);
  CHECK(a.kendall_tau == doctest::Approx(-1.0));
  CHECK(a.final_gap < 0.1);
  CHECK(a.unmatched_observed == 0);
}

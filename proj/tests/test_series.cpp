#include <doctest.h>

#include <cmath>
#include <fstream>

#include "tronquee/asymptotics.hpp"
#include "tronquee/io.hpp"
#include "tronquee/series.hpp"
#include "tronquee/validation.hpp"

using namespace tronquee;

namespace {

bool close(cx a, cx b, double tol) { return std::abs(a - b) <= tol; }

cx residual_at(const NormalizedForm& nf, const FormalSeries& h, cx w) {
  const FormalSeries d1 = h.derivative(), d2 = d1.derivative();
  return eqh_residual(nf, w, h.evaluate(w), d1.evaluate(w), d2.evaluate(w));
}

}  // namespace

TEST_CASE("formal series arithmetic") {
  const auto a = FormalSeries::monomial(1.0, 2), b = FormalSeries::monomial(1.0, 3);
  const FormalSeries p = a * b;
  CHECK(p.offset() == 5);
  CHECK(close(p.coeff(5), 1.0, 0));
  CHECK(p.coeffs().size() == 1);

  const FormalSeries r = FormalSeries(0, {1.0, 1.0}, 3).reciprocal();
  CHECK(r.order() == 3);
  for (int k = 0; k <= 3; ++k) CHECK(close(r.coeff(k), k % 2 == 0 ? 1.0 : -1.0, 1e-15));

  const FormalSeries d = FormalSeries::monomial(1.0, 2).derivative();
  CHECK(d.offset() == 3);
  CHECK(close(d.coeff(3), -2.0, 0));

  CHECK(close(series_arith(a, b, SeriesOp::add).coeff(3), 1.0, 0));
  CHECK(close(series_arith(a, b, SeriesOp::mul).coeff(5), 1.0, 0));
  CHECK(close(series_arith(a, b, SeriesOp::differentiate).coeff(3), -2.0, 0));

  // truncation is tracked through products
  const FormalSeries t = FormalSeries(0, {1.0, 2.0, 3.0}, 2) * FormalSeries(1, {1.0}, FormalSeries::exact);
  CHECK(t.order() == 3);
}

TEST_CASE("h0 solves the equation to the truncation order") {
  EquationSpec s;
  s.which = Case::PIII_i;
  s.branch_A = 1.0;
  const NormalizedForm nf(s);
  const FormalSeries h0 = compute_h0(nf, 6);
  CHECK(h0.offset() >= 2);
  CHECK(std::abs(residual_at(nf, h0, 30.0)) < 10.0 * std::pow(30.0, -7.0));
}

TEST_CASE("N = 2 gives one term and a w^-3 residual") {
  for (Case c : all_cases) {
    const NormalizedForm nf(generic_spec(c));
    const FormalSeries h0 = compute_h0(nf, 2);
    CAPTURE(to_string(c));
    CHECK(h0.last_power() <= 2);
    const double r1 = std::abs(residual_at(nf, h0, 200.0)), r2 = std::abs(residual_at(nf, h0, 400.0));
    if (r1 > 1e-14) CHECK(std::abs(std::log2(r2 / r1) + 3.0) < 0.3);
  }
}

TEST_CASE("leading coefficients match the dominant-balance goldens") {
  std::ifstream in(std::string(TRONQUEE_TESTDATA) + "/leading_coefficients.json");
  REQUIRE(in);
  const json g = json::parse(in);
  for (auto it = g.begin(); it != g.end(); ++it) {
    EquationSpec s;
    s.which = case_from_string(it.key());
    s.alpha = it->at("alpha").get<double>();
    s.beta = it->at("beta").get<double>();
    if (it->contains("A")) s.branch_A = it->at("A").get<double>();
    const FormalSeries h0 = compute_h0(NormalizedForm(s), 8);
    CAPTURE(it.key());
    CHECK(close(h0.coeff(2), complex_from_json(it->at("h0_2")), 1e-13));
    if (it->contains("h0_3")) CHECK(close(h0.coeff(3), complex_from_json(it->at("h0_3")), 1e-13));
  }
  // h0,2 = -lim w^2 g(w, 0, 0) for every case, PIV_3 included
  for (Case c : all_cases) {
    const NormalizedForm nf(generic_spec(c));
    const cx w = 1e5;
    CAPTURE(to_string(c));
    CHECK(close(compute_h0(nf, 4).coeff(2), -nf.g(w, 0, 0) * w * w, 1e-4));
  }
}

TEST_CASE("level series are normalised and tied to F0") {
  EquationSpec s;
  s.which = Case::PIII_i;
  s.branch_A = 1.0;
  const Transseries ts = compute_levels(NormalizedForm(s), 3, 10);
  REQUIRE(ts.K() == 3);
  CHECK(ts.levels[0].offset() == 0);
  CHECK(close(ts.levels[0].coeff(0), 1.0, 1e-14));
  CHECK(close(ts.levels[1].coeff(0), 0.5, 1e-13));
  CHECK(close(ts.levels[2].coeff(0), 0.25, 1e-13));
}

TEST_CASE("evaluate_transseries level structure") {
  const NormalizedForm nf(generic_spec(Case::PIII_ii));
  const Transseries ts = compute_levels(nf, 3, 20);
  const cx w = 30.0;
  const auto v0 = evaluate_transseries(ts, 0.0, w);
  CHECK(close(v0.value, ts.h0.evaluate_optimal(w).value, 0));
  const cx C(0.7, 0.2);
  const auto vc = evaluate_transseries(ts, C, w);
  const cx lead = C * std::exp(-w) * std::pow(w, -ts.beta1);
  const double bound = std::abs(C) * std::exp(-w.real()) * std::pow(std::abs(w), -ts.beta1.real() - 1.0);
  CHECK(std::abs(vc.value - v0.value - lead) < 5.0 * bound);
  CHECK(!vc.prefactor_warning);

  // K = 1 and K = 3 differ by roughly the level-2 prefactor
  const Transseries t1 = compute_levels(nf, 1, 20);
  const cx w40 = 40.0;
  const double xi = std::abs(C * std::exp(-w40) * std::pow(w40, -ts.beta1));
  const double diff = std::abs(evaluate_transseries(ts, C, w40).value - evaluate_transseries(t1, C, w40).value);
  CHECK(diff < 10.0 * xi * xi);
}

TEST_CASE("F0 Taylor coefficients equal leading level coefficients") {
  for (Case c : {Case::PIII_i, Case::PIII_ii, Case::PIV_1, Case::PIV_2}) {
    const EquationSpec s = generic_spec(c);
    const Transseries ts = compute_levels(NormalizedForm(s), 5, 8);
    const auto f = f0_closed_form(s).taylor(6);
    CAPTURE(to_string(c));
    for (int k = 1; k <= 5; ++k) CHECK(close(ts.levels[static_cast<size_t>(k - 1)].coeff(0), f[static_cast<size_t>(k)], 1e-10));
  }
}

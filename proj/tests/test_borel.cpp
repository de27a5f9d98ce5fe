#include <doctest.h>

#include <cmath>
#include <random>

#include "tronquee/borel.hpp"
#include "tronquee/validation.hpp"

using namespace tronquee;

namespace {

FormalSeries euler_series(int n) {
  std::vector<cx> c(static_cast<size_t>(n));
  double f = 1.0;
  for (int k = 0; k < n; ++k) {
    c[static_cast<size_t>(k)] = f;
    f *= k + 1;
  }
  return FormalSeries(1, c, n);
}

double nearest_to_origin(const std::vector<cx>& poles) {
  double d = 1e300;
  for (cx p : poles) d = std::min(d, std::abs(p));
  return d;
}

NormalizedForm piii_ii(double beta) { return NormalizedForm(EquationSpec{Case::PIII_ii, 0.0, beta, cx(1.0)}); }

}  // namespace

TEST_CASE("gamma") {
  CHECK(std::abs(gamma(cx(0.5)) - std::sqrt(pi)) < 1e-12);
  CHECK(std::abs(gamma(cx(6.0)) - 120.0) < 1e-10);
  const cx g = gamma(cx(1, 1)) * gamma(cx(1, -1));
  CHECK(std::abs(g.imag()) < 1e-14);
  CHECK(g.real() > 0);
  // pi / sinh(pi)
  CHECK(std::abs(g.real() - pi / std::sinh(pi)) < 1e-13);
  CHECK(std::abs(gamma(cx(-0.5)) + 2.0 * std::sqrt(pi)) < 1e-12);
}

TEST_CASE("Borel transform and its inverse") {
  const BorelSeries b = borel_transform(FormalSeries::monomial(1.0, 2));
  CHECK(std::abs(b.evaluate(0.3) - 0.3) < 1e-15);

  const BorelSeries e = borel_transform(euler_series(12));
  CHECK(std::abs(e.evaluate(0.2) - 1.0 / 0.8) < 1e-8);
  const auto back = inverse_borel_coefficients(e);
  CHECK(std::abs(back[5] - 120.0) < 1e-9);
}

TEST_CASE("convolution") {
  const BorelSeries a = borel_transform(FormalSeries::monomial(1.0, 1));
  const BorelSeries c = convolve(a, a);
  CHECK(std::abs(c.evaluate(0.4) - 0.4) < 1e-15);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<cx> x(8), y(8);
  for (auto& z : x) z = {u(rng), u(rng)};
  for (auto& z : y) z = {u(rng), u(rng)};
  const FormalSeries f(1, x, 8), g(2, y, 9);
  const BorelSeries fg = convolve(borel_transform(f), borel_transform(g));
  const BorelSeries gf = convolve(borel_transform(g), borel_transform(f));
  const BorelSeries direct = borel_transform(f * g);
  REQUIRE(fg.coeffs.size() == gf.coeffs.size());
  for (size_t n = 0; n < fg.coeffs.size(); ++n) {
    CHECK(std::abs(fg.coeffs[n] - gf.coeffs[n]) < 1e-14);
    CHECK(std::abs(fg.coeffs[n] - direct.coeffs[n]) < 1e-12 * std::max(1.0, std::abs(fg.coeffs[n])));
  }
}

TEST_CASE("Pade continuation") {
  const BorelSum e = build_borel_sum(euler_series(20), pi / 2);
  REQUIRE(!e.pole_locations.empty());
  CHECK(nearest_to_origin(e.pole_locations) == doctest::Approx(1.0).epsilon(1e-8));

  // 1/(1-p) continued with extra degrees: the redundant pole/zero pairs go away.
  std::vector<cx> t(13, 1.0);
  const RationalApproximant r = pade(t, 6, 6);
  CHECK(r.poles.size() == 1);
  CHECK(std::abs(r(0.5) - 2.0) < 1e-12);

  const std::vector<cx> roots = polynomial_roots({-6.0, 11.0, -6.0, 1.0});
  double s = 0.0;
  for (cx z : roots) s += std::abs(polyval({-6.0, 11.0, -6.0, 1.0}, z));
  CHECK(roots.size() == 3);
  CHECK(s < 1e-12);
}

TEST_CASE("Pade poles of the PIII_ii series approach the integers") {
  const NormalizedForm nf = piii_ii(1.0);
  const BorelSum s = build_borel_sum(compute_h0(nf, 40), pi / 4);
  double best = 1e300;
  for (cx p : s.pole_locations) best = std::min({best, std::abs(p - 1.0), std::abs(p + 1.0)});
  CHECK(best < 0.05);
  CHECK_NOTHROW(s.check_ray(pi / 4));
  CHECK_NOTHROW(s.check_ray(-pi / 4));
  CHECK_THROWS_AS(s.check_ray(0.0), Error);
}

TEST_CASE("Laplace transform") {
  const BorelSum p = build_borel_sum(BorelSeries{1.0, {0.0, 1.0}}, 0.0, {1, 0});
  for (double phi : {-1.0, 0.0, 1.0}) CHECK(std::abs(laplace_eval(p, 2.0, phi).value - 0.25) < 1e-10);
  // 1 * f with f = 1 is p
  const BorelSum one = build_borel_sum(BorelSeries{1.0, {1.0}}, 0.0, {0, 0});
  CHECK(std::abs(laplace_eval(p, 3.0).value - laplace_eval(one, 3.0).value / 3.0) < 1e-10);
  CHECK(std::abs(laplace_eval(p, 3.0).value - 1.0 / 9.0) < 1e-10);
  const auto jet = laplace_jet(p, 2.0);
  CHECK(std::abs(jet[1].value + 2.0 / 8.0) < 1e-10);  // d/dw 1/w^2
}

TEST_CASE("ray rotation leaves the sum unchanged") {
  const NormalizedForm nf = piii_ii(1.0);
  const FormalSeries h0 = compute_h0(nf, 30);
  const cx w = std::polar(20.0, -pi / 4);
  const BorelSum ref = build_borel_sum(h0, 0.5);
  const cx v0 = laplace_eval(ref, w).value;
  for (double phi : {0.8, 1.0, 1.6, 2.0}) {
    const BorelSum b = build_borel_sum(h0, phi);
    CHECK(std::abs(laplace_eval(b, w).value - v0) < 1e-9);
  }
}

TEST_CASE("TronqueeSum") {
  const NormalizedForm nf(EquationSpec{Case::PIII_ii, 0.0, 0.0, cx(1.0)});
  const TronqueeSum sum(nf, compute_levels(nf, 3, 30));
  const cx w = std::polar(20.0, -0.2);
  const SolutionJet j = sum.eval(0.3, Side::upper, w);
  CHECK(std::abs(eqh_residual(nf, w, j.h, j.dh, j.d2h)) < 1e-7);

  const SolutionJet z = sum.eval(0.0, Side::upper, w);
  CHECK(std::abs(z.h - laplace_eval(sum.h0_sum(), w, z.phi).value) < 1e-15);

  // Upper and lower sums with the same C differ by exponentially small terms on the real axis.
  const NormalizedForm nf1 = piii_ii(1.0);
  const TronqueeSum s1(nf1, compute_levels(nf1, 3, 30));
  const cx w30 = 30.0;
  const double gap = std::abs(s1.eval(0.2, Side::upper, w30).h - s1.eval(0.2, Side::lower, w30).h);
  CHECK(gap < 10.0 * std::exp(-30.0));
  CHECK(gap > 0.0);

  // the upper tritronquee continued across arg w = pi/2
  const cx wa = std::polar(25.0, pi / 2 - 0.2);
  const cx a = s1.eval(0.0, Side::upper, wa, -1, -pi / 4).h;
  const cx b = s1.eval(0.0, Side::upper, wa, -1, -3 * pi / 4).h;
  CHECK(std::abs(a - b) < 1e-8);

  CHECK_THROWS_AS(s1.choose_phi(Side::upper, std::polar(30.0, -pi / 2 - 0.1)), Error);
}

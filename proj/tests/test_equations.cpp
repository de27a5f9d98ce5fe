#include <doctest.h>

#include <cmath>
#include <fstream>

#include "tronquee/borel.hpp"
#include "tronquee/equations.hpp"
#include "tronquee/io.hpp"
#include "tronquee/series.hpp"

using namespace tronquee;

namespace {

EquationSpec make(Case c, cx alpha, cx beta, std::optional<cx> A = {}) {
  EquationSpec s;
  s.which = c;
  s.alpha = alpha;
  s.beta = beta;
  s.branch_A = A;
  return s;
}

}  // namespace

TEST_CASE("branch constants are validated") {
  CHECK_NOTHROW(validate(make(Case::PIII_i, 0, 0, cx(0, 1))));
  CHECK_THROWS_AS(validate(make(Case::PIII_i, 0, 0, cx(0.5, 0))), Error);
  CHECK_THROWS_AS(validate(make(Case::PIII_i, 0, 0)), Error);
  const cx w3 = std::exp(2.0 * pi * I / 3.0);
  CHECK_NOTHROW(validate(make(Case::PIII_ii, 0, 0, w3)));
  CHECK_THROWS_AS(validate(make(Case::PIII_ii, 0, 0, cx(0, 1))), Error);
  CHECK_NOTHROW(validate(make(Case::PIV_3, 0.3, -0.5, cx(0.5, 0))));
  CHECK_THROWS_AS(validate(make(Case::PIV_3, 0.3, -0.5, cx(1, 0))), Error);
  CHECK_NOTHROW(validate(make(Case::PIV_1, 0.4, 0.3)));
  try {
    validate(make(Case::PIII_i, 0, 0, cx(2, 0)));
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::branch_constraint);
  }
}

TEST_CASE("beta1, beta2 and M") {
  const NormalizedForm a(make(Case::PIII_i, 0, 0, 1.0));
  CHECK(std::abs(a.beta1() - 0.5) < 1e-15);
  CHECK(std::abs(a.beta2() - 0.5) < 1e-15);
  // floor(Re(-beta)) + 1 with beta = 1/2
  CHECK(a.M1() == 0);
  CHECK(a.M2() == 0);
  const NormalizedForm b(make(Case::PIV_2, 0, 3.7));
  CHECK(std::abs(b.beta1() - 0.5) < 1e-15);
  CHECK(std::abs(b.beta2() - 0.5) < 1e-15);
  const NormalizedForm c(make(Case::PIII_ii, 0, 0, 1.0));
  CHECK(std::abs(c.beta1() - 0.5) < 1e-15);
  CHECK(std::abs(c.beta2() - 0.5) < 1e-15);
  const NormalizedForm d(make(Case::PIV_2, -2.0, 0));
  CHECK(std::abs(d.beta1() + 1.5) < 1e-15);
  CHECK(d.M1() == 2);
}

TEST_CASE("g(w, 0, 0) w^2 stays bounded") {
  for (Case c : all_cases) {
    EquationSpec s = make(c, 0.3, -0.5, cx(0.5, 0));
    if (c == Case::PIII_i || c == Case::PIII_ii) s.branch_A = 1.0;
    const NormalizedForm nf(s);
    CAPTURE(to_string(c));
    double far = 0.0, worst = 0.0;
    for (int k = 0; k < 8; ++k) {
      const cx dir = std::polar(1.0, 2.0 * pi * k / 8.0 + 0.1);
      for (double r = 10.0; r <= 1e4; r *= 1.5) {
        const double v = std::abs(nf.g(r * dir, 0, 0) * r * r);
        worst = std::max(worst, v);
        if (r > 5e3) far = std::max(far, v);
      }
    }
    CHECK(std::isfinite(worst));
    CHECK(worst < 10.0);
    CHECK(far < 2.0);
  }
}

TEST_CASE("x <-> w maps") {
  const auto p1 = make(Case::PIII_i, 0, 0, 1.0);
  CHECK(std::abs(map_x_to_w(p1, 3.0) - 6.0) < 1e-14);
  const auto p4 = make(Case::PIV_2, 0, 0);
  CHECK(std::abs(map_x_to_w(p4, 2.0) - 4.0) < 1e-14);
  CHECK(std::abs(map_w_to_x(p4, 4.0, 0) - 2.0) < 1e-14);
  const auto p2 = make(Case::PIII_ii, 0, 0, 1.0);
  CHECK(std::abs(map_x_to_w(p2, 1.0) - std::sqrt(27.0 / 4.0)) < 1e-12);
  for (Case c : all_cases) {
    EquationSpec s = make(c, 0.3, -0.5, cx(0.5, 0));
    if (c == Case::PIII_i || c == Case::PIII_ii) s.branch_A = 1.0;
    const cx x(1.3, 0.4);
    CAPTURE(to_string(c));
    CHECK(std::abs(map_w_to_x(s, map_x_to_w(s, x), 0) - x) < 1e-12);
  }
}

TEST_CASE("assemble_y and l(x)") {
  const auto s = make(Case::PIII_i, 0, 0, 1.0);
  const YJet y = assemble_y(s, 2.0, 0.1, 0.0);
  CHECK(std::abs(y.y - 1.1) < 1e-15);
  const auto s4 = make(Case::PIV_1, 1.0, 0);
  const YJet y4 = assemble_y(s4, 10.0, 0.0, 0.0);
  CHECK(std::abs(y4.y - (-20.0 / 3.0 + 0.1)) < 1e-13);
  for (Case c : all_cases) {
    EquationSpec sp = make(c, 0.3, -0.5, cx(0.5, 0));
    if (c == Case::PIII_i || c == Case::PIII_ii) sp.branch_A = 1.0;
    const NormalizedForm nf(sp);
    const cx x(2.2, 0.3);
    CHECK(std::abs(assemble_y(sp, x, 0.0, 0.0).y - nf.l(x)) < 1e-14);
    const YJet j = assemble_y(sp, x, cx(0.01, 0.02), cx(-0.03, 0.004));
    const HJet h = extract_h(sp, x, j.y, j.dy);
    CHECK(std::abs(h.h - cx(0.01, 0.02)) < 1e-13);
    CHECK(std::abs(h.dh - cx(-0.03, 0.004)) < 1e-13);
  }
}

TEST_CASE("eqh residual isolates g at zero input") {
  const NormalizedForm nf(make(Case::PIV_1, 0.4, 0.3));
  CHECK(std::abs(eqh_residual(nf, 5.0, 0, 0, 0) + nf.g(5.0, 0, 0)) < 1e-14);
}

TEST_CASE("painleve residual") {
  // y = -2x solves PIV_2's leading balance only; the residual is 1/x.
  const auto s = make(Case::PIV_2, 0, 0);
  const cx x = 7.0;
  CHECK(std::abs(painleve_residual(s, x, -2.0 * x, -2.0, 0.0) - 1.0 / x) < 1e-12);
  CHECK_THROWS_AS(painleve_residual(s, x, 0.0, 1.0, 0.0), Error);
}

TEST_CASE("h <-> u substitution") {
  const auto u = h_to_u(3.0, 0.0, 0.0, 1.0, 0.0);
  CHECK(std::abs(u[0] - 0.5) < 1e-15);
  CHECK(std::abs(u[1] - 0.5) < 1e-15);
  const cx w(3, 4);
  const auto v = h_to_u(w, 0.5, 0.5, cx(0.2, -0.1), cx(0.05, 0.3));
  const HJet back = u_to_h(w, 0.5, 0.5, v);
  CHECK(std::abs(back.h - cx(0.2, -0.1)) < 1e-13);
  CHECK(std::abs(back.dh - cx(0.05, 0.3)) < 1e-13);
  // det = 2 + b1 b2 / (2 w^2) vanishes at w^2 = -b1 b2 / 4
  CHECK_THROWS_AS(h_to_u(cx(0, 0.25), 0.5, 0.5, 1.0, 0.0), Error);
}

TEST_CASE("a solution of the h equation solves the original equation") {
  // Sum the C = 0 solution, map back to y(x), and differentiate y' numerically.
  for (Case c : all_cases) {
    EquationSpec s = make(c, 0.3, -0.5, cx(0.5, 0));
    if (c == Case::PIII_i || c == Case::PIII_ii) s.branch_A = 1.0;
    if (c == Case::PIII_ii) s.beta = 1.0;
    const NormalizedForm nf(s);
    const TronqueeSum sum(nf, compute_levels(nf, 1, 30));
    auto y_at = [&](cx x) {
      const cx w = map_x_to_w(s, x);
      const SolutionJet j = sum.eval(0.0, Side::upper, w);
      return assemble_y(s, x, j.h, j.dh);
    };
    const cx x = map_w_to_x(s, cx(25.0, 2.0), 0);
    const double d = 1e-4 * std::abs(x);
    const YJet y = y_at(x);
    const cx d2y = (y_at(x + d).dy - y_at(x - d).dy) / (2.0 * d);
    const double scale = std::abs(d2y) + std::abs(y.dy) / std::abs(x) + std::pow(std::abs(y.y), 3) + 1.0;
    CAPTURE(to_string(c));
    CHECK(std::abs(painleve_residual(s, x, y.y, y.dy, d2y)) < 1e-6 * scale);
    // a wrong second derivative is detected
    CHECK(std::abs(painleve_residual(s, x, y.y, y.dy, d2y + 1e-3 * scale)) > 1e-4 * scale);
  }
}

TEST_CASE("canonical right-hand side matches the symbolic derivation") {
  std::ifstream in(std::string(TRONQUEE_TESTDATA) + "/normal_form_points.json");
  REQUIRE(in);
  const json pts = json::parse(in);
  REQUIRE(pts.size() >= 10);
  for (const auto& p : pts) {
    const EquationSpec s = spec_from_json(p);
    const NormalizedForm nf(s);
    const cx want = complex_from_json(p.at("d2h"));
    const cx got = nf.second_derivative(complex_from_json(p.at("w")), complex_from_json(p.at("h")),
                                        complex_from_json(p.at("dh")));
    CAPTURE(p.dump());
    CHECK(std::abs(got - want) < 1e-13 * std::max(1.0, std::abs(want)));
  }
}

#include <doctest.h>

#include <cmath>

#include "tronquee/integrator.hpp"

using namespace tronquee;

namespace {

PathSpec straight(cx a, cx b, double rel = 1e-12, double abs = 1e-14) {
  PathSpec p;
  p.waypoints = {a, b};
  p.rel_tol = rel;
  p.abs_tol = abs;
  return p;
}

// h'' = 2 h^3 has the solution 1/(w - w*), a simple pole with residue 1.
const SecondOrderRhs cubic = [](cx, cx h, cx) { return 2.0 * h * h * h; };
const cx pole_at(3.0, 4.0);

TrajectoryNode manufactured(cx w) { return {w, 1.0 / (w - pole_at), -1.0 / ((w - pole_at) * (w - pole_at))}; }

struct Piii {
  NormalizedForm nf{EquationSpec{Case::PIII_ii, 0.0, 0.0, cx(1.0)}};
  TronqueeSum sum{nf, compute_levels(nf, 3, 30)};
};

}  // namespace

TEST_CASE("linear test problem") {
  const SecondOrderRhs f = [](cx, cx h, cx) { return h; };
  const Trajectory t = integrate_path(f, {1.0, 1.0, 0.0}, straight(1.0, 5.0));
  CHECK(!t.blowup);
  CHECK(std::abs(t.end().w - 5.0) < 1e-15);
  CHECK(std::abs(t.end().h - std::cosh(4.0)) < 1e-9 * std::cosh(4.0));
  CHECK(std::abs(t.end().dh - std::sinh(4.0)) < 1e-9 * std::cosh(4.0));
  // dense output between nodes
  const auto s = t.sample(0.1);
  for (const auto& n : s) CHECK(std::abs(n.h - std::cosh(n.w - 1.0)) < 1e-9 * std::abs(std::cosh(n.w - 1.0)));
}

TEST_CASE("forward then backward returns the initial data") {
  const Piii p;
  const TrajectoryNode a = seed_from_borel(p.sum, 0.2, Side::upper, 30.0).node;
  const Trajectory fwd = integrate_path(p.nf, a, straight(30.0, cx(24.0, 3.0)));
  const Trajectory back = integrate_path(p.nf, fwd.end(), straight(cx(24.0, 3.0), 30.0));
  CHECK(std::abs(back.end().h - a.h) < 1e-8 * std::max(1.0, std::abs(a.h)));
  CHECK(std::abs(back.end().dh - a.dh) < 1e-8 * std::max(1.0, std::abs(a.dh)));
}

TEST_CASE("integration agrees with the Borel sum") {
  const Piii p;
  const SeedResult s = seed_from_borel(p.sum, 0.2, Side::upper, 40.0);
  CHECK(!s.small_w_warning);
  const Trajectory t = integrate_path(p.nf, s.node, straight(40.0, 15.0));
  const cx ref = p.sum.eval(0.2, Side::upper, 15.0).h;
  CHECK(std::abs(t.end().h - ref) < 1e-6);

  // C = 0 seed: a short integration stays on the sum
  const SeedResult z = seed_from_borel(p.sum, 0.0, Side::upper, cx(30.0, 5.0));
  const Trajectory tz = integrate_path(p.nf, z.node, straight(cx(30.0, 5.0), cx(29.0, 6.0)));
  CHECK(std::abs(tz.end().h - p.sum.eval(0.0, Side::upper, cx(29.0, 6.0)).h) < 1e-8);

  // seeded h' against a central difference
  const double d = 1e-4;
  const cx w0(30.0, 2.0);
  const cx fd = (p.sum.eval(0.2, Side::upper, w0 + d).h - p.sum.eval(0.2, Side::upper, w0 - d).h) / (2 * d);
  CHECK(std::abs(fd - seed_from_borel(p.sum, 0.2, Side::upper, w0).node.dh) < 1e-6);

  CHECK(seed_from_borel(p.sum, 0.2, Side::upper, 5.0).small_w_warning);
}

TEST_CASE("path validation") {
  const SecondOrderRhs f = [](cx, cx h, cx) { return h; };
  CHECK_THROWS_AS(integrate_path(f, {1.0, 1.0, 0.0}, straight(1.0, 5.0, 0.0)), Error);
  CHECK_THROWS_AS(integrate_path(f, {1.0, 1.0, 0.0}, straight(2.0, 5.0)), Error);
  PathSpec p = straight(1.0, 5.0);
  p.waypoints.push_back(5.0);
  CHECK_THROWS_AS(integrate_path(f, {1.0, 1.0, 0.0}, p), Error);
}

TEST_CASE("manufactured pole") {
  const cx w0 = pole_at + cx(2.0, -1.0);
  const PoleObservation p = refine_pole(cubic, manufactured(w0));
  CHECK(p.converged);
  CHECK(std::abs(p.location - pole_at) < 1e-10);
  CHECK(p.order_estimate == 1);
  CHECK(std::abs(p.laurent_coeff - 1.0) < 1e-6);

  // detection from a trajectory that runs into the pole
  PathSpec ps = straight(w0, pole_at + cx(-1.0, 0.5));
  const Trajectory t = integrate_path(cubic, manufactured(w0), ps);
  CHECK(t.blowup);
  const auto found = cluster_poles(detect_poles(cubic, t));
  REQUIRE(found.size() == 1);
  CHECK(std::abs(found[0].location - pole_at) < 1e-10);
}

TEST_CASE("PIII_ii poles do not depend on the sampling resolution") {
  const Piii p;
  const cx w0(16.3, 25.3);
  const TrajectoryNode seed = seed_from_borel(p.sum, 1.0, Side::upper, w0).node;
  PathSpec ps;
  ps.waypoints = {w0, cx(3.0, 3.14), cx(-1.0, 6.0), cx(-1.0, 14.0)};
  const Trajectory t = integrate_path(p.nf, seed, ps);
  PoleSearchOptions coarse, fine;
  fine.sample_spacing = coarse.sample_spacing / 2;
  const auto a = cluster_poles(detect_poles(p.nf, t, coarse));
  const auto b = cluster_poles(detect_poles(p.nf, t, fine));
  REQUIRE(a.size() == 2);
  REQUIRE(b.size() == a.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].converged);
    CHECK(a[i].uncertainty < 1e-6);
    CHECK(a[i].order_estimate == 2);
    double best = 1e300;
    for (const auto& q : b) best = std::min(best, std::abs(q.location - a[i].location));
    CHECK(best <= std::max(a[i].uncertainty, 1e-12) * 3);
  }
}

TEST_CASE("cluster_poles merges duplicates") {
  PoleObservation a{cx(1.0, 1.0), 1, 1.0, 1e-9, true, RefineVariable::reciprocal};
  PoleObservation b = a;
  b.location += 1e-9;
  b.uncertainty = 1e-10;
  PoleObservation c = a;
  c.location = cx(5.0, 0.0);
  const auto out = cluster_poles({a, b, c});
  CHECK(out.size() == 2);
}

TEST_CASE("fit_constant") {
  const Piii p;
  std::vector<FitSample> s;
  for (double r : {20.0, 22.0, 24.0, 26.0}) {
    const cx w = std::polar(r, 0.15);
    s.push_back({w, p.sum.eval(0.37, Side::upper, w).h});
  }
  const FitResult f = fit_constant(p.sum, s, Side::upper);
  CHECK(std::abs(f.C - 0.37) < 1e-3);
  CHECK(!f.below_noise);

  std::vector<FitSample> z;
  for (double r : {20.0, 22.0, 24.0, 26.0}) {
    const cx w = std::polar(r, 0.15);
    z.push_back({w, p.sum.eval(0.0, Side::upper, w).h});
  }
  const FitResult g = fit_constant(p.sum, z, Side::upper);
  CHECK(g.below_noise);
  CHECK(std::abs(g.C) < 1e-8 * std::exp(20.0));
}

TEST_CASE("two-sided fit sees the Stokes jump") {
  const NormalizedForm nf(EquationSpec{Case::PIII_ii, 0.0, 1.0, cx(1.0)});
  const TronqueeSum sum(nf, compute_levels(nf, 3, 30));
  std::vector<FitSample> s;
  for (double r : {20.0, 23.0, 26.0}) s.push_back({r, sum.eval(0.0, Side::upper, r).h});
  const FitResult up = fit_constant(sum, s, Side::upper);
  const FitResult down = fit_constant(sum, s, Side::lower);
  CHECK(up.below_noise);
  CHECK(!down.below_noise);
  CHECK(down.fit_residual < 0.05);
  CHECK(std::abs(down.C) > 1.0);
}

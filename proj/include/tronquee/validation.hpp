#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "tronquee/asymptotics.hpp"
#include "tronquee/borel.hpp"
#include "tronquee/integrator.hpp"

namespace tronquee {

struct CheckResult {
  std::string key;
  int criterion = 0;  // acceptance criterion number, 0 for extra invariants
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
  double budget_seconds = 0.0;
};

// Parameters used by the generic per-case checks.
EquationSpec generic_spec(Case which);

// Points on a ray where a residual is sampled, |w| geometric in [r0, r1].
std::vector<cx> geometric_ray(double r0, double r1, int count, double arg);

// Least-squares slope of log|y| against log|w|.
double loglog_slope(const std::vector<cx>& w, const std::vector<double>& y);

// Waypoints following the pole belt |C e^{-w} w^{-beta}| = |xi_s| (shifted
// right by `offset`) for Im w in [im0, im1].
std::vector<cx> belt_path(cx beta, cx C, cx xi_s, double offset, double im0, double im1, double spacing);

// Integrate the upper-side C = 0 solution along arcs |w| = r, arg in
// [a0, a1], in short segments each seeded from the Borel sum. Returns the
// detected poles and the largest seed/integration mismatch at segment ends.
struct ArcSweep {
  std::vector<PoleObservation> poles;
  double max_mismatch = 0.0;
  int segments = 0;
};
ArcSweep tritronquee_arc_sweep(const TronqueeSum& sum, const std::vector<double>& radii, double a0, double a1,
                               double segment_angle);

CheckResult check_f0_closed_form_ode(std::uint64_t seed);
CheckResult check_h0_residual_slope();
CheckResult check_f0_level_link();
CheckResult check_borel_identities(std::uint64_t seed);
CheckResult check_borel_sum_residual();
CheckResult check_sum_integration_agreement();
CheckResult check_constant_recovery();
CheckResult check_pole_formula();
CheckResult check_tritronquee_sector();
CheckResult check_real_part_dichotomy();

struct NamedCheck {
  std::string key;
  int criterion;
  std::function<CheckResult()> run;
};

// Acceptance criteria 1-10 followed by quick invariants.
std::vector<NamedCheck> all_checks(std::uint64_t seed);

}  // namespace tronquee

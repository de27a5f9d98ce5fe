#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "tronquee/borel.hpp"
#include "tronquee/common.hpp"
#include "tronquee/equations.hpp"
#include "tronquee/integrator.hpp"

namespace tronquee {

struct SingularPoint {
  cx xi;
  int order;
};

// Leading-order function F0(xi) = num(xi)/den(xi) of the pole analysis,
// with F0(0) = 0 and F0'(0) = 1.
struct F0Form {
  Case which = Case::PIII_i;
  cx A{1.0, 0.0};
  std::vector<cx> num;  // ascending powers
  std::vector<cx> den;
  std::vector<SingularPoint> singular_set;

  cx operator()(cx xi) const;
  // F0, F0', F0'' from the exact quotient rule.
  std::array<cx, 3> jet(cx xi) const;
  // Taylor coefficients f_0..f_{n-1} at xi = 0.
  std::vector<cx> taylor(int n) const;
};

// A is required for PIII_i (A^4 = 1) and PIII_ii (A^3 = 1) and ignored otherwise.
F0Form f0_closed_form(Case which, std::optional<cx> A = {});
F0Form f0_closed_form(const EquationSpec& spec);

// Residual of the second-order ODE satisfied by F0, evaluated on the closed
// form. Throws domain near a pole of F0 or a zero of an ODE denominator and
// not_applicable for PIV_3.
cx f0_ode_residual(Case which, cx A, cx xi);

struct PolePrediction {
  int n = 0;
  cx w_pred;
  Side side = Side::upper;
  bool refined = false;
  cx xi_s;
  int array = 0;  // index into the singular set
};

struct PredictionSet {
  std::vector<PolePrediction> poles;
  std::string reason;  // set when the list is empty by construction
};

// w_n = s 2n pi i - beta ln(s 2n pi i) + ln C - ln xi_s, s = +1 (upper) or -1 (lower),
// principal logarithms. C = 0 yields an empty set with a reason.
PredictionSet predict_poles(cx beta, cx C, cx xi_s, Side side, int n_min, int n_max);

struct RefinedPrediction {
  cx w;
  bool converged;
};

// Newton solve of C w^{-beta} e^{-w} = xi_s on the branch closest to w_guess.
RefinedPrediction refine_prediction(cx beta, cx C, cx xi_s, cx w_guess);

// Predictions for every singular point of the case's F0 (beta = beta1).
PredictionSet predict_poles_w(const EquationSpec& spec, cx C, Side side, int n_min, int n_max);

struct XPrediction {
  int n;
  int array;
  cx w_pred;
  cx x_pred;
};

// Same predictions mapped to the x-plane. `sheet` selects the branch of the
// inverse change of variables (the sectors S^(j) with even j use sheet j/2).
// Throws not_applicable for PIV_3, whose F0 has no singularities.
std::vector<XPrediction> predict_poles_x(const EquationSpec& spec, cx C, Side side, int n_min, int n_max,
                                         int sheet = 0);

struct PoleMatch {
  int n;
  int array;
  cx w_pred;
  cx w_obs;
  double gap;
};

struct ComparisonReport {
  std::vector<PoleMatch> matches;  // sorted by (array, n)
  int unmatched_observed = 0;
  int unmatched_predicted = 0;
  bool decreasing = false;  // gaps strictly decrease in n within every array
  double kendall_tau = 0.0; // rank correlation of gap with n, pooled over arrays
  double final_gap = 0.0;   // largest gap among the highest-n match of each array
};

// Greedy nearest-neighbour matching within a radius of pi/2 (a quarter of the
// 2 pi spacing); independent of the order of either list.
ComparisonReport compare_predictions(const std::vector<PoleObservation>& observed,
                                     const std::vector<PolePrediction>& predicted);

}  // namespace tronquee

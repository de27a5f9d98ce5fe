#include "tronquee/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace tronquee {

namespace {

std::vector<cx> poly_derivative(const std::vector<cx>& p) {
  std::vector<cx> d;
  for (size_t k = 1; k < p.size(); ++k) d.push_back(static_cast<double>(k) * p[k]);
  if (d.empty()) d.push_back(0.0);
  return d;
}

void check_root(Case which, const std::optional<cx>& A, int power) {
  if (!A) throw Error(ErrorKind::branch_constraint, std::string(to_string(which)) + " needs branch_A");
  if (std::abs(std::pow(*A, power) - 1.0) > 1e-14)
    throw Error(ErrorKind::branch_constraint,
                std::string(to_string(which)) + ": A^" + std::to_string(power) + " must equal 1");
}

}  // namespace

cx F0Form::operator()(cx xi) const { return jet(xi)[0]; }

std::array<cx, 3> F0Form::jet(cx xi) const {
  const std::vector<cx> n1 = poly_derivative(num), n2 = poly_derivative(n1);
  const std::vector<cx> d1 = poly_derivative(den), d2 = poly_derivative(d1);
  const cx N = polyval(num, xi), Np = polyval(n1, xi), Npp = polyval(n2, xi);
  const cx D = polyval(den, xi), Dp = polyval(d1, xi), Dpp = polyval(d2, xi);
  double dscale = 0.0;
  for (size_t k = 0; k < den.size(); ++k) dscale += std::abs(den[k]) * std::pow(std::abs(xi), static_cast<double>(k));
  if (std::abs(D) <= 1e-12 * dscale) throw Error(ErrorKind::domain, "F0 evaluated at one of its poles");
  const cx W = Np * D - N * Dp;  // Wronskian-like numerator of F0'
  return {N / D, W / (D * D), ((Npp * D - N * Dpp) * D - 2.0 * Dp * W) / (D * D * D)};
}

std::vector<cx> F0Form::taylor(int n) const {
  std::vector<cx> out(static_cast<size_t>(std::max(n, 0)));
  for (int k = 0; k < n; ++k) {
    cx acc = k < static_cast<int>(num.size()) ? num[static_cast<size_t>(k)] : cx(0.0);
    for (int j = 1; j <= k && j < static_cast<int>(den.size()); ++j)
      acc -= den[static_cast<size_t>(j)] * out[static_cast<size_t>(k - j)];
    out[static_cast<size_t>(k)] = acc / den[0];
  }
  return out;
}

F0Form f0_closed_form(Case which, std::optional<cx> A) {
  F0Form f;
  f.which = which;
  switch (which) {
    case Case::PIII_i: {
      check_root(which, A, 4);
      const cx a = *A;
      f.A = a;
      f.num = {0.0, 2.0 * a};
      f.den = {2.0 * a, -1.0};
      f.singular_set = {{2.0 * a, 1}};
      break;
    }
    case Case::PIII_ii: {
      check_root(which, A, 3);
      const cx a = *A;
      f.A = a;
      f.num = {0.0, 36.0 * a * a};
      f.den = {36.0 * a * a, -12.0 * a, 1.0};
      f.singular_set = {{6.0 * a, 2}};
      break;
    }
    case Case::PIV_1:
      f.num = {0.0, 4.0};
      f.den = {4.0, 2.0, 1.0};
      f.singular_set = {{cx(-1.0, -std::sqrt(3.0)), 1}, {cx(-1.0, std::sqrt(3.0)), 1}};
      break;
    case Case::PIV_2:
      f.num = {0.0, 2.0};
      f.den = {2.0, 1.0};
      f.singular_set = {{-2.0, 1}};
      break;
    case Case::PIV_3:
      if (A) f.A = *A;
      f.num = {0.0, 1.0};
      f.den = {1.0};
      break;
  }
  return f;
}

F0Form f0_closed_form(const EquationSpec& spec) { return f0_closed_form(spec.which, spec.branch_A); }

cx f0_ode_residual(Case which, cx A, cx xi) {
  if (which == Case::PIV_3)
    throw Error(ErrorKind::not_applicable, "PIV_3: no ODE for F0 is available (F0(xi) = xi)");
  const F0Form f = f0_closed_form(which, A);
  const auto [F, F1, F2] = f.jet(xi);
  const cx xi2 = xi * xi;
  const cx lin = xi2 * F2 + xi * F1;
  auto guard = [&](cx d, const char* what) {
    if (std::abs(d) < 1e-12 * std::max(1.0, std::abs(F)))
      throw Error(ErrorKind::domain, std::string("F0 ODE denominator vanishes: ") + what);
  };
  switch (which) {
    case Case::PIII_i: {
      const cx y = A + F;
      guard(y, "A + F0");
      return lin - xi2 * F1 * F1 / y - y * y * y / (4.0 * A * A) + 1.0 / (4.0 * A * A * y);
    }
    case Case::PIII_ii: {
      const cx y = A + F;
      guard(y, "A + F0");
      return lin - xi2 * F1 * F1 / y - y * y / (3.0 * A) + 1.0 / (3.0 * A * y);
    }
    case Case::PIV_1: {
      const cx y = 3.0 * F - 2.0;
      guard(y, "3 F0 - 2");
      return lin - 3.0 * xi2 * F1 * F1 / (2.0 * y) + y * y * y / 24.0 + y * y / 3.0 + y / 2.0;
    }
    case Case::PIV_2: {
      const cx y = F - 2.0;
      guard(y, "F0 - 2");
      return lin - xi2 * F1 * F1 / (2.0 * y) - 3.0 * y * y * y / 8.0 - y * y - y / 2.0;
    }
    case Case::PIV_3:
      break;
  }
  return 0.0;
}

PredictionSet predict_poles(cx beta, cx C, cx xi_s, Side side, int n_min, int n_max) {
  if (n_min > n_max) throw Error(ErrorKind::usage, "empty n range");
  if (n_min < 1) throw Error(ErrorKind::usage, "pole indices start at 1");
  if (xi_s == 0.0) throw Error(ErrorKind::domain, "xi_s must be nonzero");
  PredictionSet out;
  if (C == 0.0) {
    out.reason = std::string("C = 0 on the ") + to_string(side) +
                 " side: the level-1 term vanishes and no pole array is predicted there";
    return out;
  }
  const double s = side == Side::upper ? 1.0 : -1.0;
  const cx shift = std::log(C) - std::log(xi_s);
  for (int n = n_min; n <= n_max; ++n) {
    const cx t = s * 2.0 * pi * n * I;
    out.poles.push_back({n, t - beta * std::log(t) + shift, side, false, xi_s, 0});
  }
  return out;
}

RefinedPrediction refine_prediction(cx beta, cx C, cx xi_s, cx w_guess) {
  if (C == 0.0 || xi_s == 0.0 || w_guess == 0.0) throw Error(ErrorKind::domain, "refine_prediction needs C, xi_s, w nonzero");
  const cx shift = std::log(C) - std::log(xi_s);
  // Branch of the logarithm of the equation chosen at the guess.
  const cx g0 = -w_guess - beta * std::log(w_guess) + shift;
  const double m = std::round(g0.imag() / (2.0 * pi));
  cx w = w_guess;
  for (int it = 0; it < 60; ++it) {
    const cx G = -w - beta * std::log(w) + shift - 2.0 * pi * m * I;
    const cx dw = -G / (-1.0 - beta / w);
    w += dw;
    if (!std::isfinite(std::abs(w)) || w == 0.0) break;
    if (std::abs(dw) <= 1e-15 * std::max(1.0, std::abs(w))) return {w, true};
  }
  return {w_guess, false};
}

PredictionSet predict_poles_w(const EquationSpec& spec, cx C, Side side, int n_min, int n_max) {
  const NormalizedForm nf(spec);
  const F0Form f = f0_closed_form(spec);
  PredictionSet out;
  if (f.singular_set.empty()) {
    out.reason = "F0 has no singularities for this case";
    return out;
  }
  for (size_t a = 0; a < f.singular_set.size(); ++a) {
    PredictionSet one = predict_poles(nf.beta1(), C, f.singular_set[a].xi, side, n_min, n_max);
    out.reason = one.reason;
    for (auto& p : one.poles) {
      p.array = static_cast<int>(a);
      out.poles.push_back(p);
    }
  }
  return out;
}

std::vector<XPrediction> predict_poles_x(const EquationSpec& spec, cx C, Side side, int n_min, int n_max,
                                         int sheet) {
  if (spec.which == Case::PIV_3)
    throw Error(ErrorKind::not_applicable,
                "PIV_3: F0(xi) = xi has no singularities, so no pole formula applies");
  std::vector<XPrediction> out;
  for (const auto& p : predict_poles_w(spec, C, side, n_min, n_max).poles)
    out.push_back({p.n, p.array, p.w_pred, map_w_to_x(spec, p.w_pred, sheet)});
  return out;
}

ComparisonReport compare_predictions(const std::vector<PoleObservation>& observed,
                                     const std::vector<PolePrediction>& predicted) {
  const double radius = pi / 2.0;
  struct Pair {
    double d;
    size_t i, j;
  };
  std::vector<Pair> pairs;
  for (size_t i = 0; i < observed.size(); ++i)
    for (size_t j = 0; j < predicted.size(); ++j) {
      const double d = std::abs(observed[i].location - predicted[j].w_pred);
      if (d < radius) pairs.push_back({d, i, j});
    }
  // Ties are broken by the observed location so the result does not depend
  // on the input order.
  auto key = [&](const Pair& p) {
    const cx z = observed[p.i].location;
    return std::make_tuple(p.d, z.real(), z.imag(), p.j);
  };
  std::sort(pairs.begin(), pairs.end(), [&](const Pair& a, const Pair& b) { return key(a) < key(b); });
  std::vector<bool> used_o(observed.size()), used_p(predicted.size());
  ComparisonReport rep;
  for (const auto& p : pairs) {
    if (used_o[p.i] || used_p[p.j]) continue;
    used_o[p.i] = used_p[p.j] = true;
    const PolePrediction& pr = predicted[p.j];
    rep.matches.push_back({pr.n, pr.array, pr.w_pred, observed[p.i].location, p.d});
  }
  rep.unmatched_observed = static_cast<int>(std::count(used_o.begin(), used_o.end(), false));
  rep.unmatched_predicted = static_cast<int>(std::count(used_p.begin(), used_p.end(), false));
  std::sort(rep.matches.begin(), rep.matches.end(), [](const PoleMatch& a, const PoleMatch& b) {
    return std::tie(a.array, a.n) < std::tie(b.array, b.n);
  });
  if (rep.matches.empty()) return rep;

  rep.decreasing = true;
  long concordant = 0, discordant = 0;
  for (size_t i = 0; i < rep.matches.size(); ++i) {
    const PoleMatch& a = rep.matches[i];
    const bool last_of_array = i + 1 == rep.matches.size() || rep.matches[i + 1].array != a.array;
    if (last_of_array) rep.final_gap = std::max(rep.final_gap, a.gap);
    else if (rep.matches[i + 1].gap >= a.gap) rep.decreasing = false;
    for (size_t j = i + 1; j < rep.matches.size(); ++j) {
      const PoleMatch& b = rep.matches[j];
      if (b.array != a.array || b.n == a.n) continue;
      const double s = (b.n - a.n) * (b.gap - a.gap);
      if (s > 0) ++concordant;
      else if (s < 0) ++discordant;
    }
  }
  if (concordant + discordant > 0)
    rep.kendall_tau = static_cast<double>(concordant - discordant) / static_cast<double>(concordant + discordant);
  return rep;
}

}  // namespace tronquee

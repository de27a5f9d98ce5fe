#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "tronquee/common.hpp"

namespace tronquee {

enum class Case { PIII_i, PIII_ii, PIV_1, PIV_2, PIV_3 };

inline constexpr std::array<Case, 5> all_cases{Case::PIII_i, Case::PIII_ii, Case::PIV_1,
                                               Case::PIV_2, Case::PIV_3};

std::string_view to_string(Case c);
Case case_from_string(std::string_view name);

// Which reduced Painleve equation and its parameters. For PIII_ii the
// equation fixes alpha = 1, so `alpha` is ignored there.
struct EquationSpec {
  Case which = Case::PIII_i;
  cx alpha{0.0, 0.0};
  cx beta{0.0, 0.0};
  std::optional<cx> branch_A;
};

// Throws branch_constraint when A is missing or violates the case's root condition.
void validate(const EquationSpec& spec);

// Canonical form h'' - h + (1/w)[(b2-b1) h + (b2+b1) h'] = g(w, h, h').
//
// The right-hand side is stored as the full second derivative
//   F(w, h, h') = h + D(w, h, h'),
// where D is written so that no O(1) quantities cancel. The naive form
// (transport the original equation through the substitution and subtract)
// loses all relative accuracy in h once |h| is far below machine epsilon,
// which happens in exactly the regime where exponentially small corrections
// matter. Every formula below is a polynomial/rational expression in
// u = 1/w, h, h' so the same template serves complex numbers and truncated
// series.
class NormalizedForm {
 public:
  explicit NormalizedForm(const EquationSpec& spec);

  const EquationSpec& spec() const { return spec_; }
  cx beta1() const { return beta1_; }
  cx beta2() const { return beta2_; }
  int M1() const;
  int M2() const;

  // True for the equation obtained by w -> -w. Its beta1/beta2 are swapped.
  bool reflected() const { return reflected_; }
  NormalizedForm reflection() const;

  // h'' as a function of (1/w, h, h').
  template <class T>
  T second_derivative(const T& u, const T& h, const T& hp) const {
    if (reflected_) return raw_second_derivative(-u, h, -hp);
    return raw_second_derivative(u, h, hp);
  }

  cx second_derivative(cx w, cx h, cx hp) const;
  cx g(cx w, cx h, cx hp) const;
  cx l(cx x) const;

 private:
  template <class T>
  T raw_second_derivative(const T& u, const T& h, const T& hp) const;

  EquationSpec spec_;
  cx beta1_, beta2_;
  bool reflected_ = false;
  // Case constants: A, shift a1 (or c1 for PIII_i), PIV scale c and the
  // quadratic/cubic coefficients of the PIV nonlinearity.
  cx A_{1.0, 0.0};
  cx a1_{0.0, 0.0};
  cx c_{1.0, 0.0};
  cx p2_{0.0, 0.0};
  cx p3_{0.0, 0.0};
  cx y0_{0.0, 0.0};
};

template <class T>
T NormalizedForm::raw_second_derivative(const T& u, const T& h, const T& hp) const {
  const cx al = spec_.alpha;
  const cx be = spec_.beta;
  const cx A = A_;
  const T u2 = u * u;
  const T u3 = u2 * u;
  switch (spec_.which) {
    case Case::PIII_i: {
      // y = A + eta, eta = h - 2A c1/w
      const cx k = 2.0 * A * a1_;
      const T eta = h - k * u;
      const T y = eta + A;
      const T yw = hp + k * u2;
      const T eta2 = eta * eta;
      const T quartic = (2.0 * A * A) * eta2 + (4.0 * A) * eta2 * eta + eta2 * eta2;
      const T d = (yw * yw + quartic / (4.0 * A * A)) / y - yw * u + al * eta * u +
                  (al / (2.0 * A)) * eta2 * u + (2.0 * k) * u3;
      return h + d;
    }
    case Case::PIII_ii: {
      const T eta = h - a1_ * u;
      const T y = eta + A;
      const T yw = hp + a1_ * u2;
      const T d = (yw * yw + (eta * eta * eta) / (3.0 * A)) / y - yw * u + (2.0 * a1_) * u3;
      return h + d;
    }
    case Case::PIV_1:
    case Case::PIV_2: {
      const T eta = h + a1_ * u;
      const T y = eta + y0_;
      const T yw = hp - a1_ * u2;
      const T q = y * u + 2.0 * yw;
      const T eta2 = eta * eta;
      const T d = (q * q / 8.0 + (be / 4.0) * u2) / y + p2_ * eta2 + p3_ * eta2 * eta -
                  (c_ * al / 2.0) * eta * u - 1.5 * yw * u - (2.0 * a1_) * u3;
      return h + d;
    }
    case Case::PIV_3: {
      const T eta = h + a1_ * u;
      const T y = eta + A;
      const T yw = hp - a1_ * u2;
      const T q = 2.0 * yw - y * u;
      const T eta2 = eta * eta;
      const T d = (q * q / 8.0 - eta2 / 2.0) / y + 0.375 * y * y * y * u2 +
                  (2.0 * A * eta + eta2) * u - (al / 2.0) * eta * u + 0.5 * yw * u -
                  0.5 * y * u2 - (2.0 * a1_) * u3;
      return h + d;
    }
  }
  return h;
}

// x <-> w changes of variables. The inverse is multivalued for PIII_ii and
// the PIV cases; `sheet` adds 2*pi*sheet to the argument before taking the
// fractional power.
cx map_x_to_w(const EquationSpec& spec, cx x);
cx map_w_to_x(const EquationSpec& spec, cx w, int sheet = 0);

struct HJet {
  cx h;
  cx dh;
};

struct YJet {
  cx y;
  cx dy;
};

// y = s(x) h(w(x)) + l(x) with the chain rule applied to y'.
YJet assemble_y(const EquationSpec& spec, cx x, cx h, cx dh);
HJet extract_h(const EquationSpec& spec, cx x, cx y, cx dy);

// h'' - F(w, h, h'), equal to the canonical residual.
cx eqh_residual(const NormalizedForm& nf, cx w, cx h, cx dh, cx d2h);

// Residual of the original equation, right-hand side subtracted from y''.
cx painleve_residual(const EquationSpec& spec, cx x, cx y, cx dy, cx d2y);

// Matrix substitution [h, h']^T = T(w) u and its inverse.
std::array<cx, 2> h_to_u(cx w, cx beta1, cx beta2, cx h, cx dh);
HJet u_to_h(cx w, cx beta1, cx beta2, const std::array<cx, 2>& u);

}  // namespace tronquee

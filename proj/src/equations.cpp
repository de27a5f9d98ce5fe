#include "tronquee/equations.hpp"

#include <cmath>

namespace tronquee {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::branch_constraint: return "branch_constraint";
    case ErrorKind::domain: return "domain";
    case ErrorKind::near_singular: return "near_singular";
    case ErrorKind::pole_of_equation: return "pole_of_equation";
    case ErrorKind::resonance: return "resonance";
    case ErrorKind::ray: return "ray";
    case ErrorKind::sector: return "sector";
    case ErrorKind::stiffness: return "stiffness";
    case ErrorKind::path: return "path";
    case ErrorKind::ill_conditioned_fit: return "ill_conditioned_fit";
    case ErrorKind::not_applicable: return "not_applicable";
    case ErrorKind::usage: return "usage";
  }
  return "unknown";
}

std::string_view to_string(Case c) {
  switch (c) {
    case Case::PIII_i: return "PIII_i";
    case Case::PIII_ii: return "PIII_ii";
    case Case::PIV_1: return "PIV_1";
    case Case::PIV_2: return "PIV_2";
    case Case::PIV_3: return "PIV_3";
  }
  return "?";
}

Case case_from_string(std::string_view name) {
  for (Case c : all_cases)
    if (to_string(c) == name) return c;
  throw Error(ErrorKind::usage, "unknown case '" + std::string(name) + "'");
}

namespace {

// exp(p Log z), principal branch with the cut on (-inf, 0].
cx ppow(cx z, double p) { return std::exp(p * std::log(z)); }

cx require_A(const EquationSpec& spec) {
  if (!spec.branch_A)
    throw Error(ErrorKind::branch_constraint,
                std::string(to_string(spec.which)) + " requires branch_A");
  return *spec.branch_A;
}

cx piii_ii_K(cx A) { return std::sqrt(27.0 * A / 4.0); }

const cx sqrt3_i{0.0, std::sqrt(3.0)};

void check_nonzero(cx z, const char* what) {
  if (z == 0.0) throw Error(ErrorKind::domain, std::string(what) + " must be nonzero");
}

}  // namespace

void validate(const EquationSpec& spec) {
  constexpr double tol = 1e-14;
  switch (spec.which) {
    case Case::PIII_i: {
      cx A = require_A(spec);
      if (std::abs(A * A * A * A - 1.0) > tol)
        throw Error(ErrorKind::branch_constraint, "PIII_i requires A^4 = 1");
      break;
    }
    case Case::PIII_ii: {
      cx A = require_A(spec);
      if (std::abs(A * A * A - 1.0) > tol)
        throw Error(ErrorKind::branch_constraint, "PIII_ii requires A^3 = 1");
      break;
    }
    case Case::PIV_3: {
      cx A = require_A(spec);
      if (std::abs(A * A + spec.beta / 2.0) > tol * std::max(1.0, std::abs(spec.beta)))
        throw Error(ErrorKind::branch_constraint, "PIV_3 requires A^2 = -beta/2");
      if (A == 0.0) throw Error(ErrorKind::branch_constraint, "PIV_3 requires beta != 0");
      break;
    }
    case Case::PIV_1:
    case Case::PIV_2:
      break;
  }
}

NormalizedForm::NormalizedForm(const EquationSpec& spec) : spec_(spec) {
  validate(spec);
  const cx al = spec.alpha;
  const cx be = spec.beta;
  switch (spec.which) {
    case Case::PIII_i:
      A_ = *spec.branch_A;
      a1_ = (al + A_ * A_ * be) / 4.0;
      beta1_ = 0.5 + al / 4.0 - A_ * A_ * be / 4.0;
      beta2_ = 0.5 - al / 4.0 + A_ * A_ * be / 4.0;
      break;
    case Case::PIII_ii:
      A_ = *spec.branch_A;
      a1_ = be * piii_ii_K(A_) / (3.0 * A_);
      beta1_ = 0.5;
      beta2_ = 0.5;
      break;
    case Case::PIV_1:
      c_ = sqrt3_i;
      y0_ = -2.0 / 3.0;
      a1_ = al / c_;
      beta1_ = 0.5;
      beta2_ = 0.5;
      break;
    case Case::PIV_2:
      c_ = 1.0;
      y0_ = -2.0;
      a1_ = -al;
      beta1_ = al + 0.5;
      beta2_ = -al + 0.5;
      break;
    case Case::PIV_3:
      A_ = *spec.branch_A;
      a1_ = (al * A_ + be) / 2.0;
      beta1_ = -al / 2.0 + 1.5 * A_;
      beta2_ = al / 2.0 - 1.5 * A_;
      break;
  }
  if (spec.which == Case::PIV_1 || spec.which == Case::PIV_2) {
    p2_ = c_ * c_ / 16.0 * (18.0 * y0_ + 16.0);
    p3_ = 3.0 * c_ * c_ / 8.0;
  }
}

int NormalizedForm::M1() const { return static_cast<int>(std::floor(-beta1_.real())) + 1; }
int NormalizedForm::M2() const { return static_cast<int>(std::floor(-beta2_.real())) + 1; }

NormalizedForm NormalizedForm::reflection() const {
  NormalizedForm r = *this;
  r.reflected_ = !reflected_;
  std::swap(r.beta1_, r.beta2_);
  return r;
}

cx NormalizedForm::second_derivative(cx w, cx h, cx hp) const {
  check_nonzero(w, "w");
  return second_derivative<cx>(1.0 / w, h, hp);
}

cx NormalizedForm::g(cx w, cx h, cx hp) const {
  check_nonzero(w, "w");
  const cx u = 1.0 / w;
  return second_derivative<cx>(u, h, hp) - h + u * ((beta2_ - beta1_) * h + (beta2_ + beta1_) * hp);
}

cx NormalizedForm::l(cx x) const {
  check_nonzero(x, "x");
  const cx al = spec_.alpha;
  switch (spec_.which) {
    case Case::PIII_i: return A_ - a1_ / x;
    case Case::PIII_ii: return A_ * ppow(x, 1.0 / 3.0) - spec_.beta / (3.0 * A_ * ppow(x, 1.0 / 3.0));
    case Case::PIV_1: return -2.0 * x / 3.0 + al / x;
    case Case::PIV_2: return -2.0 * x - al / x;
    case Case::PIV_3: return A_ / x + a1_ / (x * x * x);
  }
  return 0.0;
}

cx map_x_to_w(const EquationSpec& spec, cx x) {
  check_nonzero(x, "x");
  switch (spec.which) {
    case Case::PIII_i: return 2.0 * require_A(spec) * x;
    case Case::PIII_ii: return piii_ii_K(require_A(spec)) * ppow(x, 2.0 / 3.0);
    case Case::PIV_1: return x * x / sqrt3_i;
    case Case::PIV_2:
    case Case::PIV_3: return x * x;
  }
  return 0.0;
}

cx map_w_to_x(const EquationSpec& spec, cx w, int sheet) {
  check_nonzero(w, "w");
  const double turn = 2.0 * pi * sheet;
  switch (spec.which) {
    case Case::PIII_i: return w / (2.0 * require_A(spec));
    case Case::PIII_ii: {
      const cx z = w / piii_ii_K(require_A(spec));
      return std::exp(1.5 * (std::log(z) + cx(0.0, turn)));
    }
    case Case::PIV_1: return std::exp(0.5 * (std::log(sqrt3_i * w) + cx(0.0, turn)));
    case Case::PIV_2:
    case Case::PIV_3: return std::exp(0.5 * (std::log(w) + cx(0.0, turn)));
  }
  return 0.0;
}

namespace {

// y = s h + l, y' = s' h + s w' h' + l'.
struct Substitution {
  cx s, ds, dw, l, dl;
};

Substitution substitution(const EquationSpec& spec, cx x) {
  check_nonzero(x, "x");
  validate(spec);
  const cx al = spec.alpha;
  const cx be = spec.beta;
  switch (spec.which) {
    case Case::PIII_i: {
      const cx A = *spec.branch_A;
      const cx c1 = (al + A * A * be) / 4.0;
      return {1.0, 0.0, 2.0 * A, A - c1 / x, c1 / (x * x)};
    }
    case Case::PIII_ii: {
      const cx A = *spec.branch_A;
      const cx x13 = ppow(x, 1.0 / 3.0);
      const cx K = piii_ii_K(A);
      return {x13, 1.0 / (3.0 * x13 * x13), 2.0 * K / (3.0 * x13), A * x13 - be / (3.0 * A * x13),
              A / (3.0 * x13 * x13) + be / (9.0 * A * x13 * x13 * x13 * x13)};
    }
    case Case::PIV_1:
      return {x, 1.0, 2.0 * x / sqrt3_i, -2.0 * x / 3.0 + al / x, -2.0 / 3.0 - al / (x * x)};
    case Case::PIV_2:
      return {x, 1.0, 2.0 * x, -2.0 * x - al / x, -2.0 + al / (x * x)};
    case Case::PIV_3: {
      const cx A = *spec.branch_A;
      const cx a1 = (al * A + be) / 2.0;
      const cx x2 = x * x;
      return {1.0 / x, -1.0 / x2, 2.0 * x, A / x + a1 / (x2 * x), -A / x2 - 3.0 * a1 / (x2 * x2)};
    }
  }
  return {};
}

}  // namespace

YJet assemble_y(const EquationSpec& spec, cx x, cx h, cx dh) {
  const Substitution s = substitution(spec, x);
  return {s.s * h + s.l, s.ds * h + s.s * s.dw * dh + s.dl};
}

HJet extract_h(const EquationSpec& spec, cx x, cx y, cx dy) {
  const Substitution s = substitution(spec, x);
  const cx h = (y - s.l) / s.s;
  return {h, (dy - s.dl - s.ds * h) / (s.s * s.dw)};
}

cx eqh_residual(const NormalizedForm& nf, cx w, cx h, cx dh, cx d2h) {
  return d2h - nf.second_derivative(w, h, dh);
}

cx painleve_residual(const EquationSpec& spec, cx x, cx y, cx dy, cx d2y) {
  check_nonzero(x, "x");
  if (y == 0.0) throw Error(ErrorKind::pole_of_equation, "y = 0 is a singular point of the equation");
  const cx al = spec.alpha;
  const cx be = spec.beta;
  switch (spec.which) {
    case Case::PIII_i:
      return d2y - (dy * dy / y - dy / x + (al * y * y + be) / x + y * y * y - 1.0 / y);
    case Case::PIII_ii:
      return d2y - (dy * dy / y - dy / x + (y * y + be) / x - 1.0 / y);
    case Case::PIV_1:
    case Case::PIV_2:
    case Case::PIV_3:
      return d2y - (dy * dy / (2.0 * y) + 1.5 * y * y * y + 4.0 * x * y * y +
                    2.0 * (x * x - al) * y + be / y);
  }
  return 0.0;
}

namespace {

std::array<cx, 4> htou_matrix(cx w, cx b1, cx b2) {
  check_nonzero(w, "w");
  const cx p = b1 / (2.0 * w);
  const cx q = b2 / (2.0 * w);
  return {1.0 - p, 1.0 + q, -1.0 - p, 1.0 - q};
}

}  // namespace

std::array<cx, 2> h_to_u(cx w, cx beta1, cx beta2, cx h, cx dh) {
  const auto m = htou_matrix(w, beta1, beta2);
  const cx det = m[0] * m[3] - m[1] * m[2];
  if (std::abs(det) < 1e-12)
    throw Error(ErrorKind::near_singular, "substitution matrix is singular at this w");
  return {(m[3] * h - m[1] * dh) / det, (-m[2] * h + m[0] * dh) / det};
}

HJet u_to_h(cx w, cx beta1, cx beta2, const std::array<cx, 2>& u) {
  const auto m = htou_matrix(w, beta1, beta2);
  return {m[0] * u[0] + m[1] * u[1], m[2] * u[0] + m[3] * u[1]};
}

}  // namespace tronquee

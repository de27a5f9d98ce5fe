#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace tronquee {

using cx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline const cx I{0.0, 1.0};

// Error categories. The CLI maps them to stable identifiers in its error JSON.
enum class ErrorKind {
  branch_constraint,
  domain,
  near_singular,
  pole_of_equation,
  resonance,
  ray,
  sector,
  stiffness,
  path,
  ill_conditioned_fit,
  not_applicable,
  usage,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace tronquee

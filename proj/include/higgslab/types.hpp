#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace higgslab {

using Complex = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

using RealField = std::vector<double>;
using ComplexField = std::vector<Complex>;

// Raised when inputs violate an operation's precondition.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised by mesh construction when the triangulation cannot be made valid.
class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised by the vortex solver when the iterate blows up.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a holonomy path enters the cone guard disk.
class PathError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline double sup_norm(const RealField& f) {
  double m = 0.0;
  for (double v : f) m = std::max(m, std::abs(v));
  return m;
}

inline double sup_norm(const ComplexField& f) {
  double m = 0.0;
  for (const Complex& v : f) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace higgslab

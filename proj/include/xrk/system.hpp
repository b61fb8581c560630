#pragma once

#include <functional>
#include <memory>
#include <string>

#include "xrk/types.hpp"

namespace xrk {

using Nonlinearity = std::function<Vector(const Vector&)>;
/// (y, v) -> f'(y) v
using JacobianAction = std::function<Vector(const Vector&, const Vector&)>;

/// y' = M y + f(y) on [t0, t_end], y(t0) = y0.
struct SemiLinearSystem {
  std::string name;
  std::shared_ptr<const Matrix> linear;
  Nonlinearity f;
  JacobianAction jvp;  // may be empty; third-order corrections need it
  Vector y0;
  double t0 = 0.0;
  double t_end = 1.0;

  Index dimension() const { return linear ? linear->rows() : 0; }
  const Matrix& M() const { return *linear; }
  bool has_jvp() const { return static_cast<bool>(jvp); }
};

/// Same system with f and its Jacobian action replaced by zero.
SemiLinearSystem homogeneous_part(const SemiLinearSystem& sys);

}  // namespace xrk

#pragma once

#include <Eigen/Dense>

namespace xrk {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Integrators, problems and the harness all run in double precision.
using Matrix = MatrixX<double>;
using Vector = VectorX<double>;
using Index = Eigen::Index;

inline double max_norm(const Eigen::Ref<const Vector>& v) {
  return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>();
}

}  // namespace xrk

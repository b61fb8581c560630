#pragma once

// Dense matrix exponential and phi-functions.
//
// expm() is scaling-and-squaring with diagonal Pade approximants of degree
// 3, 5, 7, 9 or 13, selected from the 1-norm of the argument (Higham 2005).
// expm1() returns e^A - I without cancellation. phi() evaluates phi_k through
// the exponential of an augmented block matrix, so singular arguments need no
// special treatment.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>

#include <Eigen/Dense>

#include "xrk/errors.hpp"
#include "xrk/types.hpp"

namespace xrk {

namespace detail {

template <typename Derived>
void require_square_finite(const Eigen::MatrixBase<Derived>& a, const char* who) {
  if (a.rows() != a.cols()) {
    throw DimensionError(std::string(who) + ": matrix must be square, got " +
                         std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
  if (!a.allFinite()) throw DomainError(std::string(who) + ": non-finite entries");
}

template <typename Derived>
typename Derived::RealScalar norm1(const Eigen::MatrixBase<Derived>& a) {
  if (a.size() == 0) return 0;
  return a.cwiseAbs().colwise().sum().maxCoeff();
}

// Pade numerator coefficients b_0..b_m for m = 3, 5, 7, 9, 13.
inline constexpr std::array<std::int64_t, 4> kPade3 = {120, 60, 12, 1};
inline constexpr std::array<std::int64_t, 6> kPade5 = {30240, 15120, 3360, 420, 30, 1};
inline constexpr std::array<std::int64_t, 8> kPade7 = {17297280, 8648640, 1995840, 277200,
                                                       25200,    1512,    56,      1};
inline constexpr std::array<std::int64_t, 10> kPade9 = {
    17643225600, 8821612800, 2075673600, 302702400, 30270240, 2162160, 110880, 3960, 90, 1};
inline constexpr std::array<std::int64_t, 14> kPade13 = {
    64764752532480000, 32382376266240000, 7771770303897600, 1187353796428800,
    129060195264000,   10559470521600,    670442572800,     33522128640,
    1323241920,        40840800,          960960,           16380,
    182,               1};

// Largest 1-norm for which each degree reaches unit-roundoff backward error.
inline constexpr std::array<double, 5> kTheta = {1.495585217958292e-2, 2.539398330063230e-1,
                                                 9.504178996162932e-1, 2.097847961257068e0,
                                                 5.371920351148152e0};

// Odd and even parts of the Pade numerator: r(A) = (V - U)^{-1} (V + U).
template <typename Scalar>
struct PadeParts {
  MatrixX<Scalar> u;
  MatrixX<Scalar> v;
};

template <typename Scalar, std::size_t N>
PadeParts<Scalar> pade_low(const MatrixX<Scalar>& a, const std::array<std::int64_t, N>& b) {
  const Index n = a.rows();
  const MatrixX<Scalar> a2 = a * a;
  MatrixX<Scalar> power = MatrixX<Scalar>::Identity(n, n);
  MatrixX<Scalar> u_inner = MatrixX<Scalar>::Zero(n, n);
  MatrixX<Scalar> v = MatrixX<Scalar>::Zero(n, n);
  for (std::size_t j = 0; j < N; j += 2) {
    v += static_cast<Scalar>(b[j]) * power;
    u_inner += static_cast<Scalar>(b[j + 1]) * power;
    if (j + 2 < N) power = power * a2;
  }
  return {a * u_inner, v};
}

template <typename Scalar>
PadeParts<Scalar> pade13(const MatrixX<Scalar>& a) {
  const auto& b = kPade13;
  const auto c = [&](int i) { return static_cast<Scalar>(b[static_cast<std::size_t>(i)]); };
  const Index n = a.rows();
  const MatrixX<Scalar> id = MatrixX<Scalar>::Identity(n, n);
  const MatrixX<Scalar> a2 = a * a;
  const MatrixX<Scalar> a4 = a2 * a2;
  const MatrixX<Scalar> a6 = a4 * a2;
  const MatrixX<Scalar> u_hi = c(13) * a6 + c(11) * a4 + c(9) * a2;
  const MatrixX<Scalar> v_hi = c(12) * a6 + c(10) * a4 + c(8) * a2;
  const MatrixX<Scalar> u =
      a * (a6 * u_hi + c(7) * a6 + c(5) * a4 + c(3) * a2 + c(1) * id);
  const MatrixX<Scalar> v = a6 * v_hi + c(6) * a6 + c(4) * a4 + c(2) * a2 + c(0) * id;
  return {u, v};
}

// Pade parts of 2^{-s} A with the degree chosen from ||A||_1; s is returned via squarings.
template <typename Scalar, typename Real>
PadeParts<Scalar> select_pade(const MatrixX<Scalar>& a, Real norm, int& squarings) {
  squarings = 0;
  if (norm <= Real(kTheta[0])) return pade_low(a, kPade3);
  if (norm <= Real(kTheta[1])) return pade_low(a, kPade5);
  if (norm <= Real(kTheta[2])) return pade_low(a, kPade7);
  if (norm <= Real(kTheta[3])) return pade_low(a, kPade9);
  if (norm > Real(kTheta[4])) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / Real(kTheta[4]))));
    squarings = std::max(squarings, 0);
  }
  return pade13(MatrixX<Scalar>(a * static_cast<Scalar>(std::ldexp(Real(1), -squarings))));
}

}  // namespace detail

/// Matrix exponential e^A.
///
/// Throws DimensionError for non-square input and DomainError for NaN/Inf entries.
template <typename Derived>
MatrixX<typename Derived::Scalar> expm(const Eigen::MatrixBase<Derived>& a_in) {
  using Scalar = typename Derived::Scalar;
  detail::require_square_finite(a_in, "expm");
  const MatrixX<Scalar> a = a_in;
  int squarings = 0;
  const auto p = detail::select_pade(a, detail::norm1(a), squarings);
  MatrixX<Scalar> result = (p.v - p.u).partialPivLu().solve(p.v + p.u);
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

/// e^A - I, accurate relative to its own size when ||A|| is small.
///
/// Uses r(A) - I = 2 (V - U)^{-1} U and undoes the scaling with
/// F <- 2F + F^2, so the identity is never added and subtracted again.
template <typename Derived>
MatrixX<typename Derived::Scalar> expm1(const Eigen::MatrixBase<Derived>& a_in) {
  using Scalar = typename Derived::Scalar;
  detail::require_square_finite(a_in, "expm1");
  const MatrixX<Scalar> a = a_in;
  int squarings = 0;
  const auto p = detail::select_pade(a, detail::norm1(a), squarings);
  MatrixX<Scalar> result = (p.v - p.u).partialPivLu().solve(Scalar(2) * p.u);
  for (int i = 0; i < squarings; ++i) result = Scalar(2) * result + result * result;
  return result;
}

/// phi_k(A) for k in {1, 2, 3}, with phi_1(z) = (e^z - 1)/z and
/// phi_{k+1}(z) = (phi_k(z) - 1/k!)/z.
///
/// Reads phi_k off the top-right block of exp([[A, I, 0..], [0, 0, I..], ..., [0..0]]),
/// which is well-defined for singular A.
template <typename Derived>
MatrixX<typename Derived::Scalar> phi(int k, const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  if (k < 1 || k > 3) {
    throw UnsupportedError("phi: index k = " + std::to_string(k) + " outside {1, 2, 3}");
  }
  detail::require_square_finite(a, "phi");
  const Index n = a.rows();
  const Index blocks = k + 1;
  MatrixX<Scalar> augmented = MatrixX<Scalar>::Zero(blocks * n, blocks * n);
  augmented.topLeftCorner(n, n) = a;
  for (Index i = 0; i < k; ++i) {
    augmented.block(i * n, (i + 1) * n, n, n).setIdentity();
  }
  const MatrixX<Scalar> e = expm(augmented);
  return e.block(0, k * n, n, n);
}

}  // namespace xrk

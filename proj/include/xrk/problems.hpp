#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include <Eigen/Dense>

#include "xrk/system.hpp"

namespace xrk {

enum class ProblemId { allen_cahn, wind, nls };

std::string_view to_string(ProblemId id);
/// Accepts "allen-cahn"/"allen_cahn", "wind", "nls".
std::optional<ProblemId> parse_problem(std::string_view name);

struct AllenCahnConfig {
  int n = 32;  // Chebyshev points 0..n; the n-1 interior ones are unknowns
  double epsilon = 0.01;
  double t_end = 1.0;
};

struct WindConfig {
  double zeta = 0.2;
  double lambda = 2.0;
  Eigen::Vector2d y0{0.5, 0.5};
  double t_end = 10.0;
};

struct NlsConfig {
  int n = 64;
  double length = 4.0 * std::sqrt(2.0) * EIGEN_PI;
  double t_end = 1.0;
  double mu() const { return 2.0 * EIGEN_PI / length; }
};

struct ProblemConfig {
  ProblemId id = ProblemId::wind;
  AllenCahnConfig allen_cahn;
  WindConfig wind;
  NlsConfig nls;
  /// Replace f by zero (test mode).
  bool suppress_nonlinearity = false;

  /// Canonical text of every parameter that affects the system.
  std::string canonical() const;
  /// 16 hex digits, stable across runs and platforms.
  std::string digest() const;
};

/// Default k-ranges for h = 2^-k.
std::pair<int, int> default_k_range(ProblemId id);

struct ChebyshevGrid {
  Matrix d;   // (n+1) x (n+1) differentiation matrix
  Vector x;   // x_j = cos(j pi / n), j = 0..n
};

/// Chebyshev collocation differentiation matrix (Trefethen's cheb). n >= 1.
ChebyshevGrid cheb(int n);

/// Periodic pseudospectral second-derivative matrix on x_j = j L / n, n even.
Matrix fourier_d2(int n, double length);

/// Initial profile u(x, 0) = 0.53 x + 0.47 sin(-1.5 pi x).
double allen_cahn_profile(double x);
/// Interior Chebyshev system for v = u - x (u itself is v plus the node coordinates).
SemiLinearSystem build_allen_cahn(const AllenCahnConfig& cfg);
SemiLinearSystem build_wind(const WindConfig& cfg);
SemiLinearSystem build_nls(const NlsConfig& cfg);
SemiLinearSystem build_problem(const ProblemConfig& cfg);

}  // namespace xrk

#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "xrk/rational.hpp"
#include "xrk/types.hpp"

namespace xrk {

enum class MethodId {
  MVERK1,  // also the one-stage SVERK
  MVERK2_1,
  MVERK2_2,
  MVERK3_1,
  MVERK3_2,
  SVERK2_1,
  SVERK2_2,
  SVERK3_1,
  SVERK3_2,
  EEULER,
  ERK2,
  ERK3,
};

inline constexpr std::array<MethodId, 12> kAllMethods = {
    MethodId::MVERK1,   MethodId::MVERK2_1, MethodId::MVERK2_2, MethodId::MVERK3_1,
    MethodId::MVERK3_2, MethodId::SVERK2_1, MethodId::SVERK2_2, MethodId::SVERK3_1,
    MethodId::SVERK3_2, MethodId::EEULER,   MethodId::ERK2,     MethodId::ERK3,
};

/// The nine modified/simplified schemes, without the classical exponential baselines.
inline constexpr std::array<MethodId, 9> kNewMethods = {
    MethodId::MVERK1,   MethodId::MVERK2_1, MethodId::MVERK2_2,
    MethodId::MVERK3_1, MethodId::MVERK3_2, MethodId::SVERK2_1,
    MethodId::SVERK2_2, MethodId::SVERK3_1, MethodId::SVERK3_2,
};

std::string_view to_string(MethodId id);
std::optional<MethodId> parse_method(std::string_view name);

enum class Family {
  mverk,   // classical internal stages, e^{hM} only in the update
  sverk,   // internal stages start from e^{c_i hM} y
  eeuler,  // exponential Euler with phi_1
  erk2,    // second-order exponential RK, c2 = 1/2
  erk3,    // third-order exponential RK, c = (0, 1/3, 2/3)
};

/// How the internal stage i propagates the step's initial value.
enum class StagePattern { identity, exponential };

enum class Correction { none, w2, w3, w2_tilde, w3_tilde, phi_baseline };

std::string_view to_string(Correction c);

/// Tableau plus the exponential structure of one scheme.
///
/// For the phi-based baselines the rational tableau is the classical scheme
/// the method reduces to when M = 0; the step itself uses phi-function weights.
struct MethodSpec {
  MethodId id = MethodId::MVERK1;
  Family family = Family::mverk;
  int stages = 1;
  std::vector<Rational> nodes;                 // c
  std::vector<std::vector<Rational>> coeffs;   // A, stages x stages
  std::vector<Rational> weights;               // b
  std::vector<StagePattern> pattern;
  Correction correction = Correction::none;
  int order = 1;
  bool requires_jacobian = false;

  // Floating copies, converted once at construction.
  Vector c;
  Matrix a;
  Vector b;

  /// Recompute nodes (row sums of A) and the floating copies after editing the rationals.
  void finalize();
};

MethodSpec method_spec(MethodId id);

/// Order-condition residuals (left minus right) for a 1-, 2- or 3-stage tableau.
/// Computed exactly in rational arithmetic.
std::vector<Rational> order_residuals(const MethodSpec& spec);

/// Residuals converted to double.
std::vector<double> order_residuals_double(const MethodSpec& spec);

}  // namespace xrk

#pragma once

#include <cstdint>
#include <optional>

#include "xrk/exp_cache.hpp"
#include "xrk/methods.hpp"
#include "xrk/system.hpp"
#include "xrk/work.hpp"

namespace xrk {

struct StepOutcome {
  Vector y1;
  Vector increment;  // y1 = y + increment before rounding of the sum
  std::optional<Vector> err_estimate;
  WorkCounters work;
};

struct FixedRun {
  Vector y;
  WorkCounters work;
  std::uint64_t steps = 0;
};

/// Correction vector added to the update of an MVERK/SVERK step:
///   w2 = w2~ = h^2/2 M f0
///   w3  = h^2/6 M (3 f0 + h (M f0 + f'(y0) g0)),          g0 = M y0 + f0
///   w3~ = h^2/2 M f0 + h^3/6 (M M f0 + f'(y0) M f0 + M f'(y0) g0)
/// Jacobian products go through sys.jvp; CapabilityError when it is missing.
Vector correction_term(Correction id, double h, const SemiLinearSystem& sys, const Vector& y0,
                       WorkCounters* work = nullptr);

/// Build every matrix function the method needs for the cache's stepsize.
void warm_cache(const MethodSpec& spec, ExpCache& cache);

/// One step of size h from (t, y). The cache must have been built for (h, sys.M).
StepOutcome step(const MethodSpec& spec, const SemiLinearSystem& sys, double t, const Vector& y,
                 double h, ExpCache& cache);

/// n = (t_end - t0)/h steps from sys.y0; n must be an integer to within 1e-12.
FixedRun integrate_fixed(const MethodSpec& spec, const SemiLinearSystem& sys, double h,
                         ExpCache& cache);
FixedRun integrate_fixed(const MethodSpec& spec, const SemiLinearSystem& sys, double h);

/// Number of steps of size h covering [t0, t_end]; ConfigError if not integral.
std::uint64_t step_count(const SemiLinearSystem& sys, double h);

}  // namespace xrk

#pragma once

#include <cstdint>

namespace xrk {

/// Exact event counts accumulated by the steppers.
struct WorkCounters {
  std::uint64_t f_evals = 0;
  std::uint64_t jvp_calls = 0;
  std::uint64_t matvecs = 0;     // products with the dense linear operator M
  std::uint64_t expmv = 0;       // products with a cached e^{chM} or phi_k(chM)
  std::uint64_t exp_builds = 0;  // matrix functions computed (cache misses)

  /// All dense matrix-vector products, whichever matrix they used.
  std::uint64_t dense_products() const { return matvecs + expmv; }

  WorkCounters& operator+=(const WorkCounters& o) {
    f_evals += o.f_evals;
    jvp_calls += o.jvp_calls;
    matvecs += o.matvecs;
    expmv += o.expmv;
    exp_builds += o.exp_builds;
    return *this;
  }
  friend bool operator==(const WorkCounters&, const WorkCounters&) = default;
};

}  // namespace xrk

#pragma once

#include <filesystem>
#include <optional>

#include "xrk/methods.hpp"
#include "xrk/problems.hpp"

namespace xrk {

struct ReferenceOptions {
  MethodId method = MethodId::MVERK3_2;
  /// Reference stepsize = smallest experiment stepsize / refinement.
  double refinement = 16.0;
  /// Max-norm agreement required between h_ref and h_ref/2.
  double certify_tolerance = 1e-10;
  /// Defaults to $XRK_REFCACHE, else ./refcache.
  std::optional<std::filesystem::path> cache_dir;
  bool use_disk_cache = true;
};

struct ReferenceSolution {
  Vector y;       // state at t_end from the finer of the two certified runs
  double h_ref = 0.0;
  double gap = 0.0;  // ||y(h_ref) - y(h_ref/2)||_inf
  bool from_disk = false;
};

std::filesystem::path default_refcache_dir();

/// Certified fine-step solution at the horizon end. If the first pair of runs
/// disagrees, h_ref is tightened once (by as many halvings as the method order
/// predicts, at most 4); a second failure throws OracleError.
ReferenceSolution reference_solution(const ProblemConfig& cfg, double smallest_h,
                                     const ReferenceOptions& opts = {});

}  // namespace xrk

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "xrk/adaptive.hpp"
#include "xrk/methods.hpp"
#include "xrk/problems.hpp"
#include "xrk/reference.hpp"

namespace xrk::bench {

inline constexpr std::string_view kCsvHeader =
    "problem,method,h,ge_max,cpu_ns,n_steps,n_f_evals,n_matvec,n_exp_builds";

struct ExperimentPlan {
  ProblemConfig problem;
  std::vector<MethodId> methods;
  int kmin = 3;
  int kmax = 8;
  int repetitions = 5;

  /// Plan with the default k-range for the problem and every method.
  static ExperimentPlan defaults(ProblemId id);
  /// Throws ConfigError on an empty/decreasing k-range, no methods, or repetitions < 1.
  void validate() const;
};

struct ConvergenceRecord {
  std::string problem;
  std::string method;
  int k = 0;
  double h = 0.0;
  double ge_max = 0.0;  // +inf when the run blew up
  std::int64_t cpu_ns = 0;
  std::uint64_t n_steps = 0;
  std::uint64_t n_f_evals = 0;
  std::uint64_t n_matvec = 0;  // all dense products: M v plus cached-function v
  std::uint64_t n_exp_builds = 0;
  WorkCounters work;
  std::vector<std::int64_t> raw_timings_ns;  // efficiency runs only
};

std::string csv_row(const ConvergenceRecord& r);
void write_csv(std::ostream& os, const std::vector<ConvergenceRecord>& rows);

double median(std::vector<double> values);

struct SlopeFit {
  double slope = 0.0;      // d log(ge) / d log(h)
  double intercept = 0.0;
  double residual = 0.0;   // RMS residual of the log2 fit
  int points = 0;
  int excluded = 0;        // non-finite or zero errors left out
  bool valid() const { return points >= 2; }
};

/// Least-squares fit of log2(err) against log2(h) over the finite, positive errors.
SlopeFit fit_slope(const std::vector<double>& h, const std::vector<double>& err);

/// Fit per method, in order of first appearance.
std::vector<std::pair<std::string, SlopeFit>> slopes_by_method(
    const std::vector<ConvergenceRecord>& rows);

/// Fixed-step sweep, one row per (method, k). Cells run in parallel.
std::vector<ConvergenceRecord> run_convergence(const ExperimentPlan& plan,
                                               const ReferenceOptions& ref = {});

/// As run_convergence, but serial, with cpu_ns the median of `repetitions`
/// timed runs after one discarded warm-up. Each timed run builds its own cache.
std::vector<ConvergenceRecord> run_efficiency(const ExperimentPlan& plan,
                                              const ReferenceOptions& ref = {});

struct ClaimResult {
  std::string suite;
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerifyOptions {
  std::uint64_t seed = 20240601;
  /// Where method tableaux come from; swapped in tests for a negative control.
  std::function<MethodSpec(MethodId)> spec_source = method_spec;
  bool include_slopes = true;
};

struct VerifyReport {
  std::vector<ClaimResult> claims;
  bool ok() const;
  void print(std::ostream& os) const;
};

VerifyReport run_verify(const VerifyOptions& opts = {});

struct AdaptiveReport {
  AdaptiveResult result;
  double ge_max = 0.0;  // vs reference at t_end; NaN when terminated early
  ControllerConfig config;
};

AdaptiveReport run_adaptive(const ProblemConfig& problem, const ControllerConfig& cfg,
                            const ReferenceOptions& ref = {});

/// Contract violations in an adaptive trace, one message each: an accepted
/// step with est > tolerance, h above maxh, a stepsize change outside
/// [0.1, 2] times the previous attempt (the shortened final step excepted),
/// or growth after an acceptance.
std::vector<std::string> trace_violations(const AdaptiveResult& result,
                                          const ControllerConfig& cfg, double t_end);

inline constexpr std::string_view kTraceHeader = "t,h,est,verdict";
void write_trace_csv(std::ostream& os, const AdaptiveResult& result);
void print_adaptive_summary(std::ostream& os, const AdaptiveReport& report);

}  // namespace xrk::bench

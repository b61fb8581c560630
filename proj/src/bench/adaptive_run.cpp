#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "xrk/bench.hpp"

namespace xrk::bench {

AdaptiveReport run_adaptive(const ProblemConfig& problem, const ControllerConfig& cfg,
                            const ReferenceOptions& ref) {
  AdaptiveReport report;
  report.config = cfg;
  const SemiLinearSystem sys = build_problem(problem);
  report.result = integrate_adaptive(sys, cfg);
  if (report.result.terminated) {
    report.ge_max = std::numeric_limits<double>::quiet_NaN();
    return report;
  }
  const auto [kmin, kmax] = default_k_range(problem.id);
  (void)kmin;
  const Vector reference = reference_solution(problem, std::ldexp(1.0, -kmax), ref).y;
  report.ge_max = max_norm(report.result.final_state() - reference);
  return report;
}

std::vector<std::string> trace_violations(const AdaptiveResult& result,
                                          const ControllerConfig& cfg, double t_end) {
  constexpr double slack = 1e-12;
  std::vector<std::string> out;
  const auto& tr = result.trace;
  char buf[160];
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const TraceRow& r = tr[i];
    if (r.verdict == Verdict::accepted && r.estimate > cfg.tolerance) {
      std::snprintf(buf, sizeof buf, "row %zu: accepted with est %.3e > %.3e", i, r.estimate,
                    cfg.tolerance);
      out.emplace_back(buf);
    }
    if (r.h > cfg.maxh * (1 + slack)) {
      std::snprintf(buf, sizeof buf, "row %zu: h %.6e above maxh", i, r.h);
      out.emplace_back(buf);
    }
    if (i == 0) continue;
    const TraceRow& p = tr[i - 1];
    const bool lands = std::abs(r.t + r.h - t_end) <= 1e-12 * std::max(1.0, std::abs(t_end));
    const double ratio = r.h / p.h;
    if (ratio > 2.0 * (1 + slack) || (ratio < 0.1 * (1 - slack) && !lands)) {
      std::snprintf(buf, sizeof buf, "row %zu: h ratio %.6f outside [0.1, 2]", i, ratio);
      out.emplace_back(buf);
    }
    if (p.verdict == Verdict::accepted && r.h > p.h * (1 + slack)) {
      std::snprintf(buf, sizeof buf, "row %zu: h grew after an accepted step", i);
      out.emplace_back(buf);
    }
  }
  return out;
}

void write_trace_csv(std::ostream& os, const AdaptiveResult& result) {
  os << kTraceHeader << '\n';
  char buf[128];
  for (const auto& row : result.trace) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,", row.t, row.h, row.estimate);
    os << buf << to_string(row.verdict) << '\n';
  }
}

void print_adaptive_summary(std::ostream& os, const AdaptiveReport& report) {
  const auto& r = report.result;
  os << "accepts=" << r.accepts << " rejects=" << r.rejects
     << " cache_rebuilds=" << r.cache_rebuilds << " terminated=" << (r.terminated ? 1 : 0)
     << " t_reached=" << r.final_time();
  char buf[64];
  std::snprintf(buf, sizeof buf, " ge_max=%.6e", report.ge_max);
  os << buf << " exp_builds=" << r.work.exp_builds << '\n';
}

}  // namespace xrk::bench

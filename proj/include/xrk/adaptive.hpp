#pragma once

#include <cstdint>
#include <vector>

#include "xrk/exp_cache.hpp"
#include "xrk/system.hpp"
#include "xrk/work.hpp"

namespace xrk {

struct ControllerConfig {
  double tolerance = 1e-3;  // bound on ||y_high - y_low||_inf / h
  double h0 = 0.1;
  double maxh = 1.0;
  double minih = 1e-8;

  /// Throws ConfigError unless 0 < minih <= h0 <= maxh and tolerance > 0.
  void validate() const;
};

enum class Verdict { accepted, rejected, terminated };

const char* to_string(Verdict v);

struct StepDecision {
  Verdict verdict = Verdict::accepted;
  double h_next = 0.0;
  double estimate = 0.0;
};

struct EmbeddedOutcome {
  Vector y_low;   // MVERK1
  Vector y_high;  // MVERK2_1
  double estimate = 0.0;
  WorkCounters work;
};

/// MVERK1 and MVERK2_1 from the same (t, y), sharing f(y) and the single e^{hM} y product.
EmbeddedOutcome embedded_step(const SemiLinearSystem& sys, double t, const Vector& y, double h,
                              ExpCache& cache);

/// Accept when est <= tolerance (keep h, capped by maxh); otherwise shrink by
/// q = tolerance / (2 est) clamped to [0.1, 2], cap by maxh, terminate below minih.
StepDecision control(double estimate, double h, const ControllerConfig& cfg);

struct TraceRow {
  double t = 0.0;  // start of the attempted step
  double h = 0.0;
  double estimate = 0.0;
  Verdict verdict = Verdict::accepted;
};

struct AdaptiveResult {
  std::vector<double> times;
  std::vector<Vector> states;
  std::vector<TraceRow> trace;
  std::uint64_t accepts = 0;
  std::uint64_t rejects = 0;
  std::uint64_t cache_rebuilds = 0;
  bool terminated = false;  // true when the controller gave up before t_end
  WorkCounters work;

  const Vector& final_state() const { return states.back(); }
  double final_time() const { return times.back(); }
};

/// Variable-stepsize integration over [sys.t0, sys.t_end] propagating the
/// first-order solution. The last step is shortened to land on t_end.
AdaptiveResult integrate_adaptive(const SemiLinearSystem& sys, const ControllerConfig& cfg);

}  // namespace xrk

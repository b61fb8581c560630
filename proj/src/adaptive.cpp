#include "xrk/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "xrk/errors.hpp"

namespace xrk {

void ControllerConfig::validate() const {
  if (!(tolerance > 0.0)) throw ConfigError("adaptive: tolerance must be positive");
  if (!(minih > 0.0 && minih <= h0 && h0 <= maxh)) {
    throw ConfigError("adaptive: need 0 < minih <= h0 <= maxh");
  }
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::accepted: return "accepted";
    case Verdict::rejected: return "rejected";
    case Verdict::terminated: return "terminated";
  }
  return "?";
}

EmbeddedOutcome embedded_step(const SemiLinearSystem& sys, double t, const Vector& y, double h,
                              ExpCache& cache) {
  if (std::abs(cache.stepsize() - h) > 1e-14 * h) {
    throw ConfigError("embedded_step: cache stepsize does not match h");
  }
  EmbeddedOutcome out;
  WorkCounters& w = out.work;
  const auto builds_before = cache.builds();

  const Matrix& m = sys.M();
  const Vector f0 = sys.f(y);
  ++w.f_evals;
  if (!f0.allFinite()) throw BlowUpError(t);
  const Vector dy = cache.exp_minus_identity(1) * y;
  ++w.expmv;

  out.y_low = y + (dy + h * f0);

  const Vector my = m * y;
  ++w.matvecs;
  const Vector y2 = y + h * (my + f0);
  if (!y2.allFinite()) throw BlowUpError(t + h);
  const Vector f2 = sys.f(y2);
  ++w.f_evals;
  const Vector mf0 = m * f0;
  ++w.matvecs;
  out.y_high = y + (dy + (0.5 * h) * (f0 + f2) + (0.5 * h * h) * mf0);

  if (!out.y_low.allFinite() || !out.y_high.allFinite()) throw BlowUpError(t + h);
  out.estimate = max_norm(out.y_high - out.y_low) / h;
  w.exp_builds = cache.builds() - builds_before;
  return out;
}

StepDecision control(double estimate, double h, const ControllerConfig& cfg) {
  StepDecision d;
  d.estimate = estimate;
  if (estimate <= cfg.tolerance) {
    d.verdict = Verdict::accepted;
    d.h_next = std::min(h, cfg.maxh);
    return d;
  }
  const double q = cfg.tolerance / (2.0 * estimate);
  double h_next = std::clamp(q, 0.1, 2.0) * h;
  h_next = std::min(h_next, cfg.maxh);
  d.h_next = h_next;
  d.verdict = h_next < cfg.minih ? Verdict::terminated : Verdict::rejected;
  return d;
}

AdaptiveResult integrate_adaptive(const SemiLinearSystem& sys, const ControllerConfig& cfg) {
  cfg.validate();
  AdaptiveResult res;
  double t = sys.t0;
  Vector y = sys.y0;
  res.times.push_back(t);
  res.states.push_back(y);

  double h = cfg.h0;
  ExpCache cache(sys.linear, h);
  const double landing_tol = 1e-13 * std::max(1.0, std::abs(sys.t_end));

  while (sys.t_end - t > landing_tol) {
    const double remaining = sys.t_end - t;
    const bool truncated = h > remaining;
    const double h_try = truncated ? remaining : h;

    // The shortened final step gets its own transient cache.
    std::optional<ExpCache> transient;
    if (truncated) {
      transient.emplace(sys.linear, h_try);
      ++res.cache_rebuilds;
    }
    ExpCache& active = truncated ? *transient : cache;

    EmbeddedOutcome e = embedded_step(sys, t, y, h_try, active);
    res.work += e.work;
    const StepDecision d = control(e.estimate, h_try, cfg);
    res.trace.push_back({t, h_try, e.estimate, d.verdict});

    if (d.verdict == Verdict::terminated) {
      res.terminated = true;
      break;
    }
    if (d.verdict == Verdict::accepted) {
      ++res.accepts;
      t = truncated ? sys.t_end : t + h_try;
      y = std::move(e.y_low);
      res.times.push_back(t);
      res.states.push_back(y);
      if (truncated) break;
      if (d.h_next != h) {
        h = d.h_next;
        cache.reset(h);
        ++res.cache_rebuilds;
      }
    } else {
      ++res.rejects;
      h = d.h_next;
      cache.reset(h);
      ++res.cache_rebuilds;
    }
  }
  return res;
}

}  // namespace xrk

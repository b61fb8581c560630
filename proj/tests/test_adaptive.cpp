#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "xrk/adaptive.hpp"
#include "xrk/bench.hpp"
#include "xrk/errors.hpp"
#include "xrk/expm.hpp"

using namespace xrk;

namespace {

ControllerConfig config(double tolerance, double h0 = 0.1, double maxh = 1.0,
                        double minih = 1e-8) {
  ControllerConfig cfg;
  cfg.tolerance = tolerance;
  cfg.h0 = h0;
  cfg.maxh = maxh;
  cfg.minih = minih;
  return cfg;
}

SemiLinearSystem wind() {
  ProblemConfig cfg;
  cfg.id = ProblemId::wind;
  return build_problem(cfg);
}

}  // namespace

TEST_CASE("controller configuration is validated") {
  CHECK_NOTHROW(config(1e-3).validate());
  CHECK_THROWS_AS(config(0.0).validate(), ConfigError);
  CHECK_THROWS_AS(config(1e-3, 2.0, 1.0).validate(), ConfigError);
  CHECK_THROWS_AS(config(1e-3, 0.1, 1.0, 0.5).validate(), ConfigError);
  CHECK_THROWS_AS(config(1e-3, 0.1, 1.0, 0.0).validate(), ConfigError);
}

TEST_CASE("embedded pair on y' = y from y = 1, h = 0.1") {
  const SemiLinearSystem sys = testing::system_with(
      Matrix::Zero(1, 1), [](const Vector& y) { return y; }, nullptr, Vector::Ones(1), 1.0);
  ExpCache cache(sys.linear, 0.1);
  const EmbeddedOutcome e = embedded_step(sys, 0.0, sys.y0, 0.1, cache);
  CHECK(e.y_low(0) == doctest::Approx(1.1).epsilon(1e-15));
  CHECK(e.y_high(0) == doctest::Approx(1.105).epsilon(1e-15));
  CHECK(e.estimate == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(e.work.expmv == 1);
  CHECK(e.work.f_evals == 2);
}

TEST_CASE("control decisions") {
  const ControllerConfig cfg = config(1e-3);
  SUBCASE("estimate within tolerance keeps h") {
    const StepDecision d = control(0.5e-3, 0.1, cfg);
    CHECK(d.verdict == Verdict::accepted);
    CHECK(d.h_next == 0.1);
  }
  SUBCASE("acceptance never grows h beyond maxh") {
    const StepDecision d = control(0.0, 2.0, cfg);
    CHECK(d.verdict == Verdict::accepted);
    CHECK(d.h_next == 1.0);
  }
  SUBCASE("large estimate hits the 0.1 clamp") {
    const StepDecision d = control(1e-2, 0.1, cfg);
    CHECK(d.verdict == Verdict::rejected);
    CHECK(d.h_next == doctest::Approx(0.01).epsilon(1e-15));
  }
  SUBCASE("moderate estimate scales by tolerance / (2 est)") {
    const StepDecision d = control(1.25e-3, 0.1, cfg);
    CHECK(d.verdict == Verdict::rejected);
    CHECK(d.h_next == doctest::Approx(0.04).epsilon(1e-15));
  }
  SUBCASE("shrinking below minih terminates") {
    const StepDecision d = control(1.0, 1e-8, cfg);
    CHECK(d.verdict == Verdict::terminated);
  }
}

TEST_CASE("f = 0: every step accepted at h0, exact final state") {
  Matrix m(2, 2);
  m << -0.5, 2.0, -2.0, -0.5;
  Vector y0(2);
  y0 << 1.0, -0.25;
  const SemiLinearSystem sys = testing::linear_only(m, y0, 1.0);
  const AdaptiveResult r = integrate_adaptive(sys, config(1e-6));
  CHECK(r.rejects == 0);
  CHECK(r.accepts == 10);
  for (const TraceRow& row : r.trace) CHECK(row.h == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(max_norm(r.final_state() - expm(m) * y0) <= 1e-13);
}

TEST_CASE("wind at tolerance 1e-4: trace contracts and global error") {
  ProblemConfig pc;
  pc.id = ProblemId::wind;
  const ControllerConfig cfg = config(1e-4);
  ReferenceOptions ref;
  ref.use_disk_cache = false;
  const bench::AdaptiveReport rep = bench::run_adaptive(pc, cfg, ref);
  const AdaptiveResult& r = rep.result;
  CHECK_FALSE(r.terminated);
  CHECK(r.final_time() == doctest::Approx(10.0).epsilon(1e-14));
  CHECK(r.rejects > 0);
  const auto violations = bench::trace_violations(r, cfg, 10.0);
  INFO("first violation: " << (violations.empty() ? std::string("none") : violations.front()));
  CHECK(violations.empty());
  CHECK(rep.ge_max <= 100 * cfg.tolerance);

  // A rejection at time t is followed by a strictly smaller attempt at the same t.
  for (std::size_t i = 1; i < r.trace.size(); ++i) {
    if (r.trace[i - 1].verdict == Verdict::rejected) {
      CHECK(r.trace[i].t == r.trace[i - 1].t);
      CHECK(r.trace[i].h < r.trace[i - 1].h);
    }
  }
  CHECK(r.accepts + 1 == r.states.size());
  CHECK(r.accepts + r.rejects == r.trace.size());
}

TEST_CASE("tighter tolerance never takes fewer accepted steps") {
  const SemiLinearSystem sys = wind();
  std::uint64_t previous = 0;
  for (double tol : {1e-3, 5e-4, 2.5e-4}) {
    const AdaptiveResult r = integrate_adaptive(sys, config(tol));
    INFO("tolerance " << tol);
    CHECK_FALSE(r.terminated);
    CHECK(r.accepts >= previous);
    previous = r.accepts;
  }
}

TEST_CASE("a large minimum stepsize ends the run early") {
  const SemiLinearSystem sys = wind();
  const AdaptiveResult r = integrate_adaptive(sys, config(1e-12, 0.1, 1.0, 0.05));
  CHECK(r.terminated);
  CHECK(r.trace.back().verdict == Verdict::terminated);
  CHECK(r.final_time() < 10.0);
}

TEST_CASE("final step lands on the horizon") {
  Matrix m = Matrix::Constant(1, 1, -1.0);
  const SemiLinearSystem sys = testing::linear_only(m, Vector::Ones(1), 0.95);
  const AdaptiveResult r = integrate_adaptive(sys, config(1e-3, 0.3, 1.0));
  CHECK(r.final_time() == 0.95);
  CHECK(r.trace.back().h == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(r.final_state()(0) == doctest::Approx(std::exp(-0.95)).epsilon(1e-14));
}

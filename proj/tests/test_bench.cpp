#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "xrk/bench.hpp"
#include "xrk/errors.hpp"

using namespace xrk;
using namespace xrk::bench;

namespace {

ReferenceOptions in_memory() {
  ReferenceOptions ref;
  ref.use_disk_cache = false;
  return ref;
}

ExperimentPlan plan_for(ProblemId id, std::vector<MethodId> methods, int kmin, int kmax) {
  ExperimentPlan plan = ExperimentPlan::defaults(id);
  plan.methods = std::move(methods);
  plan.kmin = kmin;
  plan.kmax = kmax;
  return plan;
}

const ConvergenceRecord& row_for(const std::vector<ConvergenceRecord>& rows, MethodId m) {
  for (const auto& r : rows) {
    if (r.method == to_string(m)) return r;
  }
  throw std::runtime_error("no row");
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("CSV header and row format") {
  std::ostringstream os;
  write_csv(os, {});
  CHECK(os.str() == "problem,method,h,ge_max,cpu_ns,n_steps,n_f_evals,n_matvec,n_exp_builds\n");

  ConvergenceRecord r;
  r.problem = "wind";
  r.method = "MVERK1";
  r.h = 0.125;
  r.ge_max = std::numeric_limits<double>::infinity();
  r.cpu_ns = 42;
  r.n_steps = 80;
  r.n_f_evals = 80;
  r.n_matvec = 160;
  r.n_exp_builds = 1;
  CHECK(csv_row(r) == "wind,MVERK1,0.125,inf,42,80,80,160,1");
  r.ge_max = 0.1;
  CHECK(csv_row(r) == "wind,MVERK1,0.125,0.10000000000000001,42,80,80,160,1");
}

TEST_CASE("median") {
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 3.0, 2.0}) == 2.5);
  CHECK(median({7.0}) == 7.0);
  CHECK_THROWS_AS(median({}), ConfigError);
}

TEST_CASE("slope fit on synthetic data") {
  std::vector<double> h;
  std::vector<double> err;
  for (int k = 3; k <= 8; ++k) {
    h.push_back(std::ldexp(1.0, -k));
    err.push_back(5.0 * std::pow(h.back(), 3));
  }
  SlopeFit fit = fit_slope(h, err);
  CHECK(fit.valid());
  CHECK(fit.slope == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(fit.intercept == doctest::Approx(std::log2(5.0)).epsilon(1e-12));
  CHECK(fit.residual <= 1e-12);
  CHECK(fit.points == 6);

  err[0] = std::numeric_limits<double>::infinity();
  err[1] = 0.0;
  fit = fit_slope(h, err);
  CHECK(fit.points == 4);
  CHECK(fit.excluded == 2);
  CHECK(fit.slope == doctest::Approx(3.0).epsilon(1e-12));

  CHECK_FALSE(fit_slope({0.5}, {0.1}).valid());
}

TEST_CASE("plan validation") {
  ExperimentPlan plan = ExperimentPlan::defaults(ProblemId::nls);
  CHECK(plan.methods.size() == 12);
  CHECK(plan.kmin == 2);
  CHECK(plan.kmax == 7);
  CHECK_NOTHROW(plan.validate());
  ExperimentPlan bad = plan;
  bad.kmin = 9;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = plan;
  bad.methods.clear();
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = plan;
  bad.repetitions = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("convergence rows carry exact work counts") {
  const auto plan = plan_for(ProblemId::wind,
                             {MethodId::MVERK1, MethodId::MVERK3_2, MethodId::SVERK3_1,
                              MethodId::SVERK3_2, MethodId::EEULER},
                             4, 4);
  const auto rows = run_convergence(plan, in_memory());
  REQUIRE(rows.size() == 5);
  for (const auto& r : rows) {
    INFO(r.method);
    CHECK(r.n_steps == 160);
    CHECK(r.h == 1.0 / 16);
    CHECK(r.n_matvec == r.work.dense_products());
    CHECK(r.n_f_evals == r.work.f_evals);
    CHECK(r.cpu_ns > 0);
  }
  const auto& m1 = row_for(rows, MethodId::MVERK1);
  CHECK(m1.n_exp_builds == 1);
  CHECK(m1.work.expmv == 160);
  CHECK(m1.work.f_evals == 160);
  CHECK(row_for(rows, MethodId::MVERK3_2).n_exp_builds == 1);
  CHECK(row_for(rows, MethodId::MVERK3_2).work.expmv == 160);
  CHECK(row_for(rows, MethodId::SVERK3_1).n_exp_builds == 3);
  CHECK(row_for(rows, MethodId::SVERK3_2).n_exp_builds == 3);
  CHECK(row_for(rows, MethodId::EEULER).n_exp_builds == 2);
}

TEST_CASE("non-timing columns are deterministic") {
  const auto plan = plan_for(ProblemId::nls, {MethodId::MVERK2_1, MethodId::SVERK2_2}, 3, 4);
  const auto a = run_convergence(plan, in_memory());
  const auto b = run_convergence(plan, in_memory());
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].method == b[i].method);
    CHECK(a[i].h == b[i].h);
    CHECK(a[i].ge_max == b[i].ge_max);
    CHECK(a[i].work == b[i].work);
  }
}

TEST_CASE("efficiency runs report the median of the timed repetitions") {
  auto plan = plan_for(ProblemId::wind, {MethodId::MVERK2_2}, 3, 3);
  plan.repetitions = 5;
  const auto rows = run_efficiency(plan, in_memory());
  REQUIRE(rows.size() == 1);
  const auto& r = rows.front();
  REQUIRE(r.raw_timings_ns.size() == 5);
  std::vector<double> t(r.raw_timings_ns.begin(), r.raw_timings_ns.end());
  CHECK(r.cpu_ns == static_cast<std::int64_t>(median(t)));
  CHECK(r.n_steps == 80);
}

TEST_CASE("suppressing the nonlinearity leaves only rounding error") {
  auto plan = plan_for(ProblemId::wind, {MethodId::MVERK3_1, MethodId::SVERK2_1}, 3, 5);
  plan.problem.suppress_nonlinearity = true;
  for (const auto& r : run_convergence(plan, in_memory())) {
    INFO(r.method << " h = " << r.h);
    CHECK(r.ge_max <= 1e-11);
  }
}

TEST_CASE("observed orders on small sweeps") {
  const auto nls =
      run_convergence(plan_for(ProblemId::nls, {MethodId::SVERK3_1}, 2, 7), in_memory());
  const auto wind =
      run_convergence(plan_for(ProblemId::wind, {MethodId::MVERK1}, 3, 8), in_memory());
  CHECK(slopes_by_method(nls).front().second.slope == doctest::Approx(3.0).epsilon(0.1));
  CHECK(slopes_by_method(wind).front().second.slope == doctest::Approx(1.0).epsilon(0.25));
}

TEST_CASE("verification fails when a tableau is corrupted") {
  VerifyOptions opts;
  opts.include_slopes = false;
  const VerifyReport clean = run_verify(opts);
  CHECK(clean.ok());

  opts.spec_source = [](MethodId id) {
    MethodSpec spec = method_spec(id);
    if (id == MethodId::MVERK3_2) {
      spec.weights[1] = spec.weights[1] + Rational(1, 100);
      spec.finalize();
    }
    return spec;
  };
  const VerifyReport broken = run_verify(opts);
  CHECK_FALSE(broken.ok());
  int failures = 0;
  for (const auto& c : broken.claims) {
    if (!c.passed) {
      ++failures;
      CHECK(c.name.rfind("MVERK3_2", 0) == 0);
    }
  }
  CHECK(failures >= 1);
  std::ostringstream os;
  broken.print(os);
  CHECK(os.str().find("[FAIL] MVERK3_2") != std::string::npos);
  CHECK(os.str().find("VERIFICATION FAILED") != std::string::npos);
}

TEST_CASE("adaptive trace CSV") {
  ProblemConfig pc;
  pc.id = ProblemId::wind;
  ControllerConfig cfg;
  cfg.tolerance = 1e-3;
  const AdaptiveReport rep = run_adaptive(pc, cfg, in_memory());
  std::ostringstream os;
  write_trace_csv(os, rep.result);
  const auto rows = lines(os.str());
  REQUIRE(rows.size() == rep.result.trace.size() + 1);
  CHECK(rows.front() == "t,h,est,verdict");
  CHECK(rows[1].rfind("0,", 0) == 0);
  CHECK(trace_violations(rep.result, cfg, 10.0).empty());
  CHECK(rep.ge_max <= 100 * cfg.tolerance);
}

TEST_CASE("trace checker flags broken contracts") {
  ControllerConfig cfg;
  cfg.tolerance = 1e-3;
  AdaptiveResult r;
  r.trace.push_back({0.0, 0.1, 5e-3, Verdict::accepted});
  r.trace.push_back({0.1, 0.3, 1e-4, Verdict::accepted});
  const auto v = trace_violations(r, cfg, 10.0);
  CHECK(v.size() >= 2);
}

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <thread>
#include <tuple>

#include "xrk/bench.hpp"
#include "xrk/errors.hpp"
#include "xrk/stepper.hpp"

namespace xrk::bench {

namespace {

using Clock = std::chrono::steady_clock;

std::string g17(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Cell {
  MethodId method;
  int k;
};

std::vector<Cell> cells_of(const ExperimentPlan& plan) {
  std::vector<Cell> cells;
  for (const MethodId m : plan.methods) {
    for (int k = plan.kmin; k <= plan.kmax; ++k) cells.push_back({m, k});
  }
  return cells;
}

ConvergenceRecord blank_record(const ExperimentPlan& plan, const SemiLinearSystem& sys,
                               const Cell& cell) {
  ConvergenceRecord r;
  r.problem = std::string(to_string(plan.problem.id));
  r.method = std::string(to_string(cell.method));
  r.k = cell.k;
  r.h = std::ldexp(1.0, -cell.k);
  r.n_steps = step_count(sys, r.h);
  return r;
}

void fill_counters(ConvergenceRecord& r, const FixedRun& run) {
  r.work = run.work;
  r.n_steps = run.steps;
  r.n_f_evals = run.work.f_evals;
  r.n_matvec = run.work.dense_products();
  r.n_exp_builds = run.work.exp_builds;
}

std::int64_t elapsed_ns(Clock::time_point start) {
  const auto ns =
      std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start).count();
  return std::max<std::int64_t>(ns, 1);
}

// One timed fixed-step run with a fresh cache; ge is +inf on blow-up.
ConvergenceRecord run_cell(const ExperimentPlan& plan, const SemiLinearSystem& sys,
                           const Vector& reference, const Cell& cell) {
  ConvergenceRecord r = blank_record(plan, sys, cell);
  const MethodSpec spec = method_spec(cell.method);
  const auto start = Clock::now();
  try {
    ExpCache cache(sys.linear, r.h);
    const FixedRun run = integrate_fixed(spec, sys, r.h, cache);
    r.cpu_ns = elapsed_ns(start);
    fill_counters(r, run);
    r.ge_max = max_norm(run.y - reference);
  } catch (const BlowUpError&) {
    r.cpu_ns = elapsed_ns(start);
    r.ge_max = std::numeric_limits<double>::infinity();
  }
  return r;
}

}  // namespace

ExperimentPlan ExperimentPlan::defaults(ProblemId id) {
  ExperimentPlan plan;
  plan.problem.id = id;
  plan.methods.assign(kAllMethods.begin(), kAllMethods.end());
  std::tie(plan.kmin, plan.kmax) = default_k_range(id);
  return plan;
}

void ExperimentPlan::validate() const {
  if (methods.empty()) throw ConfigError("plan: no methods selected");
  if (kmin > kmax) throw ConfigError("plan: k-range must be nonempty and increasing");
  if (kmin < 0 || kmax > 30) throw ConfigError("plan: k outside [0, 30]");
  if (repetitions < 1) throw ConfigError("plan: repetitions must be >= 1");
}

std::string csv_row(const ConvergenceRecord& r) {
  std::string row = r.problem + "," + r.method + "," + g17(r.h) + "," + g17(r.ge_max) + ",";
  row += std::to_string(r.cpu_ns) + "," + std::to_string(r.n_steps) + "," +
         std::to_string(r.n_f_evals) + "," + std::to_string(r.n_matvec) + "," +
         std::to_string(r.n_exp_builds);
  return row;
}

void write_csv(std::ostream& os, const std::vector<ConvergenceRecord>& rows) {
  os << kCsvHeader << '\n';
  for (const auto& r : rows) os << csv_row(r) << '\n';
}

double median(std::vector<double> values) {
  if (values.empty()) throw ConfigError("median of an empty sample");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return 0.5 * (values[mid - 1] + values[mid]);
}

SlopeFit fit_slope(const std::vector<double>& h, const std::vector<double>& err) {
  SlopeFit fit;
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < h.size() && i < err.size(); ++i) {
    if (std::isfinite(err[i]) && err[i] > 0.0 && h[i] > 0.0) {
      xs.push_back(std::log2(h[i]));
      ys.push_back(std::log2(err[i]));
    } else {
      ++fit.excluded;
    }
  }
  fit.points = static_cast<int>(xs.size());
  if (fit.points < 2) return fit;
  const double n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ss += e * e;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

std::vector<std::pair<std::string, SlopeFit>> slopes_by_method(
    const std::vector<ConvergenceRecord>& rows) {
  std::vector<std::string> order;
  for (const auto& r : rows) {
    if (std::find(order.begin(), order.end(), r.method) == order.end()) order.push_back(r.method);
  }
  std::vector<std::pair<std::string, SlopeFit>> out;
  for (const auto& m : order) {
    std::vector<double> hs;
    std::vector<double> es;
    for (const auto& r : rows) {
      if (r.method == m) {
        hs.push_back(r.h);
        es.push_back(r.ge_max);
      }
    }
    out.emplace_back(m, fit_slope(hs, es));
  }
  return out;
}

std::vector<ConvergenceRecord> run_convergence(const ExperimentPlan& plan,
                                               const ReferenceOptions& ref) {
  plan.validate();
  const SemiLinearSystem sys = build_problem(plan.problem);
  const Vector reference =
      reference_solution(plan.problem, std::ldexp(1.0, -plan.kmax), ref).y;

  const std::vector<Cell> cells = cells_of(plan);
  std::vector<ConvergenceRecord> rows(cells.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      rows[i] = run_cell(plan, sys, reference, cells[i]);
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t nthreads = std::min<std::size_t>(hw, cells.size());
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  }
  return rows;
}

std::vector<ConvergenceRecord> run_efficiency(const ExperimentPlan& plan,
                                              const ReferenceOptions& ref) {
  plan.validate();
  const SemiLinearSystem sys = build_problem(plan.problem);
  const Vector reference =
      reference_solution(plan.problem, std::ldexp(1.0, -plan.kmax), ref).y;

  std::vector<ConvergenceRecord> rows;
  for (const Cell& cell : cells_of(plan)) {
    // The warm-up run supplies GE and counters; it is not timed.
    ConvergenceRecord r = run_cell(plan, sys, reference, cell);
    if (std::isfinite(r.ge_max)) {
      const MethodSpec spec = method_spec(cell.method);
      std::vector<double> samples;
      for (int rep = 0; rep < plan.repetitions; ++rep) {
        const auto start = Clock::now();
        ExpCache cache(sys.linear, r.h);
        integrate_fixed(spec, sys, r.h, cache);
        const std::int64_t ns = elapsed_ns(start);
        r.raw_timings_ns.push_back(ns);
        samples.push_back(static_cast<double>(ns));
      }
      r.cpu_ns = static_cast<std::int64_t>(std::llround(median(samples)));
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace xrk::bench

// Command-line harness: verification suites, convergence/efficiency sweeps,
// adaptive runs. Exit status: 0 success, 1 verification failure, 2 configuration error.

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "xrk/bench.hpp"
#include "xrk/errors.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitConfig = 2;

struct Options {
  std::string problem = "wind";
  std::string methods = "all";
  int kmin = -1;
  int kmax = -1;
  int reps = 5;
  std::string out;
  double zeta = 0.2;
  double lambda = 2.0;
  std::vector<double> y0{0.5, 0.5};
  double eps = 1e-3;
  double h0 = 0.1;
  double maxh = 1.0;
  double minih = 1e-8;
  std::uint64_t seed = 20240601;
};

std::vector<xrk::MethodId> parse_methods(const std::string& list) {
  if (list == "all") return {xrk::kAllMethods.begin(), xrk::kAllMethods.end()};
  std::vector<xrk::MethodId> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto id = xrk::parse_method(item);
    if (!id) throw xrk::ConfigError("unknown method '" + item + "'");
    out.push_back(*id);
  }
  if (out.empty()) throw xrk::ConfigError("--methods selects nothing");
  return out;
}

xrk::ProblemConfig problem_config(const Options& o) {
  const auto id = xrk::parse_problem(o.problem);
  if (!id) throw xrk::ConfigError("unknown problem '" + o.problem + "'");
  xrk::ProblemConfig cfg;
  cfg.id = *id;
  cfg.wind.zeta = o.zeta;
  cfg.wind.lambda = o.lambda;
  if (o.y0.size() != 2) throw xrk::ConfigError("--y0 needs exactly two values");
  cfg.wind.y0 << o.y0[0], o.y0[1];
  return cfg;
}

xrk::bench::ExperimentPlan plan_from(const Options& o) {
  xrk::bench::ExperimentPlan plan;
  plan.problem = problem_config(o);
  plan.methods = parse_methods(o.methods);
  const auto [kmin, kmax] = xrk::default_k_range(plan.problem.id);
  plan.kmin = o.kmin >= 0 ? o.kmin : kmin;
  plan.kmax = o.kmax >= 0 ? o.kmax : kmax;
  plan.repetitions = o.reps;
  plan.validate();
  return plan;
}

// Writes to --out when given, otherwise stdout.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw xrk::ConfigError("cannot open '" + path + "' for writing");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  bool to_file() const { return static_cast<bool>(file_); }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void print_slopes(std::ostream& os, const std::vector<xrk::bench::ConvergenceRecord>& rows) {
  for (const auto& [name, fit] : xrk::bench::slopes_by_method(rows)) {
    os << "  " << name << ": slope " << fit.slope << " (points " << fit.points << ", excluded "
       << fit.excluded << ", residual " << fit.residual << ")\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exponential Runge-Kutta benchmark harness"};
  app.require_subcommand(1);
  Options o;

  const auto add_problem = [&](CLI::App* sub) {
    sub->add_option("--problem", o.problem, "allen-cahn | wind | nls")->capture_default_str();
    sub->add_option("--zeta", o.zeta, "wind damping")->capture_default_str();
    sub->add_option("--lambda", o.lambda, "wind detuning")->capture_default_str();
    sub->add_option("--y0", o.y0, "wind initial state")->delimiter(',')->expected(2);
  };
  const auto add_sweep = [&](CLI::App* sub) {
    add_problem(sub);
    sub->add_option("--methods", o.methods, "comma list or 'all'")->capture_default_str();
    sub->add_option("--kmin", o.kmin, "smallest k (h = 2^-k)");
    sub->add_option("--kmax", o.kmax, "largest k");
    sub->add_option("--out", o.out, "CSV output path (default stdout)");
    sub->add_option("--seed", o.seed, "RNG seed")->capture_default_str();
  };

  auto* verify = app.add_subcommand("verify", "run the verification suites");
  verify->add_option("--seed", o.seed, "RNG seed")->capture_default_str();
  auto* convergence = app.add_subcommand("convergence", "global error against stepsize");
  add_sweep(convergence);
  auto* efficiency = app.add_subcommand("efficiency", "global error against CPU time");
  add_sweep(efficiency);
  efficiency->add_option("--reps", o.reps, "timed repetitions")->capture_default_str();
  auto* adaptive = app.add_subcommand("adaptive", "variable-stepsize run with trace");
  add_problem(adaptive);
  adaptive->add_option("--eps", o.eps, "tolerance")->capture_default_str();
  adaptive->add_option("--h0", o.h0, "initial stepsize")->capture_default_str();
  adaptive->add_option("--maxh", o.maxh, "maximum stepsize")->capture_default_str();
  adaptive->add_option("--minih", o.minih, "minimum stepsize")->capture_default_str();
  adaptive->add_option("--out", o.out, "trace CSV path (default stdout)");
  auto* list = app.add_subcommand("list-methods", "print the method catalog");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*list) {
      for (const auto id : xrk::kAllMethods) {
        const auto spec = xrk::method_spec(id);
        std::cout << xrk::to_string(id) << "  stages=" << spec.stages << " order=" << spec.order
                  << " correction=" << xrk::to_string(spec.correction) << " c=(";
        for (std::size_t i = 0; i < spec.nodes.size(); ++i) {
          std::cout << (i ? ", " : "") << spec.nodes[i];
        }
        std::cout << ") b=(";
        for (std::size_t i = 0; i < spec.weights.size(); ++i) {
          std::cout << (i ? ", " : "") << spec.weights[i];
        }
        std::cout << ")\n";
      }
      return kExitOk;
    }
    if (*verify) {
      xrk::bench::VerifyOptions vo;
      vo.seed = o.seed;
      const auto report = xrk::bench::run_verify(vo);
      report.print(std::cout);
      return report.ok() ? kExitOk : kExitVerifyFailed;
    }
    if (*convergence || *efficiency) {
      const auto plan = plan_from(o);
      const auto rows = *convergence ? xrk::bench::run_convergence(plan)
                                     : xrk::bench::run_efficiency(plan);
      Output out(o.out);
      xrk::bench::write_csv(out.stream(), rows);
      std::ostream& log = out.to_file() ? std::cout : std::cerr;
      log << "fitted slopes of log2(GE) vs log2(h):\n";
      print_slopes(log, rows);
      return kExitOk;
    }
    if (*adaptive) {
      xrk::ControllerConfig cfg;
      cfg.tolerance = o.eps;
      cfg.h0 = o.h0;
      cfg.maxh = o.maxh;
      cfg.minih = o.minih;
      cfg.validate();
      const auto report = xrk::bench::run_adaptive(problem_config(o), cfg);
      Output out(o.out);
      xrk::bench::write_trace_csv(out.stream(), report.result);
      xrk::bench::print_adaptive_summary(out.to_file() ? std::cout : std::cerr, report);
      return kExitOk;
    }
  } catch (const xrk::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const xrk::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitVerifyFailed;
  }
  return kExitOk;
}

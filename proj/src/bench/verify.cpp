#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include "xrk/bench.hpp"
#include "xrk/errors.hpp"
#include "xrk/expm.hpp"
#include "xrk/stepper.hpp"

namespace xrk::bench {

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

Matrix random_matrix(std::mt19937_64& rng, Index n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix m(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) m(i, j) = u(rng);
  }
  return m;
}

SemiLinearSystem linear_system(Matrix m, Vector y0, double t_end) {
  SemiLinearSystem sys;
  sys.name = "linear";
  sys.linear = std::make_shared<Matrix>(std::move(m));
  sys.f = [](const Vector& y) { return Vector(Vector::Zero(y.size())); };
  sys.jvp = [](const Vector& y, const Vector&) { return Vector(Vector::Zero(y.size())); };
  sys.y0 = std::move(y0);
  sys.t_end = t_end;
  return sys;
}

// Explicit Runge-Kutta step for y' = g(y), used as the M = 0 reference.
struct ClassicalTableau {
  std::string name;
  Matrix a;
  Vector b;
};

Vector classical_rk_step(const ClassicalTableau& tab, const Nonlinearity& g, const Vector& y,
                         double h) {
  const Index s = tab.b.size();
  std::vector<Vector> k(static_cast<std::size_t>(s));
  for (Index i = 0; i < s; ++i) {
    Vector yi = y;
    for (Index j = 0; j < i; ++j) yi += h * tab.a(i, j) * k[j];
    k[i] = g(yi);
  }
  Vector out = y;
  for (Index i = 0; i < s; ++i) out += h * tab.b(i) * k[i];
  return out;
}

ClassicalTableau tableau(std::string name, std::initializer_list<double> a_lower,
                         std::initializer_list<double> b) {
  ClassicalTableau t;
  t.name = std::move(name);
  const Index s = static_cast<Index>(b.size());
  t.a = Matrix::Zero(s, s);
  auto it = a_lower.begin();
  for (Index i = 1; i < s; ++i) {
    for (Index j = 0; j < i; ++j) t.a(i, j) = *it++;
  }
  t.b = Eigen::Map<const Vector>(b.begin(), s);
  return t;
}

void order_suite(const VerifyOptions& opts, VerifyReport& report) {
  for (const MethodId id : kAllMethods) {
    const MethodSpec spec = opts.spec_source(id);
    double worst = 0.0;
    for (const double r : order_residuals_double(spec)) worst = std::max(worst, std::abs(r));
    report.claims.push_back({"order-residuals", std::string(to_string(id)), worst <= 1e-15,
                             "max |residual| = " + sci(worst)});
  }
}

void homogeneous_suite(const VerifyOptions& opts, VerifyReport& report) {
  std::mt19937_64 rng(opts.seed);
  const Matrix r = random_matrix(rng, 6);
  const Matrix skew = r - r.transpose();
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vector y0(6);
  for (Index i = 0; i < 6; ++i) y0(i) = u(rng);
  const double h = 0.05;
  const SemiLinearSystem sys = linear_system(skew, y0, 100 * h);
  for (const MethodId id : kAllMethods) {
    const MethodSpec spec = opts.spec_source(id);
    ExpCache cache(sys.linear, h);
    warm_cache(spec, cache);
    Vector y = y0;
    double worst = 0.0;
    for (int n = 1; n <= 100; ++n) {
      y = step(spec, sys, (n - 1) * h, y, h, cache).y1;
      const Vector exact = expm((n * h) * skew) * y0;
      worst = std::max(worst, max_norm(y - exact));
    }
    report.claims.push_back({"homogeneous-exactness", std::string(to_string(id)),
                             worst <= 1e-11, "max error = " + sci(worst)});
  }
}

void astability_suite(const VerifyOptions& opts, VerifyReport& report) {
  // lambda = re + i im embedded as [[re, -im], [im, re]].
  const std::vector<std::pair<double, double>> lambdas = {{-50.0, 0.0}, {-1.0, 30.0},
                                                          {-1e-3, 200.0}};
  const double h = 0.1;
  const int steps = 200;
  for (const MethodId id : kAllMethods) {
    const MethodSpec spec = opts.spec_source(id);
    bool ok = true;
    double worst_ratio = 0.0;
    for (const auto& [re, im] : lambdas) {
      Matrix m(2, 2);
      m << re, -im, im, re;
      Vector y0(2);
      y0 << 0.6, -0.8;
      const SemiLinearSystem sys = linear_system(m, y0, steps * h);
      ExpCache cache(sys.linear, h);
      Vector y = y0;
      for (int n = 1; n <= steps; ++n) {
        y = step(spec, sys, (n - 1) * h, y, h, cache).y1;
        const double bound = y0.stableNorm() * std::exp(re * n * h);
        if (bound < std::numeric_limits<double>::min()) {
          // Below the normal range only the sign of the comparison is meaningful.
          ok = ok && y.stableNorm() <= std::numeric_limits<double>::min();
          continue;
        }
        const double ratio = y.stableNorm() / bound;
        worst_ratio = std::max(worst_ratio, ratio);
        ok = ok && ratio <= 1.0 + 1e-12;
      }
    }
    report.claims.push_back({"a-stability", std::string(to_string(id)), ok,
                             "max ||y_n|| / bound = " + sci(worst_ratio)});
  }
}

void reduction_suite(const VerifyOptions& opts, VerifyReport& report) {
  const std::vector<std::pair<MethodId, ClassicalTableau>> pairs = {
      {MethodId::MVERK2_1, tableau("Heun-2", {1.0}, {0.5, 0.5})},
      {MethodId::MVERK2_2, tableau("modified Euler", {0.5}, {0.0, 1.0})},
      {MethodId::MVERK3_2, tableau("RK3 (1/2, 3/4)", {0.5, 0.0, 0.75}, {2.0 / 9, 3.0 / 9, 4.0 / 9})},
      {MethodId::MVERK3_1, tableau("Heun-3", {1.0 / 3, 0.0, 2.0 / 3}, {0.25, 0.0, 0.75})},
      {MethodId::SVERK3_1, tableau("RK3 (1/2, 3/4)", {0.5, 0.0, 0.75}, {2.0 / 9, 3.0 / 9, 4.0 / 9})},
      {MethodId::SVERK3_2, tableau("Heun-3", {1.0 / 3, 0.0, 2.0 / 3}, {0.25, 0.0, 0.75})},
  };

  std::mt19937_64 rng(opts.seed + 1);
  const Index d = 4;
  const Matrix w = random_matrix(rng, d);
  SemiLinearSystem sys;
  sys.name = "smooth";
  sys.linear = std::make_shared<Matrix>(Matrix::Zero(d, d));
  sys.f = [w](const Vector& y) -> Vector {
    return (w * y).array().sin().matrix() + 0.1 * y.cwiseProduct(y);
  };
  sys.jvp = [w](const Vector& y, const Vector& v) -> Vector {
    return (w * y).array().cos().matrix().cwiseProduct(w * v) + 0.2 * y.cwiseProduct(v);
  };
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Vector> states;
  for (int i = 0; i < 50; ++i) {
    Vector y(d);
    for (Index j = 0; j < d; ++j) y(j) = u(rng);
    states.push_back(y);
  }

  const double h = 0.1;
  for (const auto& [id, tab] : pairs) {
    const MethodSpec spec = opts.spec_source(id);
    ExpCache cache(sys.linear, h);
    double worst = 0.0;
    for (const auto& y : states) {
      const Vector ours = step(spec, sys, 0.0, y, h, cache).y1;
      const Vector ref = classical_rk_step(tab, sys.f, y, h);
      worst = std::max(worst, max_norm(ours - ref));
    }
    report.claims.push_back({"classical-reduction",
                             std::string(to_string(id)) + " == " + tab.name, worst <= 1e-14,
                             "max stepwise difference = " + sci(worst)});
  }
}

void jvp_suite(VerifyReport& report) {
  const double eps = 1e-5;
  for (const ProblemId pid : {ProblemId::allen_cahn, ProblemId::wind, ProblemId::nls}) {
    ProblemConfig cfg;
    cfg.id = pid;
    const SemiLinearSystem sys = build_problem(cfg);
    // Three states on the trajectory: y0 and two MVERK1 snapshots.
    std::vector<Vector> states{sys.y0};
    const double h = pid == ProblemId::allen_cahn ? 1.0 / 256 : 1.0 / 64;
    ExpCache cache(sys.linear, h);
    const MethodSpec euler = method_spec(MethodId::MVERK1);
    Vector y = sys.y0;
    for (int n = 1; n <= 20; ++n) {
      y = step(euler, sys, 0.0, y, h, cache).y1;
      if (n == 10 || n == 20) states.push_back(y);
    }
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst_fd = 0.0;
    double worst_lin = 0.0;
    for (const auto& s : states) {
      Vector v(s.size());
      Vector w(s.size());
      for (Index i = 0; i < s.size(); ++i) {
        v(i) = u(rng);
        w(i) = u(rng);
      }
      const Vector fd = (sys.f(s + eps * v) - sys.f(s - eps * v)) / (2.0 * eps);
      worst_fd = std::max(worst_fd, max_norm(fd - sys.jvp(s, v)) / max_norm(v));
      const Vector lin = sys.jvp(s, 2.0 * v - 0.5 * w) - (2.0 * sys.jvp(s, v) - 0.5 * sys.jvp(s, w));
      worst_lin = std::max(worst_lin, max_norm(lin));
    }
    report.claims.push_back({"jvp-consistency", std::string(to_string(pid)),
                             worst_fd <= 1e-6 && worst_lin <= 1e-12,
                             "central-difference gap = " + sci(worst_fd) +
                                 ", linearity gap = " + sci(worst_lin)});
  }
}

void slope_suite(VerifyReport& report) {
  ExperimentPlan plan = ExperimentPlan::defaults(ProblemId::wind);
  ReferenceOptions ref;
  ref.use_disk_cache = false;
  const auto rows = run_convergence(plan, ref);
  for (const auto& [name, fit] : slopes_by_method(rows)) {
    const int nominal = method_spec(*parse_method(name)).order;
    const bool ok = fit.valid() && std::abs(fit.slope - nominal) <= 0.25;
    std::ostringstream detail;
    detail.precision(3);
    detail << std::fixed << "slope " << fit.slope << " (nominal " << nominal << ", fit residual "
           << fit.residual << ")";
    report.claims.push_back({"empirical-order (wind)", name, ok, detail.str()});
  }
}

}  // namespace

bool VerifyReport::ok() const {
  for (const auto& c : claims) {
    if (!c.passed) return false;
  }
  return !claims.empty();
}

void VerifyReport::print(std::ostream& os) const {
  std::string current;
  for (const auto& c : claims) {
    if (c.suite != current) {
      current = c.suite;
      os << "== " << current << '\n';
    }
    os << (c.passed ? "  [PASS] " : "  [FAIL] ") << c.name << ": " << c.detail << '\n';
  }
  os << (ok() ? "all claims verified" : "VERIFICATION FAILED") << '\n';
}

VerifyReport run_verify(const VerifyOptions& opts) {
  VerifyReport report;
  order_suite(opts, report);
  homogeneous_suite(opts, report);
  reduction_suite(opts, report);
  astability_suite(opts, report);
  jvp_suite(report);
  if (opts.include_slopes) slope_suite(report);
  return report;
}

}  // namespace xrk::bench

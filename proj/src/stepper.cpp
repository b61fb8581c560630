#include "xrk/stepper.hpp"

#include <cmath>
#include <map>
#include <vector>

#include "xrk/errors.hpp"

namespace xrk {

namespace {

// Routes every evaluation through the work counters.
class Evaluator {
 public:
  Evaluator(const SemiLinearSystem& sys, WorkCounters& work) : sys_(sys), work_(work) {}

  Vector f(const Vector& y) const {
    ++work_.f_evals;
    return sys_.f(y);
  }
  Vector apply_linear(const Vector& v) const {
    ++work_.matvecs;
    return sys_.M() * v;
  }
  Vector jvp(const Vector& y, const Vector& v) const {
    if (!sys_.has_jvp()) {
      throw CapabilityError("system '" + sys_.name +
                            "' provides no Jacobian action; third-order corrections need one");
    }
    ++work_.jvp_calls;
    return sys_.jvp(y, v);
  }
  Vector apply(const Matrix& fn, const Vector& v) const {
    ++work_.expmv;
    return fn * v;
  }
  // (e^{chM} - I) v; the caller adds v back last.
  Vector exp_increment(ExpCache& cache, Rational c, const Vector& v) const {
    return apply(cache.exp_minus_identity(c), v);
  }

 private:
  const SemiLinearSystem& sys_;
  WorkCounters& work_;
};

void require_finite(const Vector& v, double t) {
  if (!v.allFinite()) throw BlowUpError(t);
}

void finish(StepOutcome& out, const Vector& y, Vector increment, double t_end) {
  require_finite(increment, t_end);
  out.y1 = y + increment;
  out.increment = std::move(increment);
}

// Correction assembled from data the step already has. my0 is M y0 when known.
Vector correction(Correction id, double h, const Evaluator& ev, const Vector& y0,
                  const Vector& f0, const Vector* my0) {
  switch (id) {
    case Correction::none:
    case Correction::phi_baseline:
      return Vector::Zero(y0.size());
    case Correction::w2:
    case Correction::w2_tilde:
      return (0.5 * h * h) * ev.apply_linear(f0);
    case Correction::w3: {
      const Vector g0 = (my0 ? *my0 : ev.apply_linear(y0)) + f0;
      const Vector mf0 = ev.apply_linear(f0);
      const Vector inner = 3.0 * f0 + h * (mf0 + ev.jvp(y0, g0));
      return (h * h / 6.0) * ev.apply_linear(inner);
    }
    case Correction::w3_tilde: {
      const Vector g0 = (my0 ? *my0 : ev.apply_linear(y0)) + f0;
      const Vector mf0 = ev.apply_linear(f0);
      // (M + f'(y0)) M f0 + M f'(y0) g0, with M applied once to the sum of the two M-terms.
      const Vector third = ev.apply_linear(mf0 + ev.jvp(y0, g0)) + ev.jvp(y0, mf0);
      return (0.5 * h * h) * mf0 + (h * h * h / 6.0) * third;
    }
  }
  throw UnsupportedError("correction: unknown id");
}

void check_cache(const ExpCache& cache, const SemiLinearSystem& sys, double h) {
  if (!(h > 0.0)) throw ConfigError("step: stepsize must be positive");
  if (std::abs(cache.stepsize() - h) > 1e-14 * h) {
    throw ConfigError("step: cache built for h = " + std::to_string(cache.stepsize()) +
                      ", step uses h = " + std::to_string(h));
  }
  if (&cache.linear() != sys.linear.get() && cache.linear() != sys.M()) {
    throw ConfigError("step: cache built for a different linear operator");
  }
}

StepOutcome tableau_step(const MethodSpec& spec, const SemiLinearSystem& sys, double t,
                         const Vector& y, double h, ExpCache& cache) {
  StepOutcome out;
  const Evaluator ev(sys, out.work);
  const int s = spec.stages;
  const bool mverk = spec.family == Family::mverk;

  // (e^{c h M} - I) y, computed at most once per distinct node within the step.
  std::map<Rational, Vector> increments;
  const auto exp_increment = [&](Rational c) -> const Vector& {
    auto it = increments.find(c);
    if (it == increments.end()) it = increments.emplace(c, ev.exp_increment(cache, c, y)).first;
    return it->second;
  };

  // M Y_j is needed when a later stage uses it, or for g0 of the third-order correction.
  std::vector<bool> need_my(static_cast<std::size_t>(s), false);
  if (mverk) {
    for (int j = 0; j < s; ++j) {
      for (int i = j + 1; i < s; ++i) {
        if (!spec.coeffs[i][j].is_zero()) need_my[j] = true;
      }
    }
  }

  std::vector<Vector> fs(static_cast<std::size_t>(s));
  std::vector<Vector> mys(static_cast<std::size_t>(s));
  for (int i = 0; i < s; ++i) {
    for (int j = i; j < s; ++j) {
      if (!spec.coeffs[i][j].is_zero()) {
        throw UnsupportedError("step: only explicit (strictly lower-triangular) tableaux");
      }
    }
    Vector stage = y;
    if (!mverk && !spec.nodes[i].is_zero()) stage += exp_increment(spec.nodes[i]);
    for (int j = 0; j < i; ++j) {
      const double aij = spec.a(i, j);
      if (aij == 0.0) continue;
      if (mverk) {
        stage += (h * aij) * (mys[j] + fs[j]);
      } else {
        stage += (h * aij) * fs[j];
      }
    }
    require_finite(stage, t + spec.c(i) * h);
    fs[i] = ev.f(stage);
    require_finite(fs[i], t + spec.c(i) * h);
    if (need_my[i]) mys[i] = ev.apply_linear(stage);
  }

  // Stage 1 is always y itself (node 0), so fs[0] = f(y) and mys[0] = M y when computed.
  const Vector* my0 = mys[0].size() > 0 ? &mys[0] : nullptr;
  Vector delta = exp_increment(Rational(1));
  for (int i = 0; i < s; ++i) {
    if (spec.b(i) != 0.0) delta += (h * spec.b(i)) * fs[i];
  }
  delta += correction(spec.correction, h, ev, y, fs[0], my0);
  finish(out, y, std::move(delta), t + h);
  return out;
}

StepOutcome exponential_euler_step(const SemiLinearSystem& sys, double t, const Vector& y,
                                   double h, ExpCache& cache) {
  StepOutcome out;
  const Evaluator ev(sys, out.work);
  const Vector f0 = ev.f(y);
  require_finite(f0, t);
  finish(out, y, ev.exp_increment(cache, 1, y) + h * ev.apply(cache.phi(1, 1), f0), t + h);
  return out;
}

// c2 = 1/2:  Y2 = e^{hM/2} y + h/2 phi1(hM/2) f(y)
//            y1 = e^{hM} y + h (phi1(hM) f(y) + 2 phi2(hM) (f(Y2) - f(y)))
StepOutcome erk2_step(const SemiLinearSystem& sys, double t, const Vector& y, double h,
                      ExpCache& cache) {
  StepOutcome out;
  const Evaluator ev(sys, out.work);
  const Rational half(1, 2);
  const Vector f0 = ev.f(y);
  require_finite(f0, t);
  const Vector y2 =
      y + (ev.exp_increment(cache, half, y) + (0.5 * h) * ev.apply(cache.phi(1, half), f0));
  require_finite(y2, t + 0.5 * h);
  const Vector f2 = ev.f(y2);
  require_finite(f2, t + 0.5 * h);
  finish(out, y,
         ev.exp_increment(cache, 1, y) +
             h * (ev.apply(cache.phi(1, 1), f0) + 2.0 * ev.apply(cache.phi(2, 1), f2 - f0)),
         t + h);
  return out;
}

// Three-stage third-order exponential RK with c = (0, 1/3, 2/3):
//   a21 = 1/3 phi1(c2), a31 = 2/3 phi1(c3) - 4/3 phi2(c3), a32 = 4/3 phi2(c3),
//   b1 = phi1 - 3/2 phi2, b2 = 0, b3 = 3/2 phi2.
StepOutcome erk3_step(const SemiLinearSystem& sys, double t, const Vector& y, double h,
                      ExpCache& cache) {
  StepOutcome out;
  const Evaluator ev(sys, out.work);
  const Rational c2(1, 3);
  const Rational c3(2, 3);
  const Vector f0 = ev.f(y);
  require_finite(f0, t);
  const Vector y2 =
      y + (ev.exp_increment(cache, c2, y) + (h / 3.0) * ev.apply(cache.phi(1, c2), f0));
  require_finite(y2, t + h / 3.0);
  const Vector f2 = ev.f(y2);
  require_finite(f2, t + h / 3.0);
  const Vector y3 = y + (ev.exp_increment(cache, c3, y) +
                         h * ((2.0 / 3.0) * ev.apply(cache.phi(1, c3), f0) +
                              (4.0 / 3.0) * ev.apply(cache.phi(2, c3), f2 - f0)));
  require_finite(y3, t + 2.0 * h / 3.0);
  const Vector f3 = ev.f(y3);
  require_finite(f3, t + 2.0 * h / 3.0);
  finish(out, y,
         ev.exp_increment(cache, 1, y) +
             h * (ev.apply(cache.phi(1, 1), f0) + 1.5 * ev.apply(cache.phi(2, 1), f3 - f0)),
         t + h);
  return out;
}

}  // namespace

SemiLinearSystem homogeneous_part(const SemiLinearSystem& sys) {
  SemiLinearSystem out = sys;
  out.name = sys.name + "/homogeneous";
  out.f = [](const Vector& y) { return Vector(Vector::Zero(y.size())); };
  out.jvp = [](const Vector& y, const Vector&) { return Vector(Vector::Zero(y.size())); };
  return out;
}

Vector correction_term(Correction id, double h, const SemiLinearSystem& sys, const Vector& y0,
                       WorkCounters* work) {
  WorkCounters local;
  const Evaluator ev(sys, work ? *work : local);
  const bool third = id == Correction::w3 || id == Correction::w3_tilde;
  if (third && !sys.has_jvp()) {
    throw CapabilityError("correction_term: " + std::string(to_string(id)) +
                          " requires a Jacobian action");
  }
  if (id == Correction::none || id == Correction::phi_baseline) return Vector::Zero(y0.size());
  const Vector f0 = ev.f(y0);
  return correction(id, h, ev, y0, f0, nullptr);
}

void warm_cache(const MethodSpec& spec, ExpCache& cache) {
  const Rational one(1);
  switch (spec.family) {
    case Family::mverk:
      cache.exp_minus_identity(one);
      break;
    case Family::sverk:
      for (const auto& c : spec.nodes) {
        if (!c.is_zero()) cache.exp_minus_identity(c);
      }
      cache.exp_minus_identity(one);
      break;
    case Family::eeuler:
      cache.exp_minus_identity(one);
      cache.phi(1, one);
      break;
    case Family::erk2:
      cache.exp_minus_identity(Rational(1, 2));
      cache.phi(1, Rational(1, 2));
      cache.exp_minus_identity(one);
      cache.phi(1, one);
      cache.phi(2, one);
      break;
    case Family::erk3:
      for (const Rational c : {Rational(1, 3), Rational(2, 3)}) {
        cache.exp_minus_identity(c);
        cache.phi(1, c);
      }
      cache.phi(2, Rational(2, 3));
      cache.exp_minus_identity(one);
      cache.phi(1, one);
      cache.phi(2, one);
      break;
  }
}

StepOutcome step(const MethodSpec& spec, const SemiLinearSystem& sys, double t, const Vector& y,
                 double h, ExpCache& cache) {
  check_cache(cache, sys, h);
  if (spec.requires_jacobian && !sys.has_jvp()) {
    throw CapabilityError(std::string(to_string(spec.id)) + " requires a Jacobian action");
  }
  const auto builds_before = cache.builds();
  StepOutcome out;
  switch (spec.family) {
    case Family::mverk:
    case Family::sverk:
      out = tableau_step(spec, sys, t, y, h, cache);
      break;
    case Family::eeuler:
      out = exponential_euler_step(sys, t, y, h, cache);
      break;
    case Family::erk2:
      out = erk2_step(sys, t, y, h, cache);
      break;
    case Family::erk3:
      out = erk3_step(sys, t, y, h, cache);
      break;
  }
  out.work.exp_builds += cache.builds() - builds_before;
  return out;
}

std::uint64_t step_count(const SemiLinearSystem& sys, double h) {
  if (!(h > 0.0)) throw ConfigError("stepsize must be positive");
  const double span = sys.t_end - sys.t0;
  const double ratio = span / h;
  const double n = std::round(ratio);
  if (n < 1.0 || std::abs(ratio - n) > 1e-12 * std::max(1.0, n)) {
    throw ConfigError("interval length " + std::to_string(span) +
                      " is not an integer multiple of h = " + std::to_string(h));
  }
  return static_cast<std::uint64_t>(n);
}

FixedRun integrate_fixed(const MethodSpec& spec, const SemiLinearSystem& sys, double h,
                         ExpCache& cache) {
  const std::uint64_t n = step_count(sys, h);
  check_cache(cache, sys, h);
  FixedRun run;
  const auto builds_before = cache.builds();
  warm_cache(spec, cache);
  run.work.exp_builds = cache.builds() - builds_before;
  // Increments are accumulated with Neumaier compensation; otherwise the
  // rounding of y + increment grows like sqrt(n) ulp and hides third-order
  // errors at the smallest stepsizes.
  Vector y = sys.y0;
  Vector carry = Vector::Zero(y.size());
  for (std::uint64_t i = 0; i < n; ++i) {
    const double t = sys.t0 + static_cast<double>(i) * h;
    StepOutcome s = step(spec, sys, t, y, h, cache);
    run.work += s.work;
    for (Index j = 0; j < y.size(); ++j) {
      const double d = s.increment(j) + carry(j);
      const double sum = y(j) + d;
      carry(j) = std::abs(y(j)) >= std::abs(d) ? (y(j) - sum) + d : (d - sum) + y(j);
      y(j) = sum;
    }
  }
  y += carry;
  run.y = std::move(y);
  run.steps = n;
  return run;
}

FixedRun integrate_fixed(const MethodSpec& spec, const SemiLinearSystem& sys, double h) {
  ExpCache cache(sys.linear, h);
  return integrate_fixed(spec, sys, h, cache);
}

}  // namespace xrk

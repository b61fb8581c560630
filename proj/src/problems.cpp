#include "xrk/problems.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <sstream>

#include "xrk/errors.hpp"

namespace xrk {

std::string_view to_string(ProblemId id) {
  switch (id) {
    case ProblemId::allen_cahn: return "allen-cahn";
    case ProblemId::wind: return "wind";
    case ProblemId::nls: return "nls";
  }
  return "?";
}

std::optional<ProblemId> parse_problem(std::string_view name) {
  if (name == "allen-cahn" || name == "allen_cahn") return ProblemId::allen_cahn;
  if (name == "wind") return ProblemId::wind;
  if (name == "nls") return ProblemId::nls;
  return std::nullopt;
}

std::pair<int, int> default_k_range(ProblemId id) {
  switch (id) {
    case ProblemId::allen_cahn: return {8, 13};
    case ProblemId::wind: return {3, 8};
    case ProblemId::nls: return {2, 7};
  }
  return {1, 1};
}

std::string ProblemConfig::canonical() const {
  std::ostringstream os;
  os.precision(17);
  os << to_string(id);
  switch (id) {
    case ProblemId::allen_cahn:
      os << ";n=" << allen_cahn.n << ";eps=" << allen_cahn.epsilon << ";T=" << allen_cahn.t_end
         << ";state=u-x";
      break;
    case ProblemId::wind:
      os << ";zeta=" << wind.zeta << ";lambda=" << wind.lambda << ";y0=" << wind.y0(0) << ','
         << wind.y0(1) << ";T=" << wind.t_end;
      break;
    case ProblemId::nls:
      os << ";n=" << nls.n << ";L=" << nls.length << ";T=" << nls.t_end;
      break;
  }
  if (suppress_nonlinearity) os << ";homogeneous";
  return os.str();
}

std::string ProblemConfig::digest() const {
  // FNV-1a, 64 bit.
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const unsigned char ch : canonical()) {
    hash ^= ch;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

ChebyshevGrid cheb(int n) {
  if (n < 1) throw ConfigError("cheb: need n >= 1, got " + std::to_string(n));
  ChebyshevGrid g;
  const Index m = n + 1;
  g.x.resize(m);
  Vector c(m);
  for (Index j = 0; j < m; ++j) {
    g.x(j) = std::cos(EIGEN_PI * static_cast<double>(j) / n);
    const double weight = (j == 0 || j == n) ? 2.0 : 1.0;
    c(j) = (j % 2 == 0) ? weight : -weight;
  }
  g.d = Matrix::Zero(m, m);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < m; ++j) {
      if (i != j) g.d(i, j) = (c(i) / c(j)) / (g.x(i) - g.x(j));
    }
  }
  // Diagonal by negative row sums, so constants are differentiated to zero.
  for (Index i = 0; i < m; ++i) g.d(i, i) = -g.d.row(i).sum();
  return g;
}

Matrix fourier_d2(int n, double length) {
  if (n < 2 || n % 2 != 0) throw ConfigError("fourier_d2: n must be even, got " + std::to_string(n));
  const double mu = 2.0 * EIGEN_PI / length;
  const double dx = length / n;
  Matrix d2(n, n);
  const double diag = -mu * mu * (2.0 * (n / 2.0) * (n / 2.0) + 1.0) / 6.0;
  for (Index j = 0; j < n; ++j) {
    for (Index k = 0; k < n; ++k) {
      if (j == k) {
        d2(j, k) = diag;
        continue;
      }
      const double s = std::sin(mu * static_cast<double>(j - k) * dx / 2.0);
      const double sign = ((j + k + 1) % 2 == 0) ? 1.0 : -1.0;
      d2(j, k) = 0.5 * mu * mu * sign / (s * s);
    }
  }
  return d2;
}

double allen_cahn_profile(double x) { return 0.53 * x + 0.47 * std::sin(-1.5 * EIGEN_PI * x); }

SemiLinearSystem build_allen_cahn(const AllenCahnConfig& cfg) {
  const ChebyshevGrid g = cheb(cfg.n);
  const Index interior = cfg.n - 1;
  if (interior < 1) throw ConfigError("allen-cahn: need n >= 2");
  const Matrix d2 = g.d * g.d;

  // The unknown is v = u - x on the interior nodes. u = x carries the boundary
  // values u(1) = 1, u(-1) = -1 and has zero second derivative, so v satisfies
  // homogeneous conditions and no boundary source appears in either M or f.
  const Vector x = g.x.segment(1, interior);
  SemiLinearSystem sys;
  sys.name = "allen-cahn";
  sys.linear = std::make_shared<Matrix>(cfg.epsilon * d2.block(1, 1, interior, interior));
  sys.f = [x](const Vector& v) -> Vector {
    const Eigen::ArrayXd u = v.array() + x.array();
    return (u - u.cube()).matrix();
  };
  sys.jvp = [x](const Vector& v, const Vector& w) -> Vector {
    const Eigen::ArrayXd u = v.array() + x.array();
    return (w.array() * (1.0 - 3.0 * u.square())).matrix();
  };
  sys.y0.resize(interior);
  for (Index j = 0; j < interior; ++j) {
    sys.y0(j) = allen_cahn_profile(x(j)) - x(j);
  }
  sys.t0 = 0.0;
  sys.t_end = cfg.t_end;
  return sys;
}

SemiLinearSystem build_wind(const WindConfig& cfg) {
  if (cfg.zeta < 0.0) throw ConfigError("wind: damping zeta must be >= 0");
  auto linear = std::make_shared<Matrix>(2, 2);
  *linear << -cfg.zeta, -cfg.lambda, cfg.lambda, -cfg.zeta;

  SemiLinearSystem sys;
  sys.name = "wind";
  sys.linear = std::move(linear);
  sys.f = [](const Vector& x) -> Vector {
    Vector out(2);
    out << x(0) * x(1), 0.5 * (x(0) * x(0) - x(1) * x(1));
    return out;
  };
  sys.jvp = [](const Vector& x, const Vector& v) -> Vector {
    Vector out(2);
    out << x(1) * v(0) + x(0) * v(1), x(0) * v(0) - x(1) * v(1);
    return out;
  };
  sys.y0 = cfg.y0;
  sys.t0 = 0.0;
  sys.t_end = cfg.t_end;
  return sys;
}

SemiLinearSystem build_nls(const NlsConfig& cfg) {
  const int n = cfg.n;
  const Matrix d2 = fourier_d2(n, cfg.length);
  auto linear = std::make_shared<Matrix>(Matrix::Zero(2 * n, 2 * n));
  linear->topRightCorner(n, n) = -d2;
  linear->bottomLeftCorner(n, n) = d2;

  SemiLinearSystem sys;
  sys.name = "nls";
  sys.linear = std::move(linear);
  sys.f = [n](const Vector& y) -> Vector {
    const auto p = y.head(n).array();
    const auto q = y.tail(n).array();
    const Eigen::ArrayXd r = p.square() + q.square();
    Vector out(2 * n);
    out.head(n) = (-2.0 * r * q).matrix();
    out.tail(n) = (2.0 * r * p).matrix();
    return out;
  };
  sys.jvp = [n](const Vector& y, const Vector& v) -> Vector {
    const auto p = y.head(n).array();
    const auto q = y.tail(n).array();
    const auto vp = v.head(n).array();
    const auto vq = v.tail(n).array();
    Vector out(2 * n);
    out.head(n) = (-4.0 * p * q * vp - 2.0 * (p.square() + 3.0 * q.square()) * vq).matrix();
    out.tail(n) = (2.0 * (3.0 * p.square() + q.square()) * vp + 4.0 * p * q * vq).matrix();
    return out;
  };
  sys.y0 = Vector::Zero(2 * n);
  const double mu = cfg.mu();
  for (Index j = 0; j < n; ++j) {
    const double x = static_cast<double>(j) * cfg.length / n;
    sys.y0(j) = 0.5 + 0.025 * std::cos(mu * x);
  }
  sys.t0 = 0.0;
  sys.t_end = cfg.t_end;
  return sys;
}

SemiLinearSystem build_problem(const ProblemConfig& cfg) {
  SemiLinearSystem sys;
  switch (cfg.id) {
    case ProblemId::allen_cahn: sys = build_allen_cahn(cfg.allen_cahn); break;
    case ProblemId::wind: sys = build_wind(cfg.wind); break;
    case ProblemId::nls: sys = build_nls(cfg.nls); break;
  }
  if (cfg.suppress_nonlinearity) sys = homogeneous_part(sys);
  return sys;
}

}  // namespace xrk

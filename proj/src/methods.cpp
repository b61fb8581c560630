#include "xrk/methods.hpp"

#include <algorithm>
#include <cctype>

#include "xrk/errors.hpp"

namespace xrk {

namespace {

struct NameEntry {
  MethodId id;
  std::string_view name;
};

constexpr std::array<NameEntry, 12> kNames = {{
    {MethodId::MVERK1, "MVERK1"},
    {MethodId::MVERK2_1, "MVERK2_1"},
    {MethodId::MVERK2_2, "MVERK2_2"},
    {MethodId::MVERK3_1, "MVERK3_1"},
    {MethodId::MVERK3_2, "MVERK3_2"},
    {MethodId::SVERK2_1, "SVERK2_1"},
    {MethodId::SVERK2_2, "SVERK2_2"},
    {MethodId::SVERK3_1, "SVERK3_1"},
    {MethodId::SVERK3_2, "SVERK3_2"},
    {MethodId::EEULER, "EEULER"},
    {MethodId::ERK2, "ERK2"},
    {MethodId::ERK3, "ERK3"},
}};

using R = Rational;

MethodSpec make(MethodId id, Family family, std::vector<std::vector<R>> a, std::vector<R> b,
                Correction corr, int order) {
  MethodSpec s;
  s.id = id;
  s.family = family;
  s.stages = static_cast<int>(b.size());
  s.coeffs = std::move(a);
  s.weights = std::move(b);
  s.correction = corr;
  s.order = order;
  s.requires_jacobian = corr == Correction::w3 || corr == Correction::w3_tilde;
  s.finalize();
  return s;
}

}  // namespace

std::string_view to_string(MethodId id) {
  for (const auto& e : kNames) {
    if (e.id == id) return e.name;
  }
  return "?";
}

std::optional<MethodId> parse_method(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char ch) {
    return ch == '-' ? '_' : static_cast<char>(std::toupper(ch));
  });
  if (upper == "SVERK1") return MethodId::MVERK1;
  for (const auto& e : kNames) {
    if (e.name == upper) return e.id;
  }
  return std::nullopt;
}

std::string_view to_string(Correction c) {
  switch (c) {
    case Correction::none: return "none";
    case Correction::w2: return "w2";
    case Correction::w3: return "w3";
    case Correction::w2_tilde: return "w2~";
    case Correction::w3_tilde: return "w3~";
    case Correction::phi_baseline: return "phi";
  }
  return "?";
}

void MethodSpec::finalize() {
  const auto n = static_cast<std::size_t>(stages);
  nodes.assign(n, R(0));
  pattern.assign(n, StagePattern::identity);
  c.resize(stages);
  a = Matrix::Zero(stages, stages);
  b.resize(stages);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      nodes[i] = nodes[i] + coeffs[i][j];
      a(static_cast<Index>(i), static_cast<Index>(j)) = coeffs[i][j].value();
    }
    c(static_cast<Index>(i)) = nodes[i].value();
    b(static_cast<Index>(i)) = weights[i].value();
    const bool exp_stage = family != Family::mverk && !nodes[i].is_zero();
    pattern[i] = exp_stage ? StagePattern::exponential : StagePattern::identity;
  }
}

MethodSpec method_spec(MethodId id) {
  switch (id) {
    case MethodId::MVERK1:
      return make(id, Family::mverk, {{0}}, {1}, Correction::none, 1);
    case MethodId::MVERK2_1:
      return make(id, Family::mverk, {{0, 0}, {1, 0}}, {R(1, 2), R(1, 2)}, Correction::w2, 2);
    case MethodId::MVERK2_2:
      return make(id, Family::mverk, {{0, 0}, {R(1, 2), 0}}, {0, 1}, Correction::w2, 2);
    case MethodId::MVERK3_1:
      return make(id, Family::mverk, {{0, 0, 0}, {R(1, 3), 0, 0}, {0, R(2, 3), 0}},
                  {R(1, 4), 0, R(3, 4)}, Correction::w3, 3);
    case MethodId::MVERK3_2:
      return make(id, Family::mverk, {{0, 0, 0}, {R(1, 2), 0, 0}, {0, R(3, 4), 0}},
                  {R(2, 9), R(3, 9), R(4, 9)}, Correction::w3, 3);
    case MethodId::SVERK2_1:
      return make(id, Family::sverk, {{0, 0}, {1, 0}}, {R(1, 2), R(1, 2)},
                  Correction::w2_tilde, 2);
    case MethodId::SVERK2_2:
      return make(id, Family::sverk, {{0, 0}, {R(1, 2), 0}}, {0, 1}, Correction::w2_tilde, 2);
    case MethodId::SVERK3_1:
      return make(id, Family::sverk, {{0, 0, 0}, {R(1, 2), 0, 0}, {0, R(3, 4), 0}},
                  {R(2, 9), R(3, 9), R(4, 9)}, Correction::w3_tilde, 3);
    case MethodId::SVERK3_2:
      return make(id, Family::sverk, {{0, 0, 0}, {R(1, 3), 0, 0}, {0, R(2, 3), 0}},
                  {R(1, 4), 0, R(3, 4)}, Correction::w3_tilde, 3);
    case MethodId::EEULER:
      return make(id, Family::eeuler, {{0}}, {1}, Correction::phi_baseline, 1);
    case MethodId::ERK2:
      // phi_1(0) = 1 and phi_2(0) = 1/2 turn the weights into the midpoint rule.
      return make(id, Family::erk2, {{0, 0}, {R(1, 2), 0}}, {0, 1}, Correction::phi_baseline, 2);
    case MethodId::ERK3:
      return make(id, Family::erk3, {{0, 0, 0}, {R(1, 3), 0, 0}, {0, R(2, 3), 0}},
                  {R(1, 4), 0, R(3, 4)}, Correction::phi_baseline, 3);
  }
  throw UnsupportedError("method_spec: unknown method id");
}

std::vector<Rational> order_residuals(const MethodSpec& spec) {
  const auto& a = spec.coeffs;
  const auto& b = spec.weights;
  R sum_b = 0;
  for (const auto& w : b) sum_b = sum_b + w;
  switch (spec.stages) {
    case 1:
      return {sum_b - 1};
    case 2:
      return {sum_b - 1, R(2) * a[1][0] * b[1] - 1};
    case 3: {
      const R c2 = a[1][0] + a[1][1] + a[1][2];
      const R c3 = a[2][0] + a[2][1] + a[2][2];
      return {sum_b - 1, b[1] * c2 + b[2] * c3 - R(1, 2), b[1] * c2 * c2 + b[2] * c3 * c3 - R(1, 3),
              b[2] * a[2][1] * a[1][0] - R(1, 6)};
    }
    default:
      throw UnsupportedError("order_residuals: stage count " + std::to_string(spec.stages) +
                             " not in {1, 2, 3}");
  }
}

std::vector<double> order_residuals_double(const MethodSpec& spec) {
  std::vector<double> out;
  for (const auto& r : order_residuals(spec)) out.push_back(r.value());
  return out;
}

}  // namespace xrk

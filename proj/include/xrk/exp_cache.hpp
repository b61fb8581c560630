#pragma once

#include <map>
#include <memory>
#include <utility>

#include "xrk/rational.hpp"
#include "xrk/types.hpp"

namespace xrk {

/// Dense matrix functions of c*h*M for one fixed (h, M), keyed by node c.
///
/// Entries are built on first request and reused afterwards. Changing h via
/// reset() drops every entry. One cache belongs to one integration run; it is
/// not synchronized.
class ExpCache {
 public:
  ExpCache(std::shared_ptr<const Matrix> linear, double h);

  double stepsize() const { return h_; }
  const Matrix& linear() const { return *linear_; }
  Index dimension() const { return linear_->rows(); }

  /// e^{c h M}. Node 0 returns the identity without counting a build.
  const Matrix& exp(Rational c);

  /// e^{c h M} - I, built together with exp(c) as one matrix function.
  /// Steppers apply exponentials as y + (e^{chM} - I) y: the error of a rounded
  /// e^{chM} would otherwise repeat identically every step and accumulate.
  const Matrix& exp_minus_identity(Rational c);

  /// phi_k(c h M), k in {1, 2, 3}.
  const Matrix& phi(int k, Rational c);

  /// Drop all entries and switch to a new stepsize.
  void reset(double h);

  /// Number of matrix functions computed since construction (not reset by reset()).
  std::uint64_t builds() const { return builds_; }
  std::size_t size() const { return entries_.size(); }

 private:
  using Key = std::pair<int, Rational>;  // (0 for exp or k for phi_k, node)

  const Matrix& build(const Key& key);

  std::shared_ptr<const Matrix> linear_;
  double h_;
  Matrix identity_;
  Matrix zero_;
  std::map<Key, Matrix> entries_;
  std::map<Rational, Matrix> exp_full_;  // e^{chM} = I + entries_[{0, c}]
  std::uint64_t builds_ = 0;
};

/// Free-function form of ExpCache::exp.
inline const Matrix& cached_exp(ExpCache& cache, Rational c) { return cache.exp(c); }

}  // namespace xrk

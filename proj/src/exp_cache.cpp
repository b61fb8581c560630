#include "xrk/exp_cache.hpp"

#include "xrk/errors.hpp"
#include "xrk/expm.hpp"

namespace xrk {

ExpCache::ExpCache(std::shared_ptr<const Matrix> linear, double h)
    : linear_(std::move(linear)), h_(h) {
  if (!linear_) throw ConfigError("ExpCache: null linear operator");
  if (linear_->rows() != linear_->cols()) throw DimensionError("ExpCache: M must be square");
  if (!(h > 0.0)) throw ConfigError("ExpCache: stepsize must be positive");
  identity_ = Matrix::Identity(linear_->rows(), linear_->cols());
  zero_ = Matrix::Zero(linear_->rows(), linear_->cols());
}

const Matrix& ExpCache::build(const Key& key) {
  auto it = entries_.find(key);
  if (it != entries_.end()) return it->second;
  const Matrix a = (key.second.value() * h_) * *linear_;
  Matrix value = key.first == 0 ? expm1(a) : xrk::phi(key.first, a);
  ++builds_;
  return entries_.emplace(key, std::move(value)).first->second;
}

const Matrix& ExpCache::exp_minus_identity(Rational c) {
  if (c.is_zero()) return zero_;
  return build({0, c});
}

const Matrix& ExpCache::exp(Rational c) {
  if (c.is_zero()) return identity_;
  auto it = exp_full_.find(c);
  if (it == exp_full_.end()) it = exp_full_.emplace(c, identity_ + exp_minus_identity(c)).first;
  return it->second;
}

const Matrix& ExpCache::phi(int k, Rational c) {
  if (k < 1 || k > 3) throw UnsupportedError("ExpCache::phi: k must be in {1, 2, 3}");
  return build({k, c});
}

void ExpCache::reset(double h) {
  if (!(h > 0.0)) throw ConfigError("ExpCache: stepsize must be positive");
  h_ = h;
  entries_.clear();
  exp_full_.clear();
}

}  // namespace xrk

#include "lqg/field.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <cstring>

#include "lqg/error.hpp"
#include "lqg/special.hpp"

namespace lqg {
namespace {

std::uint64_t bits_of(double v) {
  if (v == 0.0) v = 0.0;  // fold -0
  return std::bit_cast<std::uint64_t>(v);
}

void check_scale(double t) {
  if (!(t > 0.0 && t < std::numeric_limits<double>::infinity()))
    throw DomainError("field scale must be positive and finite, got " + std::to_string(t));
}

class ConstantField final : public FieldRealization {
 public:
  explicit ConstantField(double v) : FieldRealization("constant-stub", 0, false), value_(v) {}

 protected:
  double evaluate(const FieldNode&) const override { return value_; }

 private:
  double value_;
};

class FunctionField final : public FieldRealization {
 public:
  FunctionField(std::function<double(const FieldNode&)> fn, std::string name)
      : FieldRealization(std::move(name), 0, false), fn_(std::move(fn)) {}

 protected:
  double evaluate(const FieldNode& n) const override { return fn_(n); }

 private:
  std::function<double(const FieldNode&)> fn_;
};

class LogSingularityField final : public FieldRealization {
 public:
  LogSingularityField(FieldPtr base, double alpha, Point z0)
      : FieldRealization("alpha-shifted(" + base->backend() + ")", base->seed(), false),
        base_(std::move(base)),
        alpha_(alpha),
        z0_(std::move(z0)) {}

 protected:
  double evaluate(const FieldNode& n) const override {
    const double b = (*base_)(n);
    if (alpha_ == 0.0) return b;
    const double dist = (n.center - z0_).norm();
    if (dist == 0.0) return kSingularValue;
    return b + alpha_ * std::log(1.0 / dist);
  }

 private:
  FieldPtr base_;
  double alpha_;
  Point z0_;
};

class RescaledField final : public FieldRealization {
 public:
  RescaledField(FieldPtr base, double factor)
      : FieldRealization("rescaled(" + base->backend() + ")", base->seed(), false),
        base_(std::move(base)),
        factor_(factor) {}

 protected:
  double evaluate(const FieldNode& n) const override {
    return (*base_)(FieldNode{n.center / factor_, n.scale / factor_});
  }

 private:
  FieldPtr base_;
  double factor_;
};

}  // namespace

std::size_t FieldNodeHash::operator()(const FieldNode& n) const noexcept {
  std::uint64_t h = bits_of(n.center.x()) * 0x9E3779B97F4A7C15ULL;
  h ^= bits_of(n.center.y()) + 0x632BE59BD9B4E019ULL + (h << 6) + (h >> 2);
  h ^= bits_of(n.scale) * 0xC2B2AE3D27D4EB4FULL + (h << 6) + (h >> 2);
  return static_cast<std::size_t>(h ^ (h >> 29));
}

double wp_gff_covariance(const Point& z, const Point& w) {
  const double d = (z - w).norm();
  if (d == 0.0) throw DomainError("whole-plane GFF covariance diverges at z == w");
  return std::log(std::max(z.norm(), 1.0) * std::max(w.norm(), 1.0) / d);
}

double wn_covariance(const FieldNode& a, const FieldNode& b) {
  check_scale(a.scale);
  check_scale(b.scale);
  const double t = std::max(a.scale, b.scale);
  // No scales above 1 carry noise, so coarser observations vanish.
  if (t >= 1.0) return 0.0;
  const double r2 = (a.center - b.center).squaredNorm();
  if (r2 == 0.0) return std::log(1.0 / t);
  const double tau = t * t;
  return 0.5 * expint_e1_difference(0.5 * r2, 0.5 * r2 / tau);
}

double octave_layer_covariance(int layer, double r) {
  const double upper = std::ldexp(1.0, -layer);
  const double lower = std::ldexp(1.0, -layer - 1);
  if (r == 0.0) return std::log(upper / lower);
  const double r2 = r * r;
  return 0.5 * expint_e1_difference(0.5 * r2 / (upper * upper), 0.5 * r2 / (lower * lower));
}

FieldRealization::FieldRealization(std::string backend, std::uint64_t seed, bool memoize)
    : backend_(std::move(backend)), seed_(seed), memoize_(memoize) {}

double FieldRealization::operator()(const FieldNode& node) const {
  std::lock_guard lock(mutex_);
  if (!memoize_) return evaluate(node);
  if (auto it = cache_.find(node); it != cache_.end()) return it->second;
  const double v = evaluate(node);
  cache_.emplace(node, v);
  return v;
}

std::string FieldRealization::id() const { return backend_ + ":" + std::to_string(seed_); }

std::size_t FieldRealization::cached_nodes() const {
  std::lock_guard lock(mutex_);
  return cache_.size();
}

void FieldRealization::preload(const FieldNode& node, double value) {
  std::lock_guard lock(mutex_);
  cache_.emplace(node, value);
}

FieldPtr constant_field(double value) { return std::make_shared<ConstantField>(value); }

FieldPtr function_field(std::function<double(const FieldNode&)> fn, std::string name) {
  return std::make_shared<FunctionField>(std::move(fn), std::move(name));
}

FieldPtr with_log_singularity(FieldPtr base, double alpha, const Point& z0) {
  if (!(alpha >= 0.0 && alpha < 4.0)) throw DomainError("singularity strength alpha must lie in [0, 4)");
  return std::make_shared<LogSingularityField>(std::move(base), alpha, z0);
}

FieldPtr rescaled(FieldPtr base, double factor) {
  int exp = 0;
  if (!(factor > 0.0) || std::frexp(factor, &exp) != 0.5)
    throw DomainError("rescaling factor must be a power of two");
  return std::make_shared<RescaledField>(std::move(base), factor);
}

}  // namespace lqg

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <unordered_set>

#include "lqg/error.hpp"
#include "lqg/field.hpp"
#include "lqg/rng.hpp"

namespace lqg {
namespace {

constexpr std::array<double, 6> kJitterLadder = {0.0, 1e-12, 1e-11, 1e-10, 1e-9, 1e-8};

// First leading minor whose pivot stays non-positive under the largest jitter.
std::size_t offending_minor(const Eigen::MatrixXd& k) {
  const auto n = k.rows();
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      double s = k(i, j) + (i == j ? kJitterLadder.back() : 0.0);
      for (Eigen::Index m = 0; m < j; ++m) s -= l(i, m) * l(j, m);
      if (i == j) {
        if (!(s > 0.0)) return static_cast<std::size_t>(i + 1);
        l(i, i) = std::sqrt(s);
      } else {
        l(i, j) = s / l(j, j);
      }
    }
  }
  return static_cast<std::size_t>(n);
}

}  // namespace

ExactField::ExactField(std::span<const FieldNode> nodes, std::uint64_t seed, ExactOptions options)
    : FieldRealization("exact-cholesky", seed, true), options_(options) {
  std::unordered_set<FieldNode, FieldNodeHash> seen;
  std::vector<FieldNode> unique;
  for (const auto& n : nodes) {
    if (!(n.scale > 0.0)) throw DomainError("field scale must be positive");
    if (seen.insert(n).second) unique.push_back(n);
  }
  if (unique.size() > options_.max_nodes)
    throw CapacityError("exact backend limited to " + std::to_string(options_.max_nodes) +
                        " nodes; use the octave backend for larger node sets");

  // Nodes at scale 1 or coarser have zero variance and are uncorrelated with everything.
  for (const auto& n : unique) {
    if (n.scale >= 1.0) {
      preload(n, 0.0);
      ++zero_nodes_;
    } else {
      nodes_.push_back(n);
    }
  }
  const auto count = static_cast<Eigen::Index>(nodes_.size());
  if (count == 0) return;

  Eigen::MatrixXd cov(count, count);
  for (Eigen::Index i = 0; i < count; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) cov(i, j) = cov(j, i) = wn_covariance(nodes_[i], nodes_[j]);

  Eigen::LLT<Eigen::MatrixXd> llt;
  bool ok = false;
  for (double jitter : kJitterLadder) {
    llt.compute(cov + jitter * Eigen::MatrixXd::Identity(count, count));
    if (llt.info() == Eigen::Success) {
      jitter_ = jitter;
      ok = true;
      break;
    }
  }
  if (!ok)
    throw NumericError("covariance factorization failed with jitter 1e-8 at leading minor " +
                       std::to_string(offending_minor(cov)));

  const Eigen::MatrixXd l = llt.matrixL();
  Eigen::VectorXd xi(count);
  for (Eigen::Index i = 0; i < count; ++i) {
    noise_.push_back(noise(static_cast<std::size_t>(i)));
    xi(i) = noise_.back();
  }
  const Eigen::VectorXd values = l * xi;

  factor_.resize(nodes_.size());
  for (Eigen::Index i = 0; i < count; ++i) {
    factor_[i].resize(static_cast<std::size_t>(i + 1));
    for (Eigen::Index j = 0; j <= i; ++j) factor_[i][j] = l(i, j);
    preload(nodes_[i], values(i));
  }
}

double ExactField::noise(std::size_t index) const {
  return normal4(seed(), Stream::kExactNoise, {index, 0, 0, 0})[0];
}

double ExactField::evaluate(const FieldNode& node) const {
  if (!(node.scale > 0.0)) throw DomainError("field scale must be positive");
  if (node.scale >= 1.0) {
    ++zero_nodes_;
    return 0.0;
  }
  return append(node);
}

double ExactField::append(const FieldNode& node) const {
  if (size() + 1 > options_.max_nodes)
    throw CapacityError("exact backend limited to " + std::to_string(options_.max_nodes) +
                        " nodes; use the octave backend for larger node sets");
  const std::size_t n = nodes_.size();
  std::vector<double> row(n + 1, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double s = wn_covariance(node, nodes_[j]);
    const auto& lj = factor_[j];
    for (std::size_t m = 0; m < j; ++m) s -= row[m] * lj[m];
    row[j] = s / lj[j];
  }
  double pivot = wn_covariance(node, node);
  for (std::size_t m = 0; m < n; ++m) pivot -= row[m] * row[m];
  double used = jitter_;
  std::size_t step = 0;
  while (step < kJitterLadder.size() && kJitterLadder[step] < used) ++step;
  while (!(pivot + used > 0.0)) {
    if (++step >= kJitterLadder.size())
      throw NumericError("covariance factorization failed with jitter 1e-8 at leading minor " +
                         std::to_string(n + 1));
    used = kJitterLadder[step];
  }
  row[n] = std::sqrt(pivot + used);

  noise_.push_back(noise(n));
  double value = 0.0;
  for (std::size_t j = 0; j <= n; ++j) value += row[j] * noise_[j];
  nodes_.push_back(node);
  factor_.push_back(std::move(row));
  return value;
}

std::shared_ptr<const ExactField> sample_exact(std::span<const FieldNode> nodes, std::uint64_t seed,
                                               ExactOptions options) {
  return std::make_shared<ExactField>(nodes, seed, options);
}

}  // namespace lqg

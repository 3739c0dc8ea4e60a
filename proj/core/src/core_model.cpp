#include "fairclust/core_model.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace fairclust {

void check_simplex_rows(const Matrix& probs, double tol) {
  for (Index p = 0; p < probs.rows(); ++p) {
    double sum = 0.0;
    for (Index k = 0; k < probs.cols(); ++k) {
      const double v = probs(p, k);
      if (!(v >= -tol && v <= 1.0 + tol)) {
        std::ostringstream msg;
        msg << "soft assignment entry (" << p << ", " << k << ") = " << v << " is outside [0, 1]";
        throw std::invalid_argument(msg.str());
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > tol) {
      std::ostringstream msg;
      msg << "soft assignment row " << p << " sums to " << sum;
      throw std::invalid_argument(msg.str());
    }
  }
}

SoftAssignment::SoftAssignment(Matrix probs) : probs_(std::move(probs)) {
  if (probs_.cols() < 1) throw std::invalid_argument("soft assignment needs at least one cluster");
  check_simplex_rows(probs_);
}

SoftAssignment SoftAssignment::uniform(Index n_points, Index n_clusters) {
  if (n_clusters < 1) throw std::invalid_argument("soft assignment needs at least one cluster");
  return SoftAssignment(Matrix::Constant(n_points, n_clusters, 1.0 / static_cast<double>(n_clusters)));
}

void SoftAssignment::replace_rows(Matrix probs) {
  if (probs.rows() != probs_.rows() || probs.cols() != probs_.cols()) {
    throw std::invalid_argument("replace_rows: shape mismatch");
  }
  check_simplex_rows(probs);
  probs_ = std::move(probs);
}

DemographicPartition::DemographicPartition(std::vector<int> group_of, int n_groups,
                                           std::vector<double> targets)
    : group_of_(std::move(group_of)), n_groups_(n_groups), targets_(std::move(targets)) {
  if (n_groups_ < 1) throw std::invalid_argument("need at least one demographic group");
  if (static_cast<int>(targets_.size()) != n_groups_) {
    throw std::invalid_argument("target proportions must have one entry per group");
  }
  for (std::size_t p = 0; p < group_of_.size(); ++p) {
    if (group_of_[p] < 0 || group_of_[p] >= n_groups_) {
      std::ostringstream msg;
      msg << "point " << p << " has group " << group_of_[p] << ", expected [0, " << n_groups_ << ")";
      throw std::invalid_argument(msg.str());
    }
  }
  double total = 0.0;
  for (double mu : targets_) {
    if (!(mu > 0.0)) throw std::invalid_argument("target proportions must be positive");
    total += mu;
  }
  if (std::abs(total - 1.0) > kSimplexTolerance) {
    std::ostringstream msg;
    msg << "target proportions sum to " << total << ", expected 1";
    throw std::invalid_argument(msg.str());
  }
}

std::vector<Index> DemographicPartition::group_sizes() const {
  std::vector<Index> sizes(static_cast<std::size_t>(n_groups_), 0);
  for (int g : group_of_) ++sizes[static_cast<std::size_t>(g)];
  return sizes;
}

AffinityGraph::AffinityGraph(SparseMatrix weights) : weights_(std::move(weights)) {
  if (weights_.rows() != weights_.cols()) throw std::invalid_argument("affinity matrix must be square");
  weights_.makeCompressed();
  const SparseMatrix transposed = weights_.transpose();
  degrees_ = Vector::Zero(weights_.rows());
  for (Index p = 0; p < weights_.outerSize(); ++p) {
    for (SparseMatrix::InnerIterator it(weights_, p); it; ++it) {
      if (it.col() == p && it.value() != 0.0) {
        throw std::invalid_argument("affinity matrix must have a zero diagonal");
      }
      if (!(it.value() >= 0.0) || !std::isfinite(it.value())) {
        throw std::invalid_argument("affinity weights must be finite and nonnegative");
      }
      if (transposed.coeff(p, it.col()) != it.value()) {
        std::ostringstream msg;
        msg << "affinity matrix is not symmetric at (" << p << ", " << it.col() << ")";
        throw std::invalid_argument(msg.str());
      }
      degrees_[p] += it.value();
    }
  }
  for (Index p = 0; p < degrees_.size(); ++p) {
    if (degrees_[p] <= 0.0) {
      std::ostringstream msg;
      msg << "vertex " << p << " is isolated (zero degree)";
      throw std::invalid_argument(msg.str());
    }
  }
}

void SolverConfig::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be finite and >= 0");
  if (!(lipschitz > 0.0)) throw std::invalid_argument("lipschitz constant must be > 0");
  if (!(inner_tol > 0.0) || !(outer_tol > 0.0)) throw std::invalid_argument("tolerances must be > 0");
  if (max_inner < 1 || max_outer < 1) throw std::invalid_argument("iteration caps must be >= 1");
  if (!(marginal_floor > 0.0)) throw std::invalid_argument("marginal floor must be > 0");
}

Labels hard_labels(const SoftAssignment& soft) {
  const Matrix& probs = soft.probs();
  Labels labels(static_cast<std::size_t>(probs.rows()));
  for (Index p = 0; p < probs.rows(); ++p) {
    Index best = 0;
    for (Index k = 1; k < probs.cols(); ++k) {
      if (probs(p, k) > probs(p, best)) best = k;
    }
    labels[static_cast<std::size_t>(p)] = static_cast<int>(best);
  }
  return labels;
}

void check_labels(const Labels& labels, Index n_points, Index n_clusters) {
  if (static_cast<Index>(labels.size()) != n_points) {
    std::ostringstream msg;
    msg << "expected " << n_points << " labels, got " << labels.size();
    throw std::invalid_argument(msg.str());
  }
  for (std::size_t p = 0; p < labels.size(); ++p) {
    if (labels[p] < 0 || labels[p] >= n_clusters) {
      std::ostringstream msg;
      msg << "label " << labels[p] << " of point " << p << " is outside [0, " << n_clusters << ")";
      throw std::invalid_argument(msg.str());
    }
  }
}

SoftAssignment binarize(const Labels& labels, Index n_clusters) {
  const auto n = static_cast<Index>(labels.size());
  check_labels(labels, n, n_clusters);
  Matrix probs = Matrix::Zero(n, n_clusters);
  for (Index p = 0; p < n; ++p) probs(p, labels[static_cast<std::size_t>(p)]) = 1.0;
  return SoftAssignment(std::move(probs));
}

}  // namespace fairclust

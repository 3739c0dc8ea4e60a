#pragma once

// Domain types shared by every fairclust module.
//
// Conventions: points, clusters and demographic groups are 0-based in the
// library. File outputs written by the experiment layer convert labels to
// 1-based cluster ids.

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace fairclust {

using Index = Eigen::Index;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Labels = std::vector<int>;

/// Tolerance for the row-sum (simplex) invariant.
inline constexpr double kSimplexTolerance = 1e-9;

/// N×K row-stochastic matrix of soft cluster memberships. Row p is the
/// simplex vector s_p; column k is the per-cluster assignment vector S_k.
class SoftAssignment {
 public:
  SoftAssignment() = default;

  /// Validates that every row lies on the probability simplex.
  explicit SoftAssignment(Matrix probs);

  static SoftAssignment uniform(Index n_points, Index n_clusters);

  Index n_points() const { return probs_.rows(); }
  Index n_clusters() const { return probs_.cols(); }
  const Matrix& probs() const { return probs_; }
  double operator()(Index p, Index k) const { return probs_(p, k); }

  /// Row s_p as a contiguous view.
  std::span<const double> row(Index p) const {
    return {probs_.data() + p * probs_.cols(), static_cast<std::size_t>(probs_.cols())};
  }

  /// Sum of column k, the soft cluster size 1^t S_k.
  double cluster_mass(Index k) const { return probs_.col(k).sum(); }

  /// Replaces all rows at once, as produced by a parallel per-point map.
  /// The new matrix must have the same shape and satisfy the invariant.
  void replace_rows(Matrix probs);

 private:
  Matrix probs_;
};

/// Throws std::invalid_argument unless every row of `probs` is a simplex
/// vector within `tol`.
void check_simplex_rows(const Matrix& probs, double tol = kSimplexTolerance);

/// The J demographic indicator vectors V_j, stored as one group id per point,
/// with target proportions U = [mu_j].
class DemographicPartition {
 public:
  DemographicPartition() = default;
  DemographicPartition(std::vector<int> group_of, int n_groups, std::vector<double> targets);

  Index n_points() const { return static_cast<Index>(group_of_.size()); }
  int n_groups() const { return n_groups_; }
  int group_of(Index p) const { return group_of_[static_cast<std::size_t>(p)]; }
  const std::vector<int>& groups() const { return group_of_; }
  const std::vector<double>& targets() const { return targets_; }
  double target(int j) const { return targets_[static_cast<std::size_t>(j)]; }

  /// v_{j,p}
  bool in_group(int j, Index p) const { return group_of(p) == j; }

  /// |V_j| for every group.
  std::vector<Index> group_sizes() const;

 private:
  std::vector<int> group_of_;
  int n_groups_ = 0;
  std::vector<double> targets_;
};

/// K×J matrix; entry (k, j) is P(j|k).
struct ClusterMarginals {
  Matrix values;
};

/// Sparse symmetric nonnegative affinity W with zero diagonal, plus degrees.
class AffinityGraph {
 public:
  AffinityGraph() = default;

  /// Validates symmetry, nonnegativity, zero diagonal and the absence of
  /// isolated vertices; degrees are recomputed from the weights.
  explicit AffinityGraph(SparseMatrix weights);

  Index n_points() const { return weights_.rows(); }
  const SparseMatrix& weights() const { return weights_; }
  const Vector& degrees() const { return degrees_; }

 private:
  SparseMatrix weights_;
  Vector degrees_;
};

/// How the outer loop seeds each inner loop.
enum class ReinitPolicy {
  /// s_p = softmax(-a_p) before the first inner loop only; later inner loops
  /// start from the previous assignment.
  kFirstOuter,
  /// s_p = softmax(-a_p) before every inner loop.
  kEveryOuter,
  /// As kEveryOuter, but a pass whose result raises the energy is redone
  /// from the previous assignment.
  kGuarded,
};

struct SolverConfig {
  double lambda = 0.0;
  double lipschitz = 2.0;
  double inner_tol = 1e-6;
  double outer_tol = 1e-6;
  int max_inner = 1000;
  int max_outer = 100;
  std::uint64_t rng_seed = 0;
  double marginal_floor = 1e-10;
  ReinitPolicy reinit = ReinitPolicy::kGuarded;

  /// Throws std::invalid_argument on a nonsensical configuration.
  void validate() const;
};

/// One evaluation of the fair-clustering energy.
struct EnergyBreakdown {
  double total = 0.0;
  double clustering = 0.0;
  /// (lambda / L) times the cross-entropy fairness penalty.
  double fairness = 0.0;
  /// Auxiliary function value of the last inner update.
  double auxiliary = 0.0;
};

struct TraceRow {
  int iteration = 0;
  EnergyBreakdown energy;
};

struct ClusteringMetrics {
  double discrete_objective = 0.0;
  double fairness_error = 0.0;
  double min_balance = 0.0;
};

struct SolveResult {
  Labels labels;
  SoftAssignment soft;
  std::vector<TraceRow> energy_trace;
  ClusteringMetrics metrics;
  int outer_iterations = 0;
  std::vector<int> inner_iterations;
  int monotonicity_violations = 0;
  /// Outer passes where a guarded re-initialisation was rejected.
  int rejected_reinits = 0;
  std::vector<std::string> warnings;
};

/// Per-point argmax; ties go to the lowest cluster index.
Labels hard_labels(const SoftAssignment& soft);

/// Vertex assignment with probs(p, labels[p]) = 1.
SoftAssignment binarize(const Labels& labels, Index n_clusters);

/// Throws std::invalid_argument unless labels has n_points entries in [0, K).
void check_labels(const Labels& labels, Index n_points, Index n_clusters);

}  // namespace fairclust

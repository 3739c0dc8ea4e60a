#pragma once

// Clustering objectives F(S) and their first-order bound potentials a_p.

#include "fairclust/core_model.hpp"
#include "fairclust/fairness.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fairclust {

enum class ObjectiveKind { kKMeans, kKMedian, kNcut };

std::string_view to_string(ObjectiveKind kind);
/// Accepts "kmeans", "kmedian" and "ncut".
ObjectiveKind parse_objective(std::string_view name);

using DistanceFn = std::function<double(std::span<const double>, std::span<const double>)>;

double euclidean_distance(std::span<const double> x, std::span<const double> y);
double squared_euclidean_distance(std::span<const double> x, std::span<const double> y);

/// K-means centers (K×M) or K-median medoid point indices.
struct Prototypes {
  Matrix centers;
  std::vector<Index> medoids;
};

struct PrototypePotentials {
  UnaryPotentials potentials;
  Prototypes prototypes;
  /// Clusters whose mass fell to the floor and were reseeded at the point
  /// farthest from its nearest surviving prototype.
  std::vector<int> reseeded;
};

/// Everything the solver needs besides the demographics.
struct ClusteringProblem {
  ObjectiveKind kind = ObjectiveKind::kKMeans;
  Index n_clusters = 2;
  /// N×M features (K-means, K-median).
  Matrix features;
  /// Affinity graph (Ncut).
  std::optional<AffinityGraph> graph;
  /// K-median distance; Euclidean when empty.
  DistanceFn metric;

  Index n_points() const;
  /// Throws std::invalid_argument if the data required by `kind` is missing.
  void validate() const;
};

inline std::span<const double> row_span(const Matrix& m, Index r) {
  return {m.data() + r * m.cols(), static_cast<std::size_t>(m.cols())};
}

/// c_k = X^t S_k / 1^t S_k and a_{p,k} = ||x_p − c_k||².
PrototypePotentials kmeans_potentials(const Matrix& features, const SoftAssignment& soft,
                                      double floor = 1e-10);

/// c_k = weighted medoid (the data point q minimising Σ_p s_{p,k} d(x_p, x_q)
/// over members of cluster k) and a_{p,k} = d(x_p, c_k).
PrototypePotentials kmedian_potentials(const Matrix& features, const SoftAssignment& soft,
                                       const DistanceFn& metric = {}, double floor = 1e-10);

/// a_{p,k} = d_p z_k − 2 (W S_k)_p / d^t S_k with z_k = S_k^t W S_k / (d^t S_k)².
UnaryPotentials ncut_potentials(const AffinityGraph& graph, const SoftAssignment& soft, double floor = 1e-10);

/// Same formula for an arbitrary symmetric W and degree vector d; lets the
/// property tests use positive semi-definite matrices with a diagonal.
UnaryPotentials ncut_potentials(const SparseMatrix& weights, const Vector& degrees, const SoftAssignment& soft,
                                double floor = 1e-10);

/// Unary potentials for the problem's objective.
PrototypePotentials clustering_potentials(const ClusteringProblem& problem, const SoftAssignment& soft,
                                          double floor = 1e-10);

/// F(S) on a soft assignment. Prototype objectives re-fit their prototypes
/// to S; Ncut uses K − Σ_k S_k^t W S_k / d^t S_k.
double relaxed_objective(const ClusteringProblem& problem, const SoftAssignment& soft, double floor = 1e-10);

double kmeans_discrete_objective(const Matrix& features, const Labels& labels, Index n_clusters);
double kmedian_discrete_objective(const Matrix& features, const Labels& labels, Index n_clusters,
                                  const DistanceFn& metric = {});
double ncut_discrete_objective(const AffinityGraph& graph, const Labels& labels, Index n_clusters);

/// Objective on binary assignments. Empty clusters contribute 0 for the
/// prototype objectives and a full unit for Ncut.
double discrete_objective(const ClusteringProblem& problem, const Labels& labels);

}  // namespace fairclust

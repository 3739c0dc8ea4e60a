#include "fairclust/objectives.hpp"

#include "fairclust/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace fairclust {
namespace {

// Weights at or below this are treated as non-members when forming medoid sums.
constexpr double kMemberWeight = 1e-9;

void check_rows(Index expected, Index actual, const char* what) {
  if (expected != actual) {
    std::ostringstream msg;
    msg << what << ": soft assignment has " << actual << " rows, data has " << expected;
    throw std::invalid_argument(msg.str());
  }
}

double metric_distance(const DistanceFn& metric, std::span<const double> x, std::span<const double> y) {
  return metric ? metric(x, y) : euclidean_distance(x, y);
}

// Farthest-point reseeding: each dead cluster, in index order, takes the point
// farthest from its nearest live prototype, then counts as live.
template <typename ProtoFn, typename DistFn>
std::vector<int> reseed_empty(Index n_points, const std::vector<bool>& alive, ProtoFn proto, DistFn dist,
                              const std::function<void(int, Index)>& place) {
  std::vector<int> reseeded;
  std::vector<bool> live = alive;
  const auto n_clusters = static_cast<int>(live.size());
  for (int k = 0; k < n_clusters; ++k) {
    if (live[static_cast<std::size_t>(k)]) continue;
    Index farthest = 0;
    double best = -1.0;
    for (Index p = 0; p < n_points; ++p) {
      double nearest = std::numeric_limits<double>::infinity();
      for (int c = 0; c < n_clusters; ++c) {
        if (live[static_cast<std::size_t>(c)]) nearest = std::min(nearest, dist(p, proto(c)));
      }
      if (nearest > best) {
        best = nearest;
        farthest = p;
      }
    }
    place(k, farthest);
    live[static_cast<std::size_t>(k)] = true;
    reseeded.push_back(k);
  }
  return reseeded;
}

}  // namespace

std::string_view to_string(ObjectiveKind kind) {
  switch (kind) {
    case ObjectiveKind::kKMeans:
      return "kmeans";
    case ObjectiveKind::kKMedian:
      return "kmedian";
    case ObjectiveKind::kNcut:
      return "ncut";
  }
  return "unknown";
}

ObjectiveKind parse_objective(std::string_view name) {
  if (name == "kmeans") return ObjectiveKind::kKMeans;
  if (name == "kmedian") return ObjectiveKind::kKMedian;
  if (name == "ncut") return ObjectiveKind::kNcut;
  throw std::invalid_argument("unknown objective '" + std::string(name) + "' (expected kmeans, kmedian or ncut)");
}

double squared_euclidean_distance(std::span<const double> x, std::span<const double> y) {
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    sum += d * d;
  }
  return sum;
}

double euclidean_distance(std::span<const double> x, std::span<const double> y) {
  return std::sqrt(squared_euclidean_distance(x, y));
}

Index ClusteringProblem::n_points() const {
  return kind == ObjectiveKind::kNcut && graph ? graph->n_points() : features.rows();
}

void ClusteringProblem::validate() const {
  if (n_clusters < 1) throw std::invalid_argument("K must be >= 1");
  if (kind == ObjectiveKind::kNcut) {
    if (!graph) throw std::invalid_argument("Ncut needs an affinity graph");
  } else if (features.rows() == 0) {
    throw std::invalid_argument(std::string(to_string(kind)) + " needs a feature matrix");
  }
  if (n_clusters > n_points()) throw std::invalid_argument("K exceeds the number of points");
}

PrototypePotentials kmeans_potentials(const Matrix& features, const SoftAssignment& soft, double floor) {
  check_rows(features.rows(), soft.n_points(), "kmeans_potentials");
  const Index n = features.rows();
  const Index m = features.cols();
  const Index n_clusters = soft.n_clusters();
  const Matrix& probs = soft.probs();

  PrototypePotentials out;
  Matrix& centers = out.prototypes.centers;
  centers = Matrix::Zero(n_clusters, m);
  Vector mass = Vector::Zero(n_clusters);
  for (Index p = 0; p < n; ++p) {
    for (Index k = 0; k < n_clusters; ++k) {
      const double s = probs(p, k);
      mass[k] += s;
      centers.row(k) += s * features.row(p);
    }
  }
  std::vector<bool> alive(static_cast<std::size_t>(n_clusters));
  for (Index k = 0; k < n_clusters; ++k) {
    alive[static_cast<std::size_t>(k)] = mass[k] >= floor;
    if (alive[static_cast<std::size_t>(k)]) centers.row(k) /= mass[k];
  }
  out.reseeded = reseed_empty(
      n, alive, [&](int c) { return row_span(centers, c); },
      [&](Index p, std::span<const double> c) { return squared_euclidean_distance(row_span(features, p), c); },
      [&](int k, Index p) { centers.row(k) = features.row(p); });

  Matrix& a = out.potentials.values;
  a.resize(n, n_clusters);
  parallel_for(n, [&](std::ptrdiff_t p) {
    for (Index k = 0; k < n_clusters; ++k) {
      a(p, k) = squared_euclidean_distance(row_span(features, p), row_span(centers, k));
    }
  });
  return out;
}

PrototypePotentials kmedian_potentials(const Matrix& features, const SoftAssignment& soft, const DistanceFn& metric,
                                       double floor) {
  check_rows(features.rows(), soft.n_points(), "kmedian_potentials");
  const Index n = features.rows();
  const Index n_clusters = soft.n_clusters();
  const Matrix& probs = soft.probs();
  const Labels owner = hard_labels(soft);

  PrototypePotentials out;
  std::vector<Index>& medoids = out.prototypes.medoids;
  medoids.assign(static_cast<std::size_t>(n_clusters), 0);
  std::vector<bool> alive(static_cast<std::size_t>(n_clusters));

  for (Index k = 0; k < n_clusters; ++k) {
    if (soft.cluster_mass(k) < floor) continue;
    alive[static_cast<std::size_t>(k)] = true;
    std::vector<Index> members;
    std::vector<Index> candidates;
    for (Index p = 0; p < n; ++p) {
      if (probs(p, k) > kMemberWeight) members.push_back(p);
      if (owner[static_cast<std::size_t>(p)] == k) candidates.push_back(p);
    }
    if (candidates.empty()) candidates = members;
    std::vector<double> cost(candidates.size());
    parallel_for(static_cast<std::ptrdiff_t>(candidates.size()), [&](std::ptrdiff_t c) {
      const Index q = candidates[static_cast<std::size_t>(c)];
      double sum = 0.0;
      for (Index p : members) sum += probs(p, k) * metric_distance(metric, row_span(features, p), row_span(features, q));
      cost[static_cast<std::size_t>(c)] = sum;
    });
    std::size_t best = 0;
    for (std::size_t c = 1; c < cost.size(); ++c) {
      if (cost[c] < cost[best]) best = c;
    }
    medoids[static_cast<std::size_t>(k)] = candidates[best];
  }
  out.reseeded = reseed_empty(
      n, alive, [&](int c) { return medoids[static_cast<std::size_t>(c)]; },
      [&](Index p, Index q) { return metric_distance(metric, row_span(features, p), row_span(features, q)); },
      [&](int k, Index p) { medoids[static_cast<std::size_t>(k)] = p; });

  Matrix& a = out.potentials.values;
  a.resize(n, n_clusters);
  parallel_for(n, [&](std::ptrdiff_t p) {
    for (Index k = 0; k < n_clusters; ++k) {
      a(p, k) = metric_distance(metric, row_span(features, p),
                                row_span(features, medoids[static_cast<std::size_t>(k)]));
    }
  });
  return out;
}

UnaryPotentials ncut_potentials(const SparseMatrix& weights, const Vector& degrees, const SoftAssignment& soft,
                                double floor) {
  check_rows(weights.rows(), soft.n_points(), "ncut_potentials");
  const Index n = weights.rows();
  const Index n_clusters = soft.n_clusters();
  const Matrix& probs = soft.probs();

  // W S, one sparse product for all clusters.
  Matrix ws(n, n_clusters);
  parallel_for(n, [&](std::ptrdiff_t p) {
    for (Index k = 0; k < n_clusters; ++k) ws(p, k) = 0.0;
    for (SparseMatrix::InnerIterator it(weights, p); it; ++it) {
      for (Index k = 0; k < n_clusters; ++k) ws(p, k) += it.value() * probs(it.col(), k);
    }
  });
  Vector vol = Vector::Zero(n_clusters);
  Vector assoc = Vector::Zero(n_clusters);
  for (Index p = 0; p < n; ++p) {
    for (Index k = 0; k < n_clusters; ++k) {
      vol[k] += degrees[p] * probs(p, k);
      assoc[k] += probs(p, k) * ws(p, k);
    }
  }
  Vector z(n_clusters);
  for (Index k = 0; k < n_clusters; ++k) {
    vol[k] = std::max(vol[k], floor);
    z[k] = assoc[k] / (vol[k] * vol[k]);
  }
  UnaryPotentials out;
  out.values.resize(n, n_clusters);
  parallel_for(n, [&](std::ptrdiff_t p) {
    for (Index k = 0; k < n_clusters; ++k) out.values(p, k) = degrees[p] * z[k] - 2.0 * ws(p, k) / vol[k];
  });
  return out;
}

UnaryPotentials ncut_potentials(const AffinityGraph& graph, const SoftAssignment& soft, double floor) {
  return ncut_potentials(graph.weights(), graph.degrees(), soft, floor);
}

PrototypePotentials clustering_potentials(const ClusteringProblem& problem, const SoftAssignment& soft,
                                          double floor) {
  switch (problem.kind) {
    case ObjectiveKind::kKMeans:
      return kmeans_potentials(problem.features, soft, floor);
    case ObjectiveKind::kKMedian:
      return kmedian_potentials(problem.features, soft, problem.metric, floor);
    case ObjectiveKind::kNcut: {
      PrototypePotentials out;
      out.potentials = ncut_potentials(*problem.graph, soft, floor);
      return out;
    }
  }
  throw std::logic_error("unhandled objective kind");
}

namespace {

double ncut_relaxed(const SparseMatrix& weights, const Vector& degrees, const Matrix& probs, double floor) {
  const Index n = weights.rows();
  const Index n_clusters = probs.cols();
  Vector vol = Vector::Zero(n_clusters);
  Vector assoc = Vector::Zero(n_clusters);
  for (Index p = 0; p < n; ++p) {
    for (SparseMatrix::InnerIterator it(weights, p); it; ++it) {
      for (Index k = 0; k < n_clusters; ++k) assoc[k] += probs(p, k) * it.value() * probs(it.col(), k);
    }
    for (Index k = 0; k < n_clusters; ++k) vol[k] += degrees[p] * probs(p, k);
  }
  double value = static_cast<double>(n_clusters);
  for (Index k = 0; k < n_clusters; ++k) {
    if (vol[k] >= floor) value -= assoc[k] / vol[k];
  }
  return value;
}

}  // namespace

double relaxed_objective(const ClusteringProblem& problem, const SoftAssignment& soft, double floor) {
  if (problem.kind == ObjectiveKind::kNcut) {
    return ncut_relaxed(problem.graph->weights(), problem.graph->degrees(), soft.probs(), floor);
  }
  const PrototypePotentials fit = clustering_potentials(problem, soft, floor);
  const Matrix& probs = soft.probs();
  double value = 0.0;
  for (Index p = 0; p < probs.rows(); ++p) {
    for (Index k = 0; k < probs.cols(); ++k) value += probs(p, k) * fit.potentials.values(p, k);
  }
  return value;
}

double kmeans_discrete_objective(const Matrix& features, const Labels& labels, Index n_clusters) {
  check_labels(labels, features.rows(), n_clusters);
  Matrix centers = Matrix::Zero(n_clusters, features.cols());
  std::vector<Index> count(static_cast<std::size_t>(n_clusters), 0);
  for (Index p = 0; p < features.rows(); ++p) {
    const int k = labels[static_cast<std::size_t>(p)];
    centers.row(k) += features.row(p);
    ++count[static_cast<std::size_t>(k)];
  }
  for (Index k = 0; k < n_clusters; ++k) {
    if (count[static_cast<std::size_t>(k)] > 0) centers.row(k) /= static_cast<double>(count[static_cast<std::size_t>(k)]);
  }
  double value = 0.0;
  for (Index p = 0; p < features.rows(); ++p) {
    value += squared_euclidean_distance(row_span(features, p), row_span(centers, labels[static_cast<std::size_t>(p)]));
  }
  return value;
}

double kmedian_discrete_objective(const Matrix& features, const Labels& labels, Index n_clusters,
                                  const DistanceFn& metric) {
  check_labels(labels, features.rows(), n_clusters);
  std::vector<std::vector<Index>> members(static_cast<std::size_t>(n_clusters));
  for (Index p = 0; p < features.rows(); ++p) members[static_cast<std::size_t>(labels[static_cast<std::size_t>(p)])].push_back(p);
  double value = 0.0;
  for (const auto& cluster : members) {
    if (cluster.empty()) continue;
    std::vector<double> cost(cluster.size());
    parallel_for(static_cast<std::ptrdiff_t>(cluster.size()), [&](std::ptrdiff_t c) {
      double sum = 0.0;
      for (Index p : cluster) {
        sum += metric_distance(metric, row_span(features, p), row_span(features, cluster[static_cast<std::size_t>(c)]));
      }
      cost[static_cast<std::size_t>(c)] = sum;
    });
    value += *std::min_element(cost.begin(), cost.end());
  }
  return value;
}

double ncut_discrete_objective(const AffinityGraph& graph, const Labels& labels, Index n_clusters) {
  check_labels(labels, graph.n_points(), n_clusters);
  return ncut_relaxed(graph.weights(), graph.degrees(), binarize(labels, n_clusters).probs(), 1e-300);
}

double discrete_objective(const ClusteringProblem& problem, const Labels& labels) {
  switch (problem.kind) {
    case ObjectiveKind::kKMeans:
      return kmeans_discrete_objective(problem.features, labels, problem.n_clusters);
    case ObjectiveKind::kKMedian:
      return kmedian_discrete_objective(problem.features, labels, problem.n_clusters, problem.metric);
    case ObjectiveKind::kNcut:
      return ncut_discrete_objective(*problem.graph, labels, problem.n_clusters);
  }
  throw std::logic_error("unhandled objective kind");
}

}  // namespace fairclust

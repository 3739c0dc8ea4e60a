#include "fairclust/fairness.hpp"

#include "fairclust/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fairclust {

namespace {

void check_shapes(const SoftAssignment& soft, const DemographicPartition& demo) {
  if (soft.n_points() != demo.n_points()) {
    throw std::invalid_argument("soft assignment and demographic partition disagree on the number of points");
  }
}

void check_simplex(std::span<const double> v, const char* name) {
  double sum = 0.0;
  for (double x : v) {
    if (!(x >= -kSimplexTolerance && x <= 1.0 + kSimplexTolerance)) {
      throw std::invalid_argument(std::string(name) + " has an entry outside [0, 1]");
    }
    sum += x;
  }
  if (std::abs(sum - 1.0) > kSimplexTolerance) {
    throw std::invalid_argument(std::string(name) + " does not sum to 1");
  }
}

double kl_unchecked(std::span<const double> u, std::span<const double> p, double floor) {
  double kl = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    if (u[j] > 0.0) kl += u[j] * std::log(u[j] / std::max(p[j], floor));
  }
  return kl;
}

}  // namespace

ClusterGroupMasses cluster_group_masses(const SoftAssignment& soft, const DemographicPartition& demo) {
  check_shapes(soft, demo);
  const Index n_clusters = soft.n_clusters();
  ClusterGroupMasses masses{Vector::Zero(n_clusters), Matrix::Zero(demo.n_groups(), n_clusters)};
  const Matrix& probs = soft.probs();
  for (Index p = 0; p < probs.rows(); ++p) {
    const int j = demo.group_of(p);
    for (Index k = 0; k < n_clusters; ++k) {
      masses.cluster[k] += probs(p, k);
      masses.group(j, k) += probs(p, k);
    }
  }
  return masses;
}

ClusterMarginals cluster_marginals(const SoftAssignment& soft, const DemographicPartition& demo, double floor) {
  const ClusterGroupMasses masses = cluster_group_masses(soft, demo);
  const Index n_clusters = soft.n_clusters();
  ClusterMarginals marginals{Matrix(n_clusters, demo.n_groups())};
  for (Index k = 0; k < n_clusters; ++k) {
    const double size = masses.cluster[k];
    for (int j = 0; j < demo.n_groups(); ++j) {
      marginals.values(k, j) = size < floor ? demo.target(j) : std::max(masses.group(j, k), floor) / size;
    }
  }
  return marginals;
}

double kl_divergence(std::span<const double> u, std::span<const double> p, double floor) {
  if (u.size() != p.size()) throw std::invalid_argument("kl_divergence: length mismatch");
  check_simplex(u, "kl_divergence: first argument");
  check_simplex(p, "kl_divergence: second argument");
  return kl_unchecked(u, p, floor);
}

double fairness_error(const SoftAssignment& soft, const DemographicPartition& demo, double floor) {
  const ClusterMarginals marginals = cluster_marginals(soft, demo, floor);
  const auto& u = demo.targets();
  double total = 0.0;
  for (Index k = 0; k < marginals.values.rows(); ++k) {
    const std::span<const double> row(marginals.values.data() + k * marginals.values.cols(),
                                      static_cast<std::size_t>(marginals.values.cols()));
    total += kl_unchecked(u, row, floor);
  }
  return total;
}

double fairness_penalty(const SoftAssignment& soft, const DemographicPartition& demo, double floor) {
  const ClusterMarginals marginals = cluster_marginals(soft, demo, floor);
  double total = 0.0;
  for (Index k = 0; k < marginals.values.rows(); ++k) {
    for (int j = 0; j < demo.n_groups(); ++j) {
      total -= demo.target(j) * std::log(marginals.values(k, j));
    }
  }
  return total;
}

UnaryPotentials fairness_bound_potentials(const SoftAssignment& soft, const DemographicPartition& demo,
                                          const SolverConfig& config) {
  const ClusterGroupMasses masses = cluster_group_masses(soft, demo);
  const Index n_clusters = soft.n_clusters();
  const int n_groups = demo.n_groups();
  const double inv_l = 1.0 / config.lipschitz;
  const double mu_total = std::accumulate(demo.targets().begin(), demo.targets().end(), 0.0);

  // concave[k] = Σ_j mu_j / 1^t S_k ; convex(j, k) = mu_j / V_j^t S_k
  Vector concave(n_clusters);
  Matrix convex(n_groups, n_clusters);
  for (Index k = 0; k < n_clusters; ++k) {
    const bool empty = masses.cluster[k] < config.marginal_floor;
    concave[k] = empty ? 0.0 : mu_total / masses.cluster[k];
    for (int j = 0; j < n_groups; ++j) {
      convex(j, k) = empty ? 0.0 : demo.target(j) / std::max(masses.group(j, k), config.marginal_floor);
    }
  }

  UnaryPotentials b{Matrix(soft.n_points(), n_clusters)};
  parallel_for(soft.n_points(), [&](std::ptrdiff_t p) {
    const int j = demo.group_of(p);
    for (Index k = 0; k < n_clusters; ++k) b.values(p, k) = inv_l * (concave[k] - convex(j, k));
  });
  return b;
}

}  // namespace fairclust

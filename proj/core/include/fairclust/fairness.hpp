#pragma once

// KL fairness penalty: cluster marginals P(j|k), the penalty and its error
// metric, and the per-point bound potentials b_p driving the solver.

#include "fairclust/core_model.hpp"

#include <span>

namespace fairclust {

/// Shared shape for the N×K unary potentials a_p (clustering) and b_p
/// (fairness).
struct UnaryPotentials {
  Matrix values;
};

/// Soft masses 1^t S_k and V_j^t S_k, accumulated in point order.
struct ClusterGroupMasses {
  Vector cluster;  // length K
  Matrix group;    // J×K
};

ClusterGroupMasses cluster_group_masses(const SoftAssignment& soft, const DemographicPartition& demo);

/// P(j|k) = max(V_j^t S_k, floor) / 1^t S_k. A cluster with mass below the
/// floor is empty and gets P_k = U, so it adds nothing to the error.
ClusterMarginals cluster_marginals(const SoftAssignment& soft, const DemographicPartition& demo,
                                   double floor = 1e-10);

/// Σ_j u_j log(u_j / p_j) with 0·log 0 = 0 and p_j clamped at `floor`.
/// Both arguments must be simplex vectors of the same length.
double kl_divergence(std::span<const double> u, std::span<const double> p, double floor = 1e-10);

/// Σ_k D_KL(U || P_k).
double fairness_error(const SoftAssignment& soft, const DemographicPartition& demo, double floor = 1e-10);

/// Σ_k Σ_j −mu_j log P(j|k). Equals fairness_error plus K·Σ_j mu_j log mu_j.
double fairness_penalty(const SoftAssignment& soft, const DemographicPartition& demo, double floor = 1e-10);

/// b_{p,k} = (1/L) Σ_j (mu_j / 1^t S_k − mu_j v_{j,p} / V_j^t S_k), group
/// masses clamped at config.marginal_floor; zero for empty clusters. L·b is
/// the gradient of fairness_penalty with respect to s_{p,k}.
UnaryPotentials fairness_bound_potentials(const SoftAssignment& soft, const DemographicPartition& demo,
                                          const SolverConfig& config);

}  // namespace fairclust

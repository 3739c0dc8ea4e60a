#pragma once

// Evaluation metrics on hard clusterings.

#include "fairclust/core_model.hpp"

#include <vector>

namespace fairclust {

/// Number of points of each group (columns) inside each cluster (rows).
std::vector<std::vector<Index>> group_counts(const Labels& labels, const DemographicPartition& demo,
                                             Index n_clusters);

/// min over ordered group pairs of |V_j ∩ C_k| / |V_j' ∩ C_k|. An empty cluster
/// or one missing a group has balance 0. A single group gives 1.
double cluster_balance(const Labels& labels, const DemographicPartition& demo, Index n_clusters, Index k);

/// Minimum cluster_balance over all clusters.
double min_balance(const Labels& labels, const DemographicPartition& demo, Index n_clusters);

/// Σ_k D_KL(U || P_k) of the binary assignment given by labels.
double hard_fairness_error(const Labels& labels, const DemographicPartition& demo, Index n_clusters,
                           double floor = 1e-10);

}  // namespace fairclust

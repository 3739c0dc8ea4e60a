#include "fairclust/metrics.hpp"

#include "fairclust/fairness.hpp"

#include <algorithm>
#include <stdexcept>

namespace fairclust {

std::vector<std::vector<Index>> group_counts(const Labels& labels, const DemographicPartition& demo,
                                             Index n_clusters) {
  check_labels(labels, demo.n_points(), n_clusters);
  std::vector<std::vector<Index>> counts(static_cast<std::size_t>(n_clusters),
                                         std::vector<Index>(static_cast<std::size_t>(demo.n_groups()), 0));
  for (std::size_t p = 0; p < labels.size(); ++p) {
    ++counts[static_cast<std::size_t>(labels[p])][static_cast<std::size_t>(demo.group_of(static_cast<Index>(p)))];
  }
  return counts;
}

namespace {

double balance_of(const std::vector<Index>& counts) {
  const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
  if (*hi == 0) return 0.0;
  return static_cast<double>(*lo) / static_cast<double>(*hi);
}

}  // namespace

double cluster_balance(const Labels& labels, const DemographicPartition& demo, Index n_clusters, Index k) {
  if (k < 0 || k >= n_clusters) throw std::invalid_argument("cluster_balance: cluster index out of range");
  return balance_of(group_counts(labels, demo, n_clusters)[static_cast<std::size_t>(k)]);
}

double min_balance(const Labels& labels, const DemographicPartition& demo, Index n_clusters) {
  double best = 1.0;
  for (const auto& counts : group_counts(labels, demo, n_clusters)) best = std::min(best, balance_of(counts));
  return best;
}

double hard_fairness_error(const Labels& labels, const DemographicPartition& demo, Index n_clusters, double floor) {
  return fairness_error(binarize(labels, n_clusters), demo, floor);
}

}  // namespace fairclust

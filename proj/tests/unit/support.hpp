#pragma once

// Random instance generators and brute-force oracles shared by the unit tests.
// Oracles use plain std::vector loops so they share no code with the library.

#include "fairclust/core_model.hpp"
#include "fairclust/rng.hpp"

#include <cmath>
#include <vector>

namespace testsupport {

using fairclust::Index;
using fairclust::Matrix;
using fairclust::Rng;

using Dense = std::vector<std::vector<double>>;

/// Random point of the K-simplex. Mixes flat draws, peaked draws and draws
/// with exact zeros so boundaries get exercised.
inline std::vector<double> random_simplex(Rng& rng, int k, bool allow_zeros = true) {
  std::vector<double> v(static_cast<std::size_t>(k));
  const double style = rng.uniform();
  double sum = 0.0;
  for (auto& x : v) {
    x = -std::log(1.0 - rng.uniform());
    if (style < 0.3) x = std::pow(x, 4.0);
    if (allow_zeros && style > 0.85 && rng.uniform() < 0.4) x = 0.0;
    sum += x;
  }
  if (sum == 0.0) {
    v[0] = 1.0;
    return v;
  }
  for (auto& x : v) x /= sum;
  return v;
}

/// Interior simplex point with every entry at least `lo`.
inline std::vector<double> interior_simplex(Rng& rng, int k, double lo = 1e-3) {
  std::vector<double> v = random_simplex(rng, k, false);
  for (auto& x : v) x = lo + (1.0 - k * lo) * x;
  return v;
}

inline Matrix random_soft_matrix(Rng& rng, Index n, int k, bool interior = true) {
  Matrix m(n, k);
  for (Index p = 0; p < n; ++p) {
    const auto row = interior ? interior_simplex(rng, k) : random_simplex(rng, k);
    for (int c = 0; c < k; ++c) m(p, c) = row[static_cast<std::size_t>(c)];
  }
  return m;
}

/// Group ids covering every group at least once.
inline std::vector<int> random_groups(Rng& rng, Index n, int j) {
  std::vector<int> g(static_cast<std::size_t>(n));
  for (Index p = 0; p < n; ++p) g[static_cast<std::size_t>(p)] = p < j ? static_cast<int>(p) : static_cast<int>(rng.below(j));
  return g;
}

inline Matrix random_points(Rng& rng, Index n, Index m, double scale = 1.0) {
  Matrix x(n, m);
  for (Index p = 0; p < n; ++p)
    for (Index c = 0; c < m; ++c) x(p, c) = scale * rng.normal();
  return x;
}

inline Dense to_dense(const Matrix& m) {
  Dense d(static_cast<std::size_t>(m.rows()), std::vector<double>(static_cast<std::size_t>(m.cols())));
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c) d[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = m(r, c);
  return d;
}

/// P(j|k) by direct summation: K×J.
inline Dense marginals_oracle(const Dense& s, const std::vector<int>& group, int j_count) {
  const std::size_t k_count = s[0].size();
  Dense p(k_count, std::vector<double>(static_cast<std::size_t>(j_count), 0.0));
  for (std::size_t k = 0; k < k_count; ++k) {
    double total = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) total += s[i][k];
    for (int j = 0; j < j_count; ++j) {
      double in_group = 0.0;
      for (std::size_t i = 0; i < s.size(); ++i)
        if (group[i] == j) in_group += s[i][k];
      p[k][static_cast<std::size_t>(j)] = in_group / total;
    }
  }
  return p;
}

/// Σ_k Σ_j −u_j log P(j|k).
inline double penalty_oracle(const Dense& s, const std::vector<int>& group, const std::vector<double>& u) {
  const Dense p = marginals_oracle(s, group, static_cast<int>(u.size()));
  double total = 0.0;
  for (const auto& row : p)
    for (std::size_t j = 0; j < u.size(); ++j) total -= u[j] * std::log(row[j]);
  return total;
}

/// Σ_k Σ_j u_j log(u_j / P(j|k)).
inline double fairness_error_oracle(const Dense& s, const std::vector<int>& group, const std::vector<double>& u) {
  const Dense p = marginals_oracle(s, group, static_cast<int>(u.size()));
  double total = 0.0;
  for (const auto& row : p)
    for (std::size_t j = 0; j < u.size(); ++j)
      if (u[j] > 0.0) total += u[j] * std::log(u[j] / row[j]);
  return total;
}

}  // namespace testsupport

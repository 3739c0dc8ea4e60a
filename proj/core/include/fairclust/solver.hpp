#pragma once

// Bound-optimization solver: closed-form simplex updates, the outer/inner
// MM loop and the lambda sweep.

#include "fairclust/core_model.hpp"
#include "fairclust/fairness.hpp"
#include "fairclust/objectives.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace fairclust {

/// Raised when the energy stops being finite.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Entries below this stay at zero; rows left with none are reset to uniform.
inline constexpr double kDeadRow = 1e-300;

struct SoftmaxStep {
  SoftAssignment soft;
  /// Σ_p −log Σ_k s_pk exp(−(a_pk + λ b_pk)): the auxiliary value of `soft`
  /// anchored at the input, without floor clamping. Reset rows contribute 0.
  double value = 0.0;
  int reset_rows = 0;
};

/// s_p ← s_p ∘ exp(−(a_p + λ b_p)), renormalised. Exponents are shifted by the
/// row minimum; rows that would underflow are redone in log space.
SoftmaxStep softmax_step(const SoftAssignment& current, const UnaryPotentials& a, const UnaryPotentials& b,
                         double lambda);

/// softmax_step without the value. `reset_rows`, if given, receives the number
/// of rows reset to uniform.
SoftAssignment softmax_update(const SoftAssignment& current, const UnaryPotentials& a, const UnaryPotentials& b,
                              double lambda, int* reset_rows = nullptr);

/// Σ_p s_p^t (a_p + λ b_p + log s_p − log anchor_p), logs clamped at `floor`.
double auxiliary_value(const SoftAssignment& soft, const SoftAssignment& anchor, const UnaryPotentials& a,
                       const UnaryPotentials& b, double lambda, double floor = 1e-10);

/// F(S) plus (λ/L) times the cross-entropy penalty. `auxiliary` is left 0.
EnergyBreakdown total_energy(const ClusteringProblem& problem, const SoftAssignment& soft,
                             const DemographicPartition& demo, const SolverConfig& config);

/// True when |current − previous| is below tol relative to |previous|, or
/// below 1e-12 absolutely.
bool converged(double previous, double current, double tol);

SolveResult solve(const ClusteringProblem& problem, const DemographicPartition& demo, const Labels& init_labels,
                  const SolverConfig& config);

struct SweepRow {
  double lambda = 0.0;
  double clustering_objective = 0.0;
  double fairness_error = 0.0;
  double balance = 0.0;
};

struct SweepResult {
  std::size_t chosen = 0;
  double chosen_lambda = 0.0;
  /// False when no lambda met epsilon; `chosen` is then the last run.
  bool satisfied = false;
  std::vector<SolveResult> runs;
  std::vector<SweepRow> table;
};

/// One independent solve per lambda (run concurrently); picks the smallest
/// lambda whose hard fairness error is at most epsilon. config.lambda is
/// ignored.
SweepResult lambda_sweep(const ClusteringProblem& problem, const DemographicPartition& demo, const Labels& init_labels,
                         const std::vector<double>& lambdas, double epsilon, const SolverConfig& config);

}  // namespace fairclust

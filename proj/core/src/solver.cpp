#include "fairclust/solver.hpp"

#include "fairclust/metrics.hpp"
#include "fairclust/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace fairclust {
namespace {

void check_potentials(const SoftAssignment& soft, const UnaryPotentials& pot, const char* name) {
  if (pot.values.rows() != soft.n_points() || pot.values.cols() != soft.n_clusters()) {
    std::ostringstream msg;
    msg << name << " potentials are " << pot.values.rows() << "x" << pot.values.cols() << ", expected "
        << soft.n_points() << "x" << soft.n_clusters();
    throw std::invalid_argument(msg.str());
  }
}

// F(S) together with the potentials at S, so the next outer pass can reuse them.
struct Evaluation {
  PrototypePotentials potentials;
  double clustering = 0.0;
};

Evaluation evaluate(const ClusteringProblem& problem, const SoftAssignment& soft, double floor) {
  Evaluation ev;
  ev.potentials = clustering_potentials(problem, soft, floor);
  if (problem.kind == ObjectiveKind::kNcut) {
    ev.clustering = relaxed_objective(problem, soft, floor);
  } else {
    const Matrix& probs = soft.probs();
    for (Index p = 0; p < probs.rows(); ++p) {
      for (Index k = 0; k < probs.cols(); ++k) ev.clustering += probs(p, k) * ev.potentials.potentials.values(p, k);
    }
  }
  return ev;
}

EnergyBreakdown energy_from(double clustering, const SoftAssignment& soft, const DemographicPartition& demo,
                            const SolverConfig& config) {
  EnergyBreakdown e;
  e.clustering = clustering;
  if (config.lambda > 0.0) {
    e.fairness = config.lambda / config.lipschitz * fairness_penalty(soft, demo, config.marginal_floor);
  }
  e.total = e.clustering + e.fairness;
  return e;
}

}  // namespace

SoftmaxStep softmax_step(const SoftAssignment& current, const UnaryPotentials& a, const UnaryPotentials& b,
                         double lambda) {
  check_potentials(current, a, "clustering");
  check_potentials(current, b, "fairness");
  const Index n = current.n_points();
  const Index n_clusters = current.n_clusters();
  const Matrix& s = current.probs();
  Matrix next(n, n_clusters);
  std::vector<double> row_value(static_cast<std::size_t>(n), 0.0);
  std::vector<char> reset(static_cast<std::size_t>(n), 0);
  constexpr double kInf = std::numeric_limits<double>::infinity();
  parallel_for(n, [&](std::ptrdiff_t p) {
    double low = kInf;
    for (Index k = 0; k < n_clusters; ++k) {
      next(p, k) = a.values(p, k) + lambda * b.values(p, k);
      if (s(p, k) >= kDeadRow && next(p, k) < low) low = next(p, k);
    }
    if (!(low < kInf)) {
      for (Index k = 0; k < n_clusters; ++k) next(p, k) = 1.0 / static_cast<double>(n_clusters);
      reset[static_cast<std::size_t>(p)] = 1;
      return;
    }
    double total = 0.0;
    for (Index k = 0; k < n_clusters; ++k) {
      next(p, k) = s(p, k) >= kDeadRow ? s(p, k) * std::exp(low - next(p, k)) : 0.0;
      total += next(p, k);
    }
    double log_z = std::log(total) - low;
    if (total < 1e-200) {
      // Tiny mass on the cheapest cluster: redo with the log-space maximum.
      double top = -kInf;
      for (Index k = 0; k < n_clusters; ++k) {
        next(p, k) = s(p, k) >= kDeadRow ? std::log(s(p, k)) - (a.values(p, k) + lambda * b.values(p, k)) : -kInf;
        top = std::max(top, next(p, k));
      }
      total = 0.0;
      for (Index k = 0; k < n_clusters; ++k) {
        next(p, k) = std::exp(next(p, k) - top);
        total += next(p, k);
      }
      log_z = top + std::log(total);
    }
    for (Index k = 0; k < n_clusters; ++k) next(p, k) /= total;
    row_value[static_cast<std::size_t>(p)] = -log_z;
  });
  SoftmaxStep step{SoftAssignment(std::move(next))};
  for (double v : row_value) step.value += v;
  step.reset_rows = static_cast<int>(std::count(reset.begin(), reset.end(), 1));
  return step;
}

SoftAssignment softmax_update(const SoftAssignment& current, const UnaryPotentials& a, const UnaryPotentials& b,
                              double lambda, int* reset_rows) {
  SoftmaxStep step = softmax_step(current, a, b, lambda);
  if (reset_rows) *reset_rows = step.reset_rows;
  return std::move(step.soft);
}

double auxiliary_value(const SoftAssignment& soft, const SoftAssignment& anchor, const UnaryPotentials& a,
                       const UnaryPotentials& b, double lambda, double floor) {
  check_potentials(soft, a, "clustering");
  check_potentials(soft, b, "fairness");
  if (anchor.n_points() != soft.n_points() || anchor.n_clusters() != soft.n_clusters()) {
    throw std::invalid_argument("auxiliary_value: anchor shape mismatch");
  }
  const Matrix& s = soft.probs();
  const Matrix& s0 = anchor.probs();
  double value = 0.0;
  for (Index p = 0; p < s.rows(); ++p) {
    for (Index k = 0; k < s.cols(); ++k) {
      const double v = s(p, k);
      if (v == 0.0) continue;
      value += v * (a.values(p, k) + lambda * b.values(p, k) + std::log(std::max(v, floor)) -
                    std::log(std::max(s0(p, k), floor)));
    }
  }
  return value;
}

EnergyBreakdown total_energy(const ClusteringProblem& problem, const SoftAssignment& soft,
                             const DemographicPartition& demo, const SolverConfig& config) {
  return energy_from(relaxed_objective(problem, soft, config.marginal_floor), soft, demo, config);
}

bool converged(double previous, double current, double tol) {
  const double change = std::abs(current - previous);
  return change < tol * std::abs(previous) || change < 1e-12;
}

SolveResult solve(const ClusteringProblem& problem, const DemographicPartition& demo, const Labels& init_labels,
                  const SolverConfig& config) {
  config.validate();
  problem.validate();
  const Index n = problem.n_points();
  const Index n_clusters = problem.n_clusters;
  if (n_clusters < 2) throw std::invalid_argument("solve needs K >= 2");
  if (demo.n_points() != n) throw std::invalid_argument("demographic partition size differs from the data");
  check_labels(init_labels, n, n_clusters);

  SolveResult result;
  SoftAssignment soft = binarize(init_labels, n_clusters);
  const UnaryPotentials zero{Matrix::Zero(n, n_clusters)};
  const double floor = config.marginal_floor;
  const auto warn = [&](int outer, const std::string& what) {
    std::ostringstream msg;
    msg << "outer " << outer << ": " << what;
    result.warnings.push_back(msg.str());
  };
  const auto note_reseeds = [&](int outer, const std::vector<int>& reseeded) {
    for (int k : reseeded) warn(outer, "reseeded empty cluster " + std::to_string(k + 1));
  };

  Evaluation ev = evaluate(problem, soft, floor);
  note_reseeds(0, ev.potentials.reseeded);
  double previous = std::numeric_limits<double>::quiet_NaN();

  struct Pass {
    SoftAssignment soft;
    int inner = 0;
    double aux = 0.0;
    std::vector<std::string> notes;
  };
  const auto run_inner = [&](SoftAssignment start, const UnaryPotentials& a) {
    Pass pass{std::move(start), 0, 0.0, {}};
    for (double last_aux = 0.0; pass.inner < config.max_inner;) {
      const UnaryPotentials b = config.lambda > 0.0 ? fairness_bound_potentials(pass.soft, demo, config) : zero;
      SoftmaxStep step = softmax_step(pass.soft, a, b, config.lambda);
      if (step.reset_rows > 0) pass.notes.push_back(std::to_string(step.reset_rows) + " rows reset to uniform");
      pass.aux = step.value;
      pass.soft = std::move(step.soft);
      ++pass.inner;
      if (pass.inner > 1 && converged(last_aux, pass.aux, config.inner_tol)) break;
      last_aux = pass.aux;
    }
    return pass;
  };

  for (int outer = 1; outer <= config.max_outer; ++outer) {
    const UnaryPotentials a = std::move(ev.potentials.potentials);
    if (!a.values.allFinite()) {
      throw SolverError("clustering potentials became non-finite at outer iteration " + std::to_string(outer));
    }
    const bool restart = outer == 1 || config.reinit != ReinitPolicy::kFirstOuter;
    Pass pass = run_inner(restart ? softmax_update(SoftAssignment::uniform(n, n_clusters), a, zero, 0.0) : soft, a);
    Evaluation next_ev = evaluate(problem, pass.soft, floor);
    EnergyBreakdown energy = energy_from(next_ev.clustering, pass.soft, demo, config);
    if (config.reinit == ReinitPolicy::kGuarded && outer > 1 && !(energy.total <= previous)) {
      ++result.rejected_reinits;
      pass = run_inner(soft, a);
      next_ev = evaluate(problem, pass.soft, floor);
      energy = energy_from(next_ev.clustering, pass.soft, demo, config);
    }
    for (const auto& note : pass.notes) warn(outer, note);
    result.inner_iterations.push_back(pass.inner);
    note_reseeds(outer, next_ev.potentials.reseeded);
    energy.auxiliary = pass.aux;
    soft = std::move(pass.soft);
    ev = std::move(next_ev);
    if (!std::isfinite(energy.total)) {
      std::ostringstream msg;
      msg << "energy became non-finite at outer iteration " << outer << " (clustering " << energy.clustering
          << ", fairness " << energy.fairness << ")";
      throw SolverError(msg.str());
    }
    result.energy_trace.push_back({outer, energy});
    result.outer_iterations = outer;

    if (outer > 1) {
      if (energy.total > previous + 1e-9 * std::abs(previous)) {
        ++result.monotonicity_violations;
        std::ostringstream msg;
        msg.precision(17);
        msg << "energy increased from " << previous << " to " << energy.total;
        warn(outer, msg.str());
      }
      if (converged(previous, energy.total, config.outer_tol)) break;
    }
    previous = energy.total;
  }

  result.labels = hard_labels(soft);
  result.soft = std::move(soft);
  result.metrics.discrete_objective = discrete_objective(problem, result.labels);
  result.metrics.fairness_error = hard_fairness_error(result.labels, demo, n_clusters, floor);
  result.metrics.min_balance = min_balance(result.labels, demo, n_clusters);
  return result;
}

SweepResult lambda_sweep(const ClusteringProblem& problem, const DemographicPartition& demo, const Labels& init_labels,
                         const std::vector<double>& lambdas, double epsilon, const SolverConfig& config) {
  if (lambdas.empty()) throw std::invalid_argument("lambda sweep needs at least one lambda");
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] >= 0.0)) throw std::invalid_argument("lambdas must be nonnegative");
    if (i > 0 && !(lambdas[i] > lambdas[i - 1])) throw std::invalid_argument("lambdas must be strictly ascending");
  }
  SweepResult sweep;
  sweep.runs.resize(lambdas.size());
  parallel_tasks(static_cast<std::ptrdiff_t>(lambdas.size()), [&](std::ptrdiff_t i) {
    SolverConfig run_config = config;
    run_config.lambda = lambdas[static_cast<std::size_t>(i)];
    sweep.runs[static_cast<std::size_t>(i)] = solve(problem, demo, init_labels, run_config);
  });
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    const ClusteringMetrics& m = sweep.runs[i].metrics;
    sweep.table.push_back({lambdas[i], m.discrete_objective, m.fairness_error, m.min_balance});
  }
  sweep.chosen = lambdas.size() - 1;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (sweep.table[i].fairness_error <= epsilon) {
      sweep.chosen = i;
      sweep.satisfied = true;
      break;
    }
  }
  sweep.chosen_lambda = lambdas[sweep.chosen];
  return sweep;
}

}  // namespace fairclust

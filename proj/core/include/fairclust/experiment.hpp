#pragma once

// End-to-end experiments and their report files.
//
// A run directory holds:
//   summary.csv              one row per lambda
//   trace_lambda_<v>.csv     iter,total,clustering,fairness per outer iteration
//   labels_lambda_<v>.csv    point,cluster (1-based) per point
//   table.txt                the chosen lambda as a results-table row
//   warnings.txt             solver warnings, when there are any

#include "fairclust/profiles.hpp"
#include "fairclust/solver.hpp"

#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace fairclust {

struct ExperimentOptions {
  std::string profile = "synthetic";
  ObjectiveKind objective = ObjectiveKind::kKMeans;
  /// Profile default when unset.
  std::optional<Index> n_clusters;
  /// Profile default for the objective when empty.
  std::vector<double> lambdas;
  double epsilon = std::numeric_limits<double>::infinity();
  int knn = 20;
  std::uint64_t seed = 0;
  std::filesystem::path data_dir = default_data_dir();
  Index max_rows = 0;
  std::optional<std::vector<double>> targets;
  /// lambda is overridden per run; the rest is used as given.
  SolverConfig solver;
};

/// Everything a run needs after loading: preprocessed data, seeds, graph.
struct PreparedExperiment {
  Profile profile;
  Dataset dataset;
  DemographicPartition demographics;
  ClusteringProblem problem;
  Labels init_labels;
  std::vector<double> lambdas;
};

PreparedExperiment prepare_experiment(const ExperimentOptions& options);

struct ExperimentReport {
  PreparedExperiment prepared;
  SweepResult sweep;
};

/// Runs the sweep and writes the report files when out_dir is non-empty.
ExperimentReport run_experiment(const ExperimentOptions& options, const std::filesystem::path& out_dir);

void write_report(const ExperimentReport& report, const std::filesystem::path& out_dir);

/// "%g" rendering used in file names, e.g. 10 → "10", 0.5 → "0.5".
std::string format_lambda(double lambda);
/// Shortest round-trip rendering used for every number in report files.
std::string format_number(double value);

/// Writes lambda,clustering_objective,fairness_error,balance sorted by lambda.
/// Throws std::invalid_argument with fewer than two rows.
void write_curves(std::vector<SweepRow> rows, const std::filesystem::path& path);

/// Reads a run directory's summary.csv and writes its curve file.
void sweep_curves(const std::filesystem::path& run_dir, const std::filesystem::path& path);

struct KCurveRow {
  Index n_clusters = 0;
  double fair_objective = 0.0;
  double vanilla_objective = 0.0;
};

/// For each K, a run at options.lambdas.front() (or the profile default)
/// paired with a lambda = 0 run from the same seed.
std::vector<KCurveRow> k_curves(const ExperimentOptions& options, const std::vector<Index>& ks);
void write_k_curves(const std::vector<KCurveRow>& rows, const std::filesystem::path& path);

}  // namespace fairclust

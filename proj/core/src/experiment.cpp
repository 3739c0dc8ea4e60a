#include "fairclust/experiment.hpp"

#include "fairclust/data.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace fairclust {

std::string format_lambda(double lambda) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", lambda);
  return buf;
}

std::string format_number(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

PreparedExperiment prepare_experiment(const ExperimentOptions& options) {
  PreparedExperiment prep;
  prep.profile = resolve_profile(options.profile);
  Dataset raw = load_profile_data(prep.profile, options.data_dir, options.seed, options.max_rows);
  prep.dataset = prep.profile.preprocess ? preprocess(std::move(raw)) : std::move(raw);
  prep.demographics = prep.dataset.demographics(options.targets);
  if (static_cast<int>(prep.demographics.targets().size()) != prep.dataset.n_groups()) {
    throw DataError("target proportions need one entry per group");
  }

  ClusteringProblem& problem = prep.problem;
  problem.kind = options.objective;
  problem.n_clusters = options.n_clusters.value_or(prep.profile.n_clusters);
  problem.features = prep.dataset.features;
  if (problem.kind == ObjectiveKind::kNcut) problem.graph = knn_affinity(problem.features, options.knn);
  problem.validate();
  prep.init_labels = kmeanspp_seed(problem.features, problem.n_clusters, options.seed);
  prep.lambdas = options.lambdas.empty() ? std::vector<double>{prep.profile.lambda_for(options.objective)}
                                         : options.lambdas;
  return prep;
}

ExperimentReport run_experiment(const ExperimentOptions& options, const std::filesystem::path& out_dir) {
  ExperimentReport report;
  report.prepared = prepare_experiment(options);
  const PreparedExperiment& prep = report.prepared;
  report.sweep = lambda_sweep(prep.problem, prep.demographics, prep.init_labels, prep.lambdas, options.epsilon,
                              options.solver);
  if (!out_dir.empty()) write_report(report, out_dir);
  return report;
}

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(path.string() + ": cannot write file");
  return out;
}

void write_trace(const SolveResult& run, const std::filesystem::path& path) {
  std::ofstream out = open_output(path);
  out << "iter,total,clustering,fairness\n";
  for (const TraceRow& row : run.energy_trace) {
    out << row.iteration << ',' << format_number(row.energy.total) << ',' << format_number(row.energy.clustering)
        << ',' << format_number(row.energy.fairness) << '\n';
  }
}

void write_labels(const SolveResult& run, const std::filesystem::path& path) {
  std::ofstream out = open_output(path);
  out << "point,cluster\n";
  for (std::size_t p = 0; p < run.labels.size(); ++p) out << p + 1 << ',' << run.labels[p] + 1 << '\n';
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

void write_report(const ExperimentReport& report, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const SweepResult& sweep = report.sweep;
  const PreparedExperiment& prep = report.prepared;

  std::ofstream summary = open_output(out_dir / "summary.csv");
  summary << "lambda,discrete_objective,fairness_error,min_balance,outer_iterations,monotonicity_violations,chosen\n";
  for (std::size_t i = 0; i < sweep.table.size(); ++i) {
    const SweepRow& row = sweep.table[i];
    const SolveResult& run = sweep.runs[i];
    summary << format_number(row.lambda) << ',' << format_number(row.clustering_objective) << ','
            << format_number(row.fairness_error) << ',' << format_number(row.balance) << ','
            << run.outer_iterations << ',' << run.monotonicity_violations << ',' << (i == sweep.chosen ? 1 : 0)
            << '\n';
    const std::string tag = format_lambda(row.lambda);
    write_trace(run, out_dir / ("trace_lambda_" + tag + ".csv"));
    write_labels(run, out_dir / ("labels_lambda_" + tag + ".csv"));
  }

  const SweepRow& chosen = sweep.table[sweep.chosen];
  std::ofstream table = open_output(out_dir / "table.txt");
  table << "dataset | objective | fairness error / balance\n";
  table << prep.dataset.name << " (N=" << prep.dataset.n_points() << ", J=" << prep.dataset.n_groups()
        << ", lambda=" << format_lambda(chosen.lambda) << ") | " << to_string(prep.problem.kind) << ' '
        << fixed(chosen.clustering_objective, 2) << " | " << fixed(chosen.fairness_error, 3) << " / "
        << fixed(chosen.balance, 2) << (sweep.satisfied ? "" : " (epsilon not met)") << '\n';

  std::vector<std::string> warnings;
  for (std::size_t i = 0; i < sweep.runs.size(); ++i) {
    for (const auto& w : sweep.runs[i].warnings) warnings.push_back("lambda " + format_lambda(sweep.table[i].lambda) + ", " + w);
  }
  const auto warn_path = out_dir / "warnings.txt";
  if (warnings.empty()) {
    std::filesystem::remove(warn_path);
  } else {
    std::ofstream out = open_output(warn_path);
    for (const auto& w : warnings) out << w << '\n';
  }
}

void write_curves(std::vector<SweepRow> rows, const std::filesystem::path& path) {
  if (rows.size() < 2) throw std::invalid_argument("curves need at least two lambda values");
  std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) { return a.lambda < b.lambda; });
  std::ofstream out = open_output(path);
  out << "lambda,clustering_objective,fairness_error,balance\n";
  for (const SweepRow& row : rows) {
    out << format_number(row.lambda) << ',' << format_number(row.clustering_objective) << ','
        << format_number(row.fairness_error) << ',' << format_number(row.balance) << '\n';
  }
}

void sweep_curves(const std::filesystem::path& run_dir, const std::filesystem::path& path) {
  const auto summary_path = run_dir / "summary.csv";
  std::ifstream in(summary_path);
  if (!in) throw DataError(summary_path.string() + ": cannot open report");
  std::string line;
  std::getline(in, line);
  std::vector<SweepRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> fields;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) {
      double v = 0.0;
      const auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || end != cell.data() + cell.size()) {
        throw DataError(summary_path.string() + ": line " + std::to_string(line_no) + " is malformed");
      }
      fields.push_back(v);
    }
    if (fields.size() < 4) throw DataError(summary_path.string() + ": line " + std::to_string(line_no) + " is short");
    rows.push_back({fields[0], fields[1], fields[2], fields[3]});
  }
  write_curves(std::move(rows), path);
}

std::vector<KCurveRow> k_curves(const ExperimentOptions& options, const std::vector<Index>& ks) {
  std::vector<KCurveRow> rows;
  for (Index k : ks) {
    ExperimentOptions opt = options;
    opt.n_clusters = k;
    opt.lambdas.clear();
    const PreparedExperiment prep = prepare_experiment(opt);
    const double lambda = options.lambdas.empty() ? prep.lambdas.front() : options.lambdas.front();
    const SweepResult sweep =
        lambda_sweep(prep.problem, prep.demographics, prep.init_labels, {0.0, lambda}, 0.0, options.solver);
    rows.push_back({k, sweep.table[1].clustering_objective, sweep.table[0].clustering_objective});
  }
  return rows;
}

void write_k_curves(const std::vector<KCurveRow>& rows, const std::filesystem::path& path) {
  std::ofstream out = open_output(path);
  out << "k,fair_objective,vanilla_objective\n";
  for (const KCurveRow& row : rows) {
    out << row.n_clusters << ',' << format_number(row.fair_objective) << ',' << format_number(row.vanilla_objective)
        << '\n';
  }
}

}  // namespace fairclust

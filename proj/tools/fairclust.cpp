// fairclust: run fair-clustering experiments from the command line.
//
//   fairclust run --profile synthetic --objective kmeans --lambda 10 --out runs/syn
//   fairclust curves --report runs/syn
//   fairclust kcurve --profile bank --objective kmeans --k-values 2,4,6,8,10 --out bank_k.csv
//   fairclust export --profile adult --out adult_pre.csv

#include "fairclust/data.hpp"
#include "fairclust/experiment.hpp"
#include "fairclust/parallel.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>

namespace {

using namespace fairclust;

struct CommonArgs {
  std::string profile = "synthetic";
  std::string objective = "kmeans";
  Index k = 0;
  std::vector<double> lambdas;
  double epsilon = std::numeric_limits<double>::infinity();
  int knn = 20;
  double lipschitz = 2.0;
  std::uint64_t seed = 0;
  std::string data_dir = default_data_dir().string();
  Index max_rows = 0;
  std::vector<double> targets;
  std::string reinit = "guarded";
  int max_outer = 100;
  int max_inner = 1000;
  int threads = 0;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("--profile", a.profile, "builtin profile name or JSON profile path")->capture_default_str();
  cmd->add_option("--objective", a.objective, "kmeans, kmedian or ncut")
      ->check(CLI::IsMember({"kmeans", "kmedian", "ncut"}))
      ->capture_default_str();
  cmd->add_option("--k", a.k, "number of clusters (profile default when omitted)");
  cmd->add_option("--lambda", a.lambdas, "ascending trade-off values, comma separated")->delimiter(',');
  cmd->add_option("--epsilon", a.epsilon, "fairness error tolerance for choosing lambda");
  cmd->add_option("--knn", a.knn, "neighbours in the Ncut affinity graph")->capture_default_str();
  cmd->add_option("--lipschitz", a.lipschitz, "L in the fairness bound")->capture_default_str();
  cmd->add_option("--seed", a.seed, "seed for data synthesis and K-means++")->capture_default_str();
  cmd->add_option("--data", a.data_dir, "directory holding dataset files")->capture_default_str();
  cmd->add_option("--max-rows", a.max_rows, "read only the first n rows of a dataset file");
  cmd->add_option("--target-proportions", a.targets, "target group proportions, comma separated")->delimiter(',');
  cmd->add_option("--reinit", a.reinit, "softmax(-a) re-initialisation: first pass, every pass, or every pass unless it raises the energy")
      ->check(CLI::IsMember({"first", "every", "guarded"}))
      ->capture_default_str();
  cmd->add_option("--max-outer", a.max_outer, "outer iteration cap")->capture_default_str();
  cmd->add_option("--max-inner", a.max_inner, "inner iteration cap")->capture_default_str();
  cmd->add_option("--threads", a.threads, "worker cap (overrides FAIRCLUST_THREADS)");
}

ExperimentOptions to_options(const CommonArgs& a) {
  ExperimentOptions o;
  o.profile = a.profile;
  o.objective = parse_objective(a.objective);
  if (a.k > 0) o.n_clusters = a.k;
  o.lambdas = a.lambdas;
  o.epsilon = a.epsilon;
  o.knn = a.knn;
  o.seed = a.seed;
  o.data_dir = a.data_dir;
  o.max_rows = a.max_rows;
  if (!a.targets.empty()) o.targets = a.targets;
  o.solver.lipschitz = a.lipschitz;
  o.solver.rng_seed = a.seed;
  o.solver.reinit = a.reinit == "every"   ? ReinitPolicy::kEveryOuter
                    : a.reinit == "first" ? ReinitPolicy::kFirstOuter
                                          : ReinitPolicy::kGuarded;
  o.solver.max_outer = a.max_outer;
  o.solver.max_inner = a.max_inner;
  return o;
}

int cmd_run(const CommonArgs& args, const std::string& out) {
  const auto start = std::chrono::steady_clock::now();
  const ExperimentReport report = run_experiment(to_options(args), out);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const SweepResult& sweep = report.sweep;
  std::printf("%-10s %-14s %-14s %-8s %-6s %s\n", "lambda", "objective", "fairness_err", "balance", "outer",
              "violations");
  for (std::size_t i = 0; i < sweep.table.size(); ++i) {
    const SweepRow& row = sweep.table[i];
    std::printf("%-10s %-14.6g %-14.6g %-8.4f %-6d %d%s\n", format_lambda(row.lambda).c_str(),
                row.clustering_objective, row.fairness_error, row.balance, sweep.runs[i].outer_iterations,
                sweep.runs[i].monotonicity_violations, i == sweep.chosen ? "  <- chosen" : "");
    for (const auto& w : sweep.runs[i].warnings) {
      std::fprintf(stderr, "warning: lambda %s, %s\n", format_lambda(row.lambda).c_str(), w.c_str());
    }
  }
  std::printf("%s, N=%lld, %.2f s%s\n", report.prepared.dataset.name.c_str(),
              static_cast<long long>(report.prepared.dataset.n_points()), seconds,
              out.empty() ? "" : (", report in " + out).c_str());
  if (!sweep.satisfied) {
    std::fprintf(stderr, "no lambda reached fairness error <= %g\n", args.epsilon);
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fair clustering with a KL fairness penalty (K-means, K-median, Ncut)"};
  app.require_subcommand(1);

  CommonArgs run_args;
  std::string run_out;
  CLI::App* run = app.add_subcommand("run", "solve for each lambda and write a report directory");
  add_common(run, run_args);
  run->add_option("--out", run_out, "report directory");

  std::string report_dir;
  std::string curves_out;
  CLI::App* curves = app.add_subcommand("curves", "turn a report's summary into a lambda curve CSV");
  curves->add_option("--report", report_dir, "report directory written by run")->required();
  curves->add_option("--out", curves_out, "output CSV (default <report>/curves.csv)");

  CommonArgs k_args;
  std::vector<Index> k_values;
  std::string k_out;
  CLI::App* kcurve = app.add_subcommand("kcurve", "fair vs vanilla objective for several K");
  add_common(kcurve, k_args);
  kcurve->add_option("--k-values", k_values, "cluster counts, comma separated")->delimiter(',')->required();
  kcurve->add_option("--out", k_out, "output CSV")->required();

  std::string export_profile = "synthetic";
  std::string export_data = default_data_dir().string();
  std::string export_out;
  Index export_rows = 0;
  std::uint64_t export_seed = 0;
  bool export_raw = false;
  CLI::App* exp = app.add_subcommand("export", "write a profile's (preprocessed) data to CSV");
  exp->add_option("--profile", export_profile, "builtin profile name or JSON profile path")->capture_default_str();
  exp->add_option("--data", export_data, "directory holding dataset files")->capture_default_str();
  exp->add_option("--max-rows", export_rows, "read only the first n rows");
  exp->add_option("--seed", export_seed, "seed for synthetic data")->capture_default_str();
  exp->add_flag("--raw", export_raw, "skip standardisation and row normalisation");
  exp->add_option("--out", export_out, "output CSV")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      if (run_args.threads > 0) set_worker_count(run_args.threads);
      return cmd_run(run_args, run_out);
    }
    if (*curves) {
      const std::filesystem::path out = curves_out.empty() ? std::filesystem::path(report_dir) / "curves.csv"
                                                           : std::filesystem::path(curves_out);
      sweep_curves(report_dir, out);
      std::printf("wrote %s\n", out.string().c_str());
      return 0;
    }
    if (*kcurve) {
      if (k_args.threads > 0) set_worker_count(k_args.threads);
      const auto rows = k_curves(to_options(k_args), k_values);
      write_k_curves(rows, k_out);
      for (const auto& row : rows) {
        std::printf("K=%-4lld fair %-14.6g vanilla %.6g\n", static_cast<long long>(row.n_clusters), row.fair_objective,
                    row.vanilla_objective);
      }
      return 0;
    }
    if (*exp) {
      const Profile profile = resolve_profile(export_profile);
      Dataset ds = load_profile_data(profile, export_data, export_seed, export_rows);
      if (!export_raw && profile.preprocess) ds = preprocess(std::move(ds));
      write_dataset_csv(ds, export_out);
      std::printf("wrote %lld rows to %s\n", static_cast<long long>(ds.n_points()), export_out.c_str());
      return 0;
    }
  } catch (const DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 3;
  } catch (const SolverError& e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}

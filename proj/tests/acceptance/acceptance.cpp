// Acceptance checks. One PASS/FAIL/SKIP line per criterion; tolerances are
// fixed here. Exit status is 0 once every criterion has been evaluated, or,
// with --strict, only when none failed.

#include "fairclust/data.hpp"
#include "fairclust/experiment.hpp"
#include "fairclust/metrics.hpp"
#include "fairclust/parallel.hpp"
#include "fairclust/rng.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <sys/resource.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace fairclust;
namespace fs = std::filesystem;

namespace {

constexpr double kSyntheticLambda = 10.0;
constexpr double kMonotoneSlack = 1e-9;
constexpr int kStandInGroups = 2;
constexpr Index kStandInDims = 25;
constexpr Index kStandInClusters = 20;
constexpr double kStandInLambdaPerRow = 0.1;
constexpr double kCensusRows = 2458285.0;
constexpr int kAdultNcutOuter = 3;

enum class Status { kPass, kFail, kSkip };

struct Verdict {
  Status status = Status::kPass;
  std::string detail;
};

struct Check {
  std::ostringstream text;
  bool ok = true;

  // Appends "name=value (rule)" and folds the outcome into ok.
  Check& expect(const std::string& name, double value, bool pass, const std::string& rule) {
    if (text.tellp() > 0) text << ", ";
    text << name << '=' << format_value(value) << " (" << rule << (pass ? "" : ", MISSED") << ')';
    ok = ok && pass;
    return *this;
  }
  Check& note(const std::string& s) {
    if (text.tellp() > 0) text << ", ";
    text << s;
    return *this;
  }
  Verdict verdict() const { return {ok ? Status::kPass : Status::kFail, text.str()}; }

  static std::string format_value(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct TimedReport {
  ExperimentReport report;
  double seconds = 0.0;
  const SweepRow& row(std::size_t i = 0) const { return report.sweep.table[i]; }
  const SolveResult& run(std::size_t i = 0) const { return report.sweep.runs[i]; }
};

TimedReport timed(const ExperimentOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  TimedReport r{run_experiment(options, {}), 0.0};
  r.seconds = seconds_since(t0);
  return r;
}

ExperimentOptions options_for(const std::string& profile, ObjectiveKind kind, std::vector<double> lambdas,
                              const fs::path& data_dir) {
  ExperimentOptions o;
  o.profile = profile;
  o.objective = kind;
  o.lambdas = std::move(lambdas);
  o.data_dir = data_dir;
  return o;
}

bool have_file(const Profile& p, const fs::path& data_dir) {
  if (p.synthetic) return true;
  return fs::exists(p.csv.path.is_absolute() ? p.csv.path : data_dir / p.csv.path);
}

// Stand-in for the census extract: 25 features drawn around 20 latent centres,
// with group membership skewed per centre so that vanilla clusters are unfair.
Dataset make_stand_in(Index n, std::uint64_t seed) {
  Rng rng(seed);
  Matrix centres(kStandInClusters, kStandInDims);
  std::vector<double> share(kStandInClusters);
  for (Index c = 0; c < kStandInClusters; ++c) {
    for (Index d = 0; d < kStandInDims; ++d) centres(c, d) = 6.0 * rng.uniform() - 3.0;
    share[c] = 0.2 + 0.6 * rng.uniform();
  }
  Dataset ds;
  ds.name = "census-stand-in";
  ds.features.resize(n, kStandInDims);
  ds.group_of.resize(n);
  for (Index p = 0; p < n; ++p) {
    const Index c = static_cast<Index>(rng.below(kStandInClusters));
    for (Index d = 0; d < kStandInDims; ++d) ds.features(p, d) = centres(c, d) + rng.normal();
    ds.group_of[p] = rng.uniform() < share[c] ? 0 : 1;
  }
  for (Index d = 0; d < kStandInDims; ++d) ds.feature_names.push_back("f" + std::to_string(d + 1));
  ds.group_names = {"female", "male"};
  ds.suggested_targets = {0.48, 0.52};
  return ds;
}

// Writes the stand-in as a CSV plus a JSON profile and returns the profile path.
fs::path write_stand_in_profile(Index n, const fs::path& dir) {
  fs::create_directories(dir);
  const Dataset ds = make_stand_in(n, 7);
  const fs::path csv = dir / ("stand_in_" + std::to_string(n) + ".csv");
  write_dataset_csv(ds, csv);
  const std::vector<double> u(kStandInGroups, 1.0 / kStandInGroups);
  nlohmann::json j;
  j["name"] = ds.name;
  j["file"] = csv.filename().string();
  j["features"] = ds.feature_names;
  j["sensitive"] = "group";
  j["groups"] = ds.group_names;
  j["k"] = kStandInClusters;
  j["targets"] = u;
  const double lambda = kStandInLambdaPerRow * static_cast<double>(n);
  j["lambda"] = {{"kmeans", lambda}, {"kmedian", lambda}, {"ncut", 10.0}};
  j["lambda_grid"] = {0.0, lambda};
  const fs::path json = dir / ("stand_in_" + std::to_string(n) + ".json");
  std::ofstream(json) << j.dump(2);
  return json;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string run_command(const std::string& cmd, int& status) {
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) {
    status = -1;
    return out;
  }
  char buf[4096];
  while (std::fgets(buf, sizeof buf, pipe)) out += buf;
  status = pclose(pipe);
  return out;
}

std::string quoted(const std::string& s) { return "'" + s + "'"; }

long peak_rss_kb() {
  rusage usage{};
  getrusage(RUSAGE_SELF, &usage);
  return usage.ru_maxrss;
}

// Child-process mode for criterion 6: one fair K-means run, peak RSS measured
// in a fresh process.
int memory_probe(Index rows, const std::string& source, const fs::path& data_dir) {
  const auto t0 = std::chrono::steady_clock::now();
  Dataset raw;
  double lambda = kStandInLambdaPerRow * static_cast<double>(rows);
  if (source == "census") {
    const Profile p = *builtin_profile("census");
    raw = load_profile_data(p, data_dir, 0, rows);
    // The bound scales with 1/cluster mass, so lambda follows the row count.
    lambda = p.lambda_for(ObjectiveKind::kKMeans) * static_cast<double>(raw.n_points()) / kCensusRows;
  } else {
    raw = make_stand_in(rows, 7);
  }
  const Dataset ds = preprocess(std::move(raw));
  ClusteringProblem problem;
  problem.kind = ObjectiveKind::kKMeans;
  problem.n_clusters = kStandInClusters;
  problem.features = ds.features;
  SolverConfig config;
  config.lambda = lambda;
  const SolveResult r = solve(problem, ds.demographics(), kmeanspp_seed(ds.features, kStandInClusters, 0), config);
  std::cout << "rows " << ds.n_points() << " rss_kb " << peak_rss_kb() << " violations " << r.monotonicity_violations
            << " outer " << r.outer_iterations << " seconds " << seconds_since(t0) << " fairness_error "
            << r.metrics.fairness_error << " balance " << r.metrics.min_balance << '\n';
  return 0;
}

struct ProbeResult {
  bool ok = false;
  double rows = 0, rss_kb = 0, violations = 0, outer = 0, seconds = 0, fairness_error = 0, balance = 0;
};

ProbeResult probe(Index rows, const std::string& source, const fs::path& data_dir) {
  const std::string self = fs::canonical("/proc/self/exe").string();
  int status = 0;
  const std::string out = run_command(quoted(self) + " --probe-rows " + std::to_string(rows) + " --probe-source " +
                                          source + " --data-dir " + quoted(data_dir.string()),
                                      status);
  ProbeResult r;
  std::istringstream in(out);
  std::string key;
  std::map<std::string, double> values;
  double v = 0.0;
  while (in >> key >> v) values[key] = v;
  if (status != 0 || values.size() < 7) return r;
  r.ok = true;
  r.rows = values["rows"];
  r.rss_kb = values["rss_kb"];
  r.violations = values["violations"];
  r.outer = values["outer"];
  r.seconds = values["seconds"];
  r.fairness_error = values["fairness_error"];
  r.balance = values["balance"];
  return r;
}

// Runs one doctest case through its test binary; true when at least one case
// ran and none failed.
bool run_property(const std::string& binary, const std::string& pattern, std::string& summary) {
  int status = 0;
  const std::string out = run_command(quoted(binary) + " -tc=" + quoted(pattern) + " 2>&1", status);
  const auto pos = out.find("test cases:");
  summary = pos == std::string::npos ? "no summary" : out.substr(pos, out.find('\n', pos) - pos);
  const bool ran = summary.find("| 0 passed") == std::string::npos && pos != std::string::npos;
  return status == 0 && ran;
}

class Acceptance {
 public:
  Acceptance(fs::path data_dir, fs::path work_dir) : data_dir_(std::move(data_dir)), work_dir_(std::move(work_dir)) {}

  Verdict c1() {
    const TimedReport r = timed(options_for("synthetic", ObjectiveKind::kKMeans, {kSyntheticLambda}, data_dir_));
    Check c;
    c.expect("fairness_error", r.row().fairness_error, r.row().fairness_error <= 0.01, "<= 0.01");
    c.expect("min_balance", r.row().balance, std::abs(r.row().balance - 1.0) <= 0.005, "1.00 +/- 0.005");
    c.expect("seconds", r.seconds, r.seconds < 5.0, "< 5");
    return c.verdict();
  }

  Verdict c2() {
    const TimedReport km =
        timed(options_for("synthetic-unequal", ObjectiveKind::kKMeans, {kSyntheticLambda}, data_dir_));
    const TimedReport kmed =
        timed(options_for("synthetic-unequal", ObjectiveKind::kKMedian, {kSyntheticLambda}, data_dir_));
    Check c;
    c.expect("kmeans fairness_error", km.row().fairness_error, km.row().fairness_error <= 0.01, "<= 0.01");
    c.expect("kmeans min_balance", km.row().balance, std::abs(km.row().balance - 0.33) <= 0.01, "0.33 +/- 0.01");
    c.expect("kmedian min_balance", kmed.row().balance, std::abs(kmed.row().balance - 0.33) <= 0.01,
             "0.33 +/- 0.01");
    return c.verdict();
  }

  Verdict c3() {
    const TimedReport r = timed(options_for("synthetic", ObjectiveKind::kNcut, {kSyntheticLambda}, data_dir_));
    Check c;
    c.expect("ncut", r.row().clustering_objective, r.row().clustering_objective <= 0.05, "<= 0.05");
    c.expect("fairness_error", r.row().fairness_error, r.row().fairness_error <= 0.01, "<= 0.01");
    c.expect("seconds", r.seconds, r.seconds < 30.0, "< 30");
    return c.verdict();
  }

  Verdict c4() {
    const Profile p = *builtin_profile("adult");
    if (!have_file(p, data_dir_)) return {Status::kSkip, "adult.data not found in " + data_dir_.string()};
    const TimedReport& r = adult_kmeans();
    const double rel = std::abs(r.row().clustering_objective - 9984.01) / 9984.01;
    Check c;
    c.expect("fairness_error", r.row().fairness_error, std::abs(r.row().fairness_error - 0.018) <= 0.01,
             "0.018 +/- 0.01");
    c.expect("min_balance", r.row().balance, std::abs(r.row().balance - 0.41) <= 0.05, "0.41 +/- 0.05");
    c.expect("kmeans", r.row().clustering_objective, rel <= 0.05, "within 5% of 9984.01");
    c.expect("seconds", r.seconds, r.seconds < 600.0, "< 600");
    return c.verdict();
  }

  Verdict c5() {
    const Profile p = *builtin_profile("bank");
    if (!have_file(p, data_dir_)) {
      return {Status::kSkip, "bank-additional-full.csv not found in " + data_dir_.string()};
    }
    const TimedReport r = timed(options_for("bank", ObjectiveKind::kKMedian, {9000.0}, data_dir_));
    Check c;
    c.expect("groups", r.report.prepared.dataset.n_groups(), r.report.prepared.dataset.n_groups() == 3, "== 3");
    c.expect("fairness_error", r.row().fairness_error, r.row().fairness_error <= 0.05, "<= 0.05");
    c.expect("min_balance", r.row().balance, r.row().balance >= 0.15, ">= 0.15");
    return c.verdict();
  }

  Verdict c6() {
    const bool census = have_file(*builtin_profile("census"), data_dir_);
    const std::string source = census ? "census" : "stand-in";
    const ProbeResult small = probe(2000, source, data_dir_);
    const ProbeResult mid = probe(25000, source, data_dir_);
    const ProbeResult big = probe(100000, source, data_dir_);
    if (!small.ok || !mid.ok || !big.ok) return {Status::kFail, "probe process failed (" + source + ")"};
    Check c;
    c.note(census ? "source=USCensus1990 first 100000 rows"
                  : "source=synthetic 25-feature, 2-group stand-in (census file not found)");
    c.expect("rows", big.rows, big.rows == 100000, "== 100000");
    c.expect("violations", big.violations, big.violations == 0, "== 0");
    c.expect("violations@25k", mid.violations, mid.violations == 0, "== 0");
    // Peak RSS above a 2000-row baseline should scale with rows; quadratic
    // growth would give ~18x from 25k to 100k.
    const double growth = (big.rss_kb - small.rss_kb) / std::max(1.0, mid.rss_kb - small.rss_kb);
    const double linear = (100000.0 - 2000.0) / (25000.0 - 2000.0);
    c.expect("rss_growth_25k_to_100k", growth, growth <= 2.0 * linear, "<= 2 x " + Check::format_value(linear));
    c.expect("peak_rss_MB", big.rss_kb / 1024.0, true, "informational");
    c.expect("seconds", big.seconds, true, "informational");
    return c.verdict();
  }

  Verdict c7() {
    const std::vector<double> lambdas{0.0, 1.0, 10.0, 50.0, 100.0};
    int runs = 0;
    int violations = 0;
    std::string worst;
    const auto tally = [&](const std::string& tag, const SweepResult& sweep) {
      for (std::size_t i = 0; i < sweep.runs.size(); ++i) {
        ++runs;
        const int v = trace_violations(sweep.runs[i]);
        if (v > 0) worst += " " + tag + "@" + format_lambda(sweep.table[i].lambda) + ":" + std::to_string(v);
        violations += v;
      }
    };
    for (const char* set : {"synthetic", "synthetic-unequal"}) {
      for (auto kind : {ObjectiveKind::kKMeans, ObjectiveKind::kKMedian, ObjectiveKind::kNcut}) {
        const auto r = run_experiment(options_for(set, kind, lambdas, data_dir_), {});
        tally(std::string(set) + "/" + std::string(to_string(kind)), r.sweep);
      }
    }
    bool adult = false;
    if (have_file(*builtin_profile("adult"), data_dir_)) {
      adult = true;
      tally("adult/kmeans", adult_kmeans().report.sweep);
      tally("adult/kmedian", run_experiment(options_for("adult", ObjectiveKind::kKMedian, {}, data_dir_), {}).sweep);
      // Ncut potentials on Adult are tiny, so every inner loop runs to its cap.
      ExperimentOptions ncut = options_for("adult", ObjectiveKind::kNcut, {}, data_dir_);
      ncut.solver.max_outer = kAdultNcutOuter;
      tally("adult/ncut(outer<=" + std::to_string(kAdultNcutOuter) + ")", run_experiment(ncut, {}).sweep);
    }
    Check c;
    c.note(std::to_string(runs) + " runs" + (adult ? " incl. adult" : " (adult.data absent)"));
    c.expect("violations", violations, violations == 0, "== 0 at L=2, slack 1e-9 relative");
    if (!worst.empty()) c.note("where:" + worst);
    return c.verdict();
  }

  Verdict c8(const std::map<std::string, std::string>& binaries) {
    const std::vector<std::pair<std::string, std::string>> cases{
        {"fairness", "Pinsker*"},
        {"fairness", "quadratic upper bound*"},
        {"solver", "the closed-form update minimises*"},
        {"fairness", "L times b is the penalty gradient*"},
        {"solver", "softmax update keeps rows on the simplex*"},
        {"solver", "each inner update does not increase*"},
        {"objectives", "k-means discrete objective agrees with exhaustive*"},
        {"solver", "lambda = 0 reproduces plain alternating k-means"},
    };
    Check c;
    int passed = 0;
    for (const auto& [bin, pattern] : cases) {
      std::string summary;
      const auto it = binaries.find(bin);
      const bool ok = it != binaries.end() && run_property(it->second, pattern, summary);
      if (ok) {
        ++passed;
      } else {
        c.ok = false;
        c.note("failed: " + pattern + " [" + summary + "]");
      }
    }
    c.expect("properties_passed", passed, passed == static_cast<int>(cases.size()),
             "== " + std::to_string(cases.size()));
    return c.verdict();
  }

  Verdict c9() {
    const auto r = run_experiment(
        options_for("synthetic", ObjectiveKind::kKMeans, {0.0, 1.0, 5.0, 10.0, 50.0, 100.0}, data_dir_), {});
    const auto& t = r.sweep.table;
    const double first = t[1].fairness_error;
    const double last = t.back().fairness_error;
    Check c;
    c.expect("error@100/error@1", last / first, last <= 0.1 * first, "<= 0.1");
    c.expect("objective@100-objective@0", t.back().clustering_objective - t[0].clustering_objective,
             t.back().clustering_objective >= t[0].clustering_objective, ">= 0");
    return c.verdict();
  }

  Verdict c10() {
    const fs::path profile = write_stand_in_profile(6000, work_dir_ / "determinism");
    Check c;
    int identical = 0;
    int compared = 0;
    for (auto kind : {ObjectiveKind::kKMeans, ObjectiveKind::kNcut}) {
      std::vector<fs::path> dirs;
      for (int workers : {1, 4}) {
        set_worker_count(workers);
        ExperimentOptions o = options_for(profile.string(), kind, {0.0, 600.0}, data_dir_);
        o.solver.max_outer = 4;
        o.solver.max_inner = 200;
        const fs::path out = work_dir_ / "determinism" / (std::string(to_string(kind)) + "_w" + std::to_string(workers));
        fs::remove_all(out);
        run_experiment(o, out);
        dirs.push_back(out);
      }
      set_worker_count(0);
      for (const auto& entry : fs::directory_iterator(dirs[0])) {
        ++compared;
        const fs::path other = dirs[1] / entry.path().filename();
        if (fs::exists(other) && read_file(entry.path()) == read_file(other)) {
          ++identical;
        } else {
          c.note("differs: " + std::string(to_string(kind)) + "/" + entry.path().filename().string());
        }
      }
    }
    c.expect("identical_files", identical, identical == compared && compared > 0,
             "== " + std::to_string(compared) + ", 1 vs 4 workers, N=6000");
    return c.verdict();
  }

 private:
  // Shared by criteria 4 and 7.
  const TimedReport& adult_kmeans() {
    if (!adult_kmeans_) adult_kmeans_ = timed(options_for("adult", ObjectiveKind::kKMeans, {9000.0}, data_dir_));
    return *adult_kmeans_;
  }

  // Counts increases in the recorded trace with the pinned slack rather than
  // trusting the solver's own counter.
  static int trace_violations(const SolveResult& run) {
    int counted = 0;
    for (std::size_t i = 1; i < run.energy_trace.size(); ++i) {
      const double prev = run.energy_trace[i - 1].energy.total;
      if (run.energy_trace[i].energy.total > prev + kMonotoneSlack * std::abs(prev)) ++counted;
    }
    return counted;
  }

  fs::path data_dir_;
  fs::path work_dir_;
  std::optional<TimedReport> adult_kmeans_;
};

const char* label(Status s) {
  switch (s) {
    case Status::kPass:
      return "PASS";
    case Status::kFail:
      return "FAIL";
    case Status::kSkip:
      return "SKIP";
  }
  return "?";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fairclust acceptance checks"};
  fs::path data_dir = default_data_dir();
  fs::path work_dir = fs::temp_directory_path() / "fairclust_acceptance";
  fs::path report;
  std::vector<int> only;
  bool strict = false;
  Index probe_rows = 0;
  std::string probe_source = "stand-in";
  std::map<std::string, std::string> binaries;
  std::string fairness_bin;
  std::string solver_bin;
  std::string objectives_bin;
  app.add_option("--data-dir", data_dir, "directory holding dataset files");
  app.add_option("--work-dir", work_dir, "scratch directory");
  app.add_option("--report", report, "also write the result lines here");
  app.add_option("--only", only, "criteria to run (default: all)")->delimiter(',');
  app.add_flag("--strict", strict, "exit 1 when any criterion fails");
  app.add_option("--fairness-tests", fairness_bin, "unit test binary for fairness properties");
  app.add_option("--solver-tests", solver_bin, "unit test binary for solver properties");
  app.add_option("--objectives-tests", objectives_bin, "unit test binary for objective properties");
  app.add_option("--probe-rows", probe_rows)->group("");
  app.add_option("--probe-source", probe_source)->group("");
  CLI11_PARSE(app, argc, argv);

  if (probe_rows > 0) return memory_probe(probe_rows, probe_source, data_dir);

  binaries = {{"fairness", fairness_bin}, {"solver", solver_bin}, {"objectives", objectives_bin}};
  Acceptance acc(data_dir, work_dir);
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"synthetic fair k-means, lambda=10", [&] { return acc.c1(); }},
      {"synthetic-unequal fair k-means and k-median, lambda=10", [&] { return acc.c2(); }},
      {"synthetic fair ncut, lambda=10, 20-NN", [&] { return acc.c3(); }},
      {"adult fair k-means, lambda=9000, K=10", [&] { return acc.c4(); }},
      {"bank fair k-median, lambda=9000, J=3", [&] { return acc.c5(); }},
      {"100k-row census-scale run, monotone energy, linear memory", [&] { return acc.c6(); }},
      {"monotone energy over the dataset/objective/lambda matrix", [&] { return acc.c7(); }},
      {"property suite", [&] { return acc.c8(binaries); }},
      {"synthetic trade-off curve, lambda in {1,5,10,50,100}", [&] { return acc.c9(); }},
      {"byte-identical reports across worker counts", [&] { return acc.c10(); }},
  };

  std::ofstream report_out;
  if (!report.empty()) report_out.open(report);
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {Status::kFail, std::string("error: ") + e.what()};
    }
    if (v.status == Status::kFail) ++failed;
    char head[64];
    std::snprintf(head, sizeof head, "%s %2d ", label(v.status), id);
    char tail[32];
    std::snprintf(tail, sizeof tail, " [%.1fs]", seconds_since(t0));
    const std::string line = head + criteria[i].first + ": " + v.detail + tail;
    std::cout << line << std::endl;
    if (report_out) report_out << line << '\n';
  }
  std::cout << failed << " failed" << std::endl;
  if (report_out) report_out << failed << " failed\n";
  return strict && failed > 0 ? 1 : 0;
}

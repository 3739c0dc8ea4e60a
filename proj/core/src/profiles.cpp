#include "fairclust/profiles.hpp"

#include "json.hpp"

#include <cstdlib>
#include <fstream>

namespace fairclust {

double Profile::lambda_for(ObjectiveKind kind) const {
  const auto it = default_lambda.find(kind);
  if (it != default_lambda.end()) return it->second;
  return lambda_grid.empty() ? 0.0 : lambda_grid.back();
}

namespace {

using K = ObjectiveKind;

Profile synthetic_profile(SyntheticKind kind) {
  Profile p;
  p.synthetic = kind;
  p.name = kind == SyntheticKind::kEqual ? "synthetic" : "synthetic-unequal";
  p.n_clusters = 2;
  p.targets = kind == SyntheticKind::kEqual ? std::vector<double>{0.5, 0.5} : std::vector<double>{0.75, 0.25};
  p.default_lambda = {{K::kKMeans, 10.0}, {K::kKMedian, 10.0}, {K::kNcut, 10.0}};
  p.lambda_grid = {0.0, 1.0, 5.0, 10.0, 50.0, 100.0};
  return p;
}

Profile adult_profile() {
  Profile p;
  p.name = "adult";
  p.csv.path = "adult.data";
  p.csv.header = false;
  p.csv.column_names = {"age",           "workclass",    "fnlwgt",         "education",      "education-num",
                        "marital-status", "occupation",  "relationship",   "race",           "sex",
                        "capital-gain",  "capital-loss", "hours-per-week", "native-country", "income"};
  p.csv.feature_columns = {"age", "fnlwgt", "education-num", "capital-gain", "hours-per-week"};
  p.csv.sensitive_column = "sex";
  p.csv.groups = {"Female", "Male"};
  p.n_clusters = 10;
  p.targets = {0.33, 0.67};
  p.default_lambda = {{K::kKMeans, 9000.0}, {K::kKMedian, 9000.0}, {K::kNcut, 10.0}};
  p.lambda_grid = {0.0, 1000.0, 2000.0, 4000.0, 6000.0, 9000.0, 12000.0};
  return p;
}

Profile bank_profile() {
  Profile p;
  p.name = "bank";
  p.csv.path = "bank-additional-full.csv";
  p.csv.delimiter = ';';
  p.csv.feature_columns = {"age", "duration", "euribor3m", "nr.employed", "cons.price.idx", "campaign"};
  p.csv.sensitive_column = "marital";
  p.csv.groups = {"single", "married", "divorced"};
  p.csv.drop_values = {"unknown"};
  p.n_clusters = 10;
  p.targets = {0.28, 0.61, 0.11};
  p.default_lambda = {{K::kKMeans, 6000.0}, {K::kKMedian, 9000.0}, {K::kNcut, 40.0}};
  p.lambda_grid = {0.0, 1000.0, 3000.0, 6000.0, 9000.0, 12000.0};
  return p;
}

Profile census_profile() {
  Profile p;
  p.name = "census";
  p.csv.path = "USCensus1990.data.txt";
  p.csv.feature_columns = {"dAge",     "dAncstry1", "dAncstry2", "iAvail",   "iCitizen", "iClass",   "dDepart",
                           "iDisabl1", "iDisabl2",  "iEnglish",  "iFeb55",   "iFertil",  "dHispanic", "dHour89",
                           "dHours",   "iImmigr",   "dIncome1",  "dIncome2", "dIncome3", "dIncome4", "dIncome5",
                           "dIncome6", "dIncome7",  "dIncome8",  "dIndustry"};
  p.csv.sensitive_column = "iSex";
  p.csv.groups = {"1", "0"};
  p.csv.group_names = {"female", "male"};
  p.n_clusters = 20;
  p.targets = {0.48, 0.52};
  p.default_lambda = {{K::kKMeans, 500000.0}, {K::kKMedian, 500000.0}, {K::kNcut, 100.0}};
  p.lambda_grid = {0.0, 100000.0, 250000.0, 500000.0};
  return p;
}

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

}  // namespace

std::vector<std::string> builtin_profile_names() {
  return {"synthetic", "synthetic-unequal", "adult", "bank", "census"};
}

std::optional<Profile> builtin_profile(std::string_view name) {
  if (name == "synthetic") return synthetic_profile(SyntheticKind::kEqual);
  if (name == "synthetic-unequal") return synthetic_profile(SyntheticKind::kUnequal);
  if (name == "adult") return adult_profile();
  if (name == "bank") return bank_profile();
  if (name == "census") return census_profile();
  return std::nullopt;
}

Profile load_profile_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path.string() + ": cannot open profile");
  try {
    const nlohmann::json j = nlohmann::json::parse(in);
    Profile p;
    p.name = get_or<std::string>(j, "name", path.stem().string());
    if (j.contains("synthetic")) {
      const auto kind = j.at("synthetic").get<std::string>();
      if (kind != "equal" && kind != "unequal") throw DataError(path.string() + ": synthetic must be equal or unequal");
      p.synthetic = kind == "equal" ? SyntheticKind::kEqual : SyntheticKind::kUnequal;
    } else {
      std::filesystem::path file = j.at("file").get<std::string>();
      p.csv.path = file.is_absolute() ? file : path.parent_path() / file;
      const auto delim = get_or<std::string>(j, "delimiter", ",");
      if (delim.size() != 1) throw DataError(path.string() + ": delimiter must be one character");
      p.csv.delimiter = delim[0];
      p.csv.header = get_or<bool>(j, "header", true);
      p.csv.column_names = get_or<std::vector<std::string>>(j, "columns", {});
      p.csv.feature_columns = j.at("features").get<std::vector<std::string>>();
      p.csv.sensitive_column = j.at("sensitive").get<std::string>();
      p.csv.groups = j.at("groups").get<std::vector<std::string>>();
      p.csv.group_names = get_or<std::vector<std::string>>(j, "group_names", {});
      p.csv.drop_values = get_or<std::vector<std::string>>(j, "drop", {});
    }
    p.n_clusters = j.at("k").get<Index>();
    p.targets = j.at("targets").get<std::vector<double>>();
    if (j.contains("lambda")) {
      for (const auto& [key, value] : j.at("lambda").items()) p.default_lambda[parse_objective(key)] = value.get<double>();
    }
    p.lambda_grid = get_or<std::vector<double>>(j, "lambda_grid", {});
    p.preprocess = get_or<bool>(j, "preprocess", true);
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

Profile resolve_profile(const std::string& name_or_path) {
  if (auto p = builtin_profile(name_or_path)) return *p;
  if (!std::filesystem::exists(name_or_path)) {
    throw DataError("unknown profile '" + name_or_path +
                    "' (builtin: synthetic, synthetic-unequal, adult, bank, census; or a JSON file)");
  }
  return load_profile_file(name_or_path);
}

std::filesystem::path default_data_dir() {
  if (const char* env = std::getenv("FAIRCLUST_DATA_DIR"); env && *env) return env;
  return "data";
}

Dataset load_profile_data(const Profile& profile, const std::filesystem::path& data_dir, std::uint64_t seed,
                          Index max_rows) {
  Dataset ds;
  if (profile.synthetic) {
    ds = make_synthetic(*profile.synthetic, seed);
  } else {
    CsvSpec spec = profile.csv;
    if (spec.path.is_relative()) spec.path = data_dir / spec.path;
    spec.targets = profile.targets;
    spec.max_rows = max_rows;
    spec.name = profile.name;
    ds = load_csv(spec);
  }
  ds.name = profile.name;
  ds.suggested_targets = profile.targets;
  return ds;
}

}  // namespace fairclust

#pragma once

// Named dataset presets and JSON profile files.

#include "fairclust/data.hpp"
#include "fairclust/objectives.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fairclust {

struct Profile {
  std::string name;
  /// Set for generated data; otherwise `csv` describes the file.
  std::optional<SyntheticKind> synthetic;
  /// csv.path is resolved against the data directory when relative.
  CsvSpec csv;
  Index n_clusters = 2;
  std::vector<double> targets;
  /// Lambda reported for each objective; used when none is given.
  std::map<ObjectiveKind, double> default_lambda;
  /// Ascending grid for trade-off curves.
  std::vector<double> lambda_grid;
  bool preprocess = true;

  double lambda_for(ObjectiveKind kind) const;
};

/// synthetic, synthetic-unequal, adult, bank, census.
std::vector<std::string> builtin_profile_names();
std::optional<Profile> builtin_profile(std::string_view name);

/// Reads a JSON profile. Relative data paths are taken relative to the JSON
/// file. Throws DataError on malformed content.
Profile load_profile_file(const std::filesystem::path& path);

/// A builtin name, or else a path to a JSON profile.
Profile resolve_profile(const std::string& name_or_path);

/// FAIRCLUST_DATA_DIR when set, otherwise ./data.
std::filesystem::path default_data_dir();

/// Generates or loads the raw (not preprocessed) dataset. `max_rows` > 0
/// keeps the first rows of a file.
Dataset load_profile_data(const Profile& profile, const std::filesystem::path& data_dir, std::uint64_t seed,
                          Index max_rows = 0);

}  // namespace fairclust

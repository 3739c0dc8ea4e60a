#pragma once

// Datasets: synthesis, CSV ingestion, preprocessing, kNN affinity and
// K-means++ seeding.

#include "fairclust/core_model.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fairclust {

/// Malformed or missing input data. Messages name the file, column and row.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Dataset {
  std::string name;
  Matrix features;
  std::vector<std::string> feature_names;
  std::vector<int> group_of;
  std::vector<std::string> group_names;
  std::vector<double> suggested_targets;

  Index n_points() const { return features.rows(); }
  int n_groups() const { return static_cast<int>(group_names.size()); }
  std::vector<Index> group_sizes() const;

  /// Partition with the suggested targets, or with `targets` if given.
  DemographicPartition demographics(const std::optional<std::vector<double>>& targets = std::nullopt) const;
};

enum class SyntheticKind { kEqual, kUnequal };

/// 400 2-D points. Each demographic group is its own isotropic Gaussian blob
/// (sigma 0.5): group 1 centred at (-2, 0), group 2 at (2, 0). Equal: 200/200,
/// U = [0.5, 0.5]. Unequal: 300/100, U = [0.75, 0.25].
Dataset make_synthetic(SyntheticKind kind, std::uint64_t seed);

struct CsvSpec {
  std::filesystem::path path;
  char delimiter = ',';
  /// First line holds column names. Otherwise `column_names` must be set.
  bool header = true;
  std::vector<std::string> column_names;
  std::vector<std::string> feature_columns;
  std::string sensitive_column;
  /// Sensitive values, in group order.
  std::vector<std::string> groups;
  /// Display names for the groups; the raw values when empty.
  std::vector<std::string> group_names;
  /// Rows whose sensitive value is listed here are skipped.
  std::vector<std::string> drop_values;
  std::vector<double> targets;
  /// Keep at most this many rows (after drops); 0 keeps all.
  Index max_rows = 0;
  std::string name;
};

/// Reads the file described by `spec`. Cells are trimmed and may be quoted.
/// Throws DataError for a missing file or column, a non-numeric feature
/// cell (with its 1-based line number) or an unknown sensitive value.
Dataset load_csv(const CsvSpec& spec);

/// Per-feature standardisation (population variance; constant features become
/// zeros) followed by row L2 normalisation (zero rows stay zero).
Dataset preprocess(Dataset dataset);
Matrix preprocess_features(const Matrix& features);

/// Binary k-nearest-neighbour graph on Euclidean distance, self excluded, ties
/// broken by index, symmetrised by logical OR.
AffinityGraph knn_affinity(const Matrix& features, int k = 20);

/// K-means++ D² seeding followed by nearest-centre labels (ties to the lowest
/// centre).
Labels kmeanspp_seed(const Matrix& features, Index n_clusters, std::uint64_t seed);

/// Writes group, then features, with a header row.
void write_dataset_csv(const Dataset& dataset, const std::filesystem::path& path);

}  // namespace fairclust

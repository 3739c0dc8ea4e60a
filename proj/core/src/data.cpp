#include "fairclust/data.hpp"

#include "fairclust/objectives.hpp"
#include "fairclust/parallel.hpp"
#include "fairclust/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace fairclust {

std::vector<Index> Dataset::group_sizes() const {
  std::vector<Index> sizes(group_names.size(), 0);
  for (int g : group_of) ++sizes[static_cast<std::size_t>(g)];
  return sizes;
}

DemographicPartition Dataset::demographics(const std::optional<std::vector<double>>& targets) const {
  return DemographicPartition(group_of, n_groups(), targets ? *targets : suggested_targets);
}

Dataset make_synthetic(SyntheticKind kind, std::uint64_t seed) {
  const bool equal = kind == SyntheticKind::kEqual;
  const Index sizes[2] = {equal ? 200 : 300, equal ? 200 : 100};
  const double centre_x[2] = {-2.0, 2.0};
  constexpr double kSigma = 0.5;

  Dataset ds;
  ds.name = equal ? "synthetic" : "synthetic-unequal";
  ds.feature_names = {"x", "y"};
  ds.group_names = {"group1", "group2"};
  ds.suggested_targets = equal ? std::vector<double>{0.5, 0.5} : std::vector<double>{0.75, 0.25};
  ds.features.resize(sizes[0] + sizes[1], 2);
  Rng rng(seed);
  Index row = 0;
  for (int g = 0; g < 2; ++g) {
    for (Index i = 0; i < sizes[g]; ++i, ++row) {
      ds.features(row, 0) = centre_x[g] + kSigma * rng.normal();
      ds.features(row, 1) = kSigma * rng.normal();
      ds.group_of.push_back(g);
    }
  }
  return ds;
}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

// Splits one line; double quotes group a field and "" is a literal quote.
std::vector<std::string> split_line(const std::string& line, char delimiter) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == delimiter) {
      cells.push_back(trim(cell));
      cell.clear();
    } else {
      cell += c;
    }
  }
  cells.push_back(trim(cell));
  return cells;
}

std::size_t column_index(const std::vector<std::string>& names, const std::string& column, const CsvSpec& spec) {
  const auto it = std::find(names.begin(), names.end(), column);
  if (it == names.end()) {
    throw DataError(spec.path.string() + ": column '" + column + "' not found");
  }
  return static_cast<std::size_t>(it - names.begin());
}

}  // namespace

Dataset load_csv(const CsvSpec& spec) {
  std::ifstream in(spec.path);
  if (!in) throw DataError(spec.path.string() + ": cannot open file");
  if (spec.groups.empty()) throw DataError(spec.path.string() + ": no sensitive values listed for the groups");
  if (spec.feature_columns.empty()) throw DataError(spec.path.string() + ": no feature columns listed");

  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> names = spec.column_names;
  if (spec.header) {
    if (!std::getline(in, line)) throw DataError(spec.path.string() + ": file is empty");
    ++line_no;
    names = split_line(line, spec.delimiter);
  }
  std::vector<std::size_t> feature_idx;
  for (const auto& col : spec.feature_columns) feature_idx.push_back(column_index(names, col, spec));
  const std::size_t sensitive_idx = column_index(names, spec.sensitive_column, spec);

  Dataset ds;
  ds.name = spec.name.empty() ? spec.path.stem().string() : spec.name;
  ds.feature_names = spec.feature_columns;
  ds.group_names = spec.group_names.empty() ? spec.groups : spec.group_names;
  if (ds.group_names.size() != spec.groups.size()) {
    throw DataError(spec.path.string() + ": group names and sensitive values differ in length");
  }
  ds.suggested_targets = spec.targets;

  std::vector<double> values;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_line(line, spec.delimiter);
    if (cells.size() != names.size()) {
      std::ostringstream msg;
      msg << spec.path.string() << ": line " << line_no << " has " << cells.size() << " fields, expected "
          << names.size();
      throw DataError(msg.str());
    }
    const std::string& sensitive = cells[sensitive_idx];
    if (std::find(spec.drop_values.begin(), spec.drop_values.end(), sensitive) != spec.drop_values.end()) continue;
    const auto group = std::find(spec.groups.begin(), spec.groups.end(), sensitive);
    if (group == spec.groups.end()) {
      std::ostringstream msg;
      msg << spec.path.string() << ": line " << line_no << ": unknown value '" << sensitive << "' in column '"
          << spec.sensitive_column << "'";
      throw DataError(msg.str());
    }
    for (std::size_t f = 0; f < feature_idx.size(); ++f) {
      const std::string& cell = cells[feature_idx[f]];
      double v = 0.0;
      const auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || end != cell.data() + cell.size() || !std::isfinite(v)) {
        std::ostringstream msg;
        msg << spec.path.string() << ": line " << line_no << ": column '" << spec.feature_columns[f] << "' value '"
            << cell << "' is not numeric";
        throw DataError(msg.str());
      }
      values.push_back(v);
    }
    ds.group_of.push_back(static_cast<int>(group - spec.groups.begin()));
    if (spec.max_rows > 0 && static_cast<Index>(ds.group_of.size()) >= spec.max_rows) break;
  }
  if (ds.group_of.empty()) throw DataError(spec.path.string() + ": no data rows");
  const auto n = static_cast<Index>(ds.group_of.size());
  const auto m = static_cast<Index>(feature_idx.size());
  ds.features = Eigen::Map<const Matrix>(values.data(), n, m);
  return ds;
}

Matrix preprocess_features(const Matrix& features) {
  const Index n = features.rows();
  if (n < 2) throw std::invalid_argument("preprocess needs at least two points");
  Matrix out = features;
  for (Index j = 0; j < out.cols(); ++j) {
    double mean = 0.0;
    for (Index p = 0; p < n; ++p) mean += out(p, j);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (Index p = 0; p < n; ++p) var += (out(p, j) - mean) * (out(p, j) - mean);
    var /= static_cast<double>(n);
    const double sd = std::sqrt(var);
    for (Index p = 0; p < n; ++p) out(p, j) = sd > 0.0 ? (out(p, j) - mean) / sd : 0.0;
  }
  for (Index p = 0; p < n; ++p) {
    const double norm = out.row(p).norm();
    if (norm > 0.0) out.row(p) /= norm;
  }
  return out;
}

Dataset preprocess(Dataset dataset) {
  dataset.features = preprocess_features(dataset.features);
  return dataset;
}

AffinityGraph knn_affinity(const Matrix& features, int k) {
  const Index n = features.rows();
  if (k < 1) throw std::invalid_argument("knn_affinity: k must be >= 1");
  if (k >= n) throw std::invalid_argument("knn_affinity: k must be smaller than the number of points");
  const auto kk = static_cast<std::size_t>(k);
  std::vector<Index> neighbours(static_cast<std::size_t>(n) * kk);
  parallel_for(n, [&](std::ptrdiff_t p) {
    std::vector<std::pair<double, Index>> cand;
    cand.reserve(static_cast<std::size_t>(n - 1));
    for (Index q = 0; q < n; ++q) {
      if (q != p) cand.emplace_back(squared_euclidean_distance(row_span(features, p), row_span(features, q)), q);
    }
    std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(kk), cand.end());
    for (std::size_t i = 0; i < kk; ++i) neighbours[static_cast<std::size_t>(p) * kk + i] = cand[i].second;
  });
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(neighbours.size() * 2);
  for (Index p = 0; p < n; ++p) {
    for (std::size_t i = 0; i < kk; ++i) {
      const Index q = neighbours[static_cast<std::size_t>(p) * kk + i];
      triplets.emplace_back(p, q, 1.0);
      triplets.emplace_back(q, p, 1.0);
    }
  }
  SparseMatrix w(n, n);
  w.setFromTriplets(triplets.begin(), triplets.end(), [](double a, double b) { return std::max(a, b); });
  return AffinityGraph(std::move(w));
}

Labels kmeanspp_seed(const Matrix& features, Index n_clusters, std::uint64_t seed) {
  const Index n = features.rows();
  if (n_clusters < 1 || n_clusters > n) throw std::invalid_argument("kmeanspp_seed: need 1 <= K <= N");
  Rng rng(seed);
  std::vector<Index> centres{static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)))};
  std::vector<bool> chosen(static_cast<std::size_t>(n), false);
  chosen[static_cast<std::size_t>(centres[0])] = true;
  std::vector<double> d2(static_cast<std::size_t>(n));
  const auto refresh = [&](Index c, bool first) {
    parallel_for(n, [&](std::ptrdiff_t p) {
      const double d = squared_euclidean_distance(row_span(features, p), row_span(features, c));
      d2[static_cast<std::size_t>(p)] = first ? d : std::min(d2[static_cast<std::size_t>(p)], d);
    });
  };
  refresh(centres[0], true);
  while (static_cast<Index>(centres.size()) < n_clusters) {
    double total = 0.0;
    for (double d : d2) total += d;
    Index pick = -1;
    if (total > 0.0) {
      const double r = rng.uniform() * total;
      double cum = 0.0;
      for (Index p = 0; p < n; ++p) {
        cum += d2[static_cast<std::size_t>(p)];
        if (d2[static_cast<std::size_t>(p)] > 0.0) pick = p;
        if (cum > r && pick == p) break;
      }
    } else {
      // Every remaining point duplicates a centre.
      pick = static_cast<Index>(std::find(chosen.begin(), chosen.end(), false) - chosen.begin());
    }
    centres.push_back(pick);
    chosen[static_cast<std::size_t>(pick)] = true;
    refresh(pick, false);
  }
  Labels labels(static_cast<std::size_t>(n));
  parallel_for(n, [&](std::ptrdiff_t p) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centres.size(); ++c) {
      const double d = squared_euclidean_distance(row_span(features, p), row_span(features, centres[c]));
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(c);
      }
    }
    labels[static_cast<std::size_t>(p)] = best;
  });
  return labels;
}

void write_dataset_csv(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError(path.string() + ": cannot write file");
  out << "group";
  for (const auto& name : dataset.feature_names) out << ',' << name;
  out << '\n';
  char buf[32];
  for (Index p = 0; p < dataset.n_points(); ++p) {
    out << dataset.group_names[static_cast<std::size_t>(dataset.group_of[static_cast<std::size_t>(p)])];
    for (Index j = 0; j < dataset.features.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", dataset.features(p, j));
      out << ',' << buf;
    }
    out << '\n';
  }
}

}  // namespace fairclust

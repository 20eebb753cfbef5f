#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "llmfs/error.hpp"
#include "llmfs/format.hpp"
#include "llmfs/matrix.hpp"
#include "llmfs/rng.hpp"

namespace llmfs {

// Immutable table of n samples x d features with binary labels
// (1 = malware/positive). All values are finite, feature names are unique
// and non-empty; the constructor enforces all of it.
class Dataset {
public:
  Dataset(Matrix features, std::vector<int> labels,
          std::vector<std::string> feature_names)
      : features_(std::move(features)),
        labels_(std::move(labels)),
        feature_names_(std::move(feature_names)) {
    validate();
  }

  const Matrix& features() const { return features_; }
  const std::vector<int>& labels() const { return labels_; }
  const std::vector<std::string>& feature_names() const {
    return feature_names_;
  }

  std::size_t n() const { return features_.rows(); }
  std::size_t d() const { return features_.cols(); }

  std::size_t class_count(int label) const {
    std::size_t c = 0;
    for (int y : labels_)
      if (y == label) ++c;
    return c;
  }

  std::vector<std::size_t> class_rows(int label) const {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < labels_.size(); ++i)
      if (labels_[i] == label) rows.push_back(i);
    return rows;
  }

  bool has_both_classes() const {
    return class_count(0) > 0 && class_count(1) > 0;
  }

  std::vector<double> column(std::size_t j) const {
    if (j >= d()) fail(Errc::index_out_of_range, "feature index out of range");
    std::vector<double> col(n());
    for (std::size_t i = 0; i < n(); ++i) col[i] = features_(i, j);
    return col;
  }

  // New dataset containing the given rows, in the given order.
  Dataset select_rows(const std::vector<std::size_t>& rows) const {
    Matrix m(rows.size(), d());
    std::vector<int> labels(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i] >= n()) fail(Errc::index_out_of_range, "row out of range");
      for (std::size_t j = 0; j < d(); ++j) m(i, j) = features_(rows[i], j);
      labels[i] = labels_[rows[i]];
    }
    return Dataset(std::move(m), std::move(labels), feature_names_);
  }

private:
  void validate() const {
    if (features_.rows() == 0 || features_.cols() == 0)
      fail(Errc::invalid_spec, "dataset must have n >= 1 and d >= 1");
    if (labels_.size() != features_.rows())
      fail(Errc::length_mismatch, "label count does not match row count");
    if (feature_names_.size() != features_.cols())
      fail(Errc::length_mismatch, "feature name count does not match d");
    for (int y : labels_)
      if (y != 0 && y != 1)
        fail(Errc::non_binary_label, "labels must be 0 or 1");
    std::unordered_set<std::string> seen;
    for (const auto& name : feature_names_) {
      if (name.empty()) fail(Errc::invalid_spec, "empty feature name");
      if (!seen.insert(name).second)
        fail(Errc::invalid_spec, "duplicate feature name: " + name);
    }
    for (double v : features_.data())
      if (!std::isfinite(v))
        fail(Errc::non_numeric_cell, "non-finite feature value");
  }

  Matrix features_;
  std::vector<int> labels_;
  std::vector<std::string> feature_names_;
};

struct SynthSpec {
  std::size_t n_samples = 0;
  std::size_t n_features = 0;
  std::size_t n_informative = 0;
  double mean_shift = 0.0;  // class-mean separation, in units of noise sigma
  std::uint64_t seed = 0;
};

namespace detail {

inline std::vector<std::string> split_line(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline bool parse_double(const std::string& s, double& out) {
  const char* p = s.c_str();
  char* end = nullptr;
  out = std::strtod(p, &end);
  if (end == p) return false;
  while (*end == ' ' || *end == '\t' || *end == '\r') ++end;
  return *end == '\0';
}

}  // namespace detail

// Reads a header-first CSV whose `label_column` holds 0/1 and whose other
// columns are finite decimals. Feature columns keep header order; rows keep
// file order.
inline Dataset load_csv(const std::string& path,
                        const std::string& label_column = "label") {
  std::ifstream in(path);
  if (!in) fail(Errc::io_error, "cannot open " + path);

  std::string header;
  if (!std::getline(in, header)) fail(Errc::empty_file, path + " is empty");
  if (!header.empty() && header.back() == '\r') header.pop_back();

  auto columns = detail::split_line(header, ',');
  std::size_t label_idx = columns.size();
  std::vector<std::string> names;
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j] == label_column) {
      label_idx = j;
    } else {
      names.push_back(columns[j]);
    }
  }
  if (label_idx == columns.size())
    fail(Errc::missing_label_column,
         path + ": no column named '" + label_column + "'");

  std::vector<double> values;
  std::vector<int> labels;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = detail::split_line(line, ',');
    if (cells.size() != columns.size())
      fail(Errc::non_numeric_cell,
           path + ": row " + std::to_string(row) + " has " +
               std::to_string(cells.size()) + " cells, expected " +
               std::to_string(columns.size()));
    for (std::size_t j = 0; j < cells.size(); ++j) {
      double v;
      if (!detail::parse_double(cells[j], v) || !std::isfinite(v))
        fail(Errc::non_numeric_cell, path + ": non-numeric cell at row " +
                                         std::to_string(row) + ", column " +
                                         columns[j]);
      if (j == label_idx) {
        if (v != 0.0 && v != 1.0)
          fail(Errc::non_binary_label,
               path + ": label at row " + std::to_string(row) +
                   " is not 0 or 1");
        labels.push_back(static_cast<int>(v));
      } else {
        values.push_back(v);
      }
    }
    ++row;
  }
  if (row == 0) fail(Errc::empty_file, path + " has a header but no rows");

  const std::size_t d = names.size();
  Matrix m(row, d);
  for (std::size_t i = 0; i < row; ++i)
    for (std::size_t j = 0; j < d; ++j) m(i, j) = values[i * d + j];
  return Dataset(std::move(m), std::move(labels), std::move(names));
}

// Inverse of load_csv up to 12-significant-digit decimal formatting. The
// label column is written last.
inline void write_csv(const Dataset& ds, const std::string& path,
                      const std::string& label_column = "label") {
  std::ofstream out(path);
  if (!out) fail(Errc::io_error, "cannot write " + path);
  for (const auto& name : ds.feature_names()) out << name << ',';
  out << label_column << '\n';
  for (std::size_t i = 0; i < ds.n(); ++i) {
    for (std::size_t j = 0; j < ds.d(); ++j)
      out << detail::format_g12(ds.features()(i, j)) << ',';
    out << ds.labels()[i] << '\n';
  }
  if (!out) fail(Errc::io_error, "failed writing " + path);
}

// Stratified row assignment: per class, floor(train_fraction * count) rows
// (at least 1) go to train. Membership is a pure function of (labels,
// train_fraction, seed); each partition keeps original row order.
inline std::pair<std::vector<std::size_t>, std::vector<std::size_t>>
split_indices(const std::vector<int>& labels, double train_fraction,
              std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    fail(Errc::invalid_spec, "train_fraction must be in (0, 1)");

  std::vector<std::size_t> train, test;
  for (int cls : {0, 1}) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == cls) rows.push_back(i);
    if (rows.empty()) continue;
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(cls)));
    rng.shuffle(rows);
    std::size_t n_train = static_cast<std::size_t>(
        std::floor(train_fraction * static_cast<double>(rows.size())));
    if (n_train == 0) n_train = 1;
    train.insert(train.end(), rows.begin(), rows.begin() + n_train);
    test.insert(test.end(), rows.begin() + n_train, rows.end());
  }
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  if (train.empty() || test.empty())
    fail(Errc::degenerate_split, "split would leave an empty partition");
  return {std::move(train), std::move(test)};
}

inline std::pair<Dataset, Dataset> split(const Dataset& ds,
                                         double train_fraction,
                                         std::uint64_t seed) {
  auto [train_rows, test_rows] =
      split_indices(ds.labels(), train_fraction, seed);
  return {ds.select_rows(train_rows), ds.select_rows(test_rows)};
}

// Balanced synthetic table for oracle tests: features j < n_informative are
// class-conditional Gaussians whose means differ by mean_shift (sigma = 1);
// the rest are label-independent N(0, 1) noise.
inline Dataset generate_synthetic(const SynthSpec& spec) {
  if (spec.n_samples == 0 || spec.n_features == 0 ||
      spec.n_informative > spec.n_features || spec.mean_shift < 0.0 ||
      !std::isfinite(spec.mean_shift))
    fail(Errc::invalid_spec, "invalid synthetic spec");

  std::vector<int> labels(spec.n_samples);
  for (std::size_t i = 0; i < spec.n_samples; ++i)
    labels[i] = (i % 2 == 0) ? 1 : 0;  // ceil(n/2) positives

  Rng rng(spec.seed);
  Matrix m(spec.n_samples, spec.n_features);
  for (std::size_t i = 0; i < spec.n_samples; ++i) {
    for (std::size_t j = 0; j < spec.n_features; ++j) {
      double v = rng.gaussian();
      if (j < spec.n_informative && labels[i] == 1) v += spec.mean_shift;
      m(i, j) = v;
    }
  }

  std::vector<std::string> names(spec.n_features);
  for (std::size_t j = 0; j < spec.n_features; ++j)
    names[j] = "f" + std::to_string(j);
  return Dataset(std::move(m), std::move(labels), std::move(names));
}

}  // namespace llmfs

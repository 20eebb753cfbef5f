#pragma once

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "llmfs/dataset.hpp"
#include "llmfs/error.hpp"
#include "llmfs/format.hpp"
#include "llmfs/score_vector.hpp"

namespace llmfs {

// An ordered subset of k distinct feature indices.
struct SelectionResult {
  std::vector<std::size_t> indices;
  std::string method_name;
  std::size_t k = 0;
};

// Indices of the k largest scores, descending by score, ties broken by
// ascending feature index.
inline SelectionResult top_k(const ScoreVector& scores, std::size_t k) {
  if (k > scores.size())
    fail(Errc::k_too_large, "k exceeds the number of features");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores.scores[a] != scores.scores[b])
      return scores.scores[a] > scores.scores[b];
    return a < b;
  });
  order.resize(k);
  return {std::move(order), scores.method_name, k};
}

// New dataset whose columns are sel.indices in selection order; labels and
// row order are untouched.
inline Dataset project(const Dataset& ds, const SelectionResult& sel) {
  Matrix m(ds.n(), sel.indices.size());
  std::vector<std::string> names(sel.indices.size());
  for (std::size_t c = 0; c < sel.indices.size(); ++c) {
    std::size_t j = sel.indices[c];
    if (j >= ds.d())
      fail(Errc::index_out_of_range, "selected index out of range");
    names[c] = ds.feature_names()[j];
    for (std::size_t i = 0; i < ds.n(); ++i) m(i, c) = ds.features()(i, j);
  }
  return Dataset(std::move(m), ds.labels(), std::move(names));
}

// rank,feature_index,feature_name,score
inline void write_selection_csv(const SelectionResult& sel,
                                const ScoreVector& scores,
                                const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(Errc::io_error, "cannot write " + path);
  out << "rank,feature_index,feature_name,score\n";
  for (std::size_t r = 0; r < sel.indices.size(); ++r) {
    std::size_t j = sel.indices[r];
    out << (r + 1) << ',' << j << ',' << ds.feature_names()[j] << ','
        << detail::format_g12(scores.scores[j]) << '\n';
  }
}

}  // namespace llmfs

#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace llmfs {

// One importance score per feature; higher always means "select first" here.
// Producers never emit infinities: the largest finite double stands in.
struct ScoreVector {
  std::vector<double> scores;
  std::string method_name;
  bool higher_is_better = true;

  std::size_t size() const { return scores.size(); }
};

namespace detail {

inline double clamp_finite(double v) {
  if (std::isinf(v))
    return v > 0 ? std::numeric_limits<double>::max()
                 : -std::numeric_limits<double>::max();
  return v;
}

}  // namespace detail

}  // namespace llmfs

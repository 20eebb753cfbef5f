#pragma once

#include <stdexcept>
#include <string>

namespace llmfs {

// Every failure mode the library reports. Callers that care about the
// specific condition switch on code(); the message carries the detail
// (row/column indices, file paths, ...).
enum class Errc {
  empty_file,
  missing_label_column,
  non_numeric_cell,
  non_binary_label,
  degenerate_split,
  invalid_spec,
  single_class_dataset,
  index_out_of_range,
  k_too_large,
  too_few_samples,
  dimension_mismatch,
  length_mismatch,
  empty_input,
  empty_counts,
  single_class,
  incomplete_grid,
  io_error,
  backend_unreachable,
  malformed_response_body,
  invalid_config,
};

class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }

private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace llmfs

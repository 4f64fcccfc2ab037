#pragma once

#include <stdexcept>
#include <string>

namespace diafuse {

enum class errc {
  malformed_line,
  negative_duration,
  negative_time,
  dimension_mismatch,
  zero_vector,
  empty_input,
  unknown_kind,
  bad_label,
  empty_words,
  degenerate_cohort,
  missing_class,
  isolated_node,
  singular_system,
  empty_reference,
  infeasible_separation,
  invalid_matrix,
  invalid_config,
  unknown_id,
  io_error,
};

// Data/domain error. `line` is 1-based when the error comes from parsing a
// line-oriented input, -1 otherwise.
class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& msg, long line = -1)
      : std::runtime_error(line >= 0 ? msg + " (line " + std::to_string(line) + ")" : msg),
        code_(code),
        line_(line) {}

  errc code() const noexcept { return code_; }
  long line() const noexcept { return line_; }

 private:
  errc code_;
  long line_;
};

}  // namespace diafuse

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wealthtail {

/// Base class of all errors thrown by this library.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed input file. `line` is 1-based (the header is line 1).
struct parse_error : error {
  parse_error(const std::string& message, std::size_t line_number)
      : error(message + " (line " + std::to_string(line_number) + ")"),
        line(line_number) {}
  std::size_t line;
};

/// Input data violates a documented contract (non-positive weight, empty
/// sample, overlapping value ranges of combined sources, ...).
struct validation_error : error {
  using error::error;
};

/// Implicate tables do not describe the same households.
struct alignment_error : error {
  using error::error;
};

/// A run was requested with settings that cannot produce a result
/// (empty candidate set, unusable search range, ...).
struct configuration_error : error {
  using error::error;
};

/// The tail above the chosen threshold carries no usable information.
struct degenerate_tail_error : error {
  using error::error;
};

struct insufficient_data_error : error {
  using error::error;
};

/// A first-moment formula was evaluated with alpha <= 1.
struct infinite_mean_error : error {
  using error::error;
};

/// The continuity equation has no sign change on the scanned grid.
struct no_root_error : error {
  using error::error;
};

/// Weight rescaling would need a non-positive factor.
struct infeasible_rescale_error : error {
  using error::error;
};

}  // namespace wealthtail

#pragma once

#include <stdexcept>
#include <string>

namespace tgc {

// Base for all library errors. Specific types below so callers can
// distinguish usage mistakes from numerical failures.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Linear algebra / metric validity.
struct SingularMetric : Error {
  using Error::Error;
};
struct NonPositiveDefinite : Error {
  using Error::Error;
};

// Tensor algebra misuse.
struct IncompatibleIndices : Error {
  using Error::Error;
};

// Chart / evaluation domain.
struct PointOutsideChart : Error {
  using Error::Error;
};

// Metric DSL.
struct SyntaxError : Error {
  int line = 0, col = 0;
  SyntaxError(const std::string& msg, int line_, int col_)
      : Error(msg + " (line " + std::to_string(line_) + ", col " +
              std::to_string(col_) + ")"),
        line(line_),
        col(col_) {}
};
struct DimensionError : Error {
  using Error::Error;
};
struct NonHermitianEntry : Error {
  using Error::Error;
};

// Numerical identity cross-checks.
struct ConsistencyFailure : Error {
  using Error::Error;
};
struct DegenerateFit : Error {
  using Error::Error;
};

// Argument validation.
struct ZeroVector : Error {
  using Error::Error;
};
struct OutOfRange : Error {
  using Error::Error;
};
struct InvalidParameter : Error {
  using Error::Error;
};

// CLI / reporting.
struct ConfigError : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};

}  // namespace tgc

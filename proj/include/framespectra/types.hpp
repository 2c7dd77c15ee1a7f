#pragma once

#include <stdexcept>
#include <string>

namespace framespectra {

enum class Field { Real, Complex };

inline const char* to_string(Field f) {
  return f == Field::Real ? "real" : "complex";
}

// Bad or unparseable configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Frame size constraints violated (CLI exit code 3).
struct InadmissibleSize : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A numeric routine failed to converge (CLI exit code 4). Carries the best
// estimate reached and the residual at the point of failure.
struct NumericError : std::runtime_error {
  NumericError(const std::string& what, double best, double residual)
      : std::runtime_error(what), best_estimate(best), residual(residual) {}
  double best_estimate;
  double residual;
};

}  // namespace framespectra

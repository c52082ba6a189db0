#ifndef CS_ERRORS_HPP
#define CS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cs {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class InvalidDimensionError : public Error {
public:
  using Error::Error;
};

class InvalidSparsityError : public Error {
public:
  using Error::Error;
};

class InvalidParameterError : public Error {
public:
  using Error::Error;
};

class InvalidConfigError : public Error {
public:
  using Error::Error;
};

/// Thrown when a dense materialization would exceed the element guard.
class ResourceLimitError : public Error {
public:
  using Error::Error;
};

/// Posterior system (b*Phi'Phi + A) could not be factorized; carries a
/// cheap condition estimate for diagnostics.
class IllConditionedError : public Error {
public:
  IllConditionedError(const std::string& what, double condition_estimate)
      : Error(what), condition_estimate_(condition_estimate) {}
  double condition_estimate() const { return condition_estimate_; }

private:
  double condition_estimate_;
};

/// Metric is mathematically undefined for the given inputs (e.g. zero-norm
/// reference signal).
class UndefinedMetricError : public Error {
public:
  using Error::Error;
};

/// Iterative solver produced a non-finite objective.
class DivergenceError : public Error {
public:
  DivergenceError(const std::string& what, int iteration)
      : Error(what), iteration_(iteration) {}
  int iteration() const { return iteration_; }

private:
  int iteration_;
};

class IoError : public Error {
public:
  IoError(const std::string& what, std::string path)
      : Error(what + ": " + path), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

private:
  std::string path_;
};

}  // namespace cs

#endif  // CS_ERRORS_HPP

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace anosov {

/// Base class for every error raised by the library. The CLI maps these to
/// exit code 2 unless a diagnostic turns them into a verdict.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class ClassificationError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Enumeration would exceed the configured element cap.
class ResourceError : public Error {
 public:
  ResourceError(const std::string& what, long long requested, long long cap)
      : Error(what + " (requested " + std::to_string(requested) + ", cap " + std::to_string(cap) + ")"),
        requested_(requested), cap_(cap) {}
  long long requested() const { return requested_; }
  long long cap() const { return cap_; }

 private:
  long long requested_;
  long long cap_;
};

class EmptySampleError : public Error {
 public:
  using Error::Error;
};

class ConditioningError : public Error {
 public:
  using Error::Error;
};

/// sigma_k / sigma_{k+1} too close to 1 for U_k to be defined.
class UndefinedSubspaceError : public Error {
 public:
  UndefinedSubspaceError(const std::string& what, double gap) : Error(what), gap_(gap) {}
  double gap() const { return gap_; }

 private:
  double gap_;
};

class IllConditionedSpectrumError : public Error {
 public:
  using Error::Error;
};

class DegenerateConfigurationError : public Error {
 public:
  DegenerateConfigurationError(const std::string& what, int dim_a, int dim_b)
      : Error(what), dim_a_(dim_a), dim_b_(dim_b) {}
  int dim_a() const { return dim_a_; }
  int dim_b() const { return dim_b_; }

 private:
  int dim_a_;
  int dim_b_;
};

class ProximalityError : public Error {
 public:
  ProximalityError(const std::string& what, std::vector<std::string> witnesses)
      : Error(what), witnesses_(std::move(witnesses)) {}
  const std::vector<std::string>& witnesses() const { return witnesses_; }

 private:
  std::vector<std::string> witnesses_;
};

class EmptyScatterError : public Error {
 public:
  using Error::Error;
};

class RangeOverflowError : public Error {
 public:
  using Error::Error;
};

class DirectionUnavailableError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> problems)
      : Error(join(problems)), problems_(std::move(problems)) {}
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  static std::string join(const std::vector<std::string>& p) {
    std::string s = "invalid config:";
    for (const auto& x : p) s += "\n  - " + x;
    return s;
  }
  std::vector<std::string> problems_;
};

}  // namespace anosov

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nhmech {

/// @brief Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a map (log cut locus, bad parameters).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// target(g) and source(h) differ.
class NotComposable : public Error {
 public:
  using Error::Error;
};

/// A chart coordinate left the domain of the group logarithm or a guard set.
class ChartDomain : public Error {
 public:
  using Error::Error;
};

class RankDeficientAnnihilator : public Error {
 public:
  using Error::Error;
};

class NotInConstraintCone : public Error {
 public:
  using Error::Error;
};

class ChartInversionFailed : public Error {
 public:
  using Error::Error;
};

/// @brief Failure of the Newton solve for one step.
///
/// `step_index` is set by evolve() to the index of the step being solved
/// (0-based, counting from the initial element).
class SolveError : public Error {
 public:
  SolveError(const std::string& what, double condition)
      : Error(what), condition_(condition) {}

  double condition() const { return condition_; }
  std::ptrdiff_t step_index() const { return step_index_; }
  void set_step_index(std::ptrdiff_t k) { step_index_ = k; }

 private:
  double condition_;
  std::ptrdiff_t step_index_ = -1;
};

/// Newton Jacobian condition estimate exceeded the configured limit.
class Singular : public SolveError {
 public:
  using SolveError::SolveError;
};

class NoConvergence : public SolveError {
 public:
  using SolveError::SolveError;
};

}  // namespace nhmech

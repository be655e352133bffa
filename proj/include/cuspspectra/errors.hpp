#pragma once

#include <stdexcept>
#include <string>

namespace cusp {

// A quadrature or iteration exhausted its budget before reaching the
// requested tolerance. `achieved` is the best error estimate at the point
// of failure, so callers can decide whether the partial result is usable.
class ConvergenceError : public std::runtime_error {
public:
  ConvergenceError(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_(achieved) {}
  double achieved() const { return achieved_; }

private:
  double achieved_;
};

// A least-squares basis became numerically unreliable for the given samples.
class ConditioningError : public std::runtime_error {
public:
  ConditioningError(const std::string& what, double condition)
      : std::runtime_error(what), condition_(condition) {}
  double condition() const { return condition_; }

private:
  double condition_;
};

// Sampled data contradicts the declared small-time model: the remainder
// after subtracting the four-term expansion is not O(sqrt(t)).
class ModelMismatchError : public std::runtime_error {
public:
  ModelMismatchError(const std::string& what, double worst_t)
      : std::runtime_error(what), worst_t_(worst_t) {}
  double worst_t() const { return worst_t_; }

private:
  double worst_t_;
};

// Two supposedly equivalent computations disagree beyond tolerance.
// Both values are kept so the caller can report them side by side.
class MethodDisagreement : public std::runtime_error {
public:
  MethodDisagreement(const std::string& what, double first, double second)
      : std::runtime_error(what), first_(first), second_(second) {}
  double first() const { return first_; }
  double second() const { return second_; }

private:
  double first_;
  double second_;
};

// An API precondition was violated (wrong surface class, sign of the Euler
// characteristic, conformal factor outside its decay class, ...).
class ContractError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A data file failed schema or invariant validation. The message names the
// first violated invariant.
class LoadError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace cusp

#pragma once

#include <stdexcept>
#include <string>

namespace causalview {

/// Matrix dimensions do not fit the requested operation.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A value violates a mathematical precondition (not Hermitian, not PSD,
/// not trace preserving, probability out of range, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A state that must be invertible is not. Kept apart from DomainError so
/// callers converting a spacelike view back to a causal one can report it
/// as a failed numerical requirement rather than malformed input.
class RankDeficientError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// The caller asked for something that makes no sense (too few POVMs, ...).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computed quantity broke an invariant that should hold by construction,
/// e.g. a probability below -1e-12.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace causalview

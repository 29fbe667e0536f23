#pragma once

#include <stdexcept>
#include <string>

namespace newtpot {

/// Argument outside the mathematical domain of an operation (e.g. n < 2, width <= 0).
class domain_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Kernel evaluated at (or numerically at) its pole.
class singularity_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Caller violated a documented precondition (evaluation point too far out,
/// mean-value ball touching the support, malformed configuration).
class precondition_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The source fails an integrability or regularity hypothesis.
class admissibility_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A source evaluator threw or produced a non-finite value; the message
/// carries the offending point.
class evaluation_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace newtpot

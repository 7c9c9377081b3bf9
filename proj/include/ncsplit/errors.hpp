#pragma once

#include <stdexcept>
#include <string>

namespace ncsplit {

// Precondition / contract violations (bad dimensions, invalid parameters).
class contract_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class dimension_error : public contract_error {
 public:
  using contract_error::contract_error;
};

// Eigenvalue estimation hit the iteration cap; carries the best estimate.
class estimation_error : public std::runtime_error {
 public:
  estimation_error(const std::string& what, double best)
      : std::runtime_error(what), best_estimate(best) {}
  double best_estimate;
};

// Attempted factorization of a matrix that is not positive definite.
class factorization_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The linear map is not surjective (lambda_min(M M*) below tolerance).
class not_surjective_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Doubling search for a penalty parameter exhausted its cap.
class no_valid_beta_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Iterates left the representable range (step-size certificate was wrong).
class divergence_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Requested a solver mode that the given problem pieces do not support.
class unsupported_configuration_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ncsplit

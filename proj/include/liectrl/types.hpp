#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace liectrl {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using Complex = std::complex<double>;

// Default tolerances. Rank cutoffs are relative to the largest singular
// value; all others are absolute residual bounds.
namespace tol {
inline constexpr double alg = 1e-12;      // Jacobi / Leibniz residuals
inline constexpr double rank = 1e-10;     // singular-value cutoff for rank decisions
inline constexpr double spec = 1e-9;      // real/imag-part classification of eigenvalues
inline constexpr double cluster = 1e-7;   // eigenvalue clustering and integer-multiple matching
inline constexpr double grading = 1e-8;   // bracket-grading projection residual
inline constexpr double embedding = 1e-10;  // embedded-bracket homomorphism residual
inline constexpr double realization = 1e-9; // derivation-realization residual
}  // namespace tol

enum class ErrorCode {
  InvalidInput,
  ValidationFailed,
  NotAnEigenvalue,
  UnsupportedRealization,
  StepRejected,
  InsufficientSamples,
  ParseError,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg)
      : std::runtime_error(msg), code_(code) {}

  ErrorCode code() const { return code_; }

  const char* code_name() const {
    switch (code_) {
      case ErrorCode::InvalidInput: return "InvalidInput";
      case ErrorCode::ValidationFailed: return "ValidationFailed";
      case ErrorCode::NotAnEigenvalue: return "NotAnEigenvalue";
      case ErrorCode::UnsupportedRealization: return "UnsupportedRealization";
      case ErrorCode::StepRejected: return "StepRejected";
      case ErrorCode::InsufficientSamples: return "InsufficientSamples";
      case ErrorCode::ParseError: return "ParseError";
    }
    return "Error";
  }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) {
  throw Error(code, msg);
}

}  // namespace liectrl

#pragma once

#include <vector>

#include "liectrl/algebra.hpp"
#include "liectrl/types.hpp"

namespace liectrl {

/// One eigenvalue class after clustering. Conjugate pairs are merged into a
/// single class with the Im >= 0 representative; `multiplicity` counts both
/// members of a merged pair.
struct EigenvalueClass {
  Complex value;
  int multiplicity;

  bool zero_real(double t = tol::spec) const { return std::abs(value.real()) <= t; }
  bool is_real(double t = tol::spec) const { return std::abs(value.imag()) <= t; }
};

struct Spectrum {
  std::vector<EigenvalueClass> classes;  // merged conjugate pairs, Im >= 0
  std::vector<Complex> raw;              // clustered values, conjugates listed separately
  double tol_used = tol::spec;

  int total_multiplicity() const;
  bool all_zero_real(double t = tol::spec) const;
};

/// Eigenvalues with algebraic multiplicities. Values within tol::cluster of
/// each other are merged; components within `classification_tol` of zero are
/// snapped to zero before classification.
Spectrum spectrum(const Derivation& d, double classification_tol = tol::spec);

/// Real basis of the generalized eigenspace of alpha. For a non-real alpha
/// the real invariant subspace of the conjugate pair is returned (dimension
/// twice the single-eigenvalue multiplicity). Throws NotAnEigenvalue when
/// alpha is farther than `match_tol` from every computed eigenvalue.
Subspace generalized_eigenspace(const Derivation& d, Complex alpha,
                                double match_tol = tol::spec);

struct DDecomposition {
  Subspace g_plus;    // generalized eigenspaces with Re > 0
  Subspace g_minus;   // Re < 0
  Subspace g_zero;    // Re = 0
  Subspace g_kernel;  // generalized kernel (eigenvalue exactly 0)
  std::vector<std::pair<EigenvalueClass, Subspace>> per_eigenvalue;
  Spectrum spec;
};

DDecomposition d_decomposition(const Derivation& d,
                               double classification_tol = tol::spec);

/// Checks [g_a, g_b] ⊂ g_{a+b} over the complexified eigenspaces (zero when
/// a+b is not an eigenvalue). Residuals are measured on unit-norm basis
/// brackets.
struct GradingReport {
  double max_residual = 0.0;
  bool pass = true;
  int pairs_checked = 0;
};
GradingReport check_grading(const LieAlgebra& a, const Derivation& d,
                            const DDecomposition& dec,
                            double tolerance = tol::grading);

/// Sum of the generalized eigenspaces of the positive integer multiples of a
/// nonzero purely imaginary eigenvalue (real form). Validated to be a
/// nilpotent subalgebra.
Subspace multiples_subalgebra(const LieAlgebra& a, const Derivation& d,
                              Complex alpha);

}  // namespace liectrl

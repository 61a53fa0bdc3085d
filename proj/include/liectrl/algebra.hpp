#pragma once

#include <string>
#include <vector>

#include "liectrl/types.hpp"

namespace liectrl {

/// Finite-dimensional real Lie algebra given by structure constants in a
/// fixed ordered basis: [e_i, e_j] = sum_k c(i,j,k) e_k.
///
/// Antisymmetry is structural: entries are stored for i < j only and the
/// i > j values are derived, so c(i,j,k) == -c(j,i,k) holds exactly.
/// The Jacobi identity is a tolerance check (validate_jacobi), not a
/// construction invariant, so that deliberately broken tensors can be
/// built and rejected by callers.
class LieAlgebra {
 public:
  struct StructureEntry {
    int i, j, k;  // requires i < j
    double value;
  };

  LieAlgebra(int dim, std::vector<std::string> basis_names,
             const std::vector<StructureEntry>& entries);

  static LieAlgebra abelian(int dim);

  int dim() const { return dim_; }
  const std::vector<std::string>& basis_names() const { return names_; }

  double c(int i, int j, int k) const {
    if (i == j) return 0.0;
    return i < j ? c_[idx(i, j, k)] : -c_[idx(j, i, k)];
  }

  /// Nonzero entries in canonical form: i < j, sorted lexicographically.
  std::vector<StructureEntry> canonical_entries() const;

  Vec basis_vector(int i) const;

 private:
  std::size_t idx(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * dim_ + j) * dim_ + k;
  }

  int dim_;
  std::vector<std::string> names_;
  std::vector<double> c_;  // dense over i<j; other entries zero
};

/// Linear map on algebra coordinates. Leibniz-rule validity is checked by
/// validate_derivation; ad() always produces a valid derivation.
struct Derivation {
  Mat matrix;
};

/// Subspace of the algebra, stored as an orthonormal column basis.
struct Subspace {
  Mat basis;  // ambient_dim x dim, orthonormal columns

  int dim() const { return static_cast<int>(basis.cols()); }
  int ambient_dim() const { return static_cast<int>(basis.rows()); }
  bool contains(const Vec& v, double tolerance = tol::rank * 1e2) const;
};

Subspace zero_subspace(int ambient_dim);
Subspace full_subspace(int ambient_dim);

/// Orthonormal basis of the column span; rank decided by singular values
/// relative to the largest (cutoff rel_tol).
Subspace span_of(const Mat& vectors, double rel_tol = tol::rank);

bool same_subspace(const Subspace& a, const Subspace& b);

/// Span of the union of both column spaces.
Subspace subspace_sum(const Subspace& a, const Subspace& b);

// -- operations on the algebra ------------------------------------------

Vec bracket(const LieAlgebra& a, const Vec& x, const Vec& y);

struct JacobiReport {
  double max_residual = 0.0;
  bool pass = true;
  int worst[3] = {-1, -1, -1};
};
JacobiReport validate_jacobi(const LieAlgebra& a, double tolerance = tol::alg);

Derivation ad(const LieAlgebra& a, const Vec& y);

struct LeibnizReport {
  double max_residual = 0.0;
  bool pass = true;
};
LeibnizReport validate_derivation(const LieAlgebra& a, const Mat& m,
                                  double tolerance = tol::alg);

Mat killing_form(const LieAlgebra& a);

/// span{ [x, y] : x in u, y in v }.
Subspace bracket_span(const LieAlgebra& a, const Subspace& u, const Subspace& v);

/// g ⊇ [g,g] ⊇ [[g,g],[g,g]] ⊇ ... until stabilization ({0} included when reached).
std::vector<Subspace> derived_series(const LieAlgebra& a);
/// g ⊇ [g,g] ⊇ [g,[g,g]] ⊇ ...
std::vector<Subspace> lower_central_series(const LieAlgebra& a);

bool is_solvable(const LieAlgebra& a);
bool is_nilpotent(const LieAlgebra& a);

/// Largest solvable ideal, computed as the Killing-orthogonal complement of
/// the derived algebra. Throws ValidationFailed if the result does not pass
/// the solvable-ideal post-check (numerical degeneracy).
Subspace radical(const LieAlgebra& a);

/// Smallest bracket-closed subspace containing the generators.
Subspace span_closure(const LieAlgebra& a, const std::vector<Vec>& gens);

/// Restriction of the structure to a bracket-closed subspace: a Lie algebra
/// on the subspace coordinates plus the basis used. Throws ValidationFailed
/// when brackets leave the subspace beyond `closure_tol`.
struct SubAlgebra {
  LieAlgebra algebra;
  Mat basis;               // columns = subspace basis in ambient coordinates
  double closure_residual; // max distance of a basis bracket from the subspace
};
SubAlgebra restrict_to(const LieAlgebra& a, const Subspace& s,
                       double closure_tol = 1e-8);

}  // namespace liectrl

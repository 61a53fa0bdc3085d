#include "liectrl/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include <Eigen/SVD>

namespace liectrl {

LieAlgebra::LieAlgebra(int dim, std::vector<std::string> basis_names,
                       const std::vector<StructureEntry>& entries)
    : dim_(dim), names_(std::move(basis_names)) {
  if (dim <= 0) fail(ErrorCode::InvalidInput, "algebra dimension must be positive");
  if (names_.empty()) {
    names_.reserve(dim);
    for (int i = 0; i < dim; ++i) names_.push_back("e" + std::to_string(i));
  }
  if (static_cast<int>(names_.size()) != dim)
    fail(ErrorCode::InvalidInput, "basis_names length does not match dim");
  c_.assign(static_cast<std::size_t>(dim) * dim * dim, 0.0);
  for (const auto& e : entries) {
    if (e.i < 0 || e.j < 0 || e.k < 0 || e.i >= dim || e.j >= dim || e.k >= dim)
      fail(ErrorCode::InvalidInput, "structure entry index out of range");
    if (e.i >= e.j)
      fail(ErrorCode::InvalidInput,
           "structure entries must have i < j (antisymmetry is structural)");
    c_[idx(e.i, e.j, e.k)] += e.value;
  }
}

LieAlgebra LieAlgebra::abelian(int dim) { return LieAlgebra(dim, {}, {}); }

std::vector<LieAlgebra::StructureEntry> LieAlgebra::canonical_entries() const {
  std::vector<StructureEntry> out;
  for (int i = 0; i < dim_; ++i)
    for (int j = i + 1; j < dim_; ++j)
      for (int k = 0; k < dim_; ++k) {
        double v = c_[idx(i, j, k)];
        if (v != 0.0) out.push_back({i, j, k, v});
      }
  return out;
}

Vec LieAlgebra::basis_vector(int i) const {
  Vec v = Vec::Zero(dim_);
  v(i) = 1.0;
  return v;
}

// -- subspaces -----------------------------------------------------------

bool Subspace::contains(const Vec& v, double tolerance) const {
  if (dim() == 0) return v.norm() <= tolerance;
  Vec residual = v - basis * (basis.transpose() * v);
  return residual.norm() <= tolerance * std::max(1.0, v.norm());
}

Subspace zero_subspace(int ambient_dim) {
  return Subspace{Mat::Zero(ambient_dim, 0)};
}

Subspace full_subspace(int ambient_dim) {
  return Subspace{Mat::Identity(ambient_dim, ambient_dim)};
}

// Absolute singular-value floor guarding against all-noise inputs (the
// artifact's tensors are O(1); anything below this is roundoff debris).
constexpr double kSvFloor = 1e-13;

Subspace span_of(const Mat& vectors, double rel_tol) {
  if (vectors.cols() == 0) return zero_subspace(static_cast<int>(vectors.rows()));
  Eigen::JacobiSVD<Mat> svd(vectors, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  double smax = sv.size() > 0 ? sv(0) : 0.0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > rel_tol * smax && sv(i) > kSvFloor) ++rank;
  return Subspace{svd.matrixU().leftCols(rank)};
}

bool same_subspace(const Subspace& a, const Subspace& b) {
  if (a.dim() != b.dim()) return false;
  if (a.dim() == 0) return true;
  Mat joint(a.ambient_dim(), a.dim() + b.dim());
  joint << a.basis, b.basis;
  return span_of(joint).dim() == a.dim();
}

Subspace subspace_sum(const Subspace& a, const Subspace& b) {
  Mat joint(a.ambient_dim(), a.dim() + b.dim());
  joint << a.basis, b.basis;
  return span_of(joint);
}

// -- bracket and validators ----------------------------------------------

Vec bracket(const LieAlgebra& a, const Vec& x, const Vec& y) {
  const int n = a.dim();
  if (x.size() != n || y.size() != n)
    fail(ErrorCode::InvalidInput, "bracket: vector length does not match algebra dim");
  Vec out = Vec::Zero(n);
  for (int i = 0; i < n; ++i) {
    if (x(i) == 0.0) continue;
    for (int j = 0; j < n; ++j) {
      if (y(j) == 0.0 || i == j) continue;
      double xy = x(i) * y(j);
      for (int k = 0; k < n; ++k) out(k) += xy * a.c(i, j, k);
    }
  }
  return out;
}

JacobiReport validate_jacobi(const LieAlgebra& a, double tolerance) {
  JacobiReport rep;
  const int n = a.dim();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        Vec ei = a.basis_vector(i), ej = a.basis_vector(j), ek = a.basis_vector(k);
        Vec r = bracket(a, ei, bracket(a, ej, ek)) +
                bracket(a, ej, bracket(a, ek, ei)) +
                bracket(a, ek, bracket(a, ei, ej));
        double res = r.cwiseAbs().maxCoeff();
        if (res > rep.max_residual) {
          rep.max_residual = res;
          rep.worst[0] = i;
          rep.worst[1] = j;
          rep.worst[2] = k;
        }
      }
  rep.pass = rep.max_residual <= tolerance;
  return rep;
}

Derivation ad(const LieAlgebra& a, const Vec& y) {
  const int n = a.dim();
  if (y.size() != n)
    fail(ErrorCode::InvalidInput, "ad: vector length does not match algebra dim");
  Mat m = Mat::Zero(n, n);
  for (int col = 0; col < n; ++col) {
    Vec image = bracket(a, y, a.basis_vector(col));
    m.col(col) = image;
  }
  return Derivation{std::move(m)};
}

LeibnizReport validate_derivation(const LieAlgebra& a, const Mat& m,
                                  double tolerance) {
  const int n = a.dim();
  if (m.rows() != n || m.cols() != n)
    fail(ErrorCode::InvalidInput, "validate_derivation: matrix must be dim x dim");
  LeibnizReport rep;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      Vec ei = a.basis_vector(i), ej = a.basis_vector(j);
      Vec lhs = m * bracket(a, ei, ej);
      Vec rhs = bracket(a, m.col(i), ej) + bracket(a, ei, m.col(j));
      rep.max_residual = std::max(rep.max_residual, (lhs - rhs).cwiseAbs().maxCoeff());
    }
  rep.pass = rep.max_residual <= tolerance;
  return rep;
}

Mat killing_form(const LieAlgebra& a) {
  const int n = a.dim();
  std::vector<Mat> ads(n);
  for (int i = 0; i < n; ++i) ads[i] = ad(a, a.basis_vector(i)).matrix;
  Mat k(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double v = (ads[i] * ads[j]).trace();
      k(i, j) = v;
      k(j, i) = v;
    }
  return k;
}

// -- series and structural queries ----------------------------------------

Subspace bracket_span(const LieAlgebra& a, const Subspace& u, const Subspace& v) {
  const int n = a.dim();
  if (u.dim() == 0 || v.dim() == 0) return zero_subspace(n);
  Mat images(n, u.dim() * v.dim());
  int col = 0;
  for (int i = 0; i < u.dim(); ++i)
    for (int j = 0; j < v.dim(); ++j)
      images.col(col++) = bracket(a, u.basis.col(i), v.basis.col(j));
  return span_of(images);
}

namespace {

std::vector<Subspace> iterate_series(const LieAlgebra& a, bool lower_central) {
  std::vector<Subspace> series;
  series.push_back(full_subspace(a.dim()));
  while (true) {
    const Subspace& prev = series.back();
    Subspace next = lower_central ? bracket_span(a, series.front(), prev)
                                  : bracket_span(a, prev, prev);
    if (next.dim() >= prev.dim()) break;  // stabilized
    series.push_back(next);
    if (next.dim() == 0) break;
  }
  return series;
}

}  // namespace

std::vector<Subspace> derived_series(const LieAlgebra& a) {
  return iterate_series(a, /*lower_central=*/false);
}

std::vector<Subspace> lower_central_series(const LieAlgebra& a) {
  return iterate_series(a, /*lower_central=*/true);
}

bool is_solvable(const LieAlgebra& a) { return derived_series(a).back().dim() == 0; }

bool is_nilpotent(const LieAlgebra& a) {
  return lower_central_series(a).back().dim() == 0;
}

Subspace radical(const LieAlgebra& a) {
  const int n = a.dim();
  Subspace derived = bracket_span(a, full_subspace(n), full_subspace(n));
  Subspace rad;
  if (derived.dim() == 0) {
    rad = full_subspace(n);
  } else {
    // x in radical  <=>  K(x, [g,g]) = 0
    Mat constraints = derived.basis.transpose() * killing_form(a);
    Eigen::JacobiSVD<Mat> svd(constraints, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    double smax = sv.size() > 0 ? sv(0) : 0.0;
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
      if (sv(i) > tol::rank * smax && sv(i) > kSvFloor) ++rank;
    rad = Subspace{svd.matrixV().rightCols(n - rank)};
  }

  // post-check: solvable ideal
  Subspace moved = bracket_span(a, full_subspace(n), rad);
  for (int i = 0; i < moved.dim(); ++i)
    if (!rad.contains(moved.basis.col(i)))
      fail(ErrorCode::ValidationFailed, "radical post-check: result is not an ideal");
  if (rad.dim() > 0) {
    SubAlgebra sub = restrict_to(a, rad);
    if (!is_solvable(sub.algebra))
      fail(ErrorCode::ValidationFailed, "radical post-check: result is not solvable");
  }
  return rad;
}

Subspace span_closure(const LieAlgebra& a, const std::vector<Vec>& gens) {
  if (gens.empty()) fail(ErrorCode::InvalidInput, "span_closure: no generators");
  Mat m(a.dim(), gens.size());
  for (std::size_t i = 0; i < gens.size(); ++i) m.col(static_cast<int>(i)) = gens[i];
  Subspace current = span_of(m);
  while (true) {
    Subspace next = subspace_sum(current, bracket_span(a, current, current));
    if (next.dim() == current.dim()) return current;
    current = next;
  }
}

SubAlgebra restrict_to(const LieAlgebra& a, const Subspace& s, double closure_tol) {
  const int k = s.dim();
  double worst = 0.0;
  std::vector<LieAlgebra::StructureEntry> entries;
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) {
      Vec b = bracket(a, s.basis.col(i), s.basis.col(j));
      Vec coords = s.basis.transpose() * b;  // orthonormal basis
      worst = std::max(worst, (b - s.basis * coords).norm());
      for (int m = 0; m < k; ++m)
        if (coords(m) != 0.0) entries.push_back({i, j, m, coords(m)});
    }
  if (worst > closure_tol)
    fail(ErrorCode::ValidationFailed,
         "restrict_to: subspace is not closed under the bracket (residual " +
             std::to_string(worst) + ")");
  if (k == 0) fail(ErrorCode::InvalidInput, "restrict_to: empty subspace");
  return SubAlgebra{LieAlgebra(k, {}, entries), s.basis, worst};
}

}  // namespace liectrl

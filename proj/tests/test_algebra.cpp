#include "doctest.h"

#include <random>

#include "liectrl/algebra.hpp"
#include "liectrl/catalog.hpp"
#include "test_helpers.hpp"

using namespace liectrl;
using liectrl::testing::coords;

namespace {

// independent oracle: Jacobi cyclic sum evaluated straight off the tensor
double jacobi_oracle(const LieAlgebra& a) {
  const int n = a.dim();
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int m = 0; m < n; ++m) {
          double sum = 0.0;
          for (int l = 0; l < n; ++l)
            sum += a.c(j, k, l) * a.c(i, l, m) + a.c(k, i, l) * a.c(j, l, m) +
                   a.c(i, j, l) * a.c(k, l, m);
          worst = std::max(worst, std::abs(sum));
        }
  return worst;
}

Mat so3_matrix(int i) {
  Mat m = Mat::Zero(3, 3);
  if (i == 0) { m(1, 2) = -1; m(2, 1) = 1; }
  if (i == 1) { m(0, 2) = -1; m(2, 0) = 1; }
  if (i == 2) { m(0, 1) = -1; m(1, 0) = 1; }
  return m;
}

}  // namespace

TEST_CASE("bracket on sl(2,R)") {
  LieAlgebra a = catalog::sl2();
  Vec X = coords({1, 0, 0}), Y = coords({0, 1, 0}), Z = coords({0, 0, 1});
  CHECK((bracket(a, X, Y) - (-2.0 * Y)).norm() == 0.0);
  CHECK((bracket(a, X, Z) - 2.0 * Z).norm() == 0.0);
  CHECK((bracket(a, Z, Y) - X).norm() == 0.0);
}

TEST_CASE("bracket of a vector with itself vanishes") {
  std::mt19937_64 rng(7);
  for (const auto& a : {catalog::sl2(), catalog::so3(), catalog::heisenberg()}) {
    Vec x = testing::random_vec(rng, a.dim(), 2.0);
    CHECK(bracket(a, x, x).norm() == 0.0);
  }
}

TEST_CASE("bracket on so(3) matches the matrix commutator") {
  LieAlgebra a = catalog::so3();
  // oracle: commutator of the defining 3x3 matrices
  Mat comm = so3_matrix(0) * so3_matrix(1) - so3_matrix(1) * so3_matrix(0);
  CHECK((comm - (-so3_matrix(2))).norm() == 0.0);
  Vec got = bracket(a, coords({1, 0, 0}), coords({0, 1, 0}));
  CHECK((got - coords({0, 0, -1})).norm() == 0.0);

  // all pairs against the commutator oracle
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      Mat oracle = so3_matrix(i) * so3_matrix(j) - so3_matrix(j) * so3_matrix(i);
      Vec br = bracket(a, a.basis_vector(i), a.basis_vector(j));
      Mat rebuilt = br(0) * so3_matrix(0) + br(1) * so3_matrix(1) + br(2) * so3_matrix(2);
      CHECK((oracle - rebuilt).norm() == doctest::Approx(0.0).epsilon(1e-14));
    }
}

TEST_CASE("bracket rejects dimension mismatch") {
  LieAlgebra a = catalog::sl2();
  CHECK_THROWS_AS(bracket(a, coords({1, 0}), coords({0, 1, 0})), Error);
}

TEST_CASE("structure entries must be canonical (i < j)") {
  CHECK_THROWS_AS(LieAlgebra(2, {}, {{1, 0, 0, 1.0}}), Error);
  CHECK_THROWS_AS(LieAlgebra(2, {}, {{0, 0, 1, 1.0}}), Error);
}

TEST_CASE("validate_jacobi") {
  CHECK(validate_jacobi(catalog::sl2()).max_residual == 0.0);
  CHECK(validate_jacobi(LieAlgebra::abelian(4)).max_residual == 0.0);

  // perturbed sl(2,R): c[0][1][1] += 0.5 breaks the identity
  LieAlgebra bad(3, {}, {{0, 1, 1, -1.5}, {0, 2, 2, 2.0}, {1, 2, 0, -1.0}});
  double oracle = jacobi_oracle(bad);
  CHECK(oracle > tol::alg);
  auto rep = validate_jacobi(bad);
  CHECK_FALSE(rep.pass);
  CHECK(rep.max_residual == doctest::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("ad matrices on sl(2,R)") {
  LieAlgebra a = catalog::sl2();
  Mat adY = ad(a, coords({0, 1, 0})).matrix;
  Mat expected(3, 3);
  expected << 0, 0, -1, 2, 0, 0, 0, 0, 0;
  CHECK((adY - expected).norm() == 0.0);

  CHECK(ad(a, Vec(Vec::Zero(3))).matrix.norm() == 0.0);

  // oracle: bracket table applied column-wise
  Mat adX = ad(a, coords({1, 0, 0})).matrix;
  Mat diag = Vec(coords({0, -2, 2})).asDiagonal();
  CHECK((adX - diag).norm() == 0.0);
}

TEST_CASE("validate_derivation") {
  LieAlgebra a = catalog::sl2();
  CHECK(validate_derivation(a, ad(a, coords({1, 0, 0})).matrix).pass);
  CHECK(validate_derivation(LieAlgebra::abelian(2), Mat::Random(2, 2)).pass);

  // oracle on (X, Y): D[X,Y] = -2Y but [DX,Y] + [X,DY] = -4Y, residual 2
  auto rep = validate_derivation(a, Mat::Identity(3, 3));
  CHECK_FALSE(rep.pass);
  CHECK(rep.max_residual == doctest::Approx(2.0));
}

TEST_CASE("killing form") {
  CHECK(killing_form(LieAlgebra::abelian(3)).norm() == 0.0);

  Mat k = killing_form(catalog::sl2());
  Mat expected(3, 3);
  expected << 8, 0, 0, 0, 0, 4, 0, 4, 0;  // oracle: traces of ad products
  CHECK((k - expected).norm() == doctest::Approx(0.0).epsilon(1e-13));

  Mat k3 = killing_form(catalog::so3());
  CHECK((k3 + 2.0 * Mat::Identity(3, 3)).norm() == doctest::Approx(0.0).epsilon(1e-13));
  Eigen::SelfAdjointEigenSolver<Mat> es(k3);
  CHECK(es.eigenvalues().maxCoeff() < 0.0);  // negative definite
}

TEST_CASE("derived and lower central series") {
  LieAlgebra sl2 = catalog::sl2();
  auto ds = derived_series(sl2);
  CHECK(ds.size() == 1);  // [g, g] = g, stabilizes immediately
  CHECK_FALSE(is_solvable(sl2));
  CHECK_FALSE(is_nilpotent(sl2));

  LieAlgebra ab = LieAlgebra::abelian(3);
  CHECK(is_solvable(ab));
  CHECK(is_nilpotent(ab));

  // [e1, e2] = e2: derived series (2, 1, 0); lower central stalls at 1
  LieAlgebra aff(2, {}, {{0, 1, 1, 1.0}});
  auto d = derived_series(aff);
  REQUIRE(d.size() == 3);
  CHECK(d[0].dim() == 2);
  CHECK(d[1].dim() == 1);
  CHECK(d[2].dim() == 0);
  auto l = lower_central_series(aff);
  CHECK(l.back().dim() == 1);
  CHECK(is_solvable(aff));
  CHECK_FALSE(is_nilpotent(aff));

  LieAlgebra h = catalog::heisenberg();
  CHECK(is_solvable(h));
  CHECK(is_nilpotent(h));
}

TEST_CASE("radical") {
  CHECK(radical(catalog::sl2()).dim() == 0);

  LieAlgebra aff(2, {}, {{0, 1, 1, 1.0}});
  CHECK(radical(aff).dim() == 2);  // radical of a solvable algebra is itself

  // sl(2,R) + R: the radical is the extra line
  LieAlgebra sum(4, {}, {{0, 1, 1, -2.0}, {0, 2, 2, 2.0}, {1, 2, 0, -1.0}});
  Subspace rad = radical(sum);
  CHECK(rad.dim() == 1);
  CHECK(rad.contains(coords({0, 0, 0, 1})));
}

TEST_CASE("span_closure") {
  LieAlgebra a = catalog::sl2();
  std::vector<Vec> all = {a.basis_vector(0), a.basis_vector(1), a.basis_vector(2)};
  CHECK(span_closure(a, all).dim() == 3);

  CHECK(span_closure(a, {coords({0, 1, 0})}).dim() == 1);  // [Y, Y] = 0

  // {Y, Z} generates everything: [Z, Y] = X
  CHECK(span_closure(a, {coords({0, 1, 0}), coords({0, 0, 1})}).dim() == 3);
}

TEST_CASE("restrict_to rejects non-closed subspaces") {
  LieAlgebra a = catalog::sl2();
  Mat m(3, 2);
  m << 1, 0, 0, 1, 0, 0;  // span{X, Y}: [X, Y] = -2Y stays, but [Z..] n/a; closed
  CHECK_NOTHROW(restrict_to(a, span_of(m)));
  Mat m2(3, 2);
  m2 << 0, 0, 1, 0, 0, 1;  // span{Y, Z}: [Z, Y] = X escapes
  CHECK_THROWS_AS(restrict_to(a, span_of(m2)), Error);
}

TEST_CASE("property: bracket bilinear and antisymmetric on random algebras") {
  std::mt19937_64 rng(42);
  std::vector<LieAlgebra> seeds = {catalog::sl2(), catalog::so3(),
                                   catalog::heisenberg(),
                                   catalog::rolling_sphere(1.0).system.algebra};
  for (int trial = 0; trial < 40; ++trial) {
    const LieAlgebra& seed = seeds[trial % seeds.size()];
    LieAlgebra a = testing::transformed_algebra(
        seed, testing::random_orthogonal(rng, seed.dim()));
    CHECK(validate_jacobi(a, 1e-12).pass);

    Vec x = testing::random_vec(rng, a.dim()), y = testing::random_vec(rng, a.dim());
    Vec z = testing::random_vec(rng, a.dim());
    double alpha = testing::random_vec(rng, 1)(0);
    CHECK((bracket(a, x, y) + bracket(a, y, x)).norm() ==
          doctest::Approx(0.0).epsilon(1e-14));
    Vec lhs = bracket(a, Vec(alpha * x + z), y);
    Vec rhs = alpha * bracket(a, x, y) + bracket(a, z, y);
    CHECK((lhs - rhs).norm() <= 1e-12 * std::max(1.0, rhs.norm()));
  }
}

TEST_CASE("property: inner maps are derivations") {
  std::mt19937_64 rng(43);
  for (const auto& a : {catalog::sl2(), catalog::so3(), catalog::heisenberg()}) {
    for (int trial = 0; trial < 20; ++trial) {
      Vec y = testing::random_vec(rng, a.dim(), 3.0);
      CHECK(validate_derivation(a, ad(a, y).matrix).pass);
    }
  }
}

TEST_CASE("property: derivations are Killing-skew") {
  // K(Dx, y) + K(x, Dy) = 0, i.e. D^T K + K D = 0
  std::mt19937_64 rng(44);
  auto check_skew = [](const LieAlgebra& a, const Mat& d) {
    REQUIRE(validate_derivation(a, d).pass);
    Mat k = killing_form(a);
    CHECK((d.transpose() * k + k * d).cwiseAbs().maxCoeff() <= 1e-9);
  };
  for (const auto& a : {catalog::sl2(), catalog::so3()})
    for (int trial = 0; trial < 10; ++trial)
      check_skew(a, ad(a, testing::random_vec(rng, a.dim(), 2.0)).matrix);
  check_skew(catalog::heisenberg(),
             catalog::heisenberg_solvable().system.derivation.matrix);
  check_skew(catalog::rolling_sphere(1.0).system.algebra,
             catalog::rolling_sphere(1.0).system.derivation.matrix);
}

TEST_CASE("property: radical is an ideal; Killing nondegeneracy forces it to zero") {
  std::mt19937_64 rng(45);
  std::vector<LieAlgebra> algebras = {catalog::sl2(), catalog::so3(),
                                      catalog::heisenberg(),
                                      catalog::rolling_sphere(1.0).system.algebra};
  for (const auto& seed : algebras) {
    LieAlgebra a = testing::transformed_algebra(
        seed, testing::random_orthogonal(rng, seed.dim()));
    Subspace rad = radical(a);
    Subspace moved = bracket_span(a, full_subspace(a.dim()), rad);
    for (int i = 0; i < moved.dim(); ++i)
      CHECK(rad.contains(moved.basis.col(i)));

    Mat k = killing_form(a);
    Eigen::SelfAdjointEigenSolver<Mat> es(k);
    double min_abs = es.eigenvalues().cwiseAbs().minCoeff();
    double max_abs = es.eigenvalues().cwiseAbs().maxCoeff();
    if (max_abs > 1e-8 && min_abs > 1e-8 * max_abs) CHECK(rad.dim() == 0);
  }
}

#include "liectrl/catalog.hpp"

namespace liectrl::catalog {

namespace {

Mat mat2(double a, double b, double c, double d) {
  Mat m(2, 2);
  m << a, b, c, d;
  return m;
}

Mat mat3(double a, double b, double c, double d, double e, double f, double g,
         double h, double i) {
  Mat m(3, 3);
  m << a, b, c, d, e, f, g, h, i;
  return m;
}

Vec coords(std::initializer_list<double> values) {
  Vec v(static_cast<int>(values.size()));
  int i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

std::vector<Mat> sl2_embedding() {
  return {mat2(1, 0, 0, -1), mat2(0, 0, 1, 0), mat2(0, 1, 0, 0)};
}

std::vector<Mat> so3_embedding() {
  return {mat3(0, 0, 0, 0, 0, -1, 0, 1, 0), mat3(0, 0, -1, 0, 0, 0, 1, 0, 0),
          mat3(0, -1, 0, 1, 0, 0, 0, 0, 0)};
}

}  // namespace

LieAlgebra sl2() {
  // [X,Y] = -2Y, [X,Z] = 2Z, [Z,Y] = X
  return LieAlgebra(3, {"X", "Y", "Z"},
                    {{0, 1, 1, -2.0}, {0, 2, 2, 2.0}, {1, 2, 0, -1.0}});
}

LieAlgebra so3() {
  return LieAlgebra(3, {"h1", "h2", "h3"},
                    {{0, 1, 2, -1.0}, {0, 2, 1, 1.0}, {1, 2, 0, -1.0}});
}

LieAlgebra heisenberg() {
  return LieAlgebra(3, {"P", "Q", "C"}, {{0, 1, 2, 1.0}});
}

SystemBundle classical_r2_rotation() {
  LieAlgebra a = LieAlgebra::abelian(2);
  Mat d = mat2(0, -1, 1, 0);
  ControlSystem sys{a, Derivation{d}, {coords({1, 0})},
                    ControlRange::restricted_box({{-1.0, 1.0}}), GroupMeta{}};
  FactorSpec f;
  f.type = FactorSpec::Type::Translation;
  f.size = 2;
  f.deriv = FactorSpec::DerivKind::LinearMap;
  return SystemBundle{std::move(sys), {f}, true};
}

SystemBundle sl2_ex_i() {
  LieAlgebra a = sl2();
  Derivation d = ad(a, coords({1, 0, 0}));  // ad(X)
  GroupMeta meta;
  meta.declarations = {{"sl2", true}};  // the center is Z_2
  ControlSystem sys{a, d, {coords({1, 1, 1})},
                    ControlRange::restricted_box({{-1.0, 1.0}}), meta};
  FactorSpec f;
  f.type = FactorSpec::Type::Matrix;
  f.size = 2;
  f.embedding = sl2_embedding();
  f.checks = {MatrixCheck::UnitDeterminant};
  f.deriv = FactorSpec::DerivKind::Inner;
  f.inner_element = coords({1, 0, 0});
  return SystemBundle{std::move(sys), {f}, true};
}

SystemBundle sl2_ex_ii() {
  LieAlgebra a = sl2();
  Derivation d = ad(a, coords({0, 1, 0}));  // ad(Y)
  GroupMeta meta;
  meta.declarations = {{"sl2", true}};
  ControlSystem sys{a, d, {coords({0, 0, 1})},
                    ControlRange::restricted_box({{-1.0, 1.0}}), meta};
  FactorSpec f;
  f.type = FactorSpec::Type::Matrix;
  f.size = 2;
  f.embedding = sl2_embedding();
  f.checks = {MatrixCheck::UnitDeterminant};
  f.deriv = FactorSpec::DerivKind::Inner;
  f.inner_element = coords({0, 1, 0});
  return SystemBundle{std::move(sys), {f}, true};
}

SystemBundle rolling_sphere(double omega) {
  LieAlgebra a(5, {"e1", "e2", "h1", "h2", "h3"},
               {{2, 3, 4, -1.0}, {2, 4, 3, 1.0}, {3, 4, 2, -1.0}});
  Mat d = Mat::Zero(5, 5);
  d(0, 1) = -omega;
  d(1, 0) = omega;
  ControlSystem sys{
      a,
      Derivation{d},
      {coords({1, 0, 0, 0, 0}), coords({0, 0, 1, 0, 0}),
       coords({0, 0, 0, 1, 0}), coords({0, 0, 0, 0, 1})},
      ControlRange::unrestricted(),
      GroupMeta{}};
  FactorSpec plane;
  plane.type = FactorSpec::Type::Translation;
  plane.size = 2;
  plane.deriv = FactorSpec::DerivKind::LinearMap;
  FactorSpec sphere;
  sphere.type = FactorSpec::Type::Matrix;
  sphere.size = 3;
  sphere.embedding = so3_embedding();
  sphere.checks = {MatrixCheck::Orthogonal};
  sphere.deriv = FactorSpec::DerivKind::Trivial;
  return SystemBundle{std::move(sys), {plane, sphere}, true};
}

SystemBundle heisenberg_solvable() {
  LieAlgebra a = heisenberg();
  Mat d = Mat::Zero(3, 3);
  d(0, 1) = -1.0;
  d(1, 0) = 1.0;
  ControlSystem sys{a, Derivation{d}, {coords({1, 0, 1})},
                    ControlRange::restricted_box({{-1.0, 1.0}}), GroupMeta{}};
  FactorSpec f;
  f.type = FactorSpec::Type::Matrix;
  f.size = 3;
  // unipotent upper-triangular model
  f.embedding = {mat3(0, 1, 0, 0, 0, 0, 0, 0, 0), mat3(0, 0, 0, 0, 0, 1, 0, 0, 0),
                 mat3(0, 0, 1, 0, 0, 0, 0, 0, 0)};
  f.deriv = FactorSpec::DerivKind::Trivial;  // placeholder; drift is outer
  return SystemBundle{std::move(sys), {f}, false};
}

SystemBundle product_homogeneous() {
  LieAlgebra a(5, {"e1", "e2", "X", "Y", "Z"},
               {{2, 3, 3, -2.0}, {2, 4, 4, 2.0}, {3, 4, 2, -1.0}});
  Mat d = Mat::Zero(5, 5);
  d(0, 1) = -2.0;
  d(1, 0) = 2.0;
  GroupMeta meta;
  meta.declarations = {{"sl2", true}};
  ControlSystem sys{
      a,
      Derivation{d},
      {coords({1, 0, 0, 0, 0}), coords({0, 0, 1, 0, 0}),
       coords({0, 0, 0, 1, 0}), coords({0, 0, 0, 0, 1})},
      ControlRange::restricted_box({{-1, 1}, {-1, 1}, {-1, 1}, {-1, 1}}),
      meta};
  FactorSpec plane;
  plane.type = FactorSpec::Type::Translation;
  plane.size = 2;
  plane.deriv = FactorSpec::DerivKind::LinearMap;
  FactorSpec matrix;
  matrix.type = FactorSpec::Type::Matrix;
  matrix.size = 2;
  matrix.embedding = sl2_embedding();
  matrix.checks = {MatrixCheck::UnitDeterminant};
  matrix.deriv = FactorSpec::DerivKind::Trivial;
  return SystemBundle{std::move(sys), {plane, matrix}, true};
}

SystemBundle rank_deficient_r2() {
  LieAlgebra a = LieAlgebra::abelian(2);
  Mat d = mat2(1, 0, 0, 2);
  ControlSystem sys{a, Derivation{d}, {coords({1, 0})},
                    ControlRange::restricted_box({{-1.0, 1.0}}), GroupMeta{}};
  FactorSpec f;
  f.type = FactorSpec::Type::Translation;
  f.size = 2;
  f.deriv = FactorSpec::DerivKind::LinearMap;
  return SystemBundle{std::move(sys), {f}, true};
}

}  // namespace liectrl::catalog

#include "doctest.h"

#include <random>

#include "liectrl/catalog.hpp"
#include "liectrl/matfun.hpp"
#include "liectrl/simulator.hpp"
#include "test_helpers.hpp"

using namespace liectrl;
using liectrl::testing::coords;

namespace {

GroupRealization realize(const catalog::SystemBundle& b) {
  REQUIRE(b.drift_realized);
  return make_realization(b.system, b.factor_specs);
}

ControlSignal random_signal(std::mt19937_64& rng, int channels, int pieces,
                            double total) {
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  ControlSignal u;
  for (int i = 0; i < pieces; ++i) {
    Vec v(channels);
    for (int j = 0; j < channels; ++j) v(j) = val(rng);
    u.pieces.push_back({total / pieces, v});
  }
  return u;
}

}  // namespace

TEST_CASE("realization validation accepts the catalog and rejects corruption") {
  for (auto bundle : {catalog::sl2_ex_i(), catalog::sl2_ex_ii(),
                      catalog::classical_r2_rotation(), catalog::rolling_sphere(1.0),
                      catalog::product_homogeneous()})
    CHECK_NOTHROW(make_realization(bundle.system, bundle.factor_specs));

  // corrupt one embedding matrix: no longer a bracket homomorphism
  auto bad = catalog::sl2_ex_ii();
  bad.factor_specs[0].embedding[1](0, 0) += 0.1;
  CHECK_THROWS_AS(make_realization(bad.system, bad.factor_specs), Error);

  // derivation that mixes the plane with the rotation factor
  auto mixed = catalog::rolling_sphere(1.0);
  mixed.system.derivation.matrix(2, 0) = 0.25;
  mixed.system.derivation.matrix(0, 2) = -0.25;
  CHECK_THROWS_AS(make_realization(mixed.system, mixed.factor_specs), Error);

  // the outer drift cannot be declared trivial
  auto heis = catalog::heisenberg_solvable();
  CHECK_THROWS_AS(make_realization(heis.system, heis.factor_specs), Error);

  // inner realization on a translation factor is not supported
  auto classical = catalog::classical_r2_rotation();
  classical.factor_specs[0].deriv = FactorSpec::DerivKind::Inner;
  CHECK_THROWS_AS(make_realization(classical.system, classical.factor_specs), Error);
}

TEST_CASE("inner element recovery by least squares") {
  auto bundle = catalog::sl2_ex_ii();
  bundle.factor_specs[0].inner_element.reset();  // force the solve
  GroupRealization r = make_realization(bundle.system, bundle.factor_specs);
  const auto& f = r.factors()[0];
  Mat y_expected(2, 2);
  y_expected << 0, 0, 1, 0;
  CHECK((f.deriv_data - y_expected).norm() <= 1e-9);
}

TEST_CASE("group_exp") {
  auto rolling = realize(catalog::rolling_sphere(1.0));
  GroupElement e = group_exp(rolling, Vec(Vec::Zero(5)));
  CHECK(distance(rolling, e, identity_element(rolling)) <= 1e-15);

  // quarter turn about z on the rotation factor
  GroupElement g = group_exp(rolling, coords({0, 0, 0, 0, M_PI / 2}));
  Mat expected(3, 3);
  expected << 0, -1, 0, 1, 0, 0, 0, 0, 1;
  CHECK((std::get<Mat>(g.parts[1]) - expected).norm() <= 1e-14);
  CHECK((std::get<Vec>(g.parts[0])).norm() == 0.0);

  auto sl2 = realize(catalog::sl2_ex_ii());
  double t = 0.7;
  GroupElement h = group_exp(sl2, coords({t, 0, 0}));
  Mat expected2(2, 2);
  expected2 << std::exp(t), 0, 0, std::exp(-t);
  CHECK((std::get<Mat>(h.parts[0]) - expected2).norm() <= 1e-13);
}

TEST_CASE("log_chart inverts group_exp") {
  std::mt19937_64 rng(21);
  auto rolling = realize(catalog::rolling_sphere(1.0));
  for (int trial = 0; trial < 20; ++trial) {
    Vec v = testing::random_vec(rng, 5, 0.8);
    auto back = log_chart(rolling, group_exp(rolling, v));
    REQUIRE(back.has_value());
    CHECK((*back - v).norm() <= 1e-9);
  }
}

TEST_CASE("linear_flow fixes time zero and satisfies the exp identity") {
  std::mt19937_64 rng(22);
  auto sl2 = realize(catalog::sl2_ex_ii());
  const Mat& d = catalog::sl2_ex_ii().system.derivation.matrix;

  GroupElement g = group_exp(sl2, coords({0.3, -0.2, 0.5}));
  CHECK(distance(sl2, linear_flow(sl2, 0.0, g), g) <= 1e-15);

  // phi_1(exp Z) = exp(e^D Z)
  GroupElement lhs = linear_flow(sl2, 1.0, group_exp(sl2, coords({0, 0, 1})));
  GroupElement rhs = group_exp(sl2, Vec(expm(d) * coords({0, 0, 1})));
  CHECK(distance(sl2, lhs, rhs) <= 1e-8);

  for (int trial = 0; trial < 100; ++trial) {
    Vec v = testing::random_vec(rng, 3, 1.0);
    double t = testing::random_vec(rng, 1, 2.0)(0);
    GroupElement a = linear_flow(sl2, t, group_exp(sl2, v));
    GroupElement b = group_exp(sl2, Vec(expm(Mat(t * d)) * v));
    CHECK(distance(sl2, a, b) <= 1e-8);
  }
}

TEST_CASE("linear_flow leaves the trivial factor alone") {
  auto rolling = realize(catalog::rolling_sphere(1.0));
  GroupElement g = group_exp(rolling, coords({0.4, -0.1, 0.3, 0.2, -0.5}));
  GroupElement moved = linear_flow(rolling, 1.7, g);
  CHECK((std::get<Mat>(moved.parts[1]) - std::get<Mat>(g.parts[1])).norm() == 0.0);
  // translation factor follows exp(tA)
  Mat rot = expm(Mat(1.7 * catalog::rolling_sphere(1.0).system.derivation.matrix
                               .topLeftCorner(2, 2)));
  CHECK((std::get<Vec>(moved.parts[0]) - rot * std::get<Vec>(g.parts[0])).norm() <=
        1e-12);
}

TEST_CASE("one-parameter group property") {
  std::mt19937_64 rng(23);
  auto sl2 = realize(catalog::sl2_ex_ii());
  auto rolling = realize(catalog::rolling_sphere(1.0));
  for (int trial = 0; trial < 25; ++trial) {
    double t = testing::random_vec(rng, 1, 1.5)(0);
    double s = testing::random_vec(rng, 1, 1.5)(0);
    {
      GroupElement g = group_exp(sl2, testing::random_vec(rng, 3, 0.8));
      GroupElement once = linear_flow(sl2, t + s, g);
      GroupElement twice = linear_flow(sl2, t, linear_flow(sl2, s, g));
      CHECK(distance(sl2, once, twice) <= 1e-9);
    }
    {
      GroupElement g = group_exp(rolling, testing::random_vec(rng, 5, 0.8));
      GroupElement once = linear_flow(rolling, t + s, g);
      GroupElement twice = linear_flow(rolling, t, linear_flow(rolling, s, g));
      CHECK(distance(rolling, once, twice) <= 1e-9);
    }
  }
}

TEST_CASE("flow automorphism residuals") {
  std::mt19937_64 rng(24);
  auto sl2 = realize(catalog::sl2_ex_ii());
  GroupElement e = identity_element(sl2);
  GroupElement g = group_exp(sl2, testing::random_vec(rng, 3, 0.9));
  CHECK(flow_automorphism_check(sl2, 1.2, g, e) <= 1e-12);

  for (int trial = 0; trial < 40; ++trial) {
    GroupElement a = group_exp(sl2, testing::random_vec(rng, 3, 0.9));
    GroupElement b = group_exp(sl2, testing::random_vec(rng, 3, 0.9));
    double t = testing::random_vec(rng, 1, 2.0)(0);
    CHECK(flow_automorphism_check(sl2, t, a, b) <= 1e-8);
  }

  // translation factors: linearity makes this exact up to rounding
  auto classical = realize(catalog::classical_r2_rotation());
  GroupElement x = group_exp(classical, coords({0.5, -1.0}));
  GroupElement y = group_exp(classical, coords({-0.25, 2.0}));
  CHECK(flow_automorphism_check(classical, 0.8, x, y) <= 1e-12);
}

TEST_CASE("flow differential at the identity matches the derivation exponential") {
  auto sl2 = realize(catalog::sl2_ex_ii());
  const Mat& d = catalog::sl2_ex_ii().system.derivation.matrix;
  const double h = 1e-5;
  for (double t : {-1.5, 0.4, 2.0}) {
    Mat jac(3, 3);
    for (int i = 0; i < 3; ++i) {
      Vec ei = Vec::Zero(3);
      ei(i) = 1.0;
      auto plus = log_chart(sl2, linear_flow(sl2, t, group_exp(sl2, Vec(h * ei))));
      auto minus = log_chart(sl2, linear_flow(sl2, t, group_exp(sl2, Vec(-h * ei))));
      REQUIRE(plus.has_value());
      REQUIRE(minus.has_value());
      jac.col(i) = (*plus - *minus) / (2.0 * h);
    }
    CHECK((jac - expm(Mat(t * d))).cwiseAbs().maxCoeff() <= 1e-5);
  }
}

TEST_CASE("step behaviour") {
  // driftless, zero control: exact fixed point
  auto rolling = catalog::rolling_sphere(1.0);
  auto r = realize(rolling);
  GroupElement g = group_exp(r, coords({0.3, 0.1, 0.2, -0.4, 0.9}));
  GroupElement e = identity_element(r);
  Vec zero = Vec::Zero(4);
  GroupElement after = step(r, rolling.system, e, zero, 1e-2);
  CHECK(distance(r, after, e) == 0.0);  // the identity is an equilibrium

  // vector-field direction at the origin of the classical system
  auto classical = catalog::classical_r2_rotation();
  auto rc = realize(classical);
  double dt = 1e-6;
  GroupElement moved = step(rc, classical.system, identity_element(rc),
                            coords({1.0}), dt);
  Vec x = std::get<Vec>(moved.parts[0]);
  CHECK((x / dt - coords({1, 0})).norm() <= 1e-5);

  // unit-determinant renormalization along an SL(2,R) trajectory
  auto sl2 = catalog::sl2_ex_ii();
  auto rs = realize(sl2);
  GroupElement state = identity_element(rs);
  for (int i = 0; i < 2000; ++i)
    state = step(rs, sl2.system, state, coords({0.8}), 1e-3);
  CHECK(std::abs(std::get<Mat>(state.parts[0]).determinant() - 1.0) <= 1e-10);

  // too-large steps are rejected before the state degrades
  CHECK_THROWS_AS(step(rs, sl2.system, identity_element(rs), coords({1.0}), 5.0),
                  Error);
}

TEST_CASE("solve with zero control follows the drift flow") {
  auto bundle = catalog::sl2_ex_ii();
  auto r = realize(bundle);
  GroupElement g0 = group_exp(r, coords({0.2, -0.3, 0.4}));
  Trajectory traj = solve(r, bundle.system, g0, zero_signal(1, 2.0), {1e-3, 100});
  for (const auto& sample : traj.samples) {
    GroupElement expected = linear_flow(r, sample.t, g0);
    CHECK(distance(r, sample.g, expected) <= 1e-7);
  }
}

TEST_CASE("cocycle and concatenation identities") {
  std::mt19937_64 rng(25);
  auto bundle = catalog::sl2_ex_ii();
  auto r = realize(bundle);
  GroupElement e = identity_element(r);
  SolveOptions opt{1e-3, 1 << 30};

  for (int trial = 0; trial < 5; ++trial) {
    ControlSignal u = random_signal(rng, 1, 6, 1.5);

    // phi_{t+s, u}(g) = phi_{t, theta_s u}(phi_{s, u}(g)): head then tail
    GroupElement g0 = group_exp(r, testing::random_vec(rng, 3, 0.4));
    GroupElement full = solve(r, bundle.system, g0, u, opt).endpoint();
    ControlSignal head = u;
    head.pieces.resize(2);
    GroupElement mid = solve(r, bundle.system, g0, head, opt).endpoint();
    GroupElement rest = solve(r, bundle.system, mid,
                              tail_from(u, head.total_duration()), opt)
                            .endpoint();
    CHECK(distance(r, full, rest) <= 1e-6);

    // concatenation of two independent controls
    ControlSignal u1 = random_signal(rng, 1, 4, 0.8);
    ControlSignal u2 = random_signal(rng, 1, 4, 0.7);
    GroupElement via = solve(r, bundle.system,
                             solve(r, bundle.system, g0, u1, opt).endpoint(), u2, opt)
                           .endpoint();
    GroupElement direct = solve(r, bundle.system, g0, concat(u1, u2), opt).endpoint();
    CHECK(distance(r, via, direct) <= 1e-6);
  }
}

TEST_CASE("solution translation identity") {
  std::mt19937_64 rng(26);
  for (auto bundle : {catalog::sl2_ex_ii(), catalog::rolling_sphere(1.0)}) {
    auto r = realize(bundle);
    GroupElement e = identity_element(r);
    SolveOptions opt{1e-3, 1 << 30};
    int channels = bundle.system.channels();
    for (int trial = 0; trial < 3; ++trial) {
      ControlSignal u = random_signal(rng, channels, 5, 1.2);
      GroupElement g0 = group_exp(r, testing::random_vec(rng, r.algebra_dim(), 0.5));
      GroupElement lhs = solve(r, bundle.system, g0, u, opt).endpoint();
      GroupElement rhs = multiply(
          r, solve(r, bundle.system, e, u, opt).endpoint(),
          linear_flow(r, u.total_duration(), g0));
      CHECK(distance(r, lhs, rhs) <= 1e-6);
    }
  }
}

TEST_CASE("matrix invariants hold along long trajectories") {
  std::mt19937_64 rng(27);
  for (auto bundle : {catalog::sl2_ex_ii(), catalog::rolling_sphere(1.0)}) {
    auto r = realize(bundle);
    ControlSignal u = random_signal(rng, bundle.system.channels(), 10, 5.0);
    Trajectory traj =
        solve(r, bundle.system, identity_element(r), u, {1e-3, 500});
    for (const auto& sample : traj.samples)
      CHECK(invariant_residual(r, sample.g) <= 1e-7);
  }
}

TEST_CASE("reverse system relations") {
  auto bundle = catalog::sl2_ex_i();
  auto twice = reverse_system(reverse_system(bundle.system));
  CHECK((twice.derivation.matrix - bundle.system.derivation.matrix).norm() == 0.0);

  // the reverse spectrum is the mirror image
  Spectrum fwd = spectrum(bundle.system.derivation);
  Spectrum bwd = spectrum(reverse_system(bundle.system).derivation);
  for (const auto& c : fwd.classes) {
    bool found = false;
    for (const auto& cr : bwd.classes)
      if (std::abs(cr.value - (-std::conj(c.value))) <= 1e-9 ||
          std::abs(cr.value - (-c.value)) <= 1e-9)
        found = found || cr.multiplicity == c.multiplicity;
    CHECK(found);
  }

  DDecomposition f = d_decomposition(bundle.system.derivation);
  DDecomposition b = d_decomposition(reverse_system(bundle.system).derivation);
  CHECK(same_subspace(b.g_plus, f.g_minus));
  CHECK(same_subspace(b.g_minus, f.g_plus));
}

TEST_CASE("reverse endpoints and inverse solutions") {
  std::mt19937_64 rng(28);
  auto bundle = catalog::sl2_ex_ii();
  auto r = realize(bundle);
  auto rev_sys = reverse_system(bundle.system);
  auto rev_r = reverse_realization(r);
  GroupElement e = identity_element(r);
  SolveOptions opt{1e-3, 1 << 30};

  for (int trial = 0; trial < 5; ++trial) {
    ControlSignal u = random_signal(rng, 1, 5, 1.0);
    double tau = u.total_duration();
    GroupElement h = solve(r, bundle.system, e, u, opt).endpoint();

    // reverse-system endpoint under w(s) = -u(tau - s)
    GroupElement star =
        solve(rev_r, rev_sys, e, reversed_negated(u), opt).endpoint();
    GroupElement expected = linear_flow(r, -tau, inverse(r, h));
    CHECK(distance(r, star, expected) <= 1e-6);

    // running the reversed control from the endpoint returns to the start
    GroupElement g0 = group_exp(r, testing::random_vec(rng, 3, 0.4));
    GroupElement end = solve(r, bundle.system, g0, u, opt).endpoint();
    GroupElement back =
        solve(rev_r, rev_sys, end, reversed_negated(u), opt).endpoint();
    CHECK(distance(r, back, g0) <= 1e-5);
  }
}

TEST_CASE("signal helpers") {
  ControlSignal u{{{0.5, coords({1.0})}, {0.5, coords({-1.0})}, {1.0, coords({0.25})}}};
  CHECK(u.total_duration() == doctest::Approx(2.0));

  ControlSignal tail = tail_from(u, 0.75);
  CHECK(tail.total_duration() == doctest::Approx(1.25));
  CHECK(tail.pieces[0].value(0) == -1.0);
  CHECK(tail.pieces[0].duration == doctest::Approx(0.25));

  ControlSignal rev = reversed_negated(u);
  CHECK(rev.pieces[0].value(0) == -0.25);
  CHECK(rev.pieces[2].value(0) == -1.0);
  CHECK(rev.total_duration() == doctest::Approx(2.0));
}

#pragma once

#include <vector>

#include "liectrl/checker.hpp"
#include "liectrl/simulator.hpp"

namespace liectrl::catalog {

/// A control system together with its group model. `drift_realized` is
/// false when the drift cannot be realized by the supported per-factor
/// derivation kinds (the factor geometry is still usable for embedding
/// validation).
struct SystemBundle {
  ControlSystem system;
  std::vector<FactorSpec> factor_specs;
  bool drift_realized = true;
};

LieAlgebra sl2();
LieAlgebra so3();
LieAlgebra heisenberg();

/// Planar system with rotational drift and a single force channel.
SystemBundle classical_r2_rotation();
/// Hyperbolic inner drift on SL(2,R); rank holds but the spectrum is {0, +-2}.
SystemBundle sl2_ex_i();
/// Nilpotent inner drift on SL(2,R); spectrum {0}, rank holds.
SystemBundle sl2_ex_ii();
/// Sphere rolling on a plane revolving at angular velocity omega:
/// R^2 x SO(3) with rotational drift on the plane and full rotational control.
SystemBundle rolling_sphere(double omega = 1.0);
/// Heisenberg group with a rotational derivation on the generator plane;
/// solvable, and the drift is an outer derivation (no realization).
SystemBundle heisenberg_solvable();
/// Direct product R^2 x SL(2,R): linear on the plane, driftless
/// right-invariant on the matrix factor.
SystemBundle product_homogeneous();
/// Diagonal drift on R^2 with a single channel; the rank condition fails.
SystemBundle rank_deficient_r2();

}  // namespace liectrl::catalog

#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "liectrl/checker.hpp"
#include "liectrl/types.hpp"

namespace liectrl {

enum class MatrixCheck { UnitDeterminant, Orthogonal };

/// User-facing description of one group factor; factors cover consecutive
/// ranges of the algebra basis in order.
struct FactorSpec {
  enum class Type { Translation, Matrix };
  enum class DerivKind { LinearMap, Inner, Trivial };

  Type type = Type::Translation;
  int size = 0;                     // translation dimension, or matrix order n
  std::vector<Mat> embedding;      // matrix factors: one n x n per basis index
  std::vector<MatrixCheck> checks;  // matrix factors
  DerivKind deriv = DerivKind::Trivial;
  std::optional<Vec> inner_element;  // factor-local coordinates of Y0 (optional)
};

struct RealizedFactor {
  FactorSpec::Type type;
  int offset = 0;   // first covered algebra basis index
  int subdim = 0;   // number of covered indices
  int n = 0;        // matrix order (matrix factors)
  std::vector<Mat> embedding;
  std::vector<MatrixCheck> checks;
  FactorSpec::DerivKind deriv = FactorSpec::DerivKind::Trivial;
  Mat deriv_data;  // LinearMap: subdim x subdim; Inner: n x n Y0; Trivial: empty
  // control field values at the identity, per channel
  std::vector<Vec> ctrl_translation;  // translation factors
  std::vector<Mat> ctrl_matrix;       // matrix factors (embedded)
};

/// Matrix-group / translation-factor model of the group, validated against
/// the system: embeddings are bracket homomorphisms, factors do not
/// interact, and the derivation is realized per factor.
class GroupRealization {
 public:
  GroupRealization(std::vector<RealizedFactor> factors, int algebra_dim,
                   int channels)
      : factors_(std::move(factors)), dim_(algebra_dim), channels_(channels) {}

  const std::vector<RealizedFactor>& factors() const { return factors_; }
  int algebra_dim() const { return dim_; }
  int channels() const { return channels_; }

 private:
  std::vector<RealizedFactor> factors_;
  int dim_ = 0;
  int channels_ = 0;
};

/// Builds and validates a realization. Throws ValidationFailed on embedding
/// or derivation mismatches and UnsupportedRealization when a factor's
/// derivation cannot be realized as LinearMap / Inner / Trivial.
GroupRealization make_realization(const ControlSystem& sys,
                                  const std::vector<FactorSpec>& specs);

/// Same realization with the drift reversed (negated per-factor derivation).
GroupRealization reverse_realization(const GroupRealization& r);

/// Same system with the derivation negated.
ControlSystem reverse_system(const ControlSystem& sys);

struct GroupElement {
  std::vector<std::variant<Vec, Mat>> parts;
};

GroupElement identity_element(const GroupRealization& r);
GroupElement multiply(const GroupRealization& r, const GroupElement& a,
                      const GroupElement& b);
GroupElement inverse(const GroupRealization& r, const GroupElement& g);
/// Sum over factors of Euclidean / Frobenius distances.
double distance(const GroupRealization& r, const GroupElement& a,
                const GroupElement& b);
/// Max violation of the declared matrix-factor invariants.
double invariant_residual(const GroupRealization& r, const GroupElement& g);

/// Ambient coordinates: translation entries and row-major matrix entries,
/// factor by factor.
Vec flatten(const GroupRealization& r, const GroupElement& g);

GroupElement group_exp(const GroupRealization& r, const Vec& v);

/// Algebra coordinates of the principal logarithm, factor by factor.
/// nullopt when a matrix-factor log is ill-conditioned or falls outside the
/// embedded subalgebra.
std::optional<Vec> log_chart(const GroupRealization& r, const GroupElement& g);

/// Drift flow: translation factors x -> exp(tA)x, matrix factors
/// g -> exp(tY0) g exp(-tY0), trivial factors fixed.
GroupElement linear_flow(const GroupRealization& r, double t,
                         const GroupElement& g);

/// || phi_t(g h) - phi_t(g) phi_t(h) ||.
double flow_automorphism_check(const GroupRealization& r, double t,
                               const GroupElement& g, const GroupElement& h);

struct ControlSignal {
  struct Piece {
    double duration;
    Vec value;
  };
  std::vector<Piece> pieces;

  double total_duration() const;
  int channels() const { return pieces.empty() ? 0 : static_cast<int>(pieces.front().value.size()); }
};

ControlSignal zero_signal(int channels, double duration);
ControlSignal concat(const ControlSignal& first, const ControlSignal& then);
/// Shifted signal u(. + s) restricted to [0, T - s].
ControlSignal tail_from(const ControlSignal& u, double s);
/// The control driving the reverse system along the reversed trajectory:
/// w(r) = -u(T - r).
ControlSignal reversed_negated(const ControlSignal& u);

/// One classical 4th-order step of the controlled field, with invariant
/// renormalization. Throws StepRejected when the post-step invariant
/// residual exceeds 1e-6.
GroupElement step(const GroupRealization& r, const ControlSystem& sys,
                  const GroupElement& g, const Vec& u, double dt);

struct Sample {
  double t;
  GroupElement g;
};

struct Trajectory {
  std::vector<Sample> samples;
  const GroupElement& endpoint() const { return samples.back().g; }
  double duration() const { return samples.back().t; }
};

struct SolveOptions {
  double dt = 1e-3;
  int stride = 10;  // record every stride-th step (piece ends always recorded)
};

Trajectory solve(const GroupRealization& r, const ControlSystem& sys,
                 const GroupElement& g0, const ControlSignal& u,
                 const SolveOptions& opt = {});

}  // namespace liectrl

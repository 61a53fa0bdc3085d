#pragma once

#include <optional>
#include <string>
#include <vector>

#include "liectrl/algebra.hpp"
#include "liectrl/decomposition.hpp"
#include "liectrl/types.hpp"

namespace liectrl {

struct GroupMeta {
  struct Declaration {
    std::string factor_id;
    bool finite_center = true;
  };
  bool connected = true;  // always required
  std::optional<bool> simply_connected_hint;
  std::vector<Declaration> declarations;
};

/// Control range: per-channel bounds with 0 strictly inside, or unrestricted.
struct ControlRange {
  std::optional<std::vector<std::pair<double, double>>> bounds;

  bool restricted() const { return bounds.has_value(); }
  static ControlRange unrestricted() { return ControlRange{std::nullopt}; }
  static ControlRange restricted_box(std::vector<std::pair<double, double>> b) {
    return ControlRange{std::move(b)};
  }
};

struct ControlSystem {
  LieAlgebra algebra;
  Derivation derivation;
  std::vector<Vec> control_fields;  // values of the invariant fields at the identity
  ControlRange range;
  GroupMeta meta;

  int channels() const { return static_cast<int>(control_fields.size()); }
};

/// Structural validation: field dimensions, Leibniz rule, range bounds.
/// Throws InvalidInput / ValidationFailed.
void validate_system(const ControlSystem& sys);

struct AdRankResult {
  bool holds = false;
  int achieved_dim = 0;
  Mat spanning_set;  // orthonormal basis of the achieved span
};

/// Rank of span{ D^k b_j : 0 <= k < dim, j }; holds iff the span is the
/// whole algebra.
AdRankResult ad_rank(const ControlSystem& sys);

/// Classical controllability-matrix test: rank [B, AB, ..., A^{d-1}B] = d.
bool kalman_rank(const Mat& A, const Mat& B);

enum class FscStatus { Certified, Declared, DeclaredInfinite, Unknown };

struct FscCertificate {
  FscStatus status = FscStatus::Unknown;
  std::string reason;
};

/// Finite-semisimple-center certificate: decidable cases are solvable
/// algebras and compact-type semisimple quotients; otherwise falls back to
/// user declarations.
FscCertificate fsc_certificate(const ControlSystem& sys);

enum class Conclusion { Controllable, SufficientConditionFails, Inconclusive };

struct Verdict {
  AdRankResult ad_rank;
  DDecomposition decomposition;
  bool spectrum_all_zero_real = false;
  std::vector<EigenvalueClass> offending_eigenvalues;
  FscCertificate fsc;
  Conclusion conclusion = Conclusion::Inconclusive;
  std::vector<std::string> failed_hypotheses;
  std::vector<std::string> missing_certificates;
  Subspace guaranteed_reachable;     // g^{+,0}, contingent on the rank hypothesis
  Subspace guaranteed_co_reachable;  // g^{-,0}, via the reverse system
  std::vector<std::string> notes;
};

Verdict controllability_verdict(const ControlSystem& sys);

enum class LeviClass { Trivial, CompactType, NoncompactType };

struct G0StructureReport {
  int g0_dim = 0;
  int radical_dim = 0;
  int levi_dim = 0;
  int killing_negative = 0;  // signature of the semisimple quotient
  int killing_positive = 0;
  int killing_zero = 0;
  LeviClass levi_class = LeviClass::Trivial;
  bool d_maps_g0_into_radical = true;  // verified when compact type
  double d_into_radical_residual = 0.0;
};

/// Radical / semisimple-quotient structure of the generalized kernel, with
/// the compact-type consistency check D(g0) ⊆ r.
G0StructureReport g0_structure_report(const ControlSystem& sys);

const char* to_string(Conclusion c);
const char* to_string(FscStatus s);
const char* to_string(LeviClass c);

}  // namespace liectrl

#include "liectrl/checker.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace liectrl {

void validate_system(const ControlSystem& sys) {
  const int n = sys.algebra.dim();
  if (!sys.meta.connected)
    fail(ErrorCode::InvalidInput, "system: the group must be connected");
  if (sys.control_fields.empty())
    fail(ErrorCode::InvalidInput, "system: control_fields must be nonempty");
  for (const auto& b : sys.control_fields)
    if (b.size() != n)
      fail(ErrorCode::InvalidInput, "system: control field length does not match dim");
  if (sys.derivation.matrix.rows() != n || sys.derivation.matrix.cols() != n)
    fail(ErrorCode::InvalidInput, "system: derivation must be dim x dim");
  if (sys.range.restricted()) {
    const auto& bounds = *sys.range.bounds;
    if (static_cast<int>(bounds.size()) != sys.channels())
      fail(ErrorCode::InvalidInput, "system: one bound pair per channel required");
    for (const auto& [lo, hi] : bounds)
      if (!(lo < 0.0 && 0.0 < hi))
        fail(ErrorCode::InvalidInput,
             "system: restricted bounds must satisfy lo < 0 < hi");
  }
  auto leibniz = validate_derivation(sys.algebra, sys.derivation.matrix);
  if (!leibniz.pass)
    fail(ErrorCode::ValidationFailed,
         "system: derivation violates the Leibniz rule (residual " +
             std::to_string(leibniz.max_residual) + ")");
}

AdRankResult ad_rank(const ControlSystem& sys) {
  const int n = sys.algebra.dim();
  const int m = sys.channels();
  Mat columns(n, n * m);
  int col = 0;
  for (const auto& b : sys.control_fields) {
    Vec v = b;
    for (int k = 0; k < n; ++k) {
      columns.col(col++) = v;
      v = sys.derivation.matrix * v;
    }
  }
  Subspace span = span_of(columns);
  return AdRankResult{span.dim() == n, span.dim(), span.basis};
}

bool kalman_rank(const Mat& A, const Mat& B) {
  if (A.rows() != A.cols())
    fail(ErrorCode::InvalidInput, "kalman_rank: A must be square");
  if (B.rows() != A.rows())
    fail(ErrorCode::InvalidInput, "kalman_rank: B row count must match A");
  const int d = static_cast<int>(A.rows());
  const int m = static_cast<int>(B.cols());
  Mat ctrl(d, d * m);
  Mat block = B;
  for (int k = 0; k < d; ++k) {
    ctrl.middleCols(k * m, m) = block;
    block = A * block;
  }
  return span_of(ctrl).dim() == d;
}

namespace {

struct Quotient {
  LieAlgebra algebra;
  Mat complement;  // orthonormal basis of a complement of the ideal
};

// Quotient of `a` by an ideal: bracket of complement coordinates followed by
// projection along the ideal.
Quotient quotient_by(const LieAlgebra& a, const Subspace& ideal) {
  const int n = a.dim();
  const int r = ideal.dim();
  if (r == 0) return Quotient{a, Mat::Identity(n, n)};

  Eigen::JacobiSVD<Mat> svd(ideal.basis.transpose(), Eigen::ComputeFullV);
  Mat complement = svd.matrixV().rightCols(n - r);

  Mat change(n, n);  // [ideal | complement], invertible
  change << ideal.basis, complement;
  Eigen::PartialPivLU<Mat> lu(change);

  const int q = n - r;
  std::vector<LieAlgebra::StructureEntry> entries;
  for (int i = 0; i < q; ++i)
    for (int j = i + 1; j < q; ++j) {
      Vec b = bracket(a, complement.col(i), complement.col(j));
      Vec coords = lu.solve(b);
      for (int k = 0; k < q; ++k) {
        double v = coords(r + k);
        if (std::abs(v) > 1e-14) entries.push_back({i, j, k, v});
      }
    }
  return Quotient{LieAlgebra(q, {}, entries), complement};
}

struct Signature {
  int negative = 0, positive = 0, zero = 0;
};

Signature killing_signature(const LieAlgebra& a) {
  Mat K = killing_form(a);
  Eigen::SelfAdjointEigenSolver<Mat> es(K);
  const auto& ev = es.eigenvalues();
  double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  Signature sig;
  for (int i = 0; i < ev.size(); ++i) {
    if (ev(i) < -1e-8 * scale) ++sig.negative;
    else if (ev(i) > 1e-8 * scale) ++sig.positive;
    else ++sig.zero;
  }
  return sig;
}

}  // namespace

FscCertificate fsc_certificate(const ControlSystem& sys) {
  if (is_solvable(sys.algebra)) return {FscStatus::Certified, "solvable"};

  Subspace rad = radical(sys.algebra);
  Quotient quot = quotient_by(sys.algebra, rad);
  Signature sig = killing_signature(quot.algebra);
  if (sig.negative == quot.algebra.dim() && sig.positive == 0 && sig.zero == 0)
    return {FscStatus::Certified, "compact-type semisimple factors"};

  if (!sys.meta.declarations.empty()) {
    bool all_finite = std::all_of(
        sys.meta.declarations.begin(), sys.meta.declarations.end(),
        [](const GroupMeta::Declaration& d) { return d.finite_center; });
    if (all_finite) return {FscStatus::Declared, "user declarations"};
    return {FscStatus::DeclaredInfinite, "a factor is declared to have infinite center"};
  }
  return {FscStatus::Unknown,
          "semisimple factors present and no center declaration supplied"};
}

Verdict controllability_verdict(const ControlSystem& sys) {
  validate_system(sys);
  Verdict v;
  v.ad_rank = ad_rank(sys);
  v.decomposition = d_decomposition(sys.derivation);
  v.spectrum_all_zero_real = v.decomposition.spec.all_zero_real();
  for (const auto& cls : v.decomposition.spec.classes)
    if (!cls.zero_real()) v.offending_eigenvalues.push_back(cls);
  v.fsc = fsc_certificate(sys);

  if (!v.ad_rank.holds) v.failed_hypotheses.push_back("ad_rank");
  if (!v.spectrum_all_zero_real) v.failed_hypotheses.push_back("spectrum");
  if (v.fsc.status == FscStatus::DeclaredInfinite)
    v.failed_hypotheses.push_back("finite_semisimple_center");
  if (v.fsc.status == FscStatus::Unknown)
    v.missing_certificates.push_back("finite_semisimple_center");

  if (!v.failed_hypotheses.empty()) {
    v.conclusion = Conclusion::SufficientConditionFails;
  } else if (!v.missing_certificates.empty()) {
    v.conclusion = Conclusion::Inconclusive;
  } else {
    v.conclusion = Conclusion::Controllable;
  }

  v.guaranteed_reachable =
      subspace_sum(v.decomposition.g_plus, v.decomposition.g_zero);
  v.guaranteed_co_reachable =
      subspace_sum(v.decomposition.g_minus, v.decomposition.g_zero);

  v.notes.push_back(
      "local-controllability hypothesis (identity interior to the small-time "
      "reachable set) is certified through the ad-rank condition; rank failure "
      "means the hypothesis is not certified, not that it fails");
  if (sys.range.restricted())
    v.notes.push_back(
        "restricted range: identity interior to some A_tau is equivalent to "
        "openness of the reachable set");
  v.notes.push_back(
      "the criterion is sufficient only; no non-controllability conclusion is drawn");
  return v;
}

G0StructureReport g0_structure_report(const ControlSystem& sys) {
  G0StructureReport rep;
  DDecomposition dec = d_decomposition(sys.derivation);
  const Subspace& g0 = dec.g_kernel;
  rep.g0_dim = g0.dim();
  if (rep.g0_dim == 0) return rep;

  SubAlgebra sub = restrict_to(sys.algebra, g0);
  Subspace rad_local = radical(sub.algebra);
  rep.radical_dim = rad_local.dim();
  rep.levi_dim = rep.g0_dim - rep.radical_dim;
  if (rep.levi_dim == 0) {
    rep.levi_class = LeviClass::Trivial;
    return rep;
  }

  Quotient quot = quotient_by(sub.algebra, rad_local);
  Signature sig = killing_signature(quot.algebra);
  rep.killing_negative = sig.negative;
  rep.killing_positive = sig.positive;
  rep.killing_zero = sig.zero;
  rep.levi_class = (sig.negative == rep.levi_dim && sig.positive == 0 && sig.zero == 0)
                       ? LeviClass::CompactType
                       : LeviClass::NoncompactType;

  if (rep.levi_class == LeviClass::CompactType) {
    // compact type forces the restricted derivation to map into the radical
    Mat rad_ambient = sub.basis * rad_local.basis;
    Subspace rad_space{rad_ambient};
    double worst = 0.0;
    for (int i = 0; i < g0.dim(); ++i) {
      Vec image = sys.derivation.matrix * g0.basis.col(i);
      Vec residual = image;
      if (rad_space.dim() > 0)
        residual -= rad_space.basis * (rad_space.basis.transpose() * image);
      worst = std::max(worst, residual.norm());
    }
    rep.d_into_radical_residual = worst;
    rep.d_maps_g0_into_radical = worst <= 1e-9;
    if (!rep.d_maps_g0_into_radical)
      fail(ErrorCode::ValidationFailed,
           "g0 structure: compact-type quotient but D(g0) is not inside the "
           "radical (residual " + std::to_string(worst) + ")");
  }
  return rep;
}

const char* to_string(Conclusion c) {
  switch (c) {
    case Conclusion::Controllable: return "Controllable";
    case Conclusion::SufficientConditionFails: return "SufficientConditionFails";
    case Conclusion::Inconclusive: return "Inconclusive";
  }
  return "?";
}

const char* to_string(FscStatus s) {
  switch (s) {
    case FscStatus::Certified: return "certified";
    case FscStatus::Declared: return "declared";
    case FscStatus::DeclaredInfinite: return "declared_infinite";
    case FscStatus::Unknown: return "unknown";
  }
  return "?";
}

const char* to_string(LeviClass c) {
  switch (c) {
    case LeviClass::Trivial: return "trivial";
    case LeviClass::CompactType: return "compact type";
    case LeviClass::NoncompactType: return "noncompact type";
  }
  return "?";
}

}  // namespace liectrl

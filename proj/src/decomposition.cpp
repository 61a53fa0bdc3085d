#include "liectrl/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace liectrl {

int Spectrum::total_multiplicity() const {
  int t = 0;
  for (const auto& c : classes) t += c.multiplicity;
  return t;
}

bool Spectrum::all_zero_real(double t) const {
  return std::all_of(classes.begin(), classes.end(),
                     [t](const EigenvalueClass& c) { return c.zero_real(t); });
}

namespace {

constexpr double kSvFloor = 1e-13;  // absolute guard against all-noise inputs

// Orthonormal basis of ker(M), rank decided relative to the largest singular value.
Subspace kernel_of(const Mat& m, double rel_tol = tol::rank) {
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double smax = sv.size() > 0 ? sv(0) : 0.0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > rel_tol * smax && sv(i) > kSvFloor) ++rank;
  return Subspace{svd.matrixV().rightCols(static_cast<int>(m.cols()) - rank)};
}

CMat complex_kernel_of(const CMat& m, double rel_tol = tol::rank) {
  Eigen::JacobiSVD<CMat> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double smax = sv.size() > 0 ? sv(0) : 0.0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > rel_tol * smax && sv(i) > kSvFloor) ++rank;
  return svd.matrixV().rightCols(static_cast<int>(m.cols()) - rank);
}

struct Cluster {
  Complex value;
  int multiplicity;
};

std::vector<Cluster> cluster_eigenvalues(const CVec& raw, double classification_tol) {
  std::vector<Complex> vals(raw.data(), raw.data() + raw.size());
  std::sort(vals.begin(), vals.end(), [](Complex a, Complex b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  std::vector<Cluster> clusters;
  for (Complex v : vals) {
    bool joined = false;
    for (auto& c : clusters) {
      if (std::abs(v - c.value) <= tol::cluster) {
        c.value = (c.value * static_cast<double>(c.multiplicity) + v) /
                  static_cast<double>(c.multiplicity + 1);
        ++c.multiplicity;
        joined = true;
        break;
      }
    }
    if (!joined) clusters.push_back({v, 1});
  }
  for (auto& c : clusters) {
    double re = std::abs(c.value.real()) <= classification_tol ? 0.0 : c.value.real();
    double im = std::abs(c.value.imag()) <= classification_tol ? 0.0 : c.value.imag();
    c.value = Complex(re, im);
  }
  return clusters;
}

// Generalized eigenspace of the clustered value (real invariant form; the
// conjugate pair is merged for non-real values). Powers are computed on a
// normalized matrix so singular-value magnitudes stay bounded.
Subspace real_generalized_eigenspace(const Mat& d, Complex value) {
  const int n = static_cast<int>(d.rows());
  Mat base;
  if (value.imag() == 0.0) {
    base = d - value.real() * Mat::Identity(n, n);
  } else {
    double re = value.real();
    double abs2 = std::norm(value);
    base = d * d - 2.0 * re * d + abs2 * Mat::Identity(n, n);
  }
  double scale = std::max(1.0, base.cwiseAbs().maxCoeff());
  base /= scale;
  Mat power = Mat::Identity(n, n);
  for (int i = 0; i < n; ++i) power = power * base;
  return kernel_of(power);
}

CMat complex_generalized_eigenspace(const Mat& d, Complex value) {
  const int n = static_cast<int>(d.rows());
  CMat base = d.cast<Complex>() - value * CMat::Identity(n, n);
  double scale = std::max(1.0, base.cwiseAbs().maxCoeff());
  base /= scale;
  CMat power = CMat::Identity(n, n);
  for (int i = 0; i < n; ++i) power = power * base;
  return complex_kernel_of(power);
}

CVec complex_bracket(const LieAlgebra& a, const CVec& x, const CVec& y) {
  const int n = a.dim();
  CVec out = CVec::Zero(n);
  for (int i = 0; i < n; ++i) {
    if (x(i) == Complex(0, 0)) continue;
    for (int j = 0; j < n; ++j) {
      if (y(j) == Complex(0, 0) || i == j) continue;
      Complex xy = x(i) * y(j);
      for (int k = 0; k < n; ++k) out(k) += xy * a.c(i, j, k);
    }
  }
  return out;
}

}  // namespace

Spectrum spectrum(const Derivation& d, double classification_tol) {
  const Mat& m = d.matrix;
  if (m.rows() != m.cols() || m.rows() == 0)
    fail(ErrorCode::InvalidInput, "spectrum: matrix must be square and nonempty");
  Eigen::EigenSolver<Mat> solver(m, /*computeEigenvectors=*/false);
  auto clusters = cluster_eigenvalues(solver.eigenvalues(), classification_tol);

  Spectrum s;
  s.tol_used = classification_tol;
  for (const auto& c : clusters)
    for (int i = 0; i < c.multiplicity; ++i) s.raw.push_back(c.value);

  // merge conjugate pairs into Im >= 0 classes
  std::vector<bool> used(clusters.size(), false);
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    if (used[i]) continue;
    const auto& ci = clusters[i];
    if (ci.value.imag() == 0.0) {
      s.classes.push_back({ci.value, ci.multiplicity});
      used[i] = true;
      continue;
    }
    std::size_t partner = clusters.size();
    for (std::size_t j = 0; j < clusters.size(); ++j) {
      if (j == i || used[j]) continue;
      if (std::abs(clusters[j].value - std::conj(ci.value)) <= tol::cluster) {
        partner = j;
        break;
      }
    }
    if (partner == clusters.size())
      fail(ErrorCode::ValidationFailed,
           "spectrum: non-real eigenvalue without a conjugate partner");
    if (clusters[partner].multiplicity != ci.multiplicity)
      fail(ErrorCode::ValidationFailed,
           "spectrum: conjugate pair with mismatched multiplicities");
    Complex rep = ci.value.imag() > 0 ? ci.value : std::conj(ci.value);
    s.classes.push_back({rep, 2 * ci.multiplicity});
    used[i] = used[partner] = true;
  }
  std::sort(s.classes.begin(), s.classes.end(),
            [](const EigenvalueClass& a, const EigenvalueClass& b) {
              if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
              return a.value.imag() < b.value.imag();
            });
  return s;
}

Subspace generalized_eigenspace(const Derivation& d, Complex alpha, double match_tol) {
  Spectrum s = spectrum(d);
  for (const auto& c : s.classes) {
    if (std::abs(alpha - c.value) <= match_tol ||
        std::abs(alpha - std::conj(c.value)) <= match_tol) {
      return real_generalized_eigenspace(d.matrix, c.value);
    }
  }
  fail(ErrorCode::NotAnEigenvalue,
       "generalized_eigenspace: value is not in the computed spectrum");
}

DDecomposition d_decomposition(const Derivation& d, double classification_tol) {
  const int n = static_cast<int>(d.matrix.rows());
  DDecomposition dec;
  dec.spec = spectrum(d, classification_tol);
  dec.g_plus = zero_subspace(n);
  dec.g_minus = zero_subspace(n);
  dec.g_zero = zero_subspace(n);
  dec.g_kernel = zero_subspace(n);

  for (const auto& cls : dec.spec.classes) {
    Subspace space = real_generalized_eigenspace(d.matrix, cls.value);
    if (space.dim() != cls.multiplicity)
      fail(ErrorCode::ValidationFailed,
           "d_decomposition: eigenspace dimension does not match multiplicity");
    dec.per_eigenvalue.emplace_back(cls, space);
    if (cls.value.real() > classification_tol) {
      dec.g_plus = subspace_sum(dec.g_plus, space);
    } else if (cls.value.real() < -classification_tol) {
      dec.g_minus = subspace_sum(dec.g_minus, space);
    } else {
      dec.g_zero = subspace_sum(dec.g_zero, space);
      if (cls.value == Complex(0, 0)) dec.g_kernel = space;
    }
  }
  if (dec.g_plus.dim() + dec.g_minus.dim() + dec.g_zero.dim() != n)
    fail(ErrorCode::ValidationFailed,
         "d_decomposition: eigenspace dimensions do not sum to dim");
  return dec;
}

GradingReport check_grading(const LieAlgebra& a, const Derivation& d,
                            const DDecomposition& dec, double tolerance) {
  GradingReport rep;
  const auto& raw = dec.spec.raw;

  // distinct clustered eigenvalues, conjugates separate
  std::vector<Complex> values;
  for (Complex v : raw)
    if (std::none_of(values.begin(), values.end(),
                     [v](Complex w) { return std::abs(v - w) <= tol::cluster; }))
      values.push_back(v);

  std::vector<CMat> spaces;
  spaces.reserve(values.size());
  for (Complex v : values) spaces.push_back(complex_generalized_eigenspace(d.matrix, v));

  for (std::size_t ia = 0; ia < values.size(); ++ia) {
    for (std::size_t ib = ia; ib < values.size(); ++ib) {
      Complex sum = values[ia] + values[ib];
      int target = -1;
      for (std::size_t ig = 0; ig < values.size(); ++ig)
        if (std::abs(sum - values[ig]) <= tol::cluster) {
          target = static_cast<int>(ig);
          break;
        }
      for (int ca = 0; ca < spaces[ia].cols(); ++ca)
        for (int cb = 0; cb < spaces[ib].cols(); ++cb) {
          CVec x = spaces[ia].col(ca);
          CVec y = spaces[ib].col(cb);
          CVec b = complex_bracket(a, x / x.norm(), y / y.norm());
          double residual;
          if (target >= 0) {
            const CMat& u = spaces[target];
            residual = (b - u * (u.adjoint() * b)).norm();
          } else {
            residual = b.norm();
          }
          rep.max_residual = std::max(rep.max_residual, residual);
        }
      ++rep.pairs_checked;
    }
  }
  rep.pass = rep.max_residual <= tolerance;
  return rep;
}

Subspace multiples_subalgebra(const LieAlgebra& a, const Derivation& d,
                              Complex alpha) {
  if (std::abs(alpha.real()) > tol::spec || std::abs(alpha.imag()) <= tol::spec)
    fail(ErrorCode::InvalidInput,
         "multiples_subalgebra: alpha must be nonzero purely imaginary");
  DDecomposition dec = d_decomposition(d);

  auto find_class = [&](Complex v) -> const std::pair<EigenvalueClass, Subspace>* {
    for (const auto& entry : dec.per_eigenvalue) {
      if (std::abs(v - entry.first.value) <= tol::cluster ||
          std::abs(v - std::conj(entry.first.value)) <= tol::cluster)
        return &entry;
    }
    return nullptr;
  };

  if (find_class(alpha) == nullptr)
    fail(ErrorCode::NotAnEigenvalue,
         "multiples_subalgebra: alpha is not in the spectrum");

  double max_imag = 0.0;
  for (const auto& cls : dec.spec.classes)
    max_imag = std::max(max_imag, std::abs(cls.value.imag()));
  int max_j = static_cast<int>(std::floor((max_imag + tol::cluster) /
                                          std::abs(alpha.imag())));

  Subspace result = zero_subspace(a.dim());
  for (int j = 1; j <= max_j; ++j) {
    Complex jalpha = static_cast<double>(j) * alpha;
    if (const auto* entry = find_class(jalpha))
      result = subspace_sum(result, entry->second);
  }

  // must be a nilpotent subalgebra
  SubAlgebra sub = restrict_to(a, result);
  if (!is_nilpotent(sub.algebra))
    fail(ErrorCode::ValidationFailed,
         "multiples_subalgebra: result is not nilpotent");
  return result;
}

}  // namespace liectrl

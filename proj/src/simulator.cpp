#include "liectrl/simulator.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/LU>
#include <Eigen/QR>

#include "liectrl/matfun.hpp"

namespace liectrl {

namespace {

Mat embed_factor_vector(const RealizedFactor& f, const Vec& local) {
  Mat m = Mat::Zero(f.n, f.n);
  for (int i = 0; i < f.subdim; ++i) m += local(i) * f.embedding[i];
  return m;
}

Vec factor_segment(const RealizedFactor& f, const Vec& ambient) {
  return ambient.segment(f.offset, f.subdim);
}

}  // namespace

GroupRealization make_realization(const ControlSystem& sys,
                                  const std::vector<FactorSpec>& specs) {
  const int dim = sys.algebra.dim();
  const Mat& D = sys.derivation.matrix;
  if (specs.empty())
    fail(ErrorCode::InvalidInput, "realization: at least one factor required");

  std::vector<RealizedFactor> factors;
  int offset = 0;
  for (const auto& spec : specs) {
    RealizedFactor f;
    f.type = spec.type;
    f.offset = offset;
    f.checks = spec.checks;
    f.deriv = spec.deriv;
    if (spec.type == FactorSpec::Type::Translation) {
      if (spec.size <= 0)
        fail(ErrorCode::InvalidInput, "realization: translation size must be positive");
      f.subdim = spec.size;
      if (!spec.checks.empty())
        fail(ErrorCode::InvalidInput, "realization: checks apply to matrix factors only");
    } else {
      f.n = spec.size;
      f.subdim = static_cast<int>(spec.embedding.size());
      if (f.n <= 0 || f.subdim <= 0)
        fail(ErrorCode::InvalidInput, "realization: matrix factor needs size and embedding");
      for (const auto& m : spec.embedding)
        if (m.rows() != f.n || m.cols() != f.n)
          fail(ErrorCode::InvalidInput, "realization: embedding matrices must be n x n");
      f.embedding = spec.embedding;
    }
    offset += f.subdim;
    factors.push_back(std::move(f));
  }
  if (offset != dim)
    fail(ErrorCode::InvalidInput,
         "realization: factor dimensions sum to " + std::to_string(offset) +
             ", algebra dim is " + std::to_string(dim));

  // factors must not interact: cross-factor structure constants vanish
  for (std::size_t a = 0; a < factors.size(); ++a)
    for (std::size_t b = 0; b < factors.size(); ++b) {
      if (a == b) continue;
      for (int i = 0; i < factors[a].subdim; ++i)
        for (int j = 0; j < factors[b].subdim; ++j)
          for (int k = 0; k < dim; ++k)
            if (std::abs(sys.algebra.c(factors[a].offset + i,
                                       factors[b].offset + j, k)) > tol::embedding)
              fail(ErrorCode::ValidationFailed,
                   "realization: factors are coupled by the bracket");
    }

  for (auto& f : factors) {
    if (f.type == FactorSpec::Type::Translation) {
      // translation factors must be abelian
      for (int i = 0; i < f.subdim; ++i)
        for (int j = 0; j < f.subdim; ++j)
          for (int k = 0; k < dim; ++k)
            if (std::abs(sys.algebra.c(f.offset + i, f.offset + j, k)) > tol::embedding)
              fail(ErrorCode::ValidationFailed,
                   "realization: translation factor is not abelian");
    } else {
      // embedded brackets must reproduce the structure constants
      double worst = 0.0;
      for (int i = 0; i < f.subdim; ++i)
        for (int j = 0; j < f.subdim; ++j) {
          Mat comm = f.embedding[i] * f.embedding[j] - f.embedding[j] * f.embedding[i];
          Mat expected = Mat::Zero(f.n, f.n);
          for (int k = 0; k < f.subdim; ++k)
            expected += sys.algebra.c(f.offset + i, f.offset + j, f.offset + k) *
                        f.embedding[k];
          worst = std::max(worst, (comm - expected).cwiseAbs().maxCoeff());
        }
      if (worst > tol::embedding)
        fail(ErrorCode::ValidationFailed,
             "realization: embedding is not a bracket homomorphism (residual " +
                 std::to_string(worst) + ")");
    }
  }

  // the derivation must preserve each factor's span
  for (const auto& f : factors) {
    for (int col = 0; col < f.subdim; ++col)
      for (int row = 0; row < dim; ++row) {
        if (row >= f.offset && row < f.offset + f.subdim) continue;
        if (std::abs(D(row, f.offset + col)) > tol::realization)
          fail(ErrorCode::ValidationFailed,
               "realization: derivation mixes group factors");
      }
  }

  for (std::size_t fi = 0; fi < factors.size(); ++fi) {
    auto& f = factors[fi];
    Mat block = D.block(f.offset, f.offset, f.subdim, f.subdim);
    switch (f.deriv) {
      case FactorSpec::DerivKind::Trivial:
        if (block.cwiseAbs().maxCoeff() > tol::realization)
          fail(ErrorCode::ValidationFailed,
               "realization: factor marked trivial but the derivation acts on it");
        break;
      case FactorSpec::DerivKind::LinearMap:
        if (f.type != FactorSpec::Type::Translation)
          fail(ErrorCode::UnsupportedRealization,
               "realization: LinearMap applies to translation factors only");
        f.deriv_data = block;
        break;
      case FactorSpec::DerivKind::Inner: {
        if (f.type != FactorSpec::Type::Matrix)
          fail(ErrorCode::UnsupportedRealization,
               "realization: Inner applies to matrix factors only");
        // target: ad(Y0) acting through the embedding equals the D block
        std::vector<Mat> images(f.subdim);
        for (int i = 0; i < f.subdim; ++i)
          images[i] = embed_factor_vector(f, block.col(i));
        Mat y0;
        if (specs[fi].inner_element.has_value()) {
          const Vec& y = *specs[fi].inner_element;
          if (y.size() != f.subdim)
            fail(ErrorCode::InvalidInput,
                 "realization: inner element length does not match factor");
          y0 = embed_factor_vector(f, y);
        } else {
          // least squares over the embedded basis
          const int nn = f.n * f.n;
          Mat lhs(nn * f.subdim, f.subdim);
          Vec rhs(nn * f.subdim);
          for (int i = 0; i < f.subdim; ++i) {
            for (int k = 0; k < f.subdim; ++k) {
              Mat col = f.embedding[k] * f.embedding[i] -
                        f.embedding[i] * f.embedding[k];
              lhs.block(i * nn, k, nn, 1) =
                  Eigen::Map<const Vec>(col.data(), nn);
            }
            rhs.segment(i * nn, nn) =
                Eigen::Map<const Vec>(images[i].data(), nn);
          }
          Vec y = lhs.colPivHouseholderQr().solve(rhs);
          if ((lhs * y - rhs).norm() > 1e-8)
            fail(ErrorCode::UnsupportedRealization,
                 "realization: no inner element reproduces the derivation "
                 "(least-squares residual " +
                     std::to_string((lhs * y - rhs).norm()) + ")");
          y0 = embed_factor_vector(f, y);
        }
        double worst = 0.0;
        for (int i = 0; i < f.subdim; ++i) {
          Mat got = y0 * f.embedding[i] - f.embedding[i] * y0;
          worst = std::max(worst, (got - images[i]).cwiseAbs().maxCoeff());
        }
        if (worst > tol::realization)
          fail(ErrorCode::ValidationFailed,
               "realization: inner element does not reproduce the derivation "
               "(residual " + std::to_string(worst) + ")");
        f.deriv_data = y0;
        break;
      }
    }
  }

  // embed the control fields once
  for (auto& f : factors) {
    for (const auto& b : sys.control_fields) {
      Vec seg = factor_segment(f, b);
      if (f.type == FactorSpec::Type::Translation)
        f.ctrl_translation.push_back(seg);
      else
        f.ctrl_matrix.push_back(embed_factor_vector(f, seg));
    }
  }

  return GroupRealization(std::move(factors), dim, sys.channels());
}

GroupRealization reverse_realization(const GroupRealization& r) {
  std::vector<RealizedFactor> factors = r.factors();
  for (auto& f : factors)
    if (f.deriv != FactorSpec::DerivKind::Trivial) f.deriv_data = -f.deriv_data;
  return GroupRealization(std::move(factors), r.algebra_dim(), r.channels());
}

ControlSystem reverse_system(const ControlSystem& sys) {
  ControlSystem rev = sys;
  rev.derivation.matrix = -sys.derivation.matrix;
  return rev;
}

// -- elements --------------------------------------------------------------

GroupElement identity_element(const GroupRealization& r) {
  GroupElement e;
  for (const auto& f : r.factors()) {
    if (f.type == FactorSpec::Type::Translation)
      e.parts.emplace_back(Vec(Vec::Zero(f.subdim)));
    else
      e.parts.emplace_back(Mat(Mat::Identity(f.n, f.n)));
  }
  return e;
}

GroupElement multiply(const GroupRealization& r, const GroupElement& a,
                      const GroupElement& b) {
  GroupElement out;
  const auto& factors = r.factors();
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (factors[i].type == FactorSpec::Type::Translation)
      out.parts.emplace_back(Vec(std::get<Vec>(a.parts[i]) + std::get<Vec>(b.parts[i])));
    else
      out.parts.emplace_back(Mat(std::get<Mat>(a.parts[i]) * std::get<Mat>(b.parts[i])));
  }
  return out;
}

GroupElement inverse(const GroupRealization& r, const GroupElement& g) {
  GroupElement out;
  const auto& factors = r.factors();
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (factors[i].type == FactorSpec::Type::Translation)
      out.parts.emplace_back(Vec(-std::get<Vec>(g.parts[i])));
    else
      out.parts.emplace_back(Mat(std::get<Mat>(g.parts[i]).inverse()));
  }
  return out;
}

double distance(const GroupRealization& r, const GroupElement& a,
                const GroupElement& b) {
  double d = 0.0;
  const auto& factors = r.factors();
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (factors[i].type == FactorSpec::Type::Translation)
      d += (std::get<Vec>(a.parts[i]) - std::get<Vec>(b.parts[i])).norm();
    else
      d += (std::get<Mat>(a.parts[i]) - std::get<Mat>(b.parts[i])).norm();
  }
  return d;
}

double invariant_residual(const GroupRealization& r, const GroupElement& g) {
  double worst = 0.0;
  const auto& factors = r.factors();
  for (std::size_t i = 0; i < factors.size(); ++i) {
    const auto& f = factors[i];
    if (f.type != FactorSpec::Type::Matrix) continue;
    const Mat& m = std::get<Mat>(g.parts[i]);
    for (MatrixCheck check : f.checks) {
      if (check == MatrixCheck::UnitDeterminant)
        worst = std::max(worst, std::abs(m.determinant() - 1.0));
      else
        worst = std::max(worst, (m.transpose() * m - Mat::Identity(f.n, f.n)).norm());
    }
  }
  return worst;
}

namespace {
Vec pack_element(const GroupRealization& r, const GroupElement& g);
}

Vec flatten(const GroupRealization& r, const GroupElement& g) {
  return pack_element(r, g);
}

GroupElement group_exp(const GroupRealization& r, const Vec& v) {
  if (v.size() != r.algebra_dim())
    fail(ErrorCode::InvalidInput, "group_exp: vector length does not match algebra");
  GroupElement out;
  for (const auto& f : r.factors()) {
    Vec seg = factor_segment(f, v);
    if (f.type == FactorSpec::Type::Translation)
      out.parts.emplace_back(seg);
    else
      out.parts.emplace_back(expm(embed_factor_vector(f, seg)));
  }
  return out;
}

std::optional<Vec> log_chart(const GroupRealization& r, const GroupElement& g) {
  Vec coords = Vec::Zero(r.algebra_dim());
  const auto& factors = r.factors();
  for (std::size_t i = 0; i < factors.size(); ++i) {
    const auto& f = factors[i];
    if (f.type == FactorSpec::Type::Translation) {
      coords.segment(f.offset, f.subdim) = std::get<Vec>(g.parts[i]);
      continue;
    }
    auto lg = logm_principal(std::get<Mat>(g.parts[i]));
    if (!lg.has_value()) return std::nullopt;
    const int nn = f.n * f.n;
    Mat basis(nn, f.subdim);
    for (int k = 0; k < f.subdim; ++k)
      basis.col(k) = Eigen::Map<const Vec>(f.embedding[k].data(), nn);
    Vec target = Eigen::Map<const Vec>(lg->data(), nn);
    Vec local = basis.colPivHouseholderQr().solve(target);
    if ((basis * local - target).norm() > 1e-6 * std::max(1.0, target.norm()))
      return std::nullopt;  // log fell outside the embedded subalgebra
    coords.segment(f.offset, f.subdim) = local;
  }
  return coords;
}

GroupElement linear_flow(const GroupRealization& r, double t,
                         const GroupElement& g) {
  GroupElement out;
  const auto& factors = r.factors();
  for (std::size_t i = 0; i < factors.size(); ++i) {
    const auto& f = factors[i];
    switch (f.deriv) {
      case FactorSpec::DerivKind::Trivial:
        out.parts.emplace_back(g.parts[i]);
        break;
      case FactorSpec::DerivKind::LinearMap:
        out.parts.emplace_back(
            Vec(expm(t * f.deriv_data) * std::get<Vec>(g.parts[i])));
        break;
      case FactorSpec::DerivKind::Inner: {
        Mat e_plus = expm(t * f.deriv_data);
        Mat e_minus = expm(-t * f.deriv_data);
        out.parts.emplace_back(Mat(e_plus * std::get<Mat>(g.parts[i]) * e_minus));
        break;
      }
    }
  }
  return out;
}

double flow_automorphism_check(const GroupRealization& r, double t,
                               const GroupElement& g, const GroupElement& h) {
  GroupElement lhs = linear_flow(r, t, multiply(r, g, h));
  GroupElement rhs = multiply(r, linear_flow(r, t, g), linear_flow(r, t, h));
  return distance(r, lhs, rhs);
}

// -- signals ----------------------------------------------------------------

double ControlSignal::total_duration() const {
  double t = 0.0;
  for (const auto& p : pieces) t += p.duration;
  return t;
}

ControlSignal zero_signal(int channels, double duration) {
  if (duration <= 0.0)
    fail(ErrorCode::InvalidInput, "zero_signal: duration must be positive");
  return ControlSignal{{{duration, Vec::Zero(channels)}}};
}

ControlSignal concat(const ControlSignal& first, const ControlSignal& then) {
  ControlSignal out = first;
  out.pieces.insert(out.pieces.end(), then.pieces.begin(), then.pieces.end());
  return out;
}

ControlSignal tail_from(const ControlSignal& u, double s) {
  ControlSignal out;
  double remaining = s;
  for (const auto& p : u.pieces) {
    if (remaining >= p.duration - 1e-15) {
      remaining -= p.duration;
      continue;
    }
    double keep = p.duration - std::max(0.0, remaining);
    remaining = 0.0;
    if (keep > 1e-15) out.pieces.push_back({keep, p.value});
  }
  return out;
}

ControlSignal reversed_negated(const ControlSignal& u) {
  ControlSignal out;
  out.pieces.reserve(u.pieces.size());
  for (auto it = u.pieces.rbegin(); it != u.pieces.rend(); ++it)
    out.pieces.push_back({it->duration, Vec(-it->value)});
  return out;
}

// -- integration -------------------------------------------------------------

namespace {

int flat_size(const GroupRealization& r) {
  int size = 0;
  for (const auto& f : r.factors())
    size += f.type == FactorSpec::Type::Translation ? f.subdim : f.n * f.n;
  return size;
}

Vec pack_element(const GroupRealization& r, const GroupElement& g) {
  Vec flat(flat_size(r));
  int at = 0;
  const auto& factors = r.factors();
  for (std::size_t i = 0; i < factors.size(); ++i) {
    const auto& f = factors[i];
    if (f.type == FactorSpec::Type::Translation) {
      flat.segment(at, f.subdim) = std::get<Vec>(g.parts[i]);
      at += f.subdim;
    } else {
      const Mat& m = std::get<Mat>(g.parts[i]);
      flat.segment(at, f.n * f.n) = Eigen::Map<const Vec>(m.data(), f.n * f.n);
      at += f.n * f.n;
    }
  }
  return flat;
}

GroupElement unpack_element(const GroupRealization& r, const Vec& flat) {
  GroupElement g;
  int at = 0;
  for (const auto& f : r.factors()) {
    if (f.type == FactorSpec::Type::Translation) {
      g.parts.emplace_back(Vec(flat.segment(at, f.subdim)));
      at += f.subdim;
    } else {
      g.parts.emplace_back(
          Mat(Eigen::Map<const Mat>(flat.segment(at, f.n * f.n).data(), f.n, f.n)));
      at += f.n * f.n;
    }
  }
  return g;
}

// Controlled vector field in flat coordinates: linear drift plus
// right-invariant control fields.
Vec field(const GroupRealization& r, const Vec& u, const Vec& flat) {
  Vec out(flat.size());
  int at = 0;
  for (const auto& f : r.factors()) {
    if (f.type == FactorSpec::Type::Translation) {
      Vec x = flat.segment(at, f.subdim);
      Vec dx = f.deriv == FactorSpec::DerivKind::LinearMap
                   ? Vec(f.deriv_data * x)
                   : Vec(Vec::Zero(f.subdim));
      for (int j = 0; j < u.size(); ++j)
        if (u(j) != 0.0) dx += u(j) * f.ctrl_translation[j];
      out.segment(at, f.subdim) = dx;
      at += f.subdim;
    } else {
      Mat m = Eigen::Map<const Mat>(flat.segment(at, f.n * f.n).data(), f.n, f.n);
      Mat dm = Mat::Zero(f.n, f.n);
      if (f.deriv == FactorSpec::DerivKind::Inner)
        dm = f.deriv_data * m - m * f.deriv_data;
      Mat ctrl = Mat::Zero(f.n, f.n);
      for (int j = 0; j < u.size(); ++j)
        if (u(j) != 0.0) ctrl += u(j) * f.ctrl_matrix[j];
      dm += ctrl * m;  // right-invariant: value at g is b.g
      out.segment(at, f.n * f.n) = Eigen::Map<const Vec>(dm.data(), f.n * f.n);
      at += f.n * f.n;
    }
  }
  return out;
}

GroupElement renormalize(const GroupRealization& r, GroupElement g) {
  const auto& factors = r.factors();
  for (std::size_t i = 0; i < factors.size(); ++i) {
    const auto& f = factors[i];
    if (f.type != FactorSpec::Type::Matrix || f.checks.empty()) continue;
    Mat m = std::get<Mat>(g.parts[i]);
    for (MatrixCheck check : f.checks) {
      if (check == MatrixCheck::Orthogonal) {
        if ((m.transpose() * m - Mat::Identity(f.n, f.n)).norm() > 1e-10)
          m = polar_orthogonal(m);
      } else {
        double det = m.determinant();
        if (det <= 0.0)
          fail(ErrorCode::StepRejected,
               "step: determinant sign lost; decrease dt");
        if (std::abs(det - 1.0) > 1e-10) m /= std::pow(det, 1.0 / f.n);
      }
    }
    g.parts[i] = m;
  }
  return g;
}

}  // namespace

GroupElement step(const GroupRealization& r, const ControlSystem& sys,
                  const GroupElement& g, const Vec& u, double dt) {
  if (dt <= 0.0) fail(ErrorCode::InvalidInput, "step: dt must be positive");
  if (u.size() != sys.channels())
    fail(ErrorCode::InvalidInput, "step: control vector has wrong channel count");
  Vec y = pack_element(r, g);
  Vec k1 = field(r, u, y);
  Vec k2 = field(r, u, Vec(y + 0.5 * dt * k1));
  Vec k3 = field(r, u, Vec(y + 0.5 * dt * k2));
  Vec k4 = field(r, u, Vec(y + dt * k3));
  Vec y1 = y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  GroupElement out = unpack_element(r, y1);

  double drift = invariant_residual(r, out);
  if (drift > 1e-6)
    fail(ErrorCode::StepRejected,
         "step: invariant residual " + std::to_string(drift) +
             " exceeds 1e-6; decrease dt");
  if (drift > 1e-10) out = renormalize(r, std::move(out));
  return out;
}

Trajectory solve(const GroupRealization& r, const ControlSystem& sys,
                 const GroupElement& g0, const ControlSignal& u,
                 const SolveOptions& opt) {
  if (opt.dt <= 0.0) fail(ErrorCode::InvalidInput, "solve: dt must be positive");
  Trajectory traj;
  traj.samples.push_back({0.0, g0});
  GroupElement g = g0;
  double t = 0.0;
  for (const auto& piece : u.pieces) {
    if (piece.duration <= 0.0)
      fail(ErrorCode::InvalidInput, "solve: piece durations must be positive");
    int steps = std::max(1, static_cast<int>(std::ceil(piece.duration / opt.dt - 1e-12)));
    double h = piece.duration / steps;
    for (int i = 0; i < steps; ++i) {
      g = step(r, sys, g, piece.value, h);
      t += h;
      bool record = ((i + 1) % std::max(1, opt.stride) == 0) || i + 1 == steps;
      if (record) traj.samples.push_back({t, g});
    }
  }
  return traj;
}

}  // namespace liectrl

#include "liectrl/reach.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <thread>

#include <Eigen/SVD>

namespace liectrl {

namespace {

// Deterministic uniform deviates from raw mt19937_64 bits; identical output
// across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  double normal() {
    // Box-Muller on raw uniforms
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = std::max(uniform01(), 1e-300);
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * M_PI * u2);
  }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ splitmix64(index + 1));
}

// Piece durations uniform on the simplex summing to tau (sorted cut points).
std::vector<double> sample_durations(Rng& rng, int pieces, double tau) {
  while (true) {
    std::vector<double> cuts(pieces - 1);
    for (auto& c : cuts) c = rng.uniform(0.0, tau);
    std::sort(cuts.begin(), cuts.end());
    std::vector<double> durations(pieces);
    double prev = 0.0;
    bool ok = true;
    for (int i = 0; i < pieces; ++i) {
      double next = i + 1 < pieces ? cuts[i] : tau;
      durations[i] = next - prev;
      prev = next;
      if (durations[i] <= 1e-6 * tau) ok = false;
    }
    if (ok) return durations;
  }
}

ControlSignal sample_signal(Rng& rng, int pieces, double tau,
                            const std::vector<std::pair<double, double>>& box) {
  auto durations = sample_durations(rng, pieces, tau);
  ControlSignal u;
  u.pieces.reserve(pieces);
  for (int i = 0; i < pieces; ++i) {
    Vec value(box.size());
    for (std::size_t j = 0; j < box.size(); ++j)
      value(j) = rng.uniform(box[j].first, box[j].second);
    u.pieces.push_back({durations[i], value});
  }
  return u;
}

// -- dense two-phase simplex -------------------------------------------------
// max c.x  s.t.  A x = b, x >= 0. Bland's rule; b must be >= 0.

struct LpResult {
  bool feasible = false;
  double objective = 0.0;
  Vec x;
};

constexpr double kLpEps = 1e-11;

LpResult simplex_max(const Mat& A, const Vec& b, const Vec& c) {
  const int m = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  // tableau: [A | I | b], artificial basis
  Mat T(m, n + m + 1);
  T.leftCols(n) = A;
  T.middleCols(n, m) = Mat::Identity(m, m);
  T.col(n + m) = b;
  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) basis[i] = n + i;

  auto pivot = [&](int row, int col) {
    T.row(row) /= T(row, col);
    for (int i = 0; i < m; ++i)
      if (i != row && std::abs(T(i, col)) > 0.0) T.row(i) -= T(i, col) * T.row(row);
    basis[row] = col;
  };

  auto run = [&](const Vec& cost, int ncols) -> double {
    // reduced-cost row for minimization of cost.x
    Eigen::RowVectorXd z = -cost.transpose();
    double obj = 0.0;
    for (int i = 0; i < m; ++i) {
      if (cost(basis[i]) != 0.0) {
        z += cost(basis[i]) * T.row(i).head(ncols);
        obj += cost(basis[i]) * T(i, n + m);
      }
    }
    while (true) {
      int enter = -1;
      for (int j = 0; j < ncols; ++j)
        if (z(j) > kLpEps) {  // improves the minimization
          enter = j;
          break;  // Bland
        }
      if (enter < 0) break;
      int leave = -1;
      double best_ratio = 0.0;
      for (int i = 0; i < m; ++i) {
        if (T(i, enter) > kLpEps) {
          double ratio = T(i, n + m) / T(i, enter);
          if (leave < 0 || ratio < best_ratio - kLpEps ||
              (std::abs(ratio - best_ratio) <= kLpEps && basis[i] < basis[leave]))
            leave = i, best_ratio = ratio;
        }
      }
      if (leave < 0) fail(ErrorCode::ValidationFailed, "simplex: unbounded LP");
      double zc = z(enter);
      pivot(leave, enter);
      z -= zc * T.row(leave).head(ncols);
      obj -= zc * T(leave, n + m);
    }
    return obj;
  };

  // phase 1: minimize the artificial sum
  Vec phase1 = Vec::Zero(n + m);
  phase1.tail(m).setOnes();
  double art = run(phase1, n + m);
  if (art > 1e-9) return {};  // infeasible

  // forbid artificial columns from re-entering
  for (int j = n; j < n + m; ++j) T.col(j).setZero();

  // phase 2: minimize -c.x
  Vec phase2 = Vec::Zero(n + m);
  phase2.head(n) = -c;
  double obj = run(phase2, n);

  LpResult res;
  res.feasible = true;
  res.objective = -obj;
  res.x = Vec::Zero(n);
  for (int i = 0; i < m; ++i)
    if (basis[i] < n) res.x(basis[i]) = T(i, n + m);
  return res;
}

}  // namespace

std::vector<std::pair<double, double>> resolve_box(
    const ControlSystem& sys,
    const std::optional<std::vector<std::pair<double, double>>>& box_override) {
  if (box_override.has_value()) {
    if (static_cast<int>(box_override->size()) != sys.channels())
      fail(ErrorCode::InvalidInput, "box: one [lo, hi] pair per channel required");
    return *box_override;
  }
  if (sys.range.restricted()) return *sys.range.bounds;
  return std::vector<std::pair<double, double>>(sys.channels(), {-1.0, 1.0});
}

EndpointCloud sample_reachable(const ControlSystem& sys,
                               const GroupRealization& r,
                               const ReachParams& params) {
  if (params.tau <= 0.0 || params.samples < 1 || params.pieces < 1)
    fail(ErrorCode::InvalidInput, "sample_reachable: tau > 0, samples >= 1, pieces >= 1");
  if (static_cast<int>(params.box.size()) != sys.channels())
    fail(ErrorCode::InvalidInput, "sample_reachable: box size mismatch");

  EndpointCloud cloud;
  cloud.tau = params.tau;
  cloud.seed = params.seed;
  cloud.points.resize(params.samples);
  cloud.log_chart.resize(params.samples);

  GroupElement e = identity_element(r);
  SolveOptions opt;
  opt.dt = params.dt;
  opt.stride = 1 << 30;  // endpoints only

  auto worker = [&](int begin, int end) {
    for (int i = begin; i < end; ++i) {
      Rng rng(stream_seed(params.seed, static_cast<std::uint64_t>(i)));
      ControlSignal u = sample_signal(rng, params.pieces, params.tau, params.box);
      Trajectory traj = solve(r, sys, e, u, opt);
      cloud.points[i] = traj.endpoint();
      cloud.log_chart[i] = log_chart(r, traj.endpoint());
    }
  };

  int threads = params.threads > 0
                    ? params.threads
                    : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, params.samples));
  if (threads == 1) {
    worker(0, params.samples);
  } else {
    std::vector<std::thread> pool;
    int chunk = (params.samples + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      int begin = t * chunk;
      int end = std::min(params.samples, begin + chunk);
      if (begin < end) pool.emplace_back(worker, begin, end);
    }
    for (auto& th : pool) th.join();
  }

  for (const auto& lc : cloud.log_chart)
    if (!lc.has_value()) ++cloud.dropped_logs;
  return cloud;
}

AccessibilityResult local_accessibility_test(const EndpointCloud& cloud) {
  std::vector<Vec> points;
  for (const auto& lc : cloud.log_chart)
    if (lc.has_value()) points.push_back(*lc);

  if (points.empty())
    fail(ErrorCode::InsufficientSamples, "accessibility: no usable log charts");
  const int dim = static_cast<int>(points.front().size());
  AccessibilityResult res;
  res.usable_points = static_cast<int>(points.size());
  if (res.usable_points < dim + 1)
    fail(ErrorCode::InsufficientSamples,
         "accessibility: need at least dim+1 usable points");

  Mat P(dim, res.usable_points);
  for (int i = 0; i < res.usable_points; ++i) P.col(i) = points[i];

  // affine-hull dimension
  Vec mean = P.rowwise().mean();
  Mat centered = P.colwise() - mean;
  Eigen::JacobiSVD<Mat> svd(centered);
  const auto& sv = svd.singularValues();
  double smax = sv.size() > 0 ? sv(0) : 0.0;
  int affine_dim = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (smax > 0.0 && sv(i) > 1e-6 * smax) ++affine_dim;
  res.dimension = affine_dim;
  if (affine_dim < dim) return res;  // fail(dimension)

  // strict interior: max t with  sum mu_i p_i + t sum p_i = 0,
  // sum mu_i + N t = 1, mu >= 0, t >= 0; weights lambda_i = mu_i + t >= t.
  const int N = res.usable_points;
  Mat A(dim + 1, N + 1);
  A.block(0, 0, dim, N) = P;
  A.block(0, N, dim, 1) = P.rowwise().sum();
  A.row(dim).setOnes();
  A(dim, N) = static_cast<double>(N);
  Vec b = Vec::Zero(dim + 1);
  b(dim) = 1.0;
  Vec c = Vec::Zero(N + 1);
  c(N) = 1.0;
  LpResult lp = simplex_max(A, b, c);
  if (!lp.feasible || lp.objective <= 1e-12) return res;  // origin not strictly inside
  res.certificate = lp.objective;

  // sampled-direction inradius: min over directions of the support function
  Rng rng(stream_seed(cloud.seed, 0xACCE551B1ull));
  std::vector<Vec> dirs;
  for (int i = 0; i < dim; ++i) {
    Vec d = Vec::Zero(dim);
    d(i) = 1.0;
    dirs.push_back(d);
    dirs.push_back(-d);
  }
  for (int k = 0; k < 100; ++k) {
    Vec d(dim);
    for (int i = 0; i < dim; ++i) d(i) = rng.normal();
    if (d.norm() < 1e-12) continue;
    dirs.push_back(d / d.norm());
  }
  double margin = std::numeric_limits<double>::infinity();
  for (const auto& d : dirs) {
    double support = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < N; ++i) support = std::max(support, d.dot(P.col(i)));
    margin = std::min(margin, support);
  }
  res.margin = std::max(0.0, margin);
  res.pass = res.margin > 0.0;
  return res;
}

CompositionReport composition_check(const ControlSystem& sys,
                                    const GroupRealization& r, double tau1,
                                    double tau2, int n, std::uint64_t seed,
                                    double dt, int pieces) {
  if (tau1 <= 0.0 || tau2 <= 0.0)
    fail(ErrorCode::InvalidInput, "composition_check: durations must be positive");
  auto box = resolve_box(sys, std::nullopt);
  GroupElement e = identity_element(r);
  SolveOptions opt;
  opt.dt = dt;
  opt.stride = 1 << 30;

  CompositionReport rep;
  rep.pairs = n;
  for (int i = 0; i < n; ++i) {
    Rng rng(stream_seed(seed, static_cast<std::uint64_t>(i)));
    ControlSignal u1 = sample_signal(rng, pieces, tau1, box);
    ControlSignal u2 = sample_signal(rng, pieces, tau2, box);
    GroupElement x = solve(r, sys, e, u1, opt).endpoint();
    GroupElement y = solve(r, sys, e, u2, opt).endpoint();
    GroupElement composed = multiply(r, x, linear_flow(r, tau1, y));
    GroupElement direct = solve(r, sys, e, concat(u2, u1), opt).endpoint();
    rep.max_mismatch = std::max(rep.max_mismatch, distance(r, composed, direct));
  }
  rep.pass = rep.max_mismatch <= 1e-6;
  return rep;
}

namespace {

struct Candidate {
  double tau;
  Mat values;  // channels x pieces
  double residual;
};

}  // namespace

ConnectResult connect(const ControlSystem& sys, const GroupRealization& r,
                      const GroupElement& from, const GroupElement& to,
                      const ConnectParams& params) {
  const int m = sys.channels();
  const int p = params.pieces;
  auto box = params.box.empty() ? resolve_box(sys, std::nullopt) : params.box;
  if (static_cast<int>(box.size()) != m)
    fail(ErrorCode::InvalidInput, "connect: box size mismatch");

  Rng rng(stream_seed(params.seed, 0xC0EC7ull));
  long used = 0;
  Candidate best{0.5 * (params.tau_min + params.tau_max), Mat::Zero(m, p),
                 std::numeric_limits<double>::infinity()};
  Vec target_flat = flatten(r, to);
  SolveOptions opt;
  opt.dt = params.dt;
  opt.stride = 1 << 30;

  auto clamp_candidate = [&](Candidate& c) {
    c.tau = std::clamp(c.tau, params.tau_min, params.tau_max);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < p; ++j)
        c.values(i, j) = std::clamp(c.values(i, j), box[i].first, box[i].second);
  };
  auto endpoint_of = [&](const Candidate& c) {
    ControlSignal u;
    for (int j = 0; j < p; ++j) u.pieces.push_back({c.tau / p, c.values.col(j)});
    ++used;
    return solve(r, sys, from, u, opt).endpoint();
  };
  auto try_candidate = [&](Candidate& c) -> bool {
    clamp_candidate(c);
    c.residual = distance(r, endpoint_of(c), to);
    if (c.residual < best.residual) best = c;
    return best.residual <= params.residual_target;
  };
  auto finish = [&]() {
    ConnectResult result;
    result.residual = best.residual;
    result.tau = best.tau;
    result.trajectories_used = used;
    result.found = best.residual <= params.residual_target;
    for (int j = 0; j < p; ++j)
      result.signal.pieces.push_back({best.tau / p, best.values.col(j)});
    return result;
  };

  // zero-control probes resolve flow-fixed targets immediately
  for (double tau : {params.tau_min, 1.0, 2.0, params.tau_max}) {
    if (tau < params.tau_min || tau > params.tau_max || used >= params.budget)
      continue;
    Candidate c{tau, Mat::Zero(m, p), 0.0};
    if (try_candidate(c)) return finish();
  }

  // random shooting: rough incumbents across the whole time range
  std::vector<Candidate> pool;
  long shoot_budget = std::min<long>(params.budget / 5, 20000);
  while (used < shoot_budget && best.residual > params.residual_target) {
    Candidate c{rng.uniform(params.tau_min, params.tau_max), Mat(m, p), 0.0};
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < p; ++j)
        c.values(i, j) = rng.uniform(box[i].first, box[i].second);
    if (try_candidate(c)) return finish();
    pool.push_back(c);
  }
  std::sort(pool.begin(), pool.end(),
            [](const Candidate& a, const Candidate& b) { return a.residual < b.residual; });
  if (pool.size() > 16) pool.resize(16);

  // elite resampling with mean/deviation smoothing
  const int pop = 96;
  const int elites = 10;
  const double blend = 0.7;
  long cem_budget = (params.budget * 3) / 5;
  double tau_mean = pool.empty() ? best.tau : pool.front().tau;
  double tau_sigma = 0.4 * (params.tau_max - params.tau_min);
  Mat mean = pool.empty() ? Mat::Zero(m, p) : pool.front().values;
  Mat sigma(m, p);
  for (int i = 0; i < m; ++i)
    sigma.row(i).setConstant(0.5 * (box[i].second - box[i].first));

  std::vector<Candidate> gen(pop, Candidate{0.0, Mat::Zero(m, p), 0.0});
  while (used + pop <= cem_budget && best.residual > params.residual_target) {
    for (auto& cand : gen) {
      cand.tau = tau_mean + tau_sigma * rng.normal();
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < p; ++j)
          cand.values(i, j) = mean(i, j) + sigma(i, j) * rng.normal();
      if (try_candidate(cand)) return finish();
    }
    std::sort(gen.begin(), gen.end(),
              [](const Candidate& a, const Candidate& b) {
                return a.residual < b.residual;
              });
    gen[elites - 1] = best;  // keep the incumbent in the refit
    double tm = 0.0, ts = 0.0;
    Mat vm = Mat::Zero(m, p), vs = Mat::Zero(m, p);
    for (int k = 0; k < elites; ++k) {
      tm += gen[k].tau;
      vm += gen[k].values;
    }
    tm /= elites;
    vm /= elites;
    for (int k = 0; k < elites; ++k) {
      ts += (gen[k].tau - tm) * (gen[k].tau - tm);
      vs += (gen[k].values - vm).cwiseProduct(gen[k].values - vm);
    }
    tau_mean = blend * tm + (1.0 - blend) * tau_mean;
    tau_sigma = std::max(blend * std::sqrt(ts / elites) + (1.0 - blend) * tau_sigma, 1e-5);
    mean = blend * vm + (1.0 - blend) * mean;
    sigma = (blend * (vs / elites).cwiseSqrt() + (1.0 - blend) * sigma).cwiseMax(1e-5);
    if (tau_sigma <= 2e-5 && sigma.maxCoeff() <= 2e-5) break;  // collapsed
  }

  // damped least-squares polish on the endpoint residual vector; steers the
  // incumbent (and the best shooting candidates) onto the target
  const int nparams = 1 + m * p;
  auto pack_theta = [&](const Candidate& c) {
    Vec th(nparams);
    th(0) = c.tau;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < p; ++j) th(1 + i * p + j) = c.values(i, j);
    return th;
  };
  auto unpack_theta = [&](const Vec& th) {
    Candidate c{th(0), Mat(m, p), 0.0};
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < p; ++j) c.values(i, j) = th(1 + i * p + j);
    clamp_candidate(c);
    return c;
  };
  auto residual_vec = [&](const Candidate& c) -> Vec {
    return flatten(r, endpoint_of(c)) - target_flat;
  };

  std::vector<Candidate> starts;
  starts.push_back(best);
  for (const auto& c : pool) {
    if (static_cast<int>(starts.size()) >= 6) break;
    bool close = false;
    for (const auto& s : starts) close = close || std::abs(s.tau - c.tau) < 0.5;
    if (!close) starts.push_back(c);
  }

  for (const auto& start : starts) {
    if (used >= params.budget || best.residual <= params.residual_target) break;
    Vec theta = pack_theta(start);
    Candidate cur = unpack_theta(theta);
    Vec res = residual_vec(cur);
    double lambda = 1e-2;
    for (int it = 0; it < 80 && used + nparams + 2 < params.budget; ++it) {
      Mat jac(res.size(), nparams);
      for (int j = 0; j < nparams; ++j) {
        double h = 1e-6 * std::max(1.0, std::abs(theta(j)));
        Vec tp = theta;
        tp(j) += h;
        jac.col(j) = (residual_vec(unpack_theta(tp)) - res) / h;
      }
      bool accepted = false;
      for (int retry = 0; retry < 8 && used < params.budget; ++retry) {
        Mat a = jac.transpose() * jac + lambda * Mat::Identity(nparams, nparams);
        Vec step = a.ldlt().solve(Vec(-jac.transpose() * res));
        Vec trial = theta + step;
        Candidate cand = unpack_theta(trial);
        Vec trial_res = residual_vec(cand);
        if (trial_res.norm() < res.norm()) {
          theta = pack_theta(cand);
          res = trial_res;
          lambda = std::max(1e-12, lambda / 3.0);
          accepted = true;
          break;
        }
        lambda *= 5.0;
      }
      // track the spec metric for the incumbent
      Candidate cand = unpack_theta(theta);
      if (try_candidate(cand)) return finish();
      if (!accepted || res.norm() <= 0.25 * params.residual_target) break;
    }
  }
  return finish();
}

}  // namespace liectrl

#include "liectrl/matfun.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

namespace liectrl {

namespace {

// Degree-13 Padé coefficients.
constexpr double kPade13[] = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
    1187353796428800.0,  129060195264000.0,   10559470521600.0,
    670442572800.0,      33522128640.0,       1323241920.0,
    40840800.0,          960960.0,            16380.0,
    182.0,               1.0};

// Largest 1-norm for which the degree-13 approximant meets double precision.
constexpr double kTheta13 = 5.371920351148152;

double one_norm(const Mat& a) { return a.cwiseAbs().colwise().sum().maxCoeff(); }

// Denman-Beavers square root; requires no eigenvalues on (-inf, 0].
Mat sqrtm_db(const Mat& a) {
  const int n = static_cast<int>(a.rows());
  Mat y = a, z = Mat::Identity(n, n);
  for (int it = 0; it < 60; ++it) {
    Mat y_next = 0.5 * (y + z.inverse());
    Mat z_next = 0.5 * (z + y.inverse());
    double delta = (y_next - y).norm();
    y = y_next;
    z = z_next;
    if (delta <= 1e-15 * std::max(1.0, y.norm())) break;
  }
  return y;
}

}  // namespace

Mat expm(const Mat& a) {
  if (a.rows() != a.cols())
    fail(ErrorCode::InvalidInput, "expm: matrix must be square");
  const int n = static_cast<int>(a.rows());
  if (n == 0) return a;

  double norm = one_norm(a);
  int squarings = 0;
  if (norm > kTheta13)
    squarings = static_cast<int>(std::ceil(std::log2(norm / kTheta13)));
  Mat x = a / std::pow(2.0, squarings);

  Mat I = Mat::Identity(n, n);
  Mat x2 = x * x;
  Mat x4 = x2 * x2;
  Mat x6 = x4 * x2;

  Mat u = x * (x6 * (kPade13[13] * x6 + kPade13[11] * x4 + kPade13[9] * x2) +
               kPade13[7] * x6 + kPade13[5] * x4 + kPade13[3] * x2 + kPade13[1] * I);
  Mat v = x6 * (kPade13[12] * x6 + kPade13[10] * x4 + kPade13[8] * x2) +
          kPade13[6] * x6 + kPade13[4] * x4 + kPade13[2] * x2 + kPade13[0] * I;

  Mat result = (v - u).partialPivLu().solve(v + u);
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

std::optional<Mat> logm_principal(const Mat& a, double max_angle) {
  if (a.rows() != a.cols())
    fail(ErrorCode::InvalidInput, "logm: matrix must be square");
  const int n = static_cast<int>(a.rows());

  Eigen::ComplexEigenSolver<Mat> es(a, /*computeEigenvectors=*/false);
  for (int i = 0; i < n; ++i) {
    Complex lambda = es.eigenvalues()(i);
    if (std::abs(lambda) < 1e-12) return std::nullopt;
    if (std::abs(std::arg(lambda)) > max_angle) return std::nullopt;
  }

  Mat I = Mat::Identity(n, n);
  Mat b = a;
  int sqrt_count = 0;
  while ((b - I).norm() > 0.25 && sqrt_count < 60) {
    b = sqrtm_db(b);
    ++sqrt_count;
  }
  if ((b - I).norm() > 0.25) return std::nullopt;

  // log(I + X) series; ||X|| <= 0.25 so 40 terms are far below double eps
  Mat x = b - I;
  Mat term = x;
  Mat acc = Mat::Zero(n, n);
  for (int m = 1; m <= 40; ++m) {
    acc += (m % 2 == 1 ? 1.0 : -1.0) / m * term;
    term = term * x;
  }
  return acc * std::pow(2.0, sqrt_count);
}

Mat polar_orthogonal(const Mat& a) {
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

}  // namespace liectrl

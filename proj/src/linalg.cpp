#include "fockmod/linalg.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <random>

namespace fockmod {

namespace {
constexpr long kExactSvdLimit = 420;

Vec deterministic_start(long n) {
  std::mt19937_64 gen(0x9e3779b97f4a7c15ull);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vec v(n);
  for (long i = 0; i < n; ++i) v[i] = cx(u(gen), u(gen));
  v.normalize();
  return v;
}
}  // namespace

double op_norm_lazy(long cols, const std::function<Vec(const Vec&)>& apply,
                    const std::function<Vec(const Vec&)>& apply_adjoint) {
  if (cols == 0) return 0.0;
  Vec x = deterministic_start(cols);
  double prev = -1.0;
  for (int it = 0; it < 300; ++it) {
    Vec y = apply(x);
    double ny = y.norm();
    if (ny == 0.0) return 0.0;
    Vec z = apply_adjoint(y / ny);
    double nz = z.norm();
    if (nz == 0.0) return ny;
    x = z / nz;
    // At convergence both ny and nz approach sigma_max; the Rayleigh growth is monotone.
    double est = std::sqrt(ny * nz);
    if (it > 10 && std::abs(est - prev) <= 1e-7 * std::max(1.0, est)) return est;
    prev = est;
  }
  return prev;
}

double op_norm(const Mat& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  if (std::max(a.rows(), a.cols()) <= kExactSvdLimit) {
    Eigen::JacobiSVD<Mat> svd(a);
    return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  }
  return op_norm_lazy(
      a.cols(), [&](const Vec& v) { return Vec(a * v); },
      [&](const Vec& v) { return Vec(a.adjoint() * v); });
}

Mat null_space(const Mat& a, double tol) {
  if (a.cols() == 0) return Mat::Zero(0, 0);
  if (a.rows() == 0) return Mat::Identity(a.cols(), a.cols());
  Eigen::VectorXd sv;
  Mat v;
  if (std::max(a.rows(), a.cols()) > 96) {
    Eigen::BDCSVD<Mat> svd(a, Eigen::ComputeFullV);
    sv = svd.singularValues();
    v = svd.matrixV();
  } else {
    Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullV);
    sv = svd.singularValues();
    v = svd.matrixV();
  }
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) ++rank;
  return v.rightCols(a.cols() - rank);
}

int numeric_rank(const Mat& a, double tol) {
  if (a.rows() == 0 || a.cols() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(a);
  const auto& s = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > tol) ++rank;
  return rank;
}

Mat polar_unitary(const Mat& a) {
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

Mat kron_identity_left(int d, const Mat& a) {
  Mat out = Mat::Zero(d * a.rows(), d * a.cols());
  for (int i = 0; i < d; ++i) out.block(i * a.rows(), i * a.cols(), a.rows(), a.cols()) = a;
  return out;
}

Mat kron_identity_right(const Mat& a, int d) {
  Mat out = Mat::Zero(a.rows() * d, a.cols() * d);
  for (long r = 0; r < a.rows(); ++r)
    for (long c = 0; c < a.cols(); ++c) {
      if (a(r, c) == cx(0.0, 0.0)) continue;
      for (int i = 0; i < d; ++i) out(r * d + i, c * d + i) = a(r, c);
    }
  return out;
}

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (long r = 0; r < a.rows(); ++r)
    for (long c = 0; c < a.cols(); ++c)
      out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
  return out;
}

double unitary_defect(const Mat& u) {
  double d1 = (u.adjoint() * u - Mat::Identity(u.cols(), u.cols())).cwiseAbs().maxCoeff();
  double d2 = (u * u.adjoint() - Mat::Identity(u.rows(), u.rows())).cwiseAbs().maxCoeff();
  return std::max(d1, d2);
}

}  // namespace fockmod

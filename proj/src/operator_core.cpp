#include "fockmod/operator_core.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace fockmod {

void GradedOperator::check_shape() const {
  if (!domain || !codomain) throw DomainError("GradedOperator: missing basis");
  if (matrix.rows() != codomain->dim || matrix.cols() != letter_dim * domain->dim)
    throw DomainError("GradedOperator: matrix shape does not match bases");
}

double Frame::orthonormality_defect() const {
  if (columns.cols() == 0) return 0.0;
  return (columns.adjoint() * columns - Mat::Identity(columns.cols(), columns.cols()))
      .cwiseAbs()
      .maxCoeff();
}

namespace {

// Phase-fix: largest-magnitude entry of each column made positive real,
// ties broken by lowest row index.
void phase_fix(Mat& cols) {
  for (long j = 0; j < cols.cols(); ++j) {
    long best = 0;
    double mag = -1.0;
    for (long r = 0; r < cols.rows(); ++r) {
      double m = std::abs(cols(r, j));
      if (m > mag) {
        mag = m;
        best = r;
      }
    }
    if (mag <= 0.0) continue;
    cx v = cols(best, j);
    cols.col(j) *= std::conj(v) / std::abs(v);
  }
}

bool is_canonical(const Frame& f) {
  if (f.columns.cols() == 0) return true;
  if (f.orthonormality_defect() > 1e-13) return false;
  for (long j = 0; j < f.columns.cols(); ++j) {
    long best = 0;
    double mag = -1.0;
    for (long r = 0; r < f.columns.rows(); ++r) {
      double m = std::abs(f.columns(r, j));
      if (m > mag) {
        mag = m;
        best = r;
      }
    }
    cx v = f.columns(best, j);
    if (std::abs(v.imag()) > 1e-15 * std::max(1.0, std::abs(v)) || v.real() < 0.0) return false;
  }
  return true;
}

}  // namespace

Frame frame_from_projector(BasisPtr basis, const Mat& projector, int rank, double tol) {
  Frame f;
  f.basis = std::move(basis);
  f.rank_tol = tol;
  if (rank == 0) {
    f.columns = Mat::Zero(projector.rows(), 0);
    return f;
  }
  Eigen::ColPivHouseholderQR<Mat> qr(projector);
  Mat q = qr.householderQ() * Mat::Identity(projector.rows(), rank);
  phase_fix(q);
  f.columns = std::move(q);
  return f;
}

Frame orthonormal_frame(BasisPtr basis, const Mat& vectors, double tol) {
  if (vectors.cols() == 0) {
    Frame f;
    f.rank_tol = tol;
    f.columns = Mat::Zero(basis ? basis->dim : vectors.rows(), 0);
    f.basis = std::move(basis);
    return f;
  }
  Eigen::VectorXd sv;
  Mat u;
  if (std::max(vectors.rows(), vectors.cols()) > 96) {
    Eigen::BDCSVD<Mat> svd(vectors, Eigen::ComputeThinU);
    sv = svd.singularValues();
    u = svd.matrixU();
  } else {
    Eigen::JacobiSVD<Mat> svd(vectors, Eigen::ComputeThinU);
    sv = svd.singularValues();
    u = svd.matrixU();
  }
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) ++rank;
  Mat ur = u.leftCols(rank);
  return frame_from_projector(std::move(basis), ur * ur.adjoint(), rank, tol);
}

Frame canonicalize(const Frame& f) {
  if (is_canonical(f)) return f;
  return orthonormal_frame(f.basis, f.columns, f.rank_tol);
}

Frame kernel_intersection_matrices(BasisPtr basis, const std::vector<Mat>& mats, double tol) {
  long n = basis ? basis->dim : (mats.empty() ? 0 : mats[0].cols());
  long rows = 0;
  for (const auto& m : mats) {
    if (m.cols() != n) throw DomainError("kernel_intersection: domain mismatch");
    rows += m.rows();
  }
  Mat stacked(rows, n);
  long off = 0;
  for (const auto& m : mats) {
    stacked.middleRows(off, m.rows()) = m;
    off += m.rows();
  }
  Mat ker = mats.empty() ? Mat::Identity(n, n) : null_space(stacked, tol);
  return orthonormal_frame(std::move(basis), ker, tol);
}

Frame kernel_intersection(const std::vector<const GradedOperator*>& ops, double tol) {
  if (ops.empty()) throw DomainError("kernel_intersection: no operators");
  BasisPtr basis = ops[0]->domain;
  std::vector<Mat> mats;
  for (const auto* op : ops) {
    if (!op->domain->same_shape(*basis))
      throw DomainError("kernel_intersection: operators must share a domain basis");
    mats.push_back(op->matrix);
  }
  return kernel_intersection_matrices(basis, mats, tol);
}

SubspaceRelation subspace_ops(const Frame& a, const Frame& b) {
  if (a.columns.rows() != b.columns.rows())
    throw DomainError("subspace_ops: frames live on different spaces");
  const long n = a.columns.rows();
  SubspaceRelation rel;

  Mat pa = a.projector();
  double resid = b.rank() == 0 ? 0.0 : ((b.columns - pa * b.columns).norm());
  rel.contains = resid < a.rank_tol * std::sqrt(static_cast<double>(std::max<long>(n, 1)));

  // intersection: common fixed vectors of both projectors
  Mat stacked(2 * n, n);
  stacked.topRows(n) = Mat::Identity(n, n) - pa;
  stacked.bottomRows(n) = Mat::Identity(n, n) - b.projector();
  Mat ker = null_space(stacked, a.rank_tol);
  rel.intersection = orthonormal_frame(a.basis, ker, a.rank_tol);

  Mat pdiff = pa - rel.intersection.projector();
  int rank = a.rank() - rel.intersection.rank();
  rel.complement_within = frame_from_projector(a.basis, pdiff, std::max(rank, 0), a.rank_tol);
  return rel;
}

Mat degree_projector(const GradedBasis& basis, const Degree& maxdeg) {
  Mat q = Mat::Zero(basis.dim, basis.dim);
  if (maxdeg.empty_window()) return q;
  for (size_t di = 0; di < basis.degrees.size(); ++di) {
    if (!basis.degrees[di].leq(maxdeg)) continue;
    long off = basis.block_offsets[di];
    long len = basis.block_offsets[di + 1] - off;
    for (long i = 0; i < len; ++i) q(off + i, off + i) = 1.0;
  }
  return q;
}

Mat coefficient_window(const GradedBasis& ambient, const Mat& columns, const Degree& maxdeg,
                       double tol) {
  const long w = columns.cols();
  if (w == 0) return Mat::Zero(0, 0);
  if (maxdeg.empty_window()) return Mat::Zero(w, w);
  Mat outside = columns;  // (I - Q) columns
  for (size_t di = 0; di < ambient.degrees.size(); ++di) {
    if (!ambient.degrees[di].leq(maxdeg)) continue;
    long off = ambient.block_offsets[di];
    long len = ambient.block_offsets[di + 1] - off;
    outside.middleRows(off, len).setZero();
  }
  Mat ker = null_space(outside, tol);
  return ker * ker.adjoint();
}

Frame windowed_frame(const Frame& f, const Degree& maxdeg) {
  if (!f.basis) throw DomainError("windowed_frame: frame has no basis");
  Mat p = coefficient_window(*f.basis, f.columns, maxdeg, f.rank_tol);
  if (p.rows() == 0) {
    Frame out = f;
    out.columns = Mat::Zero(f.columns.rows(), 0);
    return out;
  }
  return orthonormal_frame(f.basis, f.columns * p, f.rank_tol);
}

}  // namespace fockmod

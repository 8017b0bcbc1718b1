#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "fockmod/graded_basis.hpp"
#include "fockmod/linalg.hpp"
#include "fockmod/types.hpp"

namespace fockmod {

// Complex matrix on graded bases with degree bookkeeping. The domain may
// carry an extra tensored-on letter space of dimension letter_dim, so a map
// E_i (x) H -> H is a single matrix of shape dim(H) x (d_i * dim(H)).
// valid_window bounds the input degrees for which the action is exact, i.e.
// not clipped by the truncation; a window with a negative entry is empty.
struct GradedOperator {
  BasisPtr domain;
  BasisPtr codomain;
  int letter_dim = 1;
  Mat matrix;
  Degree degree_shift;  // over codomain's active factors
  Degree valid_window;  // over domain's active factors

  void check_shape() const;
};

// Orthonormal column frame for a closed subspace in a graded basis.
// Canonical form: rank decided by singular values above rank_tol, the basis
// then read off a column-pivoted QR of the projector, each column phase-fixed
// so its largest-magnitude entry (ties: lowest row) is positive real.
// Zero-dimensional frames are ordinary values.
struct Frame {
  BasisPtr basis;
  Mat columns;
  double rank_tol = kRankTol;

  long space_dim() const { return basis ? basis->dim : columns.rows(); }
  int rank() const { return static_cast<int>(columns.cols()); }
  Mat projector() const { return columns * columns.adjoint(); }
  double orthonormality_defect() const;
};

// Canonical frame spanning the given vectors (columns of a matrix on one basis).
Frame orthonormal_frame(BasisPtr basis, const Mat& vectors, double tol = kRankTol);

// Canonical frame of the range of a (near-)projector with the given rank.
Frame frame_from_projector(BasisPtr basis, const Mat& projector, int rank, double tol = kRankTol);

// Re-canonicalizes; returns the input unchanged (bit for bit) when it is
// already canonical.
Frame canonicalize(const Frame& f);

// Canonical frame for the intersection of the kernels of the given operators
// (shared domain basis), by stacking and taking the null space at rank_tol.
Frame kernel_intersection(const std::vector<const GradedOperator*>& ops, double tol = kRankTol);
Frame kernel_intersection_matrices(BasisPtr basis, const std::vector<Mat>& mats,
                                   double tol = kRankTol);

struct SubspaceRelation {
  bool contains = false;  // b subset of a
  Frame intersection;
  Frame complement_within;  // a minus (a intersect b)
};

// Containment of b in a, their intersection, and the complement of the
// intersection inside a.
SubspaceRelation subspace_ops(const Frame& a, const Frame& b);

// Diagonal 0/1 projector selecting basis vectors of degree <= maxdeg
// (componentwise, over the basis's active factors). Empty window -> zero.
Mat degree_projector(const GradedBasis& basis, const Degree& maxdeg);

// Canonical frame for (range f) intersected with {degree <= maxdeg}: the
// columns of f restricted to coefficient combinations supported inside the
// window, computed from the null space of (I - Q) f.
Frame windowed_frame(const Frame& f, const Degree& maxdeg);

// Projector on coefficient space C^w selecting combinations c with
// columns*c supported in degrees <= maxdeg. Used to window identities whose
// coefficient space embeds in a larger graded basis.
Mat coefficient_window(const GradedBasis& ambient, const Mat& columns, const Degree& maxdeg,
                       double tol = kRankTol);

}  // namespace fockmod

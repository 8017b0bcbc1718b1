#pragma once

#include <functional>

#include "fockmod/types.hpp"

namespace fockmod {

// Largest singular value. Exact SVD for small matrices, deterministic power
// iteration on A^*A for large ones.
double op_norm(const Mat& a);

// Operator norm of an implicitly given map via apply/apply_adjoint closures.
double op_norm_lazy(long cols, const std::function<Vec(const Vec&)>& apply,
                    const std::function<Vec(const Vec&)>& apply_adjoint);

// Orthonormal basis of {x : a x = 0}, singular values below tol treated as 0.
Mat null_space(const Mat& a, double tol = kRankTol);

// Number of singular values above tol.
int numeric_rank(const Mat& a, double tol = kRankTol);

// Unitary factor of the polar decomposition a = U P (a square, full rank).
Mat polar_unitary(const Mat& a);

// kron(I_d, a).
Mat kron_identity_left(int d, const Mat& a);

// kron(a, I_d).
Mat kron_identity_right(const Mat& a, int d);

Mat kron(const Mat& a, const Mat& b);

double unitary_defect(const Mat& u);  // max of ||U*U - I||, ||UU* - I|| entrywise

}  // namespace fockmod

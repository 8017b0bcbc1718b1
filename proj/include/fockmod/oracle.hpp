#pragma once

#include <vector>

#include "fockmod/graded_basis.hpp"

// Literal-formula reference path. Everything here is rebuilt from basis
// labels and flip entries, one basis vector at a time; it must not include
// any module beyond the basis layer.
namespace fockmod::oracle {

// V^{(slot)}(e_a) on the truncated basis: the incoming letter crosses the
// letters of earlier factors by explicit pairwise flip entries and lands at
// the front of its factor's word.
Mat creation_letter(const GradedBasis& basis, int slot, int a);

// E_slot (x) H -> H assembled letter by letter.
Mat creation_map(const GradedBasis& basis, int slot);

// V_n : E(n) (x) H -> H as the literal composition of creation letters.
Mat power_map(const GradedBasis& basis, const Degree& n);

// Multiplier action: for each basis vector of degree n, reorder the extra
// letter past the word (explicit flips), feed the result through theta, then
// re-create the word letter by letter. theta: dim x (d_extra * coeff_dim).
Mat multiplier_literal(const GradedBasis& basis, int extra_factor, const Mat& theta);

// Commutant-symbol series sum_n S_n (I (x) P_W) V_n^* X |_W with the target
// laid out over `target`: every term evaluated by the literal power maps.
Mat extract_symbol_literal(const GradedBasis& basis, const GradedBasis& target,
                           const std::vector<Mat>& tuple_maps, const std::vector<int>& factors,
                           const Mat& extra, int extra_factor, const Mat& wandering);

// Literal isometry check. The Gram of the full column set must be a
// projector (truncated creations are partial isometries); when `windowed` the
// Gram restricted to columns of degree <= window must additionally be the
// identity. Label-degree windows only make sense for tuples whose grading is
// untransported, hence the flag.
double isometry_defect_literal(const GradedBasis& basis, const Mat& map, int letter_dim,
                               const Degree& window, bool windowed = true);

}  // namespace fockmod::oracle

#pragma once

#include <map>
#include <utility>
#include <vector>

#include "fockmod/types.hpp"

namespace fockmod {

// Shape of the product system: correspondence dimensions d_i and the flip
// unitaries identifying reordered tensor factors. Flips are stored once per
// pair i<j as the map E_j (x) E_i -> E_i (x) E_j; the reverse direction is the
// inverse, and the diagonal is the identity. All indices are 0-based in code
// (1-based in serialized form).
struct ProductSystemSpec {
  std::vector<int> dims;
  std::map<std::pair<int, int>, Mat> custom_flips;  // keyed (i,j), i<j

  int factor_count() const { return static_cast<int>(dims.size()); }
  int dim(int i) const { return dims.at(i); }

  // t_{j,i} : E_j (x) E_i -> E_i (x) E_j.
  Mat flip(int i, int j) const;

  // Canonical tensor swap E_j (x) E_i -> E_i (x) E_j.
  static Mat swap_matrix(int d_i, int d_j);

  // Checks dims >= 1 and unitarity of every stored flip.
  void validate(double tol = kUnitaryTol) const;
};

// Builds the spec whose flips are the canonical swaps.
ProductSystemSpec make_swap_spec(std::vector<int> dims);

// Swap composed with a diagonal phase factor: t = diag(phases) * swap, one
// phase family per pair i<j. Phases must be unit modulus.
ProductSystemSpec make_phase_spec(std::vector<int> dims,
                                  const std::map<std::pair<int, int>, std::vector<cx>>& phases);

}  // namespace fockmod

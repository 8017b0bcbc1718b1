#pragma once

#include <memory>
#include <vector>

#include "fockmod/degree.hpp"
#include "fockmod/product_system.hpp"
#include "fockmod/types.hpp"

namespace fockmod {

// Orthonormal basis of the truncated Fock module over a subset of the
// factors, tensored with a coefficient space C^m. Basis vectors are labeled
// (degree, one word per active factor, coefficient index) and enumerated in
// the normative order: blocks by (total degree, lexicographic degree), then
// concatenated word lexicographic, then coefficient index. The within-block
// layout therefore matches the Kronecker convention with the first tensor
// factor most significant and the coefficient index fastest.
struct GradedBasis {
  ProductSystemSpec spec;
  std::vector<int> factors;  // active global factor indices, 0-based, ascending
  Degree cap;                // per active factor
  int coeff_dim = 1;

  std::vector<Degree> degrees;      // graded-lex sorted
  std::vector<long> block_offsets;  // degrees.size()+1 entries; last = dim
  long dim = 0;

  struct Label {
    Degree deg;
    std::vector<std::vector<int>> words;  // one word per active factor
    int coeff = 0;
  };

  int factor_dim(int pos) const { return spec.dim(factors.at(pos)); }
  int rank() const { return static_cast<int>(factors.size()); }

  long word_count(const Degree& n) const;           // dim of E(n)
  long block_dim(const Degree& n) const { return word_count(n) * coeff_dim; }
  int degree_index(const Degree& n) const;          // -1 if absent
  long block_offset(const Degree& n) const;

  long index_of(const Label& label) const;
  Label label_of(long index) const;
  const Degree& degree_of(long index) const;

  // Letters of E(n) in concatenation order, as global factor indices.
  std::vector<int> letters(const Degree& n) const;

  bool same_shape(const GradedBasis& o) const;
};

using BasisPtr = std::shared_ptr<const GradedBasis>;

// Enumerates the truncated basis. Throws CapacityError when the dimension
// exceeds max_dim.
BasisPtr enumerate_basis(const ProductSystemSpec& spec, const Degree& cap, int coeff_dim,
                         std::vector<int> factors = {}, long max_dim = kDefaultMaxDim);

// The unitary E_slot (x) E(n) -> E(n) (x) E_slot moving the source letter
// past every letter of E(n), left to right (factor 1's letters first).
Mat reorder_tensor(const GradedBasis& basis, int slot, const Degree& n);

// The unitary E_slot (x) E(n) -> E(n + e_slot) realizing creation: the letter
// crosses the letters of strictly earlier factors and lands at the front of
// its own factor's word. slot must be active in the basis.
Mat insertion_unitary(const GradedBasis& basis, int slot, const Degree& n);

// Crossing of the source letter past the first `count` letters of the list.
Mat crossing_product(const ProductSystemSpec& spec, int slot, const std::vector<int>& letters,
                     int count);

}  // namespace fockmod

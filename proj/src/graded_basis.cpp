#include "fockmod/graded_basis.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace fockmod {

long GradedBasis::word_count(const Degree& n) const {
  long c = 1;
  for (int p = 0; p < rank(); ++p)
    for (int q = 0; q < n[p]; ++q) c *= factor_dim(p);
  return c;
}

int GradedBasis::degree_index(const Degree& n) const {
  auto it = std::lower_bound(degrees.begin(), degrees.end(), n, graded_lex_less);
  if (it == degrees.end() || !(*it == n)) return -1;
  return static_cast<int>(it - degrees.begin());
}

long GradedBasis::block_offset(const Degree& n) const {
  int di = degree_index(n);
  if (di < 0) throw DomainError("GradedBasis: degree " + n.str() + " outside cap");
  return block_offsets[di];
}

std::vector<int> GradedBasis::letters(const Degree& n) const {
  std::vector<int> out;
  for (int p = 0; p < rank(); ++p)
    for (int q = 0; q < n[p]; ++q) out.push_back(factors[p]);
  return out;
}

long GradedBasis::index_of(const Label& label) const {
  if (label.coeff < 0 || label.coeff >= coeff_dim)
    throw DomainError("GradedBasis: coefficient index out of range");
  long w = 0;
  for (int p = 0; p < rank(); ++p) {
    const auto& word = label.words.at(p);
    if (static_cast<int>(word.size()) != label.deg[p])
      throw DomainError("GradedBasis: word length does not match degree");
    for (int letter : word) {
      if (letter < 0 || letter >= factor_dim(p))
        throw DomainError("GradedBasis: letter out of range");
      w = w * factor_dim(p) + letter;
    }
  }
  return block_offset(label.deg) + w * coeff_dim + label.coeff;
}

GradedBasis::Label GradedBasis::label_of(long index) const {
  if (index < 0 || index >= dim) throw DomainError("GradedBasis: index out of range");
  auto it = std::upper_bound(block_offsets.begin(), block_offsets.end(), index);
  int di = static_cast<int>(it - block_offsets.begin()) - 1;
  Label label;
  label.deg = degrees[di];
  long rem = index - block_offsets[di];
  label.coeff = static_cast<int>(rem % coeff_dim);
  long w = rem / coeff_dim;
  label.words.assign(rank(), {});
  for (int p = rank() - 1; p >= 0; --p) {
    std::vector<int> word(label.deg[p]);
    for (int q = label.deg[p] - 1; q >= 0; --q) {
      word[q] = static_cast<int>(w % factor_dim(p));
      w /= factor_dim(p);
    }
    label.words[p] = std::move(word);
  }
  return label;
}

const Degree& GradedBasis::degree_of(long index) const {
  auto it = std::upper_bound(block_offsets.begin(), block_offsets.end(), index);
  return degrees[static_cast<int>(it - block_offsets.begin()) - 1];
}

bool GradedBasis::same_shape(const GradedBasis& o) const {
  return spec.dims == o.spec.dims && factors == o.factors && cap == o.cap &&
         coeff_dim == o.coeff_dim;
}

BasisPtr enumerate_basis(const ProductSystemSpec& spec, const Degree& cap, int coeff_dim,
                         std::vector<int> factors, long max_dim) {
  spec.validate();
  if (coeff_dim < 1) throw DomainError("enumerate_basis: coeff_dim must be >= 1");
  if (factors.empty()) {
    factors.resize(spec.factor_count());
    std::iota(factors.begin(), factors.end(), 0);
  }
  std::sort(factors.begin(), factors.end());
  for (int f : factors)
    if (f < 0 || f >= spec.factor_count())
      throw DomainError("enumerate_basis: factor index out of range");
  if (cap.size() != static_cast<int>(factors.size()))
    throw DomainError("enumerate_basis: cap rank must match active factor count");
  for (int i = 0; i < cap.size(); ++i)
    if (cap[i] < 0) throw DomainError("enumerate_basis: cap must be componentwise >= 0");

  auto basis = std::make_shared<GradedBasis>();
  basis->spec = spec;
  basis->factors = std::move(factors);
  basis->cap = cap;
  basis->coeff_dim = coeff_dim;
  basis->degrees = degrees_up_to(cap);
  basis->block_offsets.reserve(basis->degrees.size() + 1);
  long off = 0;
  for (const Degree& n : basis->degrees) {
    basis->block_offsets.push_back(off);
    off += basis->block_dim(n);
    if (off > max_dim) {
      std::ostringstream os;
      os << "enumerate_basis: dimension exceeds limit " << max_dim;
      throw CapacityError(os.str());
    }
  }
  basis->block_offsets.push_back(off);
  basis->dim = off;
  return basis;
}

Mat crossing_product(const ProductSystemSpec& spec, int slot, const std::vector<int>& letters,
                     int count) {
  const int ds = spec.dim(slot);
  long total = ds;
  for (int f : letters) total *= spec.dim(f);
  Mat result = Mat::Identity(total, total);
  long pre = 1;
  for (int p = 0; p < count; ++p) {
    const int df = spec.dim(letters[p]);
    long post = 1;
    for (size_t q = p + 1; q < letters.size(); ++q) post *= spec.dim(letters[q]);
    // t_{slot,f} : E_slot (x) E_f -> E_f (x) E_slot applied at position p.
    const Mat t = spec.flip(letters[p], slot);
    Mat step = Mat::Zero(total, total);
    const long mid = static_cast<long>(ds) * df;
    for (long a = 0; a < pre; ++a)
      for (long r = 0; r < mid; ++r)
        for (long c = 0; c < mid; ++c) {
          if (t(r, c) == cx(0.0, 0.0)) continue;
          for (long b = 0; b < post; ++b)
            step((a * mid + r) * post + b, (a * mid + c) * post + b) = t(r, c);
        }
    result = step * result;
    pre *= df;
  }
  return result;
}

Mat reorder_tensor(const GradedBasis& basis, int slot, const Degree& n) {
  if (slot < 0 || slot >= basis.spec.factor_count())
    throw DomainError("reorder_tensor: slot out of range");
  if (!n.leq(basis.cap)) throw DomainError("reorder_tensor: degree exceeds cap");
  auto letters = basis.letters(n);
  return crossing_product(basis.spec, slot, letters, static_cast<int>(letters.size()));
}

Mat insertion_unitary(const GradedBasis& basis, int slot, const Degree& n) {
  auto pos_it = std::find(basis.factors.begin(), basis.factors.end(), slot);
  if (pos_it == basis.factors.end())
    throw DomainError("insertion_unitary: slot is not an active factor");
  const int pos = static_cast<int>(pos_it - basis.factors.begin());
  if (!n.leq(basis.cap)) throw DomainError("insertion_unitary: degree exceeds cap");
  auto letters = basis.letters(n);
  int count = 0;
  for (int p = 0; p < pos; ++p) count += n[p];
  (void)letters;
  return crossing_product(basis.spec, slot, letters, count);
}

}  // namespace fockmod

#include "fockmod/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace fockmod::oracle {

namespace {

struct Carry {
  std::vector<int> prefix;  // letters already crossed, updated values
  int carried;              // current value of the walking letter
  bool operator<(const Carry& o) const {
    if (prefix != o.prefix) return prefix < o.prefix;
    return carried < o.carried;
  }
};

// Walk letter `a` of factor `slot` past the first `count` letters of the
// word, branching on flip entries.
std::map<Carry, cx> cross_walk(const ProductSystemSpec& spec, int slot, int a,
                               const std::vector<int>& letter_factors,
                               const std::vector<int>& letter_values, int count) {
  std::map<Carry, cx> states;
  states[{{}, a}] = cx(1.0, 0.0);
  const int ds = spec.dim(slot);
  for (int p = 0; p < count; ++p) {
    const int f = letter_factors[p];
    const int df = spec.dim(f);
    const Mat t = spec.flip(f, slot);  // E_slot (x) E_f -> E_f (x) E_slot
    std::map<Carry, cx> next;
    for (const auto& [st, amp] : states) {
      const int y = letter_values[p];
      for (int y2 = 0; y2 < df; ++y2)
        for (int b2 = 0; b2 < ds; ++b2) {
          cx v = t(y2 * ds + b2, st.carried * df + y);
          if (v == cx(0.0, 0.0)) continue;
          Carry c = st;
          c.prefix.push_back(y2);
          c.carried = b2;
          next[c] += amp * v;
        }
    }
    states = std::move(next);
  }
  return states;
}

}  // namespace

Mat creation_letter(const GradedBasis& basis, int slot, int a) {
  const long n = basis.dim;
  Mat out = Mat::Zero(n, n);
  int pos = -1;
  for (int p = 0; p < basis.rank(); ++p)
    if (basis.factors[p] == slot) pos = p;
  if (pos < 0) throw DomainError("oracle::creation_letter: slot not active");

  for (long idx = 0; idx < n; ++idx) {
    GradedBasis::Label label = basis.label_of(idx);
    Degree up = label.deg.plus_unit(pos);
    if (!up.leq(basis.cap)) continue;  // clipped
    std::vector<int> letter_factors, letter_values;
    for (int p = 0; p < pos; ++p)
      for (int v : label.words[p]) {
        letter_factors.push_back(basis.factors[p]);
        letter_values.push_back(v);
      }
    auto states = cross_walk(basis.spec, slot, a, letter_factors, letter_values,
                             static_cast<int>(letter_factors.size()));
    for (const auto& [st, amp] : states) {
      GradedBasis::Label out_label;
      out_label.deg = up;
      out_label.coeff = label.coeff;
      out_label.words = label.words;
      // scatter the updated prefix back into the per-factor words
      int cursor = 0;
      for (int p = 0; p < pos; ++p)
        for (int q = 0; q < label.deg[p]; ++q) out_label.words[p][q] = st.prefix[cursor++];
      out_label.words[pos].insert(out_label.words[pos].begin(), st.carried);
      out(basis.index_of(out_label), idx) += amp;
    }
  }
  return out;
}

Mat creation_map(const GradedBasis& basis, int slot) {
  const long n = basis.dim;
  const int d = basis.spec.dim(slot);
  Mat out(n, d * n);
  for (int a = 0; a < d; ++a) out.middleCols(a * n, n) = creation_letter(basis, slot, a);
  return out;
}

Mat power_map(const GradedBasis& basis, const Degree& n) {
  const long dim = basis.dim;
  const long wc = basis.word_count(n);
  auto letters = basis.letters(n);
  // cache the creation letter matrices used
  std::map<std::pair<int, int>, Mat> cache;
  auto letter_mat = [&](int f, int a) -> const Mat& {
    auto key = std::make_pair(f, a);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, creation_letter(basis, f, a)).first;
    return it->second;
  };

  Mat out(dim, wc * dim);
  std::vector<int> word(letters.size(), 0);
  for (long w = 0; w < wc; ++w) {
    // decode word w in mixed radix, first letter most significant
    long tmp = w;
    for (int p = static_cast<int>(letters.size()) - 1; p >= 0; --p) {
      word[p] = static_cast<int>(tmp % basis.spec.dim(letters[p]));
      tmp /= basis.spec.dim(letters[p]);
    }
    for (long h = 0; h < dim; ++h) {
      Vec v = Vec::Zero(dim);
      v[h] = 1.0;
      for (int p = static_cast<int>(letters.size()) - 1; p >= 0; --p)
        v = letter_mat(letters[p], word[p]) * v;
      out.col(w * dim + h) = v;
    }
  }
  return out;
}

Mat multiplier_literal(const GradedBasis& basis, int extra_factor, const Mat& theta) {
  const long n = basis.dim;
  const int de = basis.spec.dim(extra_factor);
  const int m = basis.coeff_dim;
  if (theta.rows() != n || theta.cols() != de * m)
    throw DomainError("oracle::multiplier_literal: theta shape mismatch");

  std::map<std::pair<int, int>, Mat> cache;
  auto letter_mat = [&](int f, int a) -> const Mat& {
    auto key = std::make_pair(f, a);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, creation_letter(basis, f, a)).first;
    return it->second;
  };

  Mat out = Mat::Zero(n, de * n);
  for (int a = 0; a < de; ++a)
    for (long idx = 0; idx < n; ++idx) {
      GradedBasis::Label label = basis.label_of(idx);
      std::vector<int> letter_factors, letter_values;
      for (int p = 0; p < basis.rank(); ++p)
        for (int v : label.words[p]) {
          letter_factors.push_back(basis.factors[p]);
          letter_values.push_back(v);
        }
      auto states = cross_walk(basis.spec, extra_factor, a, letter_factors, letter_values,
                               static_cast<int>(letter_factors.size()));
      Vec total = Vec::Zero(n);
      for (const auto& [st, amp] : states) {
        // theta applied to (carried letter (x) coefficient)
        Vec v = theta.col(st.carried * m + label.coeff);
        // re-create the reordered word, last letter first
        for (int p = static_cast<int>(st.prefix.size()) - 1; p >= 0; --p)
          v = letter_mat(letter_factors[p], st.prefix[p]) * v;
        total += amp * v;
      }
      out.col(a * n + idx) = total;
    }
  return out;
}

Mat extract_symbol_literal(const GradedBasis& basis, const GradedBasis& target,
                           const std::vector<Mat>& tuple_maps, const std::vector<int>& factors,
                           const Mat& extra, int extra_factor, const Mat& wandering) {
  const long n = basis.dim;
  const int de = basis.spec.dim(extra_factor);
  const long w = wandering.cols();
  Mat y(n, de * w);
  for (int a = 0; a < de; ++a) y.middleCols(a * w, w) = extra.middleCols(a * n, n) * wandering;

  auto map_of = [&](int f) -> const Mat& {
    for (size_t i = 0; i < factors.size(); ++i)
      if (factors[i] == f) return tuple_maps[i];
    throw DomainError("oracle::extract_symbol_literal: no map for factor");
  };

  // positions of the series factors inside the basis, and the masked bound
  std::vector<int> pos;
  for (int f : factors) {
    for (int p = 0; p < basis.rank(); ++p)
      if (basis.factors[p] == f) pos.push_back(p);
  }
  Degree bound = Degree::zero(basis.rank());
  for (int p : pos) bound[p] = basis.cap[p];
  auto sub_of = [&](const Degree& deg) {
    Degree sd(std::vector<int>(pos.size(), 0));
    for (size_t q = 0; q < pos.size(); ++q) sd[static_cast<int>(q)] = deg[pos[q]];
    return sd;
  };

  Mat out = Mat::Zero(target.dim, de * w);
  for (const Degree& deg : degrees_up_to(bound)) {
    const long wc = basis.word_count(deg);
    auto letters = basis.letters(deg);
    Mat cn(n, wc * w);  // V_n (I (x) W), letter by letter
    std::vector<int> word(letters.size(), 0);
    for (long q = 0; q < wc; ++q) {
      long tmp = q;
      for (int p = static_cast<int>(letters.size()) - 1; p >= 0; --p) {
        word[p] = static_cast<int>(tmp % basis.spec.dim(letters[p]));
        tmp /= basis.spec.dim(letters[p]);
      }
      for (long col = 0; col < w; ++col) {
        Vec v = wandering.col(col);
        for (int p = static_cast<int>(letters.size()) - 1; p >= 0; --p) {
          const Mat& vm = map_of(letters[p]);
          v = vm.middleCols(word[p] * n, n) * v;
        }
        cn.col(q * w + col) = v;
      }
    }
    out.middleRows(target.block_offset(sub_of(deg)), wc * w) = cn.adjoint() * y;
  }
  return out;
}

double isometry_defect_literal(const GradedBasis& basis, const Mat& map, int letter_dim,
                               const Degree& window, bool windowed) {
  const long n = basis.dim;
  Mat gram = map.adjoint() * map;
  double worst = (gram * gram - gram).cwiseAbs().maxCoeff();
  if (windowed) {
    std::vector<long> cols;
    for (int a = 0; a < letter_dim; ++a)
      for (long idx = 0; idx < n; ++idx)
        if (basis.degree_of(idx).leq(window)) cols.push_back(a * n + idx);
    for (size_t i = 0; i < cols.size(); ++i)
      for (size_t j = i; j < cols.size(); ++j) {
        cx g = map.col(cols[i]).dot(map.col(cols[j]));
        double expect = cols[i] == cols[j] ? 1.0 : 0.0;
        worst = std::max(worst, std::abs(g - cx(expect, 0.0)));
      }
  }
  return worst;
}

}  // namespace fockmod::oracle

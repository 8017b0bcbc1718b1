#include "fockmod/product_system.hpp"

#include <cmath>
#include <sstream>

namespace fockmod {

Mat ProductSystemSpec::swap_matrix(int d_i, int d_j) {
  // Input index (b,a) = b*d_i + a over E_j (x) E_i; output (a,b) = a*d_j + b.
  Mat t = Mat::Zero(d_i * d_j, d_j * d_i);
  for (int b = 0; b < d_j; ++b)
    for (int a = 0; a < d_i; ++a) t(a * d_j + b, b * d_i + a) = 1.0;
  return t;
}

Mat ProductSystemSpec::flip(int i, int j) const {
  const int r = factor_count();
  if (i < 0 || j < 0 || i >= r || j >= r) throw DomainError("flip: factor index out of range");
  if (i == j) return Mat::Identity(dims[i] * dims[i], dims[i] * dims[i]);
  if (i < j) {
    auto it = custom_flips.find({i, j});
    if (it != custom_flips.end()) return it->second;
    return swap_matrix(dims[i], dims[j]);
  }
  // t_{j,i} with j < i is the inverse of the stored t_{i,j}; flips are unitary.
  auto it = custom_flips.find({j, i});
  if (it != custom_flips.end()) return it->second.adjoint();
  return swap_matrix(dims[j], dims[i]).adjoint();
}

void ProductSystemSpec::validate(double tol) const {
  if (dims.empty()) throw DomainError("ProductSystemSpec: no factors");
  for (int d : dims)
    if (d < 1) throw DomainError("ProductSystemSpec: factor dimension must be >= 1");
  for (const auto& [key, t] : custom_flips) {
    auto [i, j] = key;
    if (!(0 <= i && i < j && j < factor_count()))
      throw DomainError("ProductSystemSpec: flip key must satisfy 0 <= i < j < factors");
    const int rows = dims[i] * dims[j], cols = dims[j] * dims[i];
    if (t.rows() != rows || t.cols() != cols) {
      std::ostringstream os;
      os << "ProductSystemSpec: flip (" << i + 1 << "," << j + 1 << ") has shape " << t.rows()
         << "x" << t.cols() << ", expected " << rows << "x" << cols;
      throw DomainError(os.str());
    }
    double defect = (t.adjoint() * t - Mat::Identity(cols, cols)).cwiseAbs().maxCoeff();
    if (defect > tol) {
      std::ostringstream os;
      os << "ProductSystemSpec: flip (" << i + 1 << "," << j + 1 << ") not unitary, defect "
         << defect;
      throw DomainError(os.str());
    }
  }
}

ProductSystemSpec make_swap_spec(std::vector<int> dims) {
  ProductSystemSpec spec;
  spec.dims = std::move(dims);
  spec.validate();
  return spec;
}

ProductSystemSpec make_phase_spec(std::vector<int> dims,
                                  const std::map<std::pair<int, int>, std::vector<cx>>& phases) {
  ProductSystemSpec spec;
  spec.dims = std::move(dims);
  for (const auto& [key, ph] : phases) {
    auto [i, j] = key;
    const int sz = spec.dims.at(i) * spec.dims.at(j);
    if (static_cast<int>(ph.size()) != sz)
      throw DomainError("make_phase_spec: phase vector size mismatch");
    Mat t = ProductSystemSpec::swap_matrix(spec.dims[i], spec.dims[j]);
    for (int r = 0; r < sz; ++r) {
      if (std::abs(std::abs(ph[r]) - 1.0) > kUnitaryTol)
        throw DomainError("make_phase_spec: phases must be unit modulus");
      t.row(r) *= ph[r];
    }
    spec.custom_flips[{i, j}] = t;
  }
  spec.validate();
  return spec;
}

}  // namespace fockmod

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <complex>
#include <stdexcept>
#include <string>

namespace fockmod {

using cx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using SpMat = Eigen::SparseMatrix<cx>;

inline constexpr double kRankTol = 1e-10;
inline constexpr double kResidualTol = 1e-8;
inline constexpr double kUnitaryTol = 1e-12;
inline constexpr long kDefaultMaxDim = 200000;

// Exit-code-relevant error classes (see CLI: 0 pass, 1 fail, 2 usage, 3 capacity).
struct CapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A gated operation was called on inputs that fail its axiom gate.
struct PreconditionError : std::runtime_error {
  double residual;
  explicit PreconditionError(const std::string& what, double res = 0.0)
      : std::runtime_error(what), residual(res) {}
};

}  // namespace fockmod

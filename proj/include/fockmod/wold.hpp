#pragma once

#include <map>

#include "fockmod/fock_rep.hpp"

namespace fockmod {

// Wold-von Neumann data for a doubly commuting pure isometric tuple: the
// generating wandering subspace W, the target basis F(E) (x) C^w, the block
// isometries C_n = V_n(I (x) W), and the unitary Pi mapping V_n(xi (x) w) to
// xi (x) w. Pi is a partial isometry between the spans realized inside the
// rectangular window of exact blocks; for induced and conjugated tuples the
// window is cap and Pi is unitary.
struct WoldData {
  Frame wandering;
  BasisPtr target;
  Mat pi;  // target->dim x source dim
  Degree window;
  std::map<Degree, Mat, GradedLexLess> blocks;
  long realized_rank = 0;
  double block_gram_residual = 0.0;            // orthonormality across windowed blocks
  std::vector<double> intertwining_residuals;  // per tracked factor, window-limited
};

// Canonical frame of the intersection of the adjoint kernels of the tuple
// maps; restricted to `within` when given. Gates on the isometric and doubly
// commuting axioms unless gate = false.
Frame wandering_subspace(const CovariantTuple& tuple, const Frame* within = nullptr,
                         bool gate = true);

WoldData wold_unitary(const CovariantTuple& tuple, const Frame* within = nullptr,
                      bool gate = true, bool require_complete = true);

}  // namespace fockmod

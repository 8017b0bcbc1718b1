#pragma once

#include "fockmod/wold.hpp"

namespace fockmod {

// Symbol of a multi-analytic map: Theta~ : E_j (x) C^w -> F(E_F) (x) C^w
// stored as its full block matrix, columns indexed (letter of E_j,
// coefficient). Fourier coefficients are degree-block views.
struct Symbol {
  BasisPtr model;         // target basis, coeff_dim = w
  int source_factor = 0;  // global index of the extra correspondence
  int source_dim = 1;
  Mat block;              // model->dim x (source_dim * w)
  bool isometric_flag = false;

  int coeff_dim() const { return model->coeff_dim; }
  double isometry_defect() const;
  // Componentwise max degree carrying weight above tol.
  Degree output_spread(double tol = 1e-13) const;
  // Rows of the given degree block: block_dim(n) x (source_dim * w).
  Mat fourier_coefficient(const Degree& n) const;
};

struct Multiplier {
  Symbol symbol;
  Mat combined;  // model->dim x (source_dim * model->dim)
  Degree valid_window;

  Mat letter(int a) const;
};

// Componentwise bound on how far a map E (x) H -> H raises tracked degrees.
Degree tracked_spread(const GradedBasis& basis, const Mat& map, int letter_dim,
                      double tol = 1e-13);

// M_Theta on the model space by the multiplier action
// M_Theta(xi)(S_n(xi_n)h) = S_n (I (x) Theta~)(t_{j,n} (x) I_K)(xi (x) xi_n (x) h).
Multiplier multiplier_from_symbol(const Symbol& symbol, const CovariantTuple& shifts);

// Restriction of a multiplier to the degree-0 block recovers its symbol.
Symbol symbol_of_multiplier(const Mat& combined, int source_factor, int source_dim,
                            BasisPtr model);

// Commutant symbol: Theta(xi) = sum_n S_n (I (x) P_W) V_n^* V^{(k+1)}(xi)|_W,
// truncated at cap. `extra` is the candidate map E_j (x) H -> H on the tuple's
// space; `wold` must be the tuple's Wold data. Gates on the commutation
// relation between extra and the tuple unless gate = false.
Symbol extract_symbol(const CovariantTuple& first_k, const Mat& extra, int extra_factor,
                      const WoldData& wold, bool gate = true, double gate_tol = kResidualTol);

// Residual of the commutation relation (rep) between `extra` (slot j) and each
// tuple map, evaluated on the common valid window.
double commutation_residual(const CovariantTuple& tuple, const Mat& extra, int extra_factor);

// M_Psi = sum_n T_n (I (x) Psi) V_n^* blockwise: psi maps the source wandering
// coordinates into the target space. Source blocks come from source_wold;
// target powers from the target tuple. Returns a target_dim x source_dim matrix.
Mat multiplier_from_wandering_map(const Mat& psi, const WoldData& source_wold,
                                  const CovariantTuple& target);

struct InnerReport {
  bool inner = false;
  double isometry_defect = 0.0;
  double wandering_defect = 0.0;
};

// Psi is inner iff it is an isometry and its image is wandering for the target.
InnerReport is_inner(const Mat& psi, const CovariantTuple& target, double tol = kResidualTol);

}  // namespace fockmod

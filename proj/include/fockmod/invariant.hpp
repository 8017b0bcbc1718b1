#pragma once

#include "fockmod/multianalytic.hpp"

namespace fockmod {

// Normal form of a doubly commuting pure isometric tuple: the first
// split_count active factors stay shifts on F(E_split) (x) K, the rest turn
// into multipliers of isometric symbols Theta_j with
// Theta_j(xi) = V^{(j)}(xi)|_K.
struct NormalFormData {
  Frame coefficient_space;  // K inside the source space
  Mat unitary;              // U : H -> model space
  BasisPtr model;
  std::vector<Symbol> theta;
  CovariantTuple model_tuple;  // (S, M_Theta) on the model
  double flip_compat_residual = 0.0;
  std::vector<double> intertwining_residuals;  // per factor, window-limited
};

NormalFormData normal_form(const CovariantTuple& tuple, int split_count = 1);

struct InvarianceReport {
  bool invariant = false;
  double defect = 0.0;
  bool vacuous_window = false;
};

// Truncated invariance: shifts applied to the sub-cap part of M stay in M.
InvarianceReport check_invariant(const Frame& m, const CovariantTuple& tuple,
                                 double tol = kResidualTol);

struct FactorizationResiduals {
  double range_defect = 0.0;
  double inner_isometry = 0.0;
  double inner_wandering = 0.0;
  std::vector<double> intertwining;      // M_Psi M_Phi_i = M_Theta_i (I (x) M_Psi)
  std::vector<double> phi_formula_gap;   // series form vs rewritten form
};

// Beurling-Lax-Halmos data for an invariant subspace M of the ambient
// (S, M_Theta_1..k) picture: W = M - S(E_1 (x) M), the inner inclusion Psi,
// the multiplier M_Psi with range M, and the compressed symbols Phi_i.
struct FactorizationData {
  Frame subspace;
  Frame wandering;
  Mat psi;  // wandering coordinates -> ambient space (the inclusion)
  BasisPtr model;
  Mat m_psi;
  std::vector<Symbol> phi;
  std::vector<Mat> phi_mult;
  CovariantTuple model_tuple;  // (S^W, M_Phi) on the model
  FactorizationResiduals residuals;
  Degree window;  // split-factor window used for the residuals
};

FactorizationData blh_factorize(const Frame& m, const CovariantTuple& ambient);

struct DoublyCommutingVerdict {
  bool doubly_commuting = false;
  double defect_model = 0.0;   // via (S^W, M_Phi)
  double defect_direct = 0.0;  // via the restricted tuple on M
  bool agree = false;
};

DoublyCommutingVerdict doubly_commuting_subspace_test(const FactorizationData& fact,
                                                      const CovariantTuple& ambient,
                                                      double tol = kResidualTol);

struct LiftReport {
  bool success = false;
  double defect = 0.0;
  std::vector<Symbol> phi;
};

// Solves Phi_i := M_Psi^* M_Theta_i (I (x) M_Psi) for a subspace invariant
// under the split-factor shift, and reports whether the intertwining
// M_Psi M_Phi_i = M_Theta_i (I (x) M_Psi) holds, i.e. whether M is invariant
// for every M_Theta_i.
LiftReport intertwining_lift(const Frame& m, const CovariantTuple& ambient,
                             double tol = kResidualTol);

struct NestedReport {
  bool contained = false;
  double factorization_defect = 0.0;  // ||M_Psi1 - M_Psi2 M_Psi|| on window
  InnerReport inner;
  bool frame_contained = false;  // independent projector check
  Mat psi;                       // W_1 coords -> model of M_2
};

NestedReport nested_test(const FactorizationData& f1, const FactorizationData& f2,
                         double tol = kResidualTol);

struct SymbolSystem {
  BasisPtr model;
  std::vector<Symbol> symbols;
};

SymbolSystem symbol_system(const FactorizationData& fact);
SymbolSystem symbol_system(const NormalFormData& nf);

struct CoincideReport {
  bool coincide = false;
  double residual = 0.0;
  double unitary_defect = 0.0;
  Mat z;  // canonicalized unitary W -> W', empty when coincide = false
};

// Solves the stacked intertwining system (I (x) Z) Phi_i = Phi_i' (I (x) Z)
// for Z by null-space extraction and polar projection, then certifies.
CoincideReport coincide_test(const SymbolSystem& a, const SymbolSystem& b,
                             double tol = kResidualTol);

struct FullSpaceReport {
  bool isomorphic = false;
  Mat psi;  // K' coords -> ambient space, inner when isomorphic
  CoincideReport coincidence;
};

FullSpaceReport full_space_isomorphic_test(const FactorizationData& fact,
                                           const SymbolSystem& target,
                                           double tol = kResidualTol);

}  // namespace fockmod

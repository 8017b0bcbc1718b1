#pragma once

#include <functional>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "fockmod/operator_core.hpp"

namespace fockmod {

using OpMat = std::variant<Mat, SpMat>;

long op_rows(const OpMat& m);
long op_cols(const OpMat& m);
Mat to_dense(const OpMat& m, long entry_limit = 40000000);
Mat op_apply(const OpMat& m, const Mat& x);
Mat op_apply_adjoint(const OpMat& m, const Mat& x);
Vec op_apply(const OpMat& m, const Vec& x);
Vec op_apply_adjoint(const OpMat& m, const Vec& x);

// A_b x for the b-th letter block of a map E (x) H -> H, H of dimension block_cols.
Mat letter_block(const OpMat& m, int b, long block_cols, const Mat& x);

enum class Provenance { induced, conjugated, multiplier_extended, external };
std::string provenance_name(Provenance p);
Provenance provenance_from_name(const std::string& s);

// One map of a covariant tuple: a matrix E_factor (x) H -> H. tracked means
// the basis grading sees the factor and the map raises its degree by one;
// untracked maps (multipliers on a coefficient slot) carry instead a bound on
// how far they can raise the tracked degrees, used for window bookkeeping.
struct TupleMap {
  int factor = 0;  // global factor index, 0-based
  int letter_dim = 1;
  OpMat matrix;
  bool tracked = true;
  Degree shift_bound;  // over the basis's active factors
};

struct CovariantTuple {
  BasisPtr basis;
  std::vector<TupleMap> maps;
  Provenance provenance = Provenance::external;
  // Degree windows live in window_basis coordinates, reached through the
  // unitary window_frame (this space -> window_basis coordinates). Empty
  // means the tuple's own basis with the identity frame. Conjugation and the
  // normal-form reduction transport this data, so truncation windows follow
  // the tuple through unitary identifications. Every TupleMap.shift_bound is
  // a Degree over the window basis.
  BasisPtr window_basis;
  Mat window_frame;

  long dim() const { return basis->dim; }
  const GradedBasis& wbasis() const { return window_basis ? *window_basis : *basis; }
  bool has_window_frame() const { return window_frame.size() != 0; }
  int map_index(int factor) const;  // -1 if absent
  const TupleMap& map_for(int factor) const;
  // Projector onto inputs supported in window degrees <= maxdeg.
  Mat window_projector(const Degree& maxdeg) const;
  // Projector on C^cols selecting combinations c with (columns c) supported
  // in window degrees <= maxdeg.
  Mat coeff_window(const Mat& columns, const Degree& maxdeg) const;
};

// Creation operators of the induced representation on the truncated basis.
CovariantTuple induced_tuple(const ProductSystemSpec& spec, const Degree& cap, int coeff_dim,
                             std::vector<int> factors = {}, long max_dim = kDefaultMaxDim);

// U V^{(i)} (I (x) U^*) for a unitary U on H.
CovariantTuple conjugate_tuple(const CovariantTuple& tuple, const Mat& u);

// V_n : E(n) (x) H -> H over the basis's active factors, composed in factor
// order. Exact on inputs of degree <= cap - n.
GradedOperator compose_power(const CovariantTuple& tuple, const Degree& n);

// V_n * kron(I_{E(n)}, X), built by peeling the first letter.
Mat tuple_block(const CovariantTuple& tuple, const Degree& n, const Mat& x);

// All blocks for n <= bound, memoized along the graded order.
std::map<Degree, Mat, GradedLexLess> tuple_blocks(const CovariantTuple& tuple, const Mat& x,
                                                  const Degree& bound);

// Sub-tuple keeping only the maps for the given global factors.
CovariantTuple sub_tuple(const CovariantTuple& tuple, const std::vector<int>& factors);

// cap restricted to positions whose factor carries a map; other entries 0.
Degree available_degree_bound(const CovariantTuple& tuple);

struct CheckResult {
  double residual = 0.0;
  bool verifiable = true;
  std::string note;
};

struct AxiomReport {
  CheckResult isometric, commuting, doubly_commuting, pure;
  double max_residual() const;
  bool all_verifiable() const;
  bool pass(double tol) const;
};

// Residuals of the four structural identities, each evaluated on the largest
// input-degree window for which every intermediate stays inside cap. An empty
// window yields verifiable = false rather than a silent pass.
AxiomReport check_axioms(const CovariantTuple& tuple);

// Throws PreconditionError if the report fails at tol or is unverifiable.
void gate_axioms(const CovariantTuple& tuple, double tol, bool need_doubly_commuting,
                 const std::string& who);

}  // namespace fockmod

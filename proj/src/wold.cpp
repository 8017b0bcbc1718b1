#include "fockmod/wold.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fockmod {

Frame wandering_subspace(const CovariantTuple& tuple, const Frame* within, bool gate) {
  if (gate) gate_axioms(tuple, kResidualTol, true, "wandering_subspace");
  std::vector<Mat> mats;
  if (within) {
    const Mat& f = within->columns;
    for (const auto& tm : tuple.maps) {
      // adjoint of the restriction to `within`, in its coordinates
      Mat a = op_apply_adjoint(tm.matrix, f);  // (d*N) x r
      Mat proj(tm.letter_dim * within->rank(), within->rank());
      for (int b = 0; b < tm.letter_dim; ++b)
        proj.middleRows(b * within->rank(), within->rank()) =
            f.adjoint() * a.middleRows(b * tuple.dim(), tuple.dim());
      mats.push_back(std::move(proj));
    }
    Frame coords = kernel_intersection_matrices(nullptr, mats);
    return orthonormal_frame(tuple.basis, f * coords.columns);
  }
  for (const auto& tm : tuple.maps) mats.push_back(to_dense(tm.matrix).adjoint());
  return kernel_intersection_matrices(tuple.basis, mats);
}

WoldData wold_unitary(const CovariantTuple& tuple, const Frame* within, bool gate,
                      bool require_complete) {
  const GradedBasis& basis = *tuple.basis;
  WoldData data;
  data.wandering = wandering_subspace(tuple, within, gate);
  const long n = tuple.dim();
  const int w = data.wandering.rank();
  const long expected = within ? within->rank() : n;
  if (w == 0 && expected > 0)
    throw PreconditionError(
        "wold_unitary: wandering subspace is zero-dimensional, not pure/complete at this cap");

  // the decomposition runs over the factors that carry maps
  std::vector<int> avail_pos, avail_factors;
  for (int p = 0; p < basis.rank(); ++p)
    if (tuple.map_index(basis.factors[p]) >= 0) {
      avail_pos.push_back(p);
      avail_factors.push_back(basis.factors[p]);
    }
  const int sub_rank = static_cast<int>(avail_pos.size());
  Degree subcap(std::vector<int>(sub_rank, 0));
  Degree bound = Degree::zero(basis.rank());
  for (int q = 0; q < sub_rank; ++q) {
    subcap[q] = basis.cap[avail_pos[q]];
    bound[avail_pos[q]] = basis.cap[avail_pos[q]];
  }
  auto sub_of = [&](const Degree& deg) {
    Degree s(std::vector<int>(sub_rank, 0));
    for (int q = 0; q < sub_rank; ++q) s[q] = deg[avail_pos[q]];
    return s;
  };

  data.target = enumerate_basis(basis.spec, subcap, w, avail_factors);
  for (auto& [deg, c] : tuple_blocks(tuple, data.wandering.columns, bound))
    data.blocks[sub_of(deg)] = std::move(c);

  // rectangular window of exactly isometric blocks
  Degree window = subcap;
  const double tol = kResidualTol;
  while (true) {
    const Degree* bad = nullptr;
    for (const auto& [deg, c] : data.blocks) {
      if (!deg.leq(window)) continue;
      double defect =
          (c.adjoint() * c - Mat::Identity(c.cols(), c.cols())).cwiseAbs().maxCoeff();
      if (defect > tol) {
        bad = &deg;
        break;
      }
    }
    if (!bad) break;
    int axis = -1;
    for (int i = 0; i < bad->size(); ++i)
      if ((*bad)[i] > 0) {
        axis = i;
        break;
      }
    if (axis < 0)
      throw PreconditionError(
          "wold_unitary: degree-0 block not isometric, not pure/complete at this cap");
    window[axis] = (*bad)[axis] - 1;
    if (window.empty_window())
      throw PreconditionError("wold_unitary: no exact Wold blocks at this cap");
  }
  data.window = window;

  // Pi and the realized rank
  data.pi = Mat::Zero(data.target->dim, n);
  long realized = 0;
  for (const auto& [deg, c] : data.blocks) {
    if (!deg.leq(window)) continue;
    data.pi.middleRows(data.target->block_offset(deg), c.cols()) = c.adjoint();
    realized += c.cols();
  }
  data.realized_rank = realized;
  if (require_complete && realized != expected) {
    std::ostringstream os;
    os << "wold_unitary: Wold blocks span dimension " << realized << " of " << expected
       << " inside window " << window.str() << ", not pure/complete at this cap";
    throw PreconditionError(os.str());
  }

  // cross-block Gram residual on the window
  double gram = 0.0;
  for (const auto& [da, ca] : data.blocks) {
    if (!da.leq(window)) continue;
    gram = std::max(
        gram, (ca.adjoint() * ca - Mat::Identity(ca.cols(), ca.cols())).cwiseAbs().maxCoeff());
    for (const auto& [db, cb] : data.blocks) {
      if (!db.leq(window) || !graded_lex_less(da, db)) continue;
      gram = std::max(gram, (ca.adjoint() * cb).cwiseAbs().maxCoeff());
    }
  }
  data.block_gram_residual = gram;

  // intertwining Pi V^{(i)} = S^{(i)}(I (x) Pi) evaluated on the Wold blocks
  CovariantTuple model = induced_tuple(basis.spec, subcap, w, avail_factors);
  for (int q = 0; q < sub_rank; ++q) {
    const TupleMap& tm = tuple.map_for(avail_factors[q]);
    const auto& mmap = model.map_for(avail_factors[q]);
    double worst = 0.0;
    for (const auto& [deg, c] : data.blocks) {
      if (!deg.plus_unit(q).leq(window)) continue;
      Mat lhs(data.target->dim, tm.letter_dim * c.cols());
      Mat rhs(data.target->dim, tm.letter_dim * c.cols());
      long off = data.target->block_offset(deg);
      Mat en = Mat::Zero(data.target->dim, c.cols());
      en.middleRows(off, c.cols()) = Mat::Identity(c.cols(), c.cols());
      for (int b = 0; b < tm.letter_dim; ++b) {
        lhs.middleCols(b * c.cols(), c.cols()) = data.pi * letter_block(tm.matrix, b, n, c);
        rhs.middleCols(b * c.cols(), c.cols()) =
            letter_block(mmap.matrix, b, data.target->dim, en);
      }
      worst = std::max(worst, op_norm(lhs - rhs));
    }
    data.intertwining_residuals.push_back(worst);
  }
  return data;
}

}  // namespace fockmod

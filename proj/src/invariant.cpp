#include "fockmod/invariant.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fockmod/rng.hpp"

namespace fockmod {

namespace {

// Degree over the ambient active factors with value v at one position.
Degree axis_degree(int rank, int pos, int v) {
  Degree d = Degree::zero(rank);
  d[pos] = v;
  return d;
}

Mat map_columns(const OpMat& m, long space_dim, int letter_dim, const Mat& x) {
  Mat out(op_rows(m), letter_dim * x.cols());
  for (int b = 0; b < letter_dim; ++b)
    out.middleCols(b * x.cols(), x.cols()) = letter_block(m, b, space_dim, x);
  return out;
}

// Block-diagonal projector on a rank-1 model space restricting the
// coefficient slot of each degree block to combinations that stay within the
// ambient window after raising by p * e_{split} + extra. The split-factor
// position and all degrees are taken in the ambient's window basis.
Mat model_window_projector(const GradedBasis& model, const CovariantTuple& ambient,
                           const Mat& coeff_columns, const Degree& split_shift,
                           const Degree& extra) {
  Mat p = Mat::Zero(model.dim, model.dim);
  for (const Degree& deg : model.degrees) {
    Degree head = extra;
    for (int q = 0; q < deg[0]; ++q) head = head.plus(split_shift);
    Mat pc = ambient.coeff_window(coeff_columns, ambient.wbasis().cap.minus(head));
    long wc = model.word_count(deg);
    long off = model.block_offset(deg);
    long w = model.coeff_dim;
    for (long q = 0; q < wc; ++q) p.block(off + q * w, off + q * w, w, w) = pc;
  }
  return p;
}

}  // namespace

NormalFormData normal_form(const CovariantTuple& tuple, int split_count) {
  const GradedBasis& basis = *tuple.basis;
  const long n = basis.dim;
  if (split_count < 1 || split_count > basis.rank())
    throw DomainError("normal_form: split index out of range");
  gate_axioms(tuple, kResidualTol, true, "normal_form");

  std::vector<int> shift_factors(basis.factors.begin(), basis.factors.begin() + split_count);
  std::vector<int> symbol_factors;
  for (const auto& tm : tuple.maps)
    if (std::find(shift_factors.begin(), shift_factors.end(), tm.factor) == shift_factors.end())
      symbol_factors.push_back(tm.factor);

  NormalFormData nf;
  CovariantTuple shifts = sub_tuple(tuple, shift_factors);
  WoldData wd = wold_unitary(shifts, nullptr, false, true);
  Degree subcap(std::vector<int>(split_count, 0));
  for (int p = 0; p < split_count; ++p) subcap[p] = basis.cap[p];
  if (wd.window != subcap)
    throw PreconditionError("normal_form: Wold window exhausted before cap");
  nf.coefficient_space = wd.wandering;
  const int kdim = nf.coefficient_space.rank();
  nf.model = wd.target;
  nf.unitary = wd.pi;

  CovariantTuple model_induced = induced_tuple(basis.spec, subcap, kdim, shift_factors);
  nf.model_tuple.basis = nf.model;
  nf.model_tuple.provenance = Provenance::multiplier_extended;
  // windows of the model are the source windows pulled back through U
  nf.model_tuple.window_basis = tuple.window_basis ? tuple.window_basis : tuple.basis;
  nf.model_tuple.window_frame = tuple.has_window_frame()
                                    ? Mat(tuple.window_frame * nf.unitary.adjoint())
                                    : Mat(nf.unitary.adjoint());
  for (const auto& tm : model_induced.maps) {
    TupleMap mm = tm;
    mm.shift_bound = tuple.map_for(tm.factor).shift_bound;
    nf.model_tuple.maps.push_back(std::move(mm));
  }

  for (int f : symbol_factors) {
    const TupleMap& tm = tuple.map_for(f);
    Symbol theta = extract_symbol(shifts, to_dense(tm.matrix), f, wd, false);
    Multiplier mult = multiplier_from_symbol(theta, model_induced);
    TupleMap mm;
    mm.factor = f;
    mm.letter_dim = tm.letter_dim;
    mm.matrix = mult.combined;
    mm.tracked = false;
    mm.shift_bound = tm.shift_bound;
    nf.model_tuple.maps.push_back(std::move(mm));
    nf.theta.push_back(std::move(theta));
  }

  // intertwining U V^(i) = (model map)(I (x) U) on the windows
  for (const auto& tm : tuple.maps) {
    Mat q = tuple.window_projector(tuple.wbasis().cap.minus(tm.shift_bound));
    Mat lhs(nf.model->dim, tm.letter_dim * n);
    Mat rhs(nf.model->dim, tm.letter_dim * n);
    const auto& mm = nf.model_tuple.map_for(tm.factor);
    for (int b = 0; b < tm.letter_dim; ++b) {
      lhs.middleCols(b * n, n) = nf.unitary * letter_block(tm.matrix, b, n, q);
      rhs.middleCols(b * n, n) =
          letter_block(mm.matrix, b, nf.model->dim, Mat(nf.unitary * q));
    }
    nf.intertwining_residuals.push_back(op_norm(lhs - rhs));
  }

  // flip compatibility of the extracted symbols
  double worst = 0.0;
  for (size_t i = 0; i < nf.theta.size(); ++i)
    for (size_t j = 0; j < nf.theta.size(); ++j) {
      if (i == j) continue;
      const Symbol& ti = nf.theta[i];
      const Symbol& tj = nf.theta[j];
      const auto& mi = nf.model_tuple.map_for(ti.source_factor);
      const auto& mj = nf.model_tuple.map_for(tj.source_factor);
      const int di = ti.source_dim, dj = tj.source_dim;
      Mat lhs = map_columns(mi.matrix, nf.model->dim, di, tj.block);
      // reorder columns of lhs from (b_i, (b_j, c)) as built to match input (b_i, b_j, c):
      // map_columns already yields exactly that layout.
      Mat inner = map_columns(mj.matrix, nf.model->dim, dj, ti.block);
      const Mat t = basis.spec.flip(tj.source_factor, ti.source_factor);  // t_{i,j}
      Mat rhs = Mat::Zero(nf.model->dim, di * dj * kdim);
      for (int bi = 0; bi < di; ++bi)
        for (int bj = 0; bj < dj; ++bj)
          for (int bj2 = 0; bj2 < dj; ++bj2)
            for (int bi2 = 0; bi2 < di; ++bi2) {
              cx v = t(bj2 * di + bi2, bi * dj + bj);
              if (v == cx(0.0, 0.0)) continue;
              rhs.middleCols((bi * dj + bj) * kdim, kdim) +=
                  v * inner.middleCols((bj2 * di + bi2) * kdim, kdim);
            }
      Degree head = tuple.map_for(ti.source_factor)
                        .shift_bound.plus(tuple.map_for(tj.source_factor).shift_bound);
      Mat pc = tuple.coeff_window(nf.coefficient_space.columns, tuple.wbasis().cap.minus(head));
      Mat defect = lhs - rhs;
      for (int col = 0; col < di * dj; ++col)
        defect.middleCols(col * kdim, kdim) = defect.middleCols(col * kdim, kdim) * pc;
      worst = std::max(worst, op_norm(defect));
    }
  nf.flip_compat_residual = worst;
  return nf;
}

InvarianceReport check_invariant(const Frame& m, const CovariantTuple& tuple, double tol) {
  const GradedBasis& basis = *tuple.basis;
  const long n = basis.dim;
  if (m.columns.rows() != n) throw DomainError("check_invariant: frame basis mismatch");
  InvarianceReport rep;
  Mat pm = m.projector();
  double defect = 0.0;
  double window_mass = 0.0;
  for (const auto& tm : tuple.maps) {
    Mat q = tuple.window_projector(tuple.wbasis().cap.minus(tm.shift_bound));
    Mat restricted = pm * q;
    window_mass = std::max(window_mass, op_norm(restricted));
    Mat image = map_columns(tm.matrix, n, tm.letter_dim, restricted);
    defect = std::max(defect, op_norm(image - pm * image));
  }
  rep.defect = defect;
  rep.vacuous_window = window_mass < tol;
  rep.invariant = defect < tol;
  return rep;
}

FactorizationData blh_factorize(const Frame& m, const CovariantTuple& ambient) {
  const GradedBasis& basis = *ambient.basis;
  const long n = basis.dim;
  InvarianceReport inv = check_invariant(m, ambient);
  if (!inv.invariant)
    throw PreconditionError("blh_factorize: subspace is not invariant (defect " +
                                std::to_string(inv.defect) + ")",
                            inv.defect);
  if (m.rank() == 0) throw DomainError("blh_factorize: empty subspace");

  FactorizationData fact;
  fact.subspace = m;
  const int pos0 = 0;
  const int f0 = basis.factors[pos0];
  const TupleMap& smap = ambient.map_for(f0);
  const int d1 = smap.letter_dim;

  Mat sm = map_columns(smap.matrix, n, d1, m.columns);
  Frame sm_frame = orthonormal_frame(ambient.basis, sm);
  fact.wandering = subspace_ops(m, sm_frame).complement_within;
  const int w = fact.wandering.rank();
  if (w == 0)
    throw PreconditionError(
        "blh_factorize: zero-dimensional wandering subspace with nonzero M, cap too small");
  fact.psi = fact.wandering.columns;

  Degree subcap(std::vector<int>{basis.cap[pos0]});
  fact.model = enumerate_basis(basis.spec, subcap, w, {f0});
  fact.window = subcap;

  CovariantTuple s_only = sub_tuple(ambient, {f0});
  Degree mask = axis_degree(basis.rank(), pos0, basis.cap[pos0]);
  auto blocks = tuple_blocks(s_only, fact.wandering.columns, mask);

  fact.m_psi = Mat::Zero(n, fact.model->dim);
  for (const auto& [deg, c] : blocks)
    fact.m_psi.middleCols(fact.model->block_offset(Degree(std::vector<int>{deg[pos0]})),
                          c.cols()) = c;

  CovariantTuple model_induced = induced_tuple(basis.spec, subcap, w, {f0});
  fact.model_tuple.basis = fact.model;
  fact.model_tuple.provenance = Provenance::multiplier_extended;
  for (const auto& tm : model_induced.maps) fact.model_tuple.maps.push_back(tm);

  const Mat wt_mpsi = fact.wandering.columns.adjoint() * fact.m_psi;  // w x model_dim

  for (const auto& tm : ambient.maps) {
    if (tm.factor == f0) continue;
    const int df = tm.letter_dim;
    Mat y = map_columns(tm.matrix, n, df, fact.wandering.columns);  // V_f (I (x) W)

    Symbol phi;
    phi.model = fact.model;
    phi.source_factor = tm.factor;
    phi.source_dim = df;
    phi.block = Mat::Zero(fact.model->dim, df * w);
    for (const auto& [deg, c] : blocks)
      phi.block.middleRows(fact.model->block_offset(Degree(std::vector<int>{deg[pos0]})),
                           c.cols()) = c.adjoint() * y;
    phi.isometric_flag = phi.isometry_defect() < kRankTol;

    // rewritten form through M_Psi (Remark-style): blocks
    // (I (x) P_W M_Psi) S_p^* M_Psi^* V_f (I (x) W)
    Mat a = fact.m_psi.adjoint() * y;  // model_dim x (df*w)
    Mat phi2 = Mat::Zero(fact.model->dim, df * w);
    for (const Degree& pdeg : fact.model->degrees) {
      const long wc = fact.model->word_count(pdeg);
      Mat spow = tuple_block(model_induced, pdeg,
                             Mat::Identity(fact.model->dim, fact.model->dim));
      Mat g = spow.adjoint() * a;  // (wc*model_dim) x (df*w)
      long off = fact.model->block_offset(pdeg);
      for (long q = 0; q < wc; ++q)
        phi2.middleRows(off + q * w, w) = wt_mpsi * g.middleRows(q * fact.model->dim,
                                                                 fact.model->dim);
    }
    fact.residuals.phi_formula_gap.push_back((phi.block - phi2).cwiseAbs().maxCoeff());

    Multiplier mult = multiplier_from_symbol(phi, model_induced);
    // Thm 3.9 intertwining residual, window-limited on the model side
    Degree head = tm.shift_bound;
    for (int q = 0; q < phi.output_spread()[0]; ++q) head = head.plus(smap.shift_bound);
    Mat pwin = model_window_projector(*fact.model, ambient, fact.wandering.columns,
                                      smap.shift_bound, head);
    Mat lhs = fact.m_psi * mult.combined;                       // n x (df*model_dim)
    Mat rhs = map_columns(tm.matrix, n, df, fact.m_psi);        // n x (df*model_dim)
    Mat defect = lhs - rhs;
    for (int b = 0; b < df; ++b)
      defect.middleCols(b * fact.model->dim, fact.model->dim) =
          defect.middleCols(b * fact.model->dim, fact.model->dim) * pwin;
    fact.residuals.intertwining.push_back(op_norm(defect));

    TupleMap mm;
    mm.factor = tm.factor;
    mm.letter_dim = df;
    mm.matrix = mult.combined;
    mm.tracked = false;
    mm.shift_bound = Degree(std::vector<int>{phi.output_spread()[0]});
    fact.model_tuple.maps.push_back(std::move(mm));
    fact.phi_mult.push_back(mult.combined);
    fact.phi.push_back(std::move(phi));
  }

  // inner: Psi is the inclusion of W; wandering is checked against the
  // split-factor shift of the ambient space.
  InnerReport ir = is_inner(fact.psi, s_only);
  fact.residuals.inner_isometry = ir.isometry_defect;
  fact.residuals.inner_wandering = ir.wandering_defect;

  // range(M_Psi) = M on the window
  double escape = op_norm(fact.m_psi - m.projector() * fact.m_psi);
  Mat pwin0 = model_window_projector(*fact.model, ambient, fact.wandering.columns,
                                     smap.shift_bound, Degree::zero(ambient.wbasis().rank()));
  Frame m_win = orthonormal_frame(ambient.basis, fact.m_psi * pwin0);
  Mat gap = m_win.columns - fact.m_psi * (fact.m_psi.adjoint() * m_win.columns);
  fact.residuals.range_defect = std::max(escape, op_norm(gap));
  return fact;
}

DoublyCommutingVerdict doubly_commuting_subspace_test(const FactorizationData& fact,
                                                      const CovariantTuple& ambient,
                                                      double tol) {
  DoublyCommutingVerdict verdict;
  AxiomReport rep = check_axioms(fact.model_tuple);
  verdict.defect_model = rep.doubly_commuting.residual;

  // direct route: the restriction to M in M-coordinates
  const GradedBasis& basis = *ambient.basis;
  const long n = basis.dim;
  const Mat& f = fact.subspace.columns;
  const long r = f.cols();
  std::vector<Mat> restricted;
  std::vector<int> dims_of;
  std::vector<Degree> bounds;
  for (const auto& tm : ambient.maps) {
    Mat t(r, tm.letter_dim * r);
    for (int b = 0; b < tm.letter_dim; ++b)
      t.middleCols(b * r, r) = f.adjoint() * letter_block(tm.matrix, b, n, f);
    restricted.push_back(std::move(t));
    dims_of.push_back(tm.letter_dim);
    bounds.push_back(tm.shift_bound);
  }
  double worst = 0.0;
  for (size_t i = 0; i < restricted.size(); ++i)
    for (size_t j = 0; j < restricted.size(); ++j) {
      if (i == j) continue;
      const int di = dims_of[i], dj = dims_of[j];
      Mat pc = ambient.coeff_window(f, ambient.wbasis().cap.minus(bounds[j]));
      const Mat tji =
          basis.spec.flip(ambient.maps[i].factor, ambient.maps[j].factor);  // t_{j,i}
      Mat lhs(di * r, dj * r);
      for (int b = 0; b < dj; ++b) {
        Mat col = restricted[j].middleCols(b * r, r);
        for (int a = 0; a < di; ++a)
          lhs.block(a * r, b * r, r, r) =
              restricted[i].middleCols(a * r, r).adjoint() * col;
      }
      // (I (x) t_j)(t_{j,i} (x) I)(I (x) t_i^*)
      Mat mid = Mat::Zero(di * dj * r, dj * r);
      for (int b = 0; b < dj; ++b)
        for (int a = 0; a < di; ++a) {
          Mat tiadj = restricted[i].middleCols(a * r, r).adjoint();  // r -> r for letter a
          for (int b2 = 0; b2 < dj; ++b2)
            for (int a2 = 0; a2 < di; ++a2) {
              cx v = tji(a2 * dj + b2, b * di + a);
              if (v == cx(0.0, 0.0)) continue;
              mid.block((a2 * dj + b2) * r, b * r, r, r) += v * tiadj;
            }
        }
      Mat rhs = Mat::Zero(di * r, dj * r);
      for (int a2 = 0; a2 < di; ++a2) {
        Mat seg = Mat::Zero(r, dj * r);
        for (int b2 = 0; b2 < dj; ++b2)
          seg += restricted[j].middleCols(b2 * r, r) *
                 mid.middleRows((a2 * dj + b2) * r, r);
        rhs.middleRows(a2 * r, r) = seg;
      }
      Mat defect = lhs - rhs;
      for (int b = 0; b < dj; ++b)
        defect.middleCols(b * r, r) = defect.middleCols(b * r, r) * pc;
      worst = std::max(worst, op_norm(defect));
    }
  verdict.defect_direct = worst;
  verdict.doubly_commuting = rep.doubly_commuting.verifiable && verdict.defect_model < tol;
  verdict.agree = (verdict.defect_model < tol) == (verdict.defect_direct < tol);
  return verdict;
}

LiftReport intertwining_lift(const Frame& m, const CovariantTuple& ambient, double tol) {
  const GradedBasis& basis = *ambient.basis;
  const long n = basis.dim;
  const int pos0 = 0;
  const int f0 = basis.factors[pos0];
  CovariantTuple s_only = sub_tuple(ambient, {f0});
  InvarianceReport inv = check_invariant(m, s_only, tol);
  if (!inv.invariant)
    throw PreconditionError("intertwining_lift: subspace not invariant for the shift",
                            inv.defect);
  LiftReport rep;
  if (m.rank() == 0) throw DomainError("intertwining_lift: empty subspace");

  const TupleMap& smap = ambient.map_for(f0);
  Mat sm = map_columns(smap.matrix, n, smap.letter_dim, m.columns);
  Frame wframe = subspace_ops(m, orthonormal_frame(ambient.basis, sm)).complement_within;
  const int w = wframe.rank();
  if (w == 0) throw PreconditionError("intertwining_lift: zero-dimensional wandering subspace");
  Degree subcap(std::vector<int>{basis.cap[pos0]});
  BasisPtr model = enumerate_basis(basis.spec, subcap, w, {f0});
  Degree mask = axis_degree(basis.rank(), pos0, basis.cap[pos0]);
  auto blocks = tuple_blocks(s_only, wframe.columns, mask);
  Mat m_psi = Mat::Zero(n, model->dim);
  for (const auto& [deg, c] : blocks)
    m_psi.middleCols(model->block_offset(Degree(std::vector<int>{deg[pos0]})), c.cols()) = c;

  double worst = 0.0;
  for (const auto& tm : ambient.maps) {
    if (tm.factor == f0) continue;
    const int df = tm.letter_dim;
    Mat vm = map_columns(tm.matrix, n, df, m_psi);  // V_f (I (x) M_Psi)
    Mat x = Mat(m_psi.adjoint() * vm);              // model candidate
    Mat pwin = model_window_projector(*model, ambient, wframe.columns,
                                      ambient.map_for(f0).shift_bound, tm.shift_bound);
    Mat defect = m_psi * x - vm;
    for (int b = 0; b < df; ++b)
      defect.middleCols(b * model->dim, model->dim) =
          defect.middleCols(b * model->dim, model->dim) * pwin;
    worst = std::max(worst, op_norm(defect));

    Symbol phi;
    phi.model = model;
    phi.source_factor = tm.factor;
    phi.source_dim = df;
    phi.block = Mat::Zero(model->dim, df * w);
    const long off0 = model->block_offset(Degree::zero(1));
    for (int b = 0; b < df; ++b)
      phi.block.middleCols(b * w, w) = x.middleCols(b * model->dim + off0, w);
    phi.isometric_flag = phi.isometry_defect() < kRankTol;
    rep.phi.push_back(std::move(phi));
  }
  rep.defect = worst;
  rep.success = worst < tol;
  return rep;
}

SymbolSystem symbol_system(const FactorizationData& fact) {
  return SymbolSystem{fact.model, fact.phi};
}

SymbolSystem symbol_system(const NormalFormData& nf) { return SymbolSystem{nf.model, nf.theta}; }

NestedReport nested_test(const FactorizationData& f1, const FactorizationData& f2, double tol) {
  if (!f1.subspace.basis->same_shape(*f2.subspace.basis))
    throw DomainError("nested_test: ambient mismatch");
  NestedReport rep;
  const GradedBasis& basis = *f1.subspace.basis;
  const int pos0 = 0;
  const int f0 = basis.factors[pos0];

  // Psi = M_Psi2^* M_Psi1 |_{W_1} = M_Psi2^* W_1
  rep.psi = f2.m_psi.adjoint() * f1.wandering.columns;  // model2_dim x w1

  CovariantTuple model2_shift = sub_tuple(f2.model_tuple, {f0});
  rep.inner = is_inner(rep.psi, model2_shift, tol);

  // M_Psi : model1 -> model2
  Degree mask(std::vector<int>{f2.model->cap[0]});
  auto grown = tuple_blocks(model2_shift, rep.psi, mask);
  Mat m_small = Mat::Zero(f2.model->dim, f1.model->dim);
  for (const auto& [deg, c] : grown) {
    if (f1.model->degree_index(deg) < 0) continue;
    m_small.middleCols(f1.model->block_offset(deg), c.cols()) = c;
  }
  (void)pos0;
  CovariantTuple ambient_like;
  ambient_like.basis = f1.subspace.basis;
  Mat pwin = model_window_projector(
      *f1.model, ambient_like, f1.wandering.columns,
      Degree::unit(f1.subspace.basis->rank(), 0), Degree::zero(f1.subspace.basis->rank()));
  rep.factorization_defect = op_norm((f1.m_psi - f2.m_psi * m_small) * pwin);

  rep.frame_contained = subspace_ops(f2.subspace, f1.subspace).contains;
  rep.contained = rep.inner.inner && rep.factorization_defect < tol;
  return rep;
}

CoincideReport coincide_test(const SymbolSystem& a, const SymbolSystem& b, double tol) {
  CoincideReport rep;
  const int w = a.model->coeff_dim;
  const int wp = b.model->coeff_dim;
  if (w != wp) return rep;  // dimension mismatch is a false verdict, not an error
  if (a.symbols.size() != b.symbols.size())
    throw DomainError("coincide_test: symbol systems of different length");
  if (a.model->cap != b.model->cap || a.model->factors != b.model->factors)
    throw DomainError("coincide_test: models of different shape");
  rep.z = Mat::Zero(w, w);

  // Stack the intertwining system together with its adjoint counterpart.
  // A unitary Z satisfies both; imposing both keeps the solution space a
  // coset of a self-adjoint algebra, so the polar projection below stays
  // inside it.
  const long slots = a.model->dim / w;  // (degree, word) slots
  long rows = 0;
  for (const auto& s : a.symbols) rows += 2 * slots * w * s.source_dim * w;
  Mat sys = Mat::Zero(rows, static_cast<long>(w) * w);
  long row0 = 0;
  for (size_t i = 0; i < a.symbols.size(); ++i) {
    const Mat& phi = a.symbols[i].block;
    const Mat& phip = b.symbols[i].block;
    const int d = a.symbols[i].source_dim;
    if (b.symbols[i].source_dim != d)
      throw DomainError("coincide_test: source dimension mismatch");
    // (I (x) Z) Phi = Phi' (I (x) Z)
    for (long v = 0; v < slots; ++v)
      for (int r = 0; r < w; ++r)
        for (int acol = 0; acol < d; ++acol)
          for (int c_in = 0; c_in < w; ++c_in) {
            long row = row0 + ((v * w + r) * d + acol) * w + c_in;
            for (int c = 0; c < w; ++c)
              sys(row, static_cast<long>(c) * w + r) += phi(v * w + c, acol * w + c_in);
            for (int r2 = 0; r2 < w; ++r2)
              sys(row, static_cast<long>(c_in) * w + r2) -= phip(v * w + r, acol * w + r2);
          }
    row0 += slots * w * d * w;
    // (I (x) Z) Phi^* = Phi'^* (I (x) Z)
    for (int acol = 0; acol < d; ++acol)
      for (int r = 0; r < w; ++r)
        for (long v = 0; v < slots; ++v)
          for (int c_in = 0; c_in < w; ++c_in) {
            long row = row0 + (((static_cast<long>(acol) * w + r) * slots + v) * w + c_in);
            for (int c = 0; c < w; ++c)
              sys(row, static_cast<long>(c) * w + r) +=
                  std::conj(phi(v * w + c_in, acol * w + c));
            for (int c2 = 0; c2 < w; ++c2)
              sys(row, static_cast<long>(c_in) * w + c2) -=
                  std::conj(phip(v * w + c2, acol * w + r));
          }
    row0 += slots * w * d * w;
  }

  Mat null_basis = null_space(sys, 1e-9);
  if (null_basis.cols() == 0) return rep;

  Rng rng(0xC01DC01Dull, "coincide");
  for (int attempt = 0; attempt < 4; ++attempt) {
    Vec combo = attempt == 0 && null_basis.cols() == 1
                    ? Vec::Ones(1)
                    : rng.gaussian_vector(null_basis.cols());
    Vec zvec = null_basis * combo;
    Mat z(w, w);
    for (int c = 0; c < w; ++c)
      for (int r = 0; r < w; ++r) z(r, c) = zvec(static_cast<long>(c) * w + r);
    if (z.norm() < 1e-12) continue;
    Mat zu = polar_unitary(z);
    double udefect = unitary_defect(zu);
    double resid = 0.0;
    for (size_t i = 0; i < a.symbols.size(); ++i) {
      const Mat& phi = a.symbols[i].block;
      const Mat& phip = b.symbols[i].block;
      const int d = a.symbols[i].source_dim;
      Mat lhs(phi.rows(), phi.cols());
      for (long v = 0; v < slots; ++v)
        lhs.middleRows(v * w, w) = zu * phi.middleRows(v * w, w);
      Mat rhs(phip.rows(), phi.cols());
      for (int acol = 0; acol < d; ++acol)
        rhs.middleCols(acol * w, w) = phip.middleCols(acol * w, w) * zu;
      resid = std::max(resid, op_norm(lhs - rhs));
    }
    if (udefect < tol && resid < tol) {
      // canonical global phase: largest-magnitude entry positive real
      long br = 0, bc = 0;
      double mag = -1.0;
      for (int c = 0; c < w; ++c)
        for (int r = 0; r < w; ++r)
          if (std::abs(zu(r, c)) > mag) {
            mag = std::abs(zu(r, c));
            br = r;
            bc = c;
          }
      cx pivot = zu(br, bc);
      zu *= std::conj(pivot) / std::abs(pivot);
      rep.coincide = true;
      rep.residual = resid;
      rep.unitary_defect = udefect;
      rep.z = std::move(zu);
      return rep;
    }
    rep.residual = resid;
    rep.unitary_defect = udefect;
  }
  return rep;
}

FullSpaceReport full_space_isomorphic_test(const FactorizationData& fact,
                                           const SymbolSystem& target, double tol) {
  FullSpaceReport rep;
  rep.coincidence = coincide_test(symbol_system(fact), target, tol);
  rep.isomorphic = rep.coincidence.coincide;
  if (rep.isomorphic)
    rep.psi = fact.wandering.columns * rep.coincidence.z.adjoint();
  return rep;
}

}  // namespace fockmod

#include "fockmod/multianalytic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fockmod {

double Symbol::isometry_defect() const {
  if (block.cols() == 0) return 0.0;
  return (block.adjoint() * block - Mat::Identity(block.cols(), block.cols()))
      .cwiseAbs()
      .maxCoeff();
}

Degree Symbol::output_spread(double tol) const {
  Degree spread = Degree::zero(model->rank());
  for (size_t di = 0; di < model->degrees.size(); ++di) {
    long off = model->block_offsets[di];
    long len = model->block_offsets[di + 1] - off;
    if (block.middleRows(off, len).cwiseAbs().maxCoeff() <= tol) continue;
    for (int i = 0; i < spread.size(); ++i)
      spread[i] = std::max(spread[i], model->degrees[di][i]);
  }
  return spread;
}

Mat Symbol::fourier_coefficient(const Degree& n) const {
  long off = model->block_offset(n);
  return block.middleRows(off, model->block_dim(n));
}

Mat Multiplier::letter(int a) const {
  return combined.middleCols(a * symbol.model->dim, symbol.model->dim);
}

Degree tracked_spread(const GradedBasis& basis, const Mat& map, int letter_dim, double tol) {
  Degree spread = Degree::zero(basis.rank());
  for (int b = 0; b < letter_dim; ++b)
    for (size_t ci = 0; ci < basis.degrees.size(); ++ci) {
      long coff = basis.block_offsets[ci];
      long clen = basis.block_offsets[ci + 1] - coff;
      for (size_t ri = 0; ri < basis.degrees.size(); ++ri) {
        long roff = basis.block_offsets[ri];
        long rlen = basis.block_offsets[ri + 1] - roff;
        if (map.block(roff, b * basis.dim + coff, rlen, clen).cwiseAbs().maxCoeff() <= tol)
          continue;
        for (int i = 0; i < spread.size(); ++i)
          spread[i] = std::max(spread[i], basis.degrees[ri][i] - basis.degrees[ci][i]);
      }
    }
  return spread;
}

Multiplier multiplier_from_symbol(const Symbol& symbol, const CovariantTuple& shifts) {
  if (!shifts.basis->same_shape(*symbol.model))
    throw DomainError("multiplier_from_symbol: symbol and shifts live on different bases");
  const GradedBasis& basis = *symbol.model;
  const long n = basis.dim;
  const int de = symbol.source_dim;
  const int m = basis.coeff_dim;

  Multiplier mult;
  mult.symbol = symbol;
  mult.combined = Mat::Zero(n, de * n);

  auto grown = tuple_blocks(shifts, symbol.block, basis.cap);
  for (const Degree& deg : basis.degrees) {
    const long wc = basis.word_count(deg);
    const long off = basis.block_offset(deg);
    const Mat reorder = reorder_tensor(basis, symbol.source_factor, deg);
    // columns of S_n (I (x) Theta~), indexed (word, letter, coeff)
    const Mat& tblk = grown.at(deg);
    // apply (t (x) I_m) on the input side
    for (int a = 0; a < de; ++a)
      for (long w = 0; w < wc; ++w) {
        const long in_col = a * n + off + w * m;
        for (long rho = 0; rho < wc * de; ++rho) {
          cx v = reorder(rho, a * wc + w);
          if (std::abs(v) < 1e-16) continue;
          for (int c = 0; c < m; ++c)
            mult.combined.col(in_col + c) += v * tblk.col(rho * m + c);
        }
      }
  }
  mult.valid_window = basis.cap.minus(symbol.output_spread());
  return mult;
}

Symbol symbol_of_multiplier(const Mat& combined, int source_factor, int source_dim,
                            BasisPtr model) {
  Symbol s;
  s.model = std::move(model);
  s.source_factor = source_factor;
  s.source_dim = source_dim;
  const GradedBasis& basis = *s.model;
  const long off0 = basis.block_offset(Degree::zero(basis.rank()));
  const int m = basis.coeff_dim;
  s.block = Mat::Zero(basis.dim, source_dim * m);
  for (int a = 0; a < source_dim; ++a)
    s.block.middleCols(a * m, m) = combined.middleCols(a * basis.dim + off0, m);
  s.isometric_flag = s.isometry_defect() < kRankTol;
  return s;
}

double commutation_residual(const CovariantTuple& tuple, const Mat& extra, int extra_factor) {
  const GradedBasis& basis = *tuple.basis;
  const long n = basis.dim;
  const int de = basis.spec.dim(extra_factor);
  if (n * n * 4 > 40000000)
    throw CapacityError("commutation_residual: space too large for the dense check");
  // Both sides compose degree-raising maps only, so truncation clips them
  // consistently; the window only needs headroom for the tuple map itself.
  double worst = 0.0;
  bool any = false;
  for (const auto& tm : tuple.maps) {
    Degree window = tuple.wbasis().cap.minus(tm.shift_bound);
    if (window.empty_window()) continue;
    any = true;
    const Mat q = tuple.window_projector(window);
    const Mat vi = to_dense(tm.matrix);
    const int di = tm.letter_dim;
    const Mat t = basis.spec.flip(extra_factor, tm.factor);  // t_{i,e}: E_i(x)E_e -> E_e(x)E_i
    // products X_{a'} V_{b'}
    std::vector<std::vector<Mat>> xv(de, std::vector<Mat>(di));
    for (int a = 0; a < de; ++a)
      for (int b = 0; b < di; ++b)
        xv[a][b] = extra.middleCols(a * n, n) * vi.middleCols(b * n, n);
    Mat defect(n, di * de * n);
    for (int b = 0; b < di; ++b)
      for (int a = 0; a < de; ++a) {
        Mat lhs = vi.middleCols(b * n, n) * extra.middleCols(a * n, n);
        Mat rhs = Mat::Zero(n, n);
        for (int a2 = 0; a2 < de; ++a2)
          for (int b2 = 0; b2 < di; ++b2) {
            cx v = t(a2 * di + b2, b * de + a);
            if (v != cx(0.0, 0.0)) rhs += v * xv[a2][b2];
          }
        defect.middleCols((b * de + a) * n, n) = (lhs - rhs) * q;
      }
    worst = std::max(worst, op_norm(defect));
  }
  if (!any)
    throw PreconditionError(
        "commutation_residual: no verifiable window at this cap for the extra map");
  return worst;
}

Symbol extract_symbol(const CovariantTuple& first_k, const Mat& extra, int extra_factor,
                      const WoldData& wold, bool gate, double gate_tol) {
  const GradedBasis& basis = *first_k.basis;
  const long n = basis.dim;
  const int de = basis.spec.dim(extra_factor);
  if (extra.rows() != n || extra.cols() != de * n)
    throw DomainError("extract_symbol: extra map shape mismatch");
  if (gate) {
    gate_axioms(first_k, gate_tol, true, "extract_symbol");
    double res = commutation_residual(first_k, extra, extra_factor);
    if (res > gate_tol) {
      std::ostringstream os;
      os << "extract_symbol: extra map fails the commutation relation, residual " << res;
      throw PreconditionError(os.str(), res);
    }
  }

  const Mat& w = wold.wandering.columns;
  Mat y(n, de * w.cols());
  for (int a = 0; a < de; ++a) y.middleCols(a * w.cols(), w.cols()) = extra.middleCols(a * n, n) * w;

  Symbol sym;
  sym.model = wold.target;
  sym.source_factor = extra_factor;
  sym.source_dim = de;
  sym.block = Mat::Zero(wold.target->dim, de * w.cols());
  for (const auto& [deg, c] : wold.blocks) {
    long off = sym.model->block_offset(deg);
    sym.block.middleRows(off, c.cols()) = c.adjoint() * y;
  }
  sym.isometric_flag = sym.isometry_defect() < kRankTol;
  return sym;
}

Mat multiplier_from_wandering_map(const Mat& psi, const WoldData& source_wold,
                                  const CovariantTuple& target) {
  if (psi.rows() != target.dim())
    throw DomainError("multiplier_from_wandering_map: psi must map into the target space");
  if (psi.cols() != source_wold.wandering.rank())
    throw DomainError("multiplier_from_wandering_map: psi domain mismatch with wandering frame");
  // positions of the decomposition factors inside the target basis
  const GradedBasis& tb = *target.basis;
  std::vector<int> pos;
  for (int f : source_wold.target->factors) {
    auto it = std::find(tb.factors.begin(), tb.factors.end(), f);
    if (it == tb.factors.end() || target.map_index(f) < 0)
      throw DomainError("multiplier_from_wandering_map: target lacks a decomposition factor");
    pos.push_back(static_cast<int>(it - tb.factors.begin()));
  }
  Degree bound = Degree::zero(tb.rank());
  for (size_t q = 0; q < pos.size(); ++q)
    bound[pos[q]] = std::min(tb.cap[pos[q]], source_wold.target->cap[static_cast<int>(q)]);
  auto sub_of = [&](const Degree& deg) {
    Degree s(std::vector<int>(pos.size(), 0));
    for (size_t q = 0; q < pos.size(); ++q) s[static_cast<int>(q)] = deg[pos[q]];
    return s;
  };
  const long src_dim = source_wold.pi.cols();
  Mat out = Mat::Zero(target.dim(), src_dim);
  auto grown = tuple_blocks(target, psi, bound);
  for (const auto& [deg, c] : grown) {
    Degree sdeg = sub_of(deg);
    auto it = source_wold.blocks.find(sdeg);
    if (it == source_wold.blocks.end() || !sdeg.leq(source_wold.window)) continue;
    out += c * it->second.adjoint();
  }
  return out;
}

InnerReport is_inner(const Mat& psi, const CovariantTuple& target, double tol) {
  InnerReport rep;
  const long w = psi.cols();
  rep.isometry_defect =
      w == 0 ? 0.0
             : (psi.adjoint() * psi - Mat::Identity(w, w)).cwiseAbs().maxCoeff();
  Frame image = orthonormal_frame(target.basis, psi);
  auto grown = tuple_blocks(target, image.columns, available_degree_bound(target));
  double worst = 0.0;
  for (const auto& [deg, blk] : grown) {
    if (deg.is_zero()) continue;
    worst = std::max(worst, op_norm(image.columns.adjoint() * blk));
  }
  rep.wandering_defect = worst;
  rep.inner = rep.isometry_defect < tol && rep.wandering_defect < tol;
  return rep;
}

}  // namespace fockmod

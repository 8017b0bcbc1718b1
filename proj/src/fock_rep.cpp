#include "fockmod/fock_rep.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fockmod {

long op_rows(const OpMat& m) {
  return std::visit([](const auto& a) -> long { return a.rows(); }, m);
}

long op_cols(const OpMat& m) {
  return std::visit([](const auto& a) -> long { return a.cols(); }, m);
}

Mat to_dense(const OpMat& m, long entry_limit) {
  if (op_rows(m) * op_cols(m) > entry_limit)
    throw CapacityError("to_dense: matrix too large to materialize");
  if (std::holds_alternative<Mat>(m)) return std::get<Mat>(m);
  return Mat(std::get<SpMat>(m));
}

Mat op_apply(const OpMat& m, const Mat& x) {
  return std::visit([&](const auto& a) -> Mat { return a * x; }, m);
}

Mat op_apply_adjoint(const OpMat& m, const Mat& x) {
  return std::visit([&](const auto& a) -> Mat { return a.adjoint() * x; }, m);
}

Vec op_apply(const OpMat& m, const Vec& x) {
  return std::visit([&](const auto& a) -> Vec { return a * x; }, m);
}

Vec op_apply_adjoint(const OpMat& m, const Vec& x) {
  return std::visit([&](const auto& a) -> Vec { return a.adjoint() * x; }, m);
}

Mat letter_block(const OpMat& m, int b, long block_cols, const Mat& x) {
  if (std::holds_alternative<Mat>(m))
    return std::get<Mat>(m).middleCols(b * block_cols, block_cols) * x;
  return Mat(std::get<SpMat>(m).middleCols(b * block_cols, block_cols) * x);
}

namespace {

// Window restriction: diagonal degree mask in window-basis coordinates,
// pulled back through the window frame when the tuple carries one.
struct WindowMask {
  Eigen::VectorXd mask;
  const Mat* frame = nullptr;  // this space -> window basis coordinates
  Vec apply_one(const Vec& x) const {
    if (!frame) return mask.cast<cx>().cwiseProduct(x);
    return frame->adjoint() * Vec(mask.cast<cx>().cwiseProduct(Vec(*frame * x)));
  }
};

WindowMask degree_mask(const CovariantTuple& tuple, const Degree& maxdeg) {
  const GradedBasis& basis = tuple.wbasis();
  WindowMask wm;
  wm.mask = Eigen::VectorXd::Zero(basis.dim);
  if (!maxdeg.empty_window())
    for (size_t di = 0; di < basis.degrees.size(); ++di) {
      if (!basis.degrees[di].leq(maxdeg)) continue;
      long off = basis.block_offsets[di];
      long len = basis.block_offsets[di + 1] - off;
      wm.mask.segment(off, len).setOnes();
    }
  if (tuple.has_window_frame()) wm.frame = &tuple.window_frame;
  return wm;
}

Vec mask_blocks(const WindowMask& wm, int letters, const Vec& x) {
  const long n = wm.mask.size();
  Vec out(x.size());
  for (int b = 0; b < letters; ++b) out.segment(b * n, n) = wm.apply_one(x.segment(b * n, n));
  return out;
}

// kron(T, I_n) x
Vec apply_kron_left(const Mat& t, long n, const Vec& x) {
  Vec out = Vec::Zero(t.rows() * n);
  for (long r = 0; r < t.rows(); ++r)
    for (long c = 0; c < t.cols(); ++c) {
      if (t(r, c) == cx(0.0, 0.0)) continue;
      out.segment(r * n, n) += t(r, c) * x.segment(c * n, n);
    }
  return out;
}

Vec apply_per_segment(int count, long seg, const std::function<Vec(const Vec&)>& f, long out_seg,
                      const Vec& x) {
  Vec out(count * out_seg);
  for (int b = 0; b < count; ++b) out.segment(b * out_seg, out_seg) = f(x.segment(b * seg, seg));
  return out;
}

}  // namespace

std::string provenance_name(Provenance p) {
  switch (p) {
    case Provenance::induced: return "induced";
    case Provenance::conjugated: return "conjugated";
    case Provenance::multiplier_extended: return "multiplier";
    default: return "external";
  }
}

Provenance provenance_from_name(const std::string& s) {
  if (s == "induced") return Provenance::induced;
  if (s == "conjugated") return Provenance::conjugated;
  if (s == "multiplier") return Provenance::multiplier_extended;
  if (s == "external") return Provenance::external;
  throw DomainError("unknown provenance: " + s);
}

int CovariantTuple::map_index(int factor) const {
  for (size_t i = 0; i < maps.size(); ++i)
    if (maps[i].factor == factor) return static_cast<int>(i);
  return -1;
}

const TupleMap& CovariantTuple::map_for(int factor) const {
  int idx = map_index(factor);
  if (idx < 0) throw DomainError("CovariantTuple: no map for requested factor");
  return maps[idx];
}

CovariantTuple induced_tuple(const ProductSystemSpec& spec, const Degree& cap, int coeff_dim,
                             std::vector<int> factors, long max_dim) {
  BasisPtr basis = enumerate_basis(spec, cap, coeff_dim, std::move(factors), max_dim);
  CovariantTuple tuple;
  tuple.basis = basis;
  tuple.provenance = Provenance::induced;
  const long n = basis->dim;
  const int m = basis->coeff_dim;

  for (int pos = 0; pos < basis->rank(); ++pos) {
    const int f = basis->factors[pos];
    const int d = spec.dim(f);
    std::vector<Eigen::Triplet<cx>> trips;
    for (const Degree& deg : basis->degrees) {
      Degree up = deg.plus_unit(pos);
      if (!up.leq(basis->cap)) continue;
      const Mat ins = insertion_unitary(*basis, f, deg);
      const long wc = basis->word_count(deg);
      const long off_in = basis->block_offset(deg);
      const long off_out = basis->block_offset(up);
      for (int a = 0; a < d; ++a)
        for (long w = 0; w < wc; ++w) {
          const long col_in = a * n + off_in + w * m;  // coeff 0 column
          for (long w2 = 0; w2 < d * wc; ++w2) {
            cx v = ins(w2, a * wc + w);
            if (std::abs(v) < 1e-15) continue;
            for (int c = 0; c < m; ++c)
              trips.emplace_back(off_out + w2 * m + c, col_in + c, v);
          }
        }
    }
    SpMat mat(n, d * n);
    mat.setFromTriplets(trips.begin(), trips.end());
    TupleMap tm;
    tm.factor = f;
    tm.letter_dim = d;
    tm.matrix = std::move(mat);
    tm.tracked = true;
    tm.shift_bound = Degree::unit(basis->rank(), pos);
    tuple.maps.push_back(std::move(tm));
  }
  return tuple;
}

CovariantTuple conjugate_tuple(const CovariantTuple& tuple, const Mat& u) {
  const long n = tuple.dim();
  if (u.rows() != n || u.cols() != n) throw DomainError("conjugate_tuple: unitary size mismatch");
  CovariantTuple out = tuple;
  out.provenance = Provenance::conjugated;
  const Mat uadj = u.adjoint();
  for (auto& tm : out.maps) {
    Mat conj(n, tm.letter_dim * n);
    for (int b = 0; b < tm.letter_dim; ++b)
      conj.middleCols(b * n, n) = u * letter_block(tm.matrix, b, n, uadj);
    tm.matrix = std::move(conj);
  }
  out.window_frame = tuple.has_window_frame() ? Mat(tuple.window_frame * uadj) : uadj;
  return out;
}

Mat CovariantTuple::window_projector(const Degree& maxdeg) const {
  Mat q = degree_projector(wbasis(), maxdeg);
  if (!has_window_frame()) return q;
  return window_frame.adjoint() * q * window_frame;
}

Mat CovariantTuple::coeff_window(const Mat& columns, const Degree& maxdeg) const {
  Mat transported = has_window_frame() ? Mat(window_frame * columns) : columns;
  return coefficient_window(wbasis(), transported, maxdeg);
}

Mat tuple_block(const CovariantTuple& tuple, const Degree& n, const Mat& x) {
  if (n.size() != tuple.basis->rank()) throw DomainError("tuple_block: degree rank mismatch");
  if (n.is_zero()) return x;
  int pos = 0;
  while (n[pos] == 0) ++pos;
  const TupleMap& tm = tuple.map_for(tuple.basis->factors[pos]);
  Mat sub = tuple_block(tuple, n.minus_unit(pos), x);
  Mat out(tuple.dim(), tm.letter_dim * sub.cols());
  for (int b = 0; b < tm.letter_dim; ++b)
    out.middleCols(b * sub.cols(), sub.cols()) =
        letter_block(tm.matrix, b, tuple.dim(), sub);
  return out;
}

std::map<Degree, Mat, GradedLexLess> tuple_blocks(const CovariantTuple& tuple, const Mat& x,
                                                  const Degree& bound) {
  std::map<Degree, Mat, GradedLexLess> memo;
  for (const Degree& n : degrees_up_to(bound.min(tuple.basis->cap))) {
    if (n.is_zero()) {
      memo[n] = x;
      continue;
    }
    int pos = 0;
    while (n[pos] == 0) ++pos;
    const TupleMap& tm = tuple.map_for(tuple.basis->factors[pos]);
    const Mat& sub = memo.at(n.minus_unit(pos));
    Mat out(tuple.dim(), tm.letter_dim * sub.cols());
    for (int b = 0; b < tm.letter_dim; ++b)
      out.middleCols(b * sub.cols(), sub.cols()) =
          letter_block(tm.matrix, b, tuple.dim(), sub);
    memo[n] = std::move(out);
  }
  return memo;
}

CovariantTuple sub_tuple(const CovariantTuple& tuple, const std::vector<int>& factors) {
  CovariantTuple out;
  out.basis = tuple.basis;
  out.provenance = tuple.provenance;
  out.window_basis = tuple.window_basis;
  out.window_frame = tuple.window_frame;
  for (int f : factors) out.maps.push_back(tuple.map_for(f));
  return out;
}

Degree available_degree_bound(const CovariantTuple& tuple) {
  Degree bound = Degree::zero(tuple.basis->rank());
  for (int p = 0; p < tuple.basis->rank(); ++p)
    if (tuple.map_index(tuple.basis->factors[p]) >= 0) bound[p] = tuple.basis->cap[p];
  return bound;
}

GradedOperator compose_power(const CovariantTuple& tuple, const Degree& n) {
  if (!n.leq(tuple.basis->cap)) throw DomainError("compose_power: degree exceeds cap");
  const long cols = tuple.basis->word_count(n) * tuple.dim();
  if (cols > 40000000 / std::max<long>(tuple.dim(), 1))
    throw CapacityError("compose_power: matrix too large");
  GradedOperator op;
  op.domain = tuple.basis;
  op.codomain = tuple.basis;
  op.letter_dim = static_cast<int>(tuple.basis->word_count(n));
  op.matrix = tuple_block(tuple, n, Mat::Identity(tuple.dim(), tuple.dim()));
  op.degree_shift = n;
  op.valid_window = tuple.basis->cap.minus(n);
  return op;
}

namespace {

struct IdentityDefect {
  long input_letters;  // dimension of the letter space tensored on H
  std::function<Vec(const Vec&)> apply;
  std::function<Vec(const Vec&)> apply_adjoint;
};

double defect_norm(const CovariantTuple& tuple, const IdentityDefect& d) {
  const long n = tuple.dim();
  return op_norm_lazy(d.input_letters * n, d.apply, d.apply_adjoint);
}

}  // namespace

double AxiomReport::max_residual() const {
  double m = 0.0;
  for (const CheckResult* c : {&isometric, &commuting, &doubly_commuting, &pure})
    if (c->verifiable) m = std::max(m, c->residual);
  return m;
}

bool AxiomReport::all_verifiable() const {
  return isometric.verifiable && commuting.verifiable && doubly_commuting.verifiable &&
         pure.verifiable;
}

bool AxiomReport::pass(double tol) const { return all_verifiable() && max_residual() < tol; }

AxiomReport check_axioms(const CovariantTuple& tuple) {
  AxiomReport report;
  const GradedBasis& basis = *tuple.basis;
  const long n = basis.dim;
  const auto vi = [&](const TupleMap& tm) { return [&tm](const Vec& x) { return op_apply(tm.matrix, x); }; };
  const auto viadj = [&](const TupleMap& tm) {
    return [&tm](const Vec& x) { return op_apply_adjoint(tm.matrix, x); };
  };

  // isometric: V^*V = I on E_i (x) {deg <= cap - shift_i}
  {
    double worst = 0.0;
    bool any = false;
    std::ostringstream notes;
    for (const auto& tm : tuple.maps) {
      Degree window = tuple.wbasis().cap.minus(tm.shift_bound);
      if (window.empty_window()) {
        notes << "factor " << tm.factor + 1 << " unverifiable at this cap; ";
        continue;
      }
      any = true;
      WindowMask mask = degree_mask(tuple, window);
      auto fwd = [&, mask](const Vec& x) -> Vec {
        Vec mx = mask_blocks(mask, tm.letter_dim, x);
        return op_apply_adjoint(tm.matrix, op_apply(tm.matrix, mx)) - mx;
      };
      auto bwd = [&, mask](const Vec& x) -> Vec {
        Vec y = op_apply_adjoint(tm.matrix, op_apply(tm.matrix, x)) - x;
        return mask_blocks(mask, tm.letter_dim, y);
      };
      worst = std::max(worst, op_norm_lazy(tm.letter_dim * n, fwd, bwd));
    }
    report.isometric = {worst, any, notes.str()};
  }

  // pairwise identities
  const int nmaps = static_cast<int>(tuple.maps.size());
  if (nmaps < 2) {
    report.commuting = {0.0, true, "no pairs"};
    report.doubly_commuting = {0.0, true, "no pairs"};
  } else {
    double worst_c = 0.0, worst_dc = 0.0;
    bool any_c = false, any_dc = false;
    std::ostringstream notes_c, notes_dc;
    for (int a = 0; a < nmaps; ++a)
      for (int b = 0; b < nmaps; ++b) {
        if (a == b) continue;
        const TupleMap& mi = tuple.maps[a];
        const TupleMap& mj = tuple.maps[b];
        const int di = mi.letter_dim, dj = mj.letter_dim;
        // commuting, once per unordered pair:
        if (a < b) {
          Degree window = tuple.wbasis().cap.minus(mi.shift_bound).minus(mj.shift_bound);
          if (window.empty_window()) {
            notes_c << "pair (" << mi.factor + 1 << "," << mj.factor + 1
                    << ") unverifiable at this cap; ";
          } else {
            any_c = true;
            WindowMask mask = degree_mask(tuple, window);
            const Mat tij = basis.spec.flip(mj.factor, mi.factor);  // t_{i,j}
            auto lhs = [&, mask](const Vec& x) -> Vec {
              Vec inner = apply_per_segment(di, dj * n, vi(mj), n, x);
              return op_apply(mi.matrix, inner);
            };
            auto rhs = [&, tij](const Vec& x) -> Vec {
              Vec y = apply_kron_left(tij, n, x);
              Vec inner = apply_per_segment(dj, di * n, vi(mi), n, y);
              return op_apply(mj.matrix, inner);
            };
            auto fwd = [&, mask, lhs, rhs](const Vec& x) -> Vec {
              Vec mx = mask_blocks(mask, di * dj, x);
              return lhs(mx) - rhs(mx);
            };
            auto lhs_adj = [&](const Vec& y) -> Vec {
              Vec t = op_apply_adjoint(mi.matrix, y);
              return apply_per_segment(di, n, viadj(mj), dj * n, t);
            };
            auto rhs_adj = [&, tij](const Vec& y) -> Vec {
              Vec t = op_apply_adjoint(mj.matrix, y);
              Vec inner = apply_per_segment(dj, n, viadj(mi), di * n, t);
              return apply_kron_left(tij.adjoint(), n, inner);
            };
            auto bwd = [&, mask, lhs_adj, rhs_adj](const Vec& y) -> Vec {
              Vec z = lhs_adj(y) - rhs_adj(y);
              return mask_blocks(mask, di * dj, z);
            };
            worst_c = std::max(worst_c, op_norm_lazy(di * dj * n, fwd, bwd));
          }
        }
        // doubly commuting, both orders: V_i^* V_j on E_j (x) {deg <= cap - shift_j}
        {
          Degree window = tuple.wbasis().cap.minus(mj.shift_bound);
          if (window.empty_window()) {
            notes_dc << "pair (" << mi.factor + 1 << "," << mj.factor + 1
                     << ") unverifiable at this cap; ";
            continue;
          }
          any_dc = true;
          WindowMask mask = degree_mask(tuple, window);
          const Mat tji = basis.spec.flip(mi.factor, mj.factor);  // t_{j,i}
          auto lhs = [&](const Vec& x) -> Vec {
            return op_apply_adjoint(mi.matrix, op_apply(mj.matrix, x));
          };
          auto rhs = [&, tji](const Vec& x) -> Vec {
            Vec y = apply_per_segment(dj, n, viadj(mi), di * n, x);
            Vec z = apply_kron_left(tji, n, y);
            return apply_per_segment(di, dj * n, vi(mj), n, z);
          };
          auto fwd = [&, mask, lhs, rhs](const Vec& x) -> Vec {
            Vec mx = mask_blocks(mask, dj, x);
            return lhs(mx) - rhs(mx);
          };
          auto lhs_adj = [&](const Vec& y) -> Vec {
            return op_apply_adjoint(mj.matrix, op_apply(mi.matrix, y));
          };
          auto rhs_adj = [&, tji](const Vec& y) -> Vec {
            Vec t = apply_per_segment(di, n, viadj(mj), dj * n, y);
            Vec z = apply_kron_left(tji.adjoint(), n, t);
            return apply_per_segment(dj, di * n, vi(mi), n, z);
          };
          auto bwd = [&, mask, lhs_adj, rhs_adj](const Vec& y) -> Vec {
            Vec z = lhs_adj(y) - rhs_adj(y);
            return mask_blocks(mask, dj, z);
          };
          worst_dc = std::max(worst_dc, op_norm_lazy(dj * n, fwd, bwd));
        }
      }
    report.commuting = {worst_c, any_c, notes_c.str()};
    report.doubly_commuting = {worst_dc, any_dc, notes_dc.str()};
  }

  // pure: ||V_p V_p^*|| at the first power past cap (structural nilpotency)
  {
    double worst = 0.0;
    bool ok = true;
    std::ostringstream notes;
    for (const auto& tm : tuple.maps) {
      if (tm.tracked) {
        int pos = -1;
        for (int p = 0; p < basis.rank(); ++p)
          if (basis.factors[p] == tm.factor) pos = p;
        const int power = basis.cap[pos] + 1;
        std::function<Vec(int, const Vec&)> rec = [&](int p, const Vec& x) -> Vec {
          if (p == 0) return x;
          Vec y = op_apply_adjoint(tm.matrix, x);
          Vec mid(tm.letter_dim * n);
          for (int b = 0; b < tm.letter_dim; ++b)
            mid.segment(b * n, n) = rec(p - 1, y.segment(b * n, n));
          return op_apply(tm.matrix, mid);
        };
        auto f = [&](const Vec& x) { return rec(power, x); };
        worst = std::max(worst, op_norm_lazy(n, f, f));
      } else {
        // untracked slot: iterate X -> sum_b A_b X A_b^* densely until it vanishes
        Mat x = Mat::Identity(n, n);
        Mat v = to_dense(tm.matrix);
        bool vanished = false;
        for (int p = 0; p < 96; ++p) {
          Mat next = Mat::Zero(n, n);
          for (int b = 0; b < tm.letter_dim; ++b) {
            const auto block = v.middleCols(b * n, n);
            next += block * x * block.adjoint();
          }
          x = std::move(next);
          if (x.cwiseAbs().maxCoeff() < 1e-13) {
            vanished = true;
            break;
          }
        }
        if (!vanished) {
          ok = false;
          notes << "factor " << tm.factor + 1 << " power did not vanish within limit; ";
          worst = std::max(worst, op_norm(x));
        }
      }
    }
    report.pure = {worst, true, notes.str()};
    if (!ok) report.pure.note += "(non-nilpotent slot)";
  }

  return report;
}

void gate_axioms(const CovariantTuple& tuple, double tol, bool need_doubly_commuting,
                 const std::string& who) {
  AxiomReport rep = check_axioms(tuple);
  auto fail = [&](const char* name, const CheckResult& c) {
    std::ostringstream os;
    os << who << ": axiom gate failed on " << name << " (residual " << c.residual
       << (c.verifiable ? "" : ", unverifiable at this cap") << ") " << c.note;
    throw PreconditionError(os.str(), c.residual);
  };
  if (!rep.isometric.verifiable || rep.isometric.residual > tol) fail("isometric", rep.isometric);
  if (!rep.commuting.verifiable || rep.commuting.residual > tol) fail("commuting", rep.commuting);
  if (need_doubly_commuting &&
      (!rep.doubly_commuting.verifiable || rep.doubly_commuting.residual > tol))
    fail("doubly commuting", rep.doubly_commuting);
  if (rep.pure.residual > tol) fail("pure", rep.pure);
}

}  // namespace fockmod

#include <CLI11.hpp>
#include <iostream>

#include "fockmod/harness.hpp"

using namespace fockmod;

namespace {

Degree parse_cap(const std::string& s) {
  std::vector<int> v;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) v.push_back(std::stoi(tok));
  if (v.empty()) throw DomainError("--cap: expected a comma-separated list");
  return Degree(std::move(v));
}

long max_dim_limit() {
  if (const char* env = std::getenv("FOCKMOD_MAX_DIM")) return std::atol(env);
  return kDefaultMaxDim;
}

ProductSystemSpec load_spec(const std::string& spec_path, const std::string& dims_csv) {
  if (!spec_path.empty()) return spec_from_json(read_json_file(spec_path));
  if (!dims_csv.empty()) {
    std::vector<int> dims;
    std::stringstream ss(dims_csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) dims.push_back(std::stoi(tok));
    return make_swap_spec(dims);
  }
  throw DomainError("either --spec or --dims is required");
}

Instance load_instance(const std::string& path) {
  return instance_from_json(read_json_file(path));
}

Frame load_subspace(const std::string& path, const Instance& inst) {
  json j = read_json_file(path);
  Frame f;
  f.basis = inst.tuple.basis;
  f.columns = matrix_from_json(j.contains("columns") ? j.at("columns") : j);
  if (j.contains("rank_tol")) f.rank_tol = j.at("rank_tol").get<double>();
  if (f.columns.rows() != inst.tuple.basis->dim)
    throw DomainError("subspace frame does not match the instance space");
  return canonicalize(f);
}

void emit(const json& j, const std::string& out) {
  if (out.empty())
    std::cout << j.dump(1) << "\n";
  else
    write_json_file(out, j);
}

json factorization_to_json(const FactorizationData& fact) {
  json phis = json::array();
  for (size_t i = 0; i < fact.phi.size(); ++i)
    phis.push_back(json{{"source_factor", fact.phi[i].source_factor + 1},
                        {"source_dim", fact.phi[i].source_dim},
                        {"isometric", fact.phi[i].isometric_flag},
                        {"block", matrix_to_json(fact.phi[i].block)}});
  json res{{"range_defect", fact.residuals.range_defect},
           {"inner_isometry", fact.residuals.inner_isometry},
           {"inner_wandering", fact.residuals.inner_wandering},
           {"intertwining", fact.residuals.intertwining},
           {"phi_formula_gap", fact.residuals.phi_formula_gap}};
  return json{{"window", degree_to_json(fact.window)},
              {"wandering", frame_to_json(fact.wandering)},
              {"m_psi", matrix_to_json(fact.m_psi)},
              {"phi", std::move(phis)},
              {"residuals", std::move(res)}};
}

bool factorization_ok(const FactorizationData& fact, double tol) {
  double worst = std::max({fact.residuals.range_defect, fact.residuals.inner_isometry,
                           fact.residuals.inner_wandering});
  for (double v : fact.residuals.intertwining) worst = std::max(worst, v);
  for (double v : fact.residuals.phi_formula_gap) worst = std::max(worst, v);
  return worst < tol;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fockmod: truncated Fock-module toolkit for isometric covariant representations"};
  app.require_subcommand(1);

  std::string spec_path, dims_csv, cap_csv, out_path, instance_path, subspace_path,
      subspace2_path, kind = "induced", checks_csv = "isometry,creation,multiplier,symbol",
      symbol_path, mode;
  int coeff_dim = 1, subspaces = 0, gens = 2, jobs = 1;
  std::uint64_t seed = 0;
  double tol = kResidualTol;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--out", out_path, "output file (stdout when omitted)");
    cmd->add_option("--tol", tol, "verdict tolerance");
    cmd->add_option("--jobs", jobs, "worker count (runs are serial and deterministic)");
  };

  auto* gen = app.add_subcommand("gen", "generate an instance");
  gen->add_option("--spec", spec_path, "product system spec JSON");
  gen->add_option("--dims", dims_csv, "factor dimensions, e.g. 2,1 (canonical swaps)");
  gen->add_option("--cap", cap_csv, "truncation per factor, e.g. 3,3")->required();
  gen->add_option("--coeff-dim", coeff_dim, "coefficient space dimension");
  gen->add_option("--seed", seed, "random seed");
  gen->add_option("--kind", kind, "induced | conjugated | multiplier");
  gen->add_option("--subspaces", subspaces, "attach this many saturated invariant subspaces");
  gen->add_option("--gens", gens, "generators per attached subspace");
  add_common(gen);

  auto* wold = app.add_subcommand("wold", "Wold decomposition of an instance");
  wold->add_option("--instance", instance_path)->required();
  add_common(wold);

  auto* symbol = app.add_subcommand("symbol", "commutant symbol calculus");
  symbol->add_option("mode", mode, "extract | apply")->required();
  symbol->add_option("--instance", instance_path)->required();
  symbol->add_option("--symbol", symbol_path, "symbol JSON for apply");
  add_common(symbol);

  auto* fact_cmd = app.add_subcommand("factorize", "Beurling-Lax-Halmos factorization");
  fact_cmd->add_option("--instance", instance_path)->required();
  fact_cmd->add_option("--subspace", subspace_path, "frame JSON (default: first attached)");
  add_common(fact_cmd);

  auto* nested = app.add_subcommand("nested", "nested containment test");
  nested->add_option("--instance", instance_path)->required();
  nested->add_option("--subspace", subspace_path);
  nested->add_option("--subspace2", subspace2_path);
  add_common(nested);

  auto* coincide = app.add_subcommand("coincide", "coincidence of two factorizations");
  coincide->add_option("--instance", instance_path)->required();
  coincide->add_option("--subspace", subspace_path);
  coincide->add_option("--subspace2", subspace2_path);
  add_common(coincide);

  auto* lift = app.add_subcommand("lift", "intertwining lift for a shift-invariant subspace");
  lift->add_option("--instance", instance_path)->required();
  lift->add_option("--subspace", subspace_path);
  add_common(lift);

  auto* verify = app.add_subcommand("verify", "full verification suite");
  verify->add_option("--instance", instance_path, "existing instance (otherwise generated)");
  verify->add_option("--spec", spec_path);
  verify->add_option("--dims", dims_csv);
  verify->add_option("--cap", cap_csv);
  verify->add_option("--coeff-dim", coeff_dim);
  verify->add_option("--seed", seed);
  verify->add_option("--kind", kind);
  add_common(verify);

  auto* oracle_cmd = app.add_subcommand("oracle", "independent literal-formula verification");
  oracle_cmd->add_option("--instance", instance_path)->required();
  oracle_cmd->add_option("--checks", checks_csv, "comma list: isometry,creation,multiplier,symbol");
  add_common(oracle_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (gen->parsed()) {
      GenConfig cfg;
      cfg.spec = load_spec(spec_path, dims_csv);
      cfg.cap = parse_cap(cap_csv);
      cfg.coeff_dim = coeff_dim;
      cfg.kind = kind;
      cfg.seed = seed;
      cfg.subspace_count = subspaces;
      cfg.subspace_generators = gens;
      cfg.max_dim = max_dim_limit();
      Instance inst = gen_instance(cfg);
      emit(instance_to_json(inst), out_path);
      return 0;
    }

    Instance inst;
    if (!instance_path.empty())
      inst = load_instance(instance_path);
    else if (verify->parsed()) {
      GenConfig cfg;
      cfg.spec = load_spec(spec_path, dims_csv);
      cfg.cap = parse_cap(cap_csv);
      cfg.coeff_dim = coeff_dim;
      cfg.kind = kind;
      cfg.seed = seed;
      cfg.max_dim = max_dim_limit();
      inst = gen_instance(cfg);
    }

    if (wold->parsed()) {
      WoldData wd = wold_unitary(inst.tuple);
      double worst = wd.block_gram_residual;
      for (double v : wd.intertwining_residuals) worst = std::max(worst, v);
      json j{{"wandering", frame_to_json(wd.wandering)},
             {"pi", matrix_to_json(wd.pi)},
             {"window", degree_to_json(wd.window)},
             {"block_gram_residual", wd.block_gram_residual},
             {"intertwining_residuals", wd.intertwining_residuals}};
      emit(j, out_path);
      return worst < tol ? 0 : 1;
    }

    if (symbol->parsed()) {
      const GradedBasis& basis = *inst.tuple.basis;
      if (basis.rank() < 2) throw DomainError("symbol: needs at least two factors");
      std::vector<int> first(basis.factors.begin(), basis.factors.end() - 1);
      CovariantTuple shifts = sub_tuple(inst.tuple, first);
      WoldData wd = wold_unitary(shifts, nullptr, false, true);
      const int f = basis.factors.back();
      if (mode == "extract") {
        Symbol sym = extract_symbol(shifts, to_dense(inst.tuple.map_for(f).matrix), f, wd);
        json j{{"source_factor", f + 1},
               {"source_dim", sym.source_dim},
               {"isometric", sym.isometric_flag},
               {"model", basis_to_json(*sym.model)},
               {"block", matrix_to_json(sym.block)}};
        emit(j, out_path);
        return 0;
      }
      if (mode == "apply") {
        if (symbol_path.empty()) throw DomainError("symbol apply: --symbol is required");
        json sj = read_json_file(symbol_path);
        Symbol sym;
        sym.model = basis_from_json(sj.at("model"));
        sym.source_factor = sj.at("source_factor").get<int>() - 1;
        sym.source_dim = sj.at("source_dim").get<int>();
        sym.block = matrix_from_json(sj.at("block"));
        sym.isometric_flag = sym.isometry_defect() < kRankTol;
        CovariantTuple shifts_model =
            induced_tuple(sym.model->spec, sym.model->cap, sym.model->coeff_dim,
                          sym.model->factors, max_dim_limit());
        Multiplier mult = multiplier_from_symbol(sym, shifts_model);
        json j{{"matrix", matrix_to_json(mult.combined)},
               {"valid_window", degree_to_json(mult.valid_window)}};
        emit(j, out_path);
        return 0;
      }
      throw DomainError("symbol: mode must be extract or apply");
    }

    auto pick_subspace = [&](const std::string& path, size_t index) -> Frame {
      if (!path.empty()) return load_subspace(path, inst);
      if (inst.subspaces.size() > index) return inst.subspaces[index];
      throw DomainError("no subspace given and the instance carries too few");
    };

    if (fact_cmd->parsed()) {
      FactorizationData fact = blh_factorize(pick_subspace(subspace_path, 0), inst.tuple);
      DoublyCommutingVerdict dc = doubly_commuting_subspace_test(fact, inst.tuple, tol);
      json j = factorization_to_json(fact);
      j["doubly_commuting"] = json{{"verdict", dc.doubly_commuting},
                                   {"defect_model", dc.defect_model},
                                   {"defect_direct", dc.defect_direct},
                                   {"agree", dc.agree}};
      emit(j, out_path);
      return factorization_ok(fact, tol) && dc.agree ? 0 : 1;
    }

    if (nested->parsed()) {
      FactorizationData f1 = blh_factorize(pick_subspace(subspace_path, 0), inst.tuple);
      FactorizationData f2 = blh_factorize(pick_subspace(subspace2_path, 1), inst.tuple);
      NestedReport rep = nested_test(f1, f2, tol);
      json j{{"contained", rep.contained},
             {"frame_contained", rep.frame_contained},
             {"factorization_defect", rep.factorization_defect},
             {"inner_isometry", rep.inner.isometry_defect},
             {"inner_wandering", rep.inner.wandering_defect},
             {"psi", matrix_to_json(rep.psi)}};
      emit(j, out_path);
      bool ok = factorization_ok(f1, tol) && factorization_ok(f2, tol) &&
                rep.contained == rep.frame_contained;
      return ok ? 0 : 1;
    }

    if (coincide->parsed()) {
      FactorizationData f1 = blh_factorize(pick_subspace(subspace_path, 0), inst.tuple);
      FactorizationData f2 = blh_factorize(pick_subspace(subspace2_path, 1), inst.tuple);
      CoincideReport rep = coincide_test(symbol_system(f1), symbol_system(f2), tol);
      json j{{"coincide", rep.coincide},
             {"residual", rep.residual},
             {"unitary_defect", rep.unitary_defect}};
      if (rep.coincide) j["z"] = matrix_to_json(rep.z);
      emit(j, out_path);
      return factorization_ok(f1, tol) && factorization_ok(f2, tol) ? 0 : 1;
    }

    if (lift->parsed()) {
      LiftReport rep = intertwining_lift(pick_subspace(subspace_path, 0), inst.tuple, tol);
      json phis = json::array();
      for (const auto& p : rep.phi)
        phis.push_back(json{{"source_factor", p.source_factor + 1},
                            {"block", matrix_to_json(p.block)}});
      json j{{"success", rep.success}, {"defect", rep.defect}, {"phi", std::move(phis)}};
      emit(j, out_path);
      return 0;
    }

    if (verify->parsed()) {
      Report rep = verify_instance(inst, seed, tol);
      emit(report_to_json(rep), out_path);
      return rep.all_pass() ? 0 : 1;
    }

    if (oracle_cmd->parsed()) {
      std::vector<std::string> checks;
      std::stringstream ss(checks_csv);
      std::string tok;
      while (std::getline(ss, tok, ',')) checks.push_back(tok);
      Report rep = oracle_verify(inst, checks, tol);
      emit(report_to_json(rep), out_path);
      return rep.all_pass() ? 0 : 1;
    }
  } catch (const CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << "\n";
    return 3;
  } catch (const PreconditionError& e) {
    std::cerr << "precondition failed: " << e.what() << "\n";
    return 1;
  } catch (const DomainError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

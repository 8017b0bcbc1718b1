#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fockmod/invariant.hpp"
#include "fockmod/rng.hpp"
#include "fockmod/serialize.hpp"

namespace fockmod {

inline constexpr const char* kVersion = "0.1.0";

struct GenConfig {
  ProductSystemSpec spec;
  Degree cap;  // one entry per spec factor
  int coeff_dim = 1;
  std::string kind = "induced";  // induced | conjugated | multiplier
  std::uint64_t seed = 0;
  int subspace_count = 0;       // saturated invariant subspaces to attach
  int subspace_generators = 1;  // generators per attached subspace
  long max_dim = kDefaultMaxDim;
};

// Self-contained, seed-determined problem instance.
struct Instance {
  GenConfig config;
  CovariantTuple tuple;
  std::vector<Frame> subspaces;
  // Honest flags for random multiplier extensions: a random isometric symbol
  // need not make the extended map isometric or doubly commuting; the
  // measured residuals decide.
  bool doubly_commuting_flag = true;
  bool isometric_flag = true;
  std::string digest() const;
};

Instance gen_instance(const GenConfig& config);

// Saturated clipped orbit of seeded random vectors under every tuple map.
// saturated_full is set when the orbit fills the whole space.
Frame gen_invariant_subspace(const Instance& inst, int generators, std::uint64_t seed,
                             bool* saturated_full = nullptr);
Frame saturated_orbit(const CovariantTuple& tuple, const Mat& generators,
                      bool* saturated_full = nullptr);

json instance_to_json(const Instance& inst);
Instance instance_from_json(const json& j);

struct CheckOutcome {
  std::string name;
  bool pass = false;
  double defect = 0.0;
  std::string window;
  std::string note;
};

struct Report {
  std::string version = kVersion;
  std::string instance_digest;
  std::vector<CheckOutcome> checks;
  std::map<std::string, double> wall_ms;
  bool all_pass() const;
};

json report_to_json(const Report& r);

// Full verification suite for one instance: axioms, Wold, commutant symbol
// roundtrip, BLH factorization on an attached or generated subspace, nested
// pair, coincidence. Derived randomness is seeded from `seed`.
Report verify_instance(const Instance& inst, std::uint64_t seed, double tol = kResidualTol);

// Literal-formula recomputation of the requested checks; any discrepancy
// above tol fails the report naming the formula and worst basis vector.
// checks from {"isometry", "creation", "multiplier", "symbol", "phi"};
// an empty list yields an empty passing report.
Report oracle_verify(const Instance& inst, const std::vector<std::string>& checks,
                     double tol = kResidualTol);

}  // namespace fockmod

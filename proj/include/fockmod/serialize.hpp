#pragma once

#include <json.hpp>

#include "fockmod/fock_rep.hpp"

namespace fockmod {

using json = nlohmann::ordered_json;

// Complex matrices serialize row-major as [re, im] pairs.
json matrix_to_json(const Mat& m);
Mat matrix_from_json(const json& j);

json degree_to_json(const Degree& d);
Degree degree_from_json(const json& j);

// {"dims":[...], "flips":{"(i,j)": [[re,im],...]}} with 1-based pair keys;
// omitted flips default to the canonical swap.
json spec_to_json(const ProductSystemSpec& spec);
ProductSystemSpec spec_from_json(const json& j);

// Self-describing basis metadata: spec, cap, coeff_dim, factors (1-based).
json basis_to_json(const GradedBasis& basis);
BasisPtr basis_from_json(const json& j);

json frame_to_json(const Frame& f);
Frame frame_from_json(const json& j);

json tuple_to_json(const CovariantTuple& t);
CovariantTuple tuple_from_json(const json& j);

// FNV-1a over the serialized bytes; stable across runs.
std::string digest_of(const json& j);

void write_json_file(const std::string& path, const json& j);
json read_json_file(const std::string& path);

}  // namespace fockmod

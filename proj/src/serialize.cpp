#include "fockmod/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace fockmod {

namespace {

// 17 significant digits round-trips doubles exactly.
json num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return json(std::strtod(buf, nullptr));
}

std::pair<int, int> parse_pair_key(const std::string& key) {
  int i = 0, j = 0;
  if (std::sscanf(key.c_str(), "(%d,%d)", &i, &j) != 2)
    throw DomainError("flips: malformed pair key '" + key + "'");
  return {i - 1, j - 1};
}

}  // namespace

json matrix_to_json(const Mat& m) {
  json data = json::array();
  for (long r = 0; r < m.rows(); ++r)
    for (long c = 0; c < m.cols(); ++c)
      data.push_back(json::array({num(m(r, c).real()), num(m(r, c).imag())}));
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Mat matrix_from_json(const json& j) {
  long rows = j.at("rows").get<long>();
  long cols = j.at("cols").get<long>();
  const auto& data = j.at("data");
  if (static_cast<long>(data.size()) != rows * cols)
    throw DomainError("matrix: data length mismatch");
  Mat m(rows, cols);
  long idx = 0;
  for (long r = 0; r < rows; ++r)
    for (long c = 0; c < cols; ++c, ++idx)
      m(r, c) = cx(data[idx][0].get<double>(), data[idx][1].get<double>());
  return m;
}

json degree_to_json(const Degree& d) {
  json a = json::array();
  for (int i = 0; i < d.size(); ++i) a.push_back(d[i]);
  return a;
}

Degree degree_from_json(const json& j) {
  std::vector<int> v;
  for (const auto& e : j) v.push_back(e.get<int>());
  return Degree(std::move(v));
}

json spec_to_json(const ProductSystemSpec& spec) {
  json flips = json::object();
  for (const auto& [key, t] : spec.custom_flips) {
    std::ostringstream os;
    os << "(" << key.first + 1 << "," << key.second + 1 << ")";
    json data = json::array();
    for (long r = 0; r < t.rows(); ++r)
      for (long c = 0; c < t.cols(); ++c)
        data.push_back(json::array({num(t(r, c).real()), num(t(r, c).imag())}));
    flips[os.str()] = std::move(data);
  }
  return json{{"dims", spec.dims}, {"flips", std::move(flips)}};
}

ProductSystemSpec spec_from_json(const json& j) {
  ProductSystemSpec spec;
  spec.dims = j.at("dims").get<std::vector<int>>();
  if (j.contains("flips"))
    for (const auto& [key, data] : j.at("flips").items()) {
      auto [i, jdx] = parse_pair_key(key);
      if (!(0 <= i && i < jdx && jdx < spec.factor_count()))
        throw DomainError("flips: pair key out of range: " + key);
      const long rows = spec.dims[i] * spec.dims[jdx];
      if (static_cast<long>(data.size()) != rows * rows)
        throw DomainError("flips: entry count mismatch for " + key);
      Mat t(rows, rows);
      long idx = 0;
      for (long r = 0; r < rows; ++r)
        for (long c = 0; c < rows; ++c, ++idx)
          t(r, c) = cx(data[idx][0].get<double>(), data[idx][1].get<double>());
      spec.custom_flips[{i, jdx}] = std::move(t);
    }
  spec.validate();
  return spec;
}

json basis_to_json(const GradedBasis& basis) {
  std::vector<int> factors1;
  for (int f : basis.factors) factors1.push_back(f + 1);
  return json{{"spec", spec_to_json(basis.spec)},
              {"cap", degree_to_json(basis.cap)},
              {"coeff_dim", basis.coeff_dim},
              {"factors", factors1}};
}

BasisPtr basis_from_json(const json& j) {
  ProductSystemSpec spec = spec_from_json(j.at("spec"));
  Degree cap = degree_from_json(j.at("cap"));
  int m = j.at("coeff_dim").get<int>();
  std::vector<int> factors;
  if (j.contains("factors"))
    for (const auto& f : j.at("factors")) factors.push_back(f.get<int>() - 1);
  long max_dim = kDefaultMaxDim;
  if (const char* env = std::getenv("FOCKMOD_MAX_DIM")) max_dim = std::atol(env);
  return enumerate_basis(spec, cap, m, factors, max_dim);
}

json frame_to_json(const Frame& f) {
  json j{{"columns", matrix_to_json(f.columns)}, {"rank_tol", num(f.rank_tol)}};
  if (f.basis) j["basis"] = basis_to_json(*f.basis);
  return j;
}

Frame frame_from_json(const json& j) {
  Frame f;
  if (j.contains("basis")) f.basis = basis_from_json(j.at("basis"));
  f.columns = matrix_from_json(j.at("columns"));
  f.rank_tol = j.at("rank_tol").get<double>();
  if (f.basis && f.columns.rows() != f.basis->dim)
    throw DomainError("frame: column length does not match basis dimension");
  return f;
}

json tuple_to_json(const CovariantTuple& t) {
  json maps = json::array();
  for (const auto& tm : t.maps)
    maps.push_back(json{{"factor", tm.factor + 1},
                        {"tracked", tm.tracked},
                        {"shift_bound", degree_to_json(tm.shift_bound)},
                        {"matrix", matrix_to_json(to_dense(tm.matrix))}});
  json j{{"basis", basis_to_json(*t.basis)},
         {"provenance", provenance_name(t.provenance)},
         {"maps", std::move(maps)}};
  if (t.window_basis) j["window_basis"] = basis_to_json(*t.window_basis);
  if (t.has_window_frame()) j["window_frame"] = matrix_to_json(t.window_frame);
  return j;
}

CovariantTuple tuple_from_json(const json& j) {
  CovariantTuple t;
  t.basis = basis_from_json(j.at("basis"));
  t.provenance = provenance_from_name(j.at("provenance").get<std::string>());
  for (const auto& jm : j.at("maps")) {
    TupleMap tm;
    tm.factor = jm.at("factor").get<int>() - 1;
    tm.letter_dim = t.basis->spec.dim(tm.factor);
    tm.tracked = jm.at("tracked").get<bool>();
    tm.shift_bound = degree_from_json(jm.at("shift_bound"));
    Mat m = matrix_from_json(jm.at("matrix"));
    if (m.rows() != t.basis->dim || m.cols() != tm.letter_dim * t.basis->dim)
      throw DomainError("tuple: map shape mismatch");
    tm.matrix = std::move(m);
    t.maps.push_back(std::move(tm));
  }
  if (j.contains("window_basis")) t.window_basis = basis_from_json(j.at("window_basis"));
  if (j.contains("window_frame")) {
    t.window_frame = matrix_from_json(j.at("window_frame"));
    if (t.window_frame.rows() != t.wbasis().dim || t.window_frame.cols() != t.basis->dim)
      throw DomainError("tuple: window frame shape mismatch");
  }
  return t;
}

std::string digest_of(const json& j) {
  const std::string bytes = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot open for writing: " + path);
  out << j.dump(1) << "\n";
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open for reading: " + path);
  json j;
  in >> j;
  return j;
}

}  // namespace fockmod

#include "fockmod/degree.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace fockmod {

Degree Degree::unit(int r, int slot) {
  Degree d = zero(r);
  d.n.at(slot) = 1;
  return d;
}

int Degree::total() const { return std::accumulate(n.begin(), n.end(), 0); }

bool Degree::leq(const Degree& o) const {
  if (n.size() != o.n.size()) throw std::invalid_argument("Degree::leq: rank mismatch");
  for (size_t i = 0; i < n.size(); ++i)
    if (n[i] > o.n[i]) return false;
  return true;
}

bool Degree::is_zero() const {
  return std::all_of(n.begin(), n.end(), [](int v) { return v == 0; });
}

bool Degree::empty_window() const {
  return std::any_of(n.begin(), n.end(), [](int v) { return v < 0; });
}

Degree Degree::plus(const Degree& o) const {
  if (n.size() != o.n.size()) throw std::invalid_argument("Degree::plus: rank mismatch");
  Degree r = *this;
  for (size_t i = 0; i < n.size(); ++i) r.n[i] += o.n[i];
  return r;
}

Degree Degree::minus(const Degree& o) const {
  if (n.size() != o.n.size()) throw std::invalid_argument("Degree::minus: rank mismatch");
  Degree r = *this;
  for (size_t i = 0; i < n.size(); ++i) r.n[i] -= o.n[i];
  return r;
}

Degree Degree::plus_unit(int slot) const {
  Degree r = *this;
  r.n.at(slot) += 1;
  return r;
}

Degree Degree::minus_unit(int slot) const {
  Degree r = *this;
  r.n.at(slot) -= 1;
  return r;
}

Degree Degree::min(const Degree& o) const {
  if (n.size() != o.n.size()) throw std::invalid_argument("Degree::min: rank mismatch");
  Degree r = *this;
  for (size_t i = 0; i < n.size(); ++i) r.n[i] = std::min(r.n[i], o.n[i]);
  return r;
}

std::string Degree::str() const {
  std::ostringstream os;
  os << "(";
  for (size_t i = 0; i < n.size(); ++i) os << (i ? "," : "") << n[i];
  os << ")";
  return os.str();
}

bool graded_lex_less(const Degree& a, const Degree& b) {
  int ta = a.total(), tb = b.total();
  if (ta != tb) return ta < tb;
  return std::lexicographical_compare(a.n.begin(), a.n.end(), b.n.begin(), b.n.end());
}

std::vector<Degree> degrees_up_to(const Degree& cap) {
  std::vector<Degree> out;
  if (cap.empty_window()) return out;
  Degree cur = Degree::zero(cap.size());
  while (true) {
    out.push_back(cur);
    int i = cap.size() - 1;
    while (i >= 0) {
      if (cur[i] < cap[i]) {
        ++cur[i];
        break;
      }
      cur[i] = 0;
      --i;
    }
    if (i < 0) break;
  }
  std::sort(out.begin(), out.end(), graded_lex_less);
  return out;
}

}  // namespace fockmod

#pragma once

#include <string>
#include <vector>

namespace fockmod {

// Multi-index over the factors of a product system. Entries are usually in
// N_0, but window arithmetic may produce negative entries; a Degree with a
// negative entry denotes an empty window.
struct Degree {
  std::vector<int> n;

  Degree() = default;
  explicit Degree(std::vector<int> v) : n(std::move(v)) {}

  static Degree zero(int r) { return Degree(std::vector<int>(r, 0)); }
  static Degree unit(int r, int slot);       // e_slot, 0-based
  static Degree constant(int r, int value) { return Degree(std::vector<int>(r, value)); }

  int size() const { return static_cast<int>(n.size()); }
  int total() const;
  int operator[](int i) const { return n[i]; }
  int& operator[](int i) { return n[i]; }

  bool leq(const Degree& o) const;           // componentwise
  bool is_zero() const;
  bool empty_window() const;                 // any entry < 0

  Degree plus(const Degree& o) const;
  Degree minus(const Degree& o) const;
  Degree plus_unit(int slot) const;
  Degree minus_unit(int slot) const;
  Degree min(const Degree& o) const;

  bool operator==(const Degree& o) const { return n == o.n; }
  bool operator!=(const Degree& o) const { return n != o.n; }

  std::string str() const;
};

// Total order: by |n|, then lexicographic. Normative basis-block order.
bool graded_lex_less(const Degree& a, const Degree& b);

struct GradedLexLess {
  bool operator()(const Degree& a, const Degree& b) const { return graded_lex_less(a, b); }
};

// All degrees 0 <= n <= cap, sorted graded-lex. Empty if cap has a negative entry.
std::vector<Degree> degrees_up_to(const Degree& cap);

}  // namespace fockmod

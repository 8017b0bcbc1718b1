#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "fockmod/types.hpp"

namespace fockmod {

// Single named seedable generator. Substreams are derived from (seed, name)
// so parallel and serial campaigns draw identical values. Gaussian sampling
// is hand-rolled Box-Muller so output does not depend on the standard
// library's distribution implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : base_(seed), gen_(mix(seed, 0x243f6a8885a308d3ull)) {}
  Rng(std::uint64_t seed, const std::string& stream)
      : base_(seed), gen_(mix(seed, fnv1a(stream))) {}

  Rng child(const std::string& stream) const {
    return Rng(base_, fnv1a(stream) ^ 0x452821e638d01377ull, 0);
  }
  Rng child(std::uint64_t index) const {
    return Rng(base_, index * 0x9e3779b97f4a7c15ull + 0x13198a2e03707344ull, 0);
  }

  double uniform();            // [0, 1)
  double gaussian();           // standard normal, Box-Muller
  cx complex_gaussian();       // real and imaginary parts independent N(0,1)
  std::uint64_t integer(std::uint64_t bound);  // [0, bound)

  Mat gaussian_matrix(long rows, long cols);
  Vec gaussian_vector(long n);

  // Haar-distributed unitary: QR of a Gaussian matrix with the R-diagonal
  // phase correction.
  Mat haar_unitary(long n);

  // Haar-distributed isometry (rows x cols, cols <= rows).
  Mat haar_isometry(long rows, long cols);

 private:
  Rng(std::uint64_t base, std::uint64_t salt, int) : base_(base), gen_(mix(base, salt)) {}
  static std::uint64_t fnv1a(const std::string& s);
  static std::uint64_t mix(std::uint64_t a, std::uint64_t b);

  std::uint64_t base_ = 0;
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace fockmod

#include "fockmod/rng.hpp"

#include <Eigen/QR>
#include <cmath>

namespace fockmod {

std::uint64_t Rng::fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t Rng::mix(std::uint64_t a, std::uint64_t b) {
  // splitmix64 finalizer over the combination
  std::uint64_t z = a + 0x9e3779b97f4a7c15ull * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

double Rng::uniform() {
  // 53-bit mantissa in [0,1)
  return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double Rng::gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = 0.0;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 2.0 * M_PI * u2;
  spare_ = r * std::sin(a);
  have_spare_ = true;
  return r * std::cos(a);
}

cx Rng::complex_gaussian() {
  double re = gaussian();
  double im = gaussian();
  return cx(re, im);
}

std::uint64_t Rng::integer(std::uint64_t bound) {
  if (bound == 0) return 0;
  // modulo bias negligible for the small bounds used here
  return gen_() % bound;
}

Mat Rng::gaussian_matrix(long rows, long cols) {
  Mat m(rows, cols);
  for (long r = 0; r < rows; ++r)
    for (long c = 0; c < cols; ++c) m(r, c) = complex_gaussian();
  return m;
}

Vec Rng::gaussian_vector(long n) {
  Vec v(n);
  for (long i = 0; i < n; ++i) v[i] = complex_gaussian();
  return v;
}

Mat Rng::haar_unitary(long n) { return haar_isometry(n, n); }

Mat Rng::haar_isometry(long rows, long cols) {
  if (cols > rows) throw DomainError("haar_isometry: cols must be <= rows");
  Mat g = gaussian_matrix(rows, cols);
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ() * Mat::Identity(rows, cols);
  Mat r = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  for (long j = 0; j < cols; ++j) {
    cx d = r(j, j);
    double a = std::abs(d);
    q.col(j) *= (a > 0 ? d / a : cx(1.0, 0.0));
  }
  return q;
}

}  // namespace fockmod

#pragma once

// Small fixed-size linear algebra and error types shared by every module.

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace kvf {

struct Vec2 {
  double x = 0.0, y = 0.0;

  double& operator[](int i) { return i == 0 ? x : y; }
  double operator[](int i) const { return i == 0 ? x : y; }

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double norm(const Vec2& v) { return std::sqrt(dot(v, v)); }

// Dense 2x2 matrix, row major: m[i][j].
struct Mat2 {
  std::array<std::array<double, 2>, 2> m{{{0.0, 0.0}, {0.0, 0.0}}};

  std::array<double, 2>& operator[](int i) { return m[i]; }
  const std::array<double, 2>& operator[](int i) const { return m[i]; }

  Mat2 operator+(const Mat2& o) const {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) r[i][j] = m[i][j] + o[i][j];
    return r;
  }
  Mat2 operator-(const Mat2& o) const {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) r[i][j] = m[i][j] - o[i][j];
    return r;
  }
  Mat2 operator*(double s) const {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) r[i][j] = m[i][j] * s;
    return r;
  }
};

inline double det(const Mat2& a) { return a[0][0] * a[1][1] - a[0][1] * a[1][0]; }

inline Mat2 matmul(const Mat2& a, const Mat2& b) {
  Mat2 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
  return r;
}

inline double trace(const Mat2& a) { return a[0][0] + a[1][1]; }

// Symmetric 2x2 tensor (metric, Hessian blocks, ...).
struct Sym2 {
  double a11 = 0.0, a12 = 0.0, a22 = 0.0;

  double operator()(int i, int j) const {
    if (i == 0 && j == 0) return a11;
    if (i == 1 && j == 1) return a22;
    return a12;
  }

  Sym2 operator+(const Sym2& o) const { return {a11 + o.a11, a12 + o.a12, a22 + o.a22}; }
  Sym2 operator-(const Sym2& o) const { return {a11 - o.a11, a12 - o.a12, a22 - o.a22}; }
  Sym2 operator*(double s) const { return {a11 * s, a12 * s, a22 * s}; }

  Mat2 full() const {
    Mat2 r;
    r[0][0] = a11;
    r[0][1] = a12;
    r[1][0] = a12;
    r[1][1] = a22;
    return r;
  }
};

inline double det(const Sym2& g) { return g.a11 * g.a22 - g.a12 * g.a12; }

inline Sym2 inverse(const Sym2& g) {
  const double d = det(g);
  return {g.a22 / d, -g.a12 / d, g.a11 / d};
}

// Solves g * x = b for symmetric positive definite g.
inline Vec2 solve(const Sym2& g, const Vec2& b) {
  const double d = det(g);
  return {(g.a22 * b.x - g.a12 * b.y) / d, (g.a11 * b.y - g.a12 * b.x) / d};
}

// --- error taxonomy -------------------------------------------------------

// Base for all library failures; the CLI maps config_error to exit code 2
// and numerical_error (plus anything else) to exit code 3.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct config_error : error {
  using error::error;
};

struct numerical_error : error {
  using error::error;
};

struct degenerate_metric_error : numerical_error {
  using numerical_error::numerical_error;
};

struct unsupported_dimension_error : config_error {
  using config_error::config_error;
};

struct gluing_mismatch_error : numerical_error {
  using numerical_error::numerical_error;
};

struct insufficient_data_error : numerical_error {
  using numerical_error::numerical_error;
};

struct degenerate_span_error : numerical_error {
  using numerical_error::numerical_error;
};

struct io_error : error {
  using error::error;
};

// xorshift128+ generator: deterministic across platforms, unlike
// distribution wrappers in <random>.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    s_[0] = seed ? seed : 0x9e3779b97f4a7c15ull;
    s_[1] = splitmix(s_[0]);
    s_[1] = s_[1] ? s_[1] : 0x2545f4914f6cdd1dull;
    for (int i = 0; i < 8; ++i) next_u64();
  }

  std::uint64_t next_u64() {
    std::uint64_t x = s_[0];
    const std::uint64_t y = s_[1];
    s_[0] = y;
    x ^= x << 23;
    s_[1] = x ^ y ^ (x >> 17) ^ (y >> 26);
    return s_[1] + y;
  }

  // Uniform in [0, 1).
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [a, b).
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  // Symmetric around zero, unit half-width.
  double symmetric() { return 2.0 * uniform() - 1.0; }

 private:
  static std::uint64_t splitmix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t s_[2];
};

}  // namespace kvf

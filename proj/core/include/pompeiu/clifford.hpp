#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <initializer_list>
#include <span>

namespace pompeiu {

// Universal Clifford algebra Cl_n over R with the negative-definite relations
//   e_i e_j + e_j e_i = -2 delta_ij,   e_j^2 = -1.
// Basis blades e_A are indexed by bitmasks over {1..n}; bit j-1 set means e_j
// participates. Blade 0 is the identity e_0.

inline constexpr int kMaxDim = 5;
inline constexpr int kMaxCoeffs = 1 << kMaxDim;  // 32

inline int blade_grade(unsigned blade) { return std::popcount(blade); }

struct BladeProduct {
  double sign;     // +1 or -1
  unsigned blade;  // bitmask of the product blade, always a ^ b
};

// Signed product of basis blades e_A e_B. The sign is the parity of the
// transpositions needed to interleave-sort the two index sequences, times one
// flip per repeated generator (e_j^2 = -1).
BladeProduct blade_product(unsigned a, unsigned b, int dim);

// Point of R^n, n <= kMaxDim.
class VectorN {
public:
  explicit VectorN(int dim);
  VectorN(std::initializer_list<double> components);
  VectorN(int dim, std::span<const double> components);

  int dim() const noexcept { return dim_; }
  double operator[](int j) const noexcept { return x_[static_cast<std::size_t>(j)]; }
  double& operator[](int j) noexcept { return x_[static_cast<std::size_t>(j)]; }
  std::span<const double> components() const noexcept {
    return {x_.data(), static_cast<std::size_t>(dim_)};
  }

  double squared_norm() const noexcept;
  double norm() const noexcept;

  VectorN& operator+=(const VectorN& o) noexcept;
  VectorN& operator-=(const VectorN& o) noexcept;
  VectorN& operator*=(double s) noexcept;

private:
  int dim_;
  std::array<double, kMaxDim> x_{};
};

VectorN operator+(VectorN a, const VectorN& b) noexcept;
VectorN operator-(VectorN a, const VectorN& b) noexcept;
VectorN operator*(double s, VectorN a) noexcept;
double distance(const VectorN& a, const VectorN& b) noexcept;

// Element of Cl_n stored as a dense array of 2^n blade coefficients.
// Immutable by convention once built; all algebra operations are pure.
class Multivector {
public:
  explicit Multivector(int dim);
  Multivector(int dim, std::span<const double> coeffs);  // validates length and finiteness

  static Multivector scalar(int dim, double value);
  static Multivector basis_blade(int dim, unsigned blade, double coeff = 1.0);

  int dim() const noexcept { return dim_; }
  int size() const noexcept { return 1 << dim_; }
  double operator[](unsigned blade) const noexcept { return c_[blade]; }
  double& operator[](unsigned blade) noexcept { return c_[blade]; }
  std::span<const double> coeffs() const noexcept {
    return {c_.data(), static_cast<std::size_t>(size())};
  }

  bool is_finite() const noexcept;

  Multivector& operator+=(const Multivector& o);
  Multivector& operator-=(const Multivector& o);
  Multivector& operator*=(double s) noexcept;

private:
  int dim_;
  std::array<double, kMaxCoeffs> c_{};
};

Multivector operator+(Multivector a, const Multivector& b);
Multivector operator-(Multivector a, const Multivector& b);
Multivector operator*(double s, Multivector a) noexcept;
Multivector operator*(Multivector a, double s) noexcept;
Multivector operator-(Multivector a) noexcept;

// Geometric product, the bilinear extension of blade_product.
Multivector mv_mul(const Multivector& a, const Multivector& b);
inline Multivector operator*(const Multivector& a, const Multivector& b) { return mv_mul(a, b); }

// Clifford conjugation: e_A picks up (-1)^{r(r+1)/2}, r = grade(A). It is an
// anti-automorphism: conj(ab) = conj(b) conj(a).
Multivector conjugate(const Multivector& a);

// Coefficient-wise Euclidean norm (sqrt of the real part of a conj(a)).
double clifford_norm(const Multivector& a);

inline double real_part(const Multivector& a) noexcept { return a[0]; }

// x = (x_1..x_n) viewed as sum x_j e_j.
Multivector embed(const VectorN& x);

// Kelvin inverse of a nonzero vector: x^{-1} = conj(x) / |x|^2, so that
// embed(x) * kelvin_inverse(x) = e_0. Throws std::domain_error at x = 0.
Multivector kelvin_inverse(const VectorN& x);

namespace detail {
// Sign table for the geometric product in dimension dim: entry [a * 2^dim + b]
// is the sign of e_A e_B as a signed char. Built once per dimension.
std::span<const signed char> cayley_signs(int dim);
}  // namespace detail

}  // namespace pompeiu

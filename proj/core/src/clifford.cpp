#include "pompeiu/clifford.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

namespace pompeiu {

namespace {

void check_dim(int dim) {
  if (dim < 1 || dim > kMaxDim) {
    throw std::invalid_argument("Clifford dimension must be in [1, " + std::to_string(kMaxDim) +
                                "], got " + std::to_string(dim));
  }
}

int reorder_sign(unsigned a, unsigned b) {
  // Count the transpositions needed to move each generator of b left past the
  // generators of a that follow it. Classic bitmask trick: shift a right and
  // accumulate popcounts of overlaps.
  int swaps = 0;
  for (unsigned t = a >> 1; t != 0; t >>= 1) {
    swaps += std::popcount(t & b);
  }
  return (swaps & 1) ? -1 : +1;
}

}  // namespace

BladeProduct blade_product(unsigned a, unsigned b, int dim) {
  check_dim(dim);
  const unsigned limit = 1u << dim;
  if (a >= limit || b >= limit) {
    throw std::invalid_argument("blade index out of range for dimension " + std::to_string(dim));
  }
  int sign = reorder_sign(a, b);
  if (std::popcount(a & b) & 1) sign = -sign;  // each shared generator squares to -1
  return {static_cast<double>(sign), a ^ b};
}

namespace detail {

std::span<const signed char> cayley_signs(int dim) {
  check_dim(dim);
  static std::array<std::vector<signed char>, kMaxDim + 1> tables;
  static std::once_flag built[kMaxDim + 1];
  std::call_once(built[dim], [dim] {
    const unsigned m = 1u << dim;
    std::vector<signed char> t(static_cast<std::size_t>(m) * m);
    for (unsigned a = 0; a < m; ++a) {
      for (unsigned b = 0; b < m; ++b) {
        int sign = reorder_sign(a, b);
        if (std::popcount(a & b) & 1) sign = -sign;
        t[static_cast<std::size_t>(a) * m + b] = static_cast<signed char>(sign);
      }
    }
    tables[dim] = std::move(t);
  });
  return {tables[dim].data(), tables[dim].size()};
}

}  // namespace detail

VectorN::VectorN(int dim) : dim_(dim) { check_dim(dim); }

VectorN::VectorN(std::initializer_list<double> components)
    : dim_(static_cast<int>(components.size())) {
  check_dim(dim_);
  int j = 0;
  for (double v : components) x_[static_cast<std::size_t>(j++)] = v;
}

VectorN::VectorN(int dim, std::span<const double> components) : dim_(dim) {
  check_dim(dim);
  if (static_cast<int>(components.size()) != dim) {
    throw std::invalid_argument("component count does not match dimension");
  }
  for (int j = 0; j < dim; ++j) x_[static_cast<std::size_t>(j)] = components[static_cast<std::size_t>(j)];
}

double VectorN::squared_norm() const noexcept {
  double s = 0.0;
  for (int j = 0; j < dim_; ++j) s += x_[static_cast<std::size_t>(j)] * x_[static_cast<std::size_t>(j)];
  return s;
}

double VectorN::norm() const noexcept { return std::sqrt(squared_norm()); }

VectorN& VectorN::operator+=(const VectorN& o) noexcept {
  for (int j = 0; j < dim_; ++j) x_[static_cast<std::size_t>(j)] += o.x_[static_cast<std::size_t>(j)];
  return *this;
}

VectorN& VectorN::operator-=(const VectorN& o) noexcept {
  for (int j = 0; j < dim_; ++j) x_[static_cast<std::size_t>(j)] -= o.x_[static_cast<std::size_t>(j)];
  return *this;
}

VectorN& VectorN::operator*=(double s) noexcept {
  for (int j = 0; j < dim_; ++j) x_[static_cast<std::size_t>(j)] *= s;
  return *this;
}

VectorN operator+(VectorN a, const VectorN& b) noexcept { return a += b; }
VectorN operator-(VectorN a, const VectorN& b) noexcept { return a -= b; }
VectorN operator*(double s, VectorN a) noexcept { return a *= s; }

double distance(const VectorN& a, const VectorN& b) noexcept {
  double s = 0.0;
  for (int j = 0; j < a.dim(); ++j) {
    const double d = a[j] - b[j];
    s += d * d;
  }
  return std::sqrt(s);
}

Multivector::Multivector(int dim) : dim_(dim) { check_dim(dim); }

Multivector::Multivector(int dim, std::span<const double> coeffs) : dim_(dim) {
  check_dim(dim);
  if (static_cast<int>(coeffs.size()) != size()) {
    throw std::invalid_argument("coefficient count must be 2^dim");
  }
  for (int i = 0; i < size(); ++i) c_[static_cast<std::size_t>(i)] = coeffs[static_cast<std::size_t>(i)];
  if (!is_finite()) throw std::invalid_argument("multivector coefficients must be finite");
}

Multivector Multivector::scalar(int dim, double value) {
  Multivector a(dim);
  a.c_[0] = value;
  return a;
}

Multivector Multivector::basis_blade(int dim, unsigned blade, double coeff) {
  Multivector a(dim);
  if (blade >= (1u << dim)) {
    throw std::invalid_argument("blade index out of range for dimension " + std::to_string(dim));
  }
  a.c_[blade] = coeff;
  return a;
}

bool Multivector::is_finite() const noexcept {
  for (int i = 0; i < size(); ++i) {
    if (!std::isfinite(c_[static_cast<std::size_t>(i)])) return false;
  }
  return true;
}

Multivector& Multivector::operator+=(const Multivector& o) {
  if (o.dim_ != dim_) throw std::invalid_argument("multivector dimension mismatch");
  for (int i = 0; i < size(); ++i) c_[static_cast<std::size_t>(i)] += o.c_[static_cast<std::size_t>(i)];
  return *this;
}

Multivector& Multivector::operator-=(const Multivector& o) {
  if (o.dim_ != dim_) throw std::invalid_argument("multivector dimension mismatch");
  for (int i = 0; i < size(); ++i) c_[static_cast<std::size_t>(i)] -= o.c_[static_cast<std::size_t>(i)];
  return *this;
}

Multivector& Multivector::operator*=(double s) noexcept {
  for (int i = 0; i < size(); ++i) c_[static_cast<std::size_t>(i)] *= s;
  return *this;
}

Multivector operator+(Multivector a, const Multivector& b) { return a += b; }
Multivector operator-(Multivector a, const Multivector& b) { return a -= b; }
Multivector operator*(double s, Multivector a) noexcept { return a *= s; }
Multivector operator*(Multivector a, double s) noexcept { return a *= s; }
Multivector operator-(Multivector a) noexcept { return a *= -1.0; }

Multivector mv_mul(const Multivector& a, const Multivector& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("multivector dimension mismatch");
  const int dim = a.dim();
  const unsigned m = 1u << dim;
  const auto signs = detail::cayley_signs(dim);
  Multivector out(dim);
  for (unsigned i = 0; i < m; ++i) {
    const double av = a[i];
    if (av == 0.0) continue;
    const signed char* row = signs.data() + static_cast<std::size_t>(i) * m;
    for (unsigned j = 0; j < m; ++j) {
      out[i ^ j] += row[j] * av * b[j];
    }
  }
  return out;
}

Multivector conjugate(const Multivector& a) {
  Multivector out(a.dim());
  for (unsigned i = 0; i < static_cast<unsigned>(a.size()); ++i) {
    const int r = blade_grade(i);
    const double sign = ((r * (r + 1) / 2) & 1) ? -1.0 : 1.0;
    out[i] = sign * a[i];
  }
  return out;
}

double clifford_norm(const Multivector& a) {
  double s = 0.0;
  for (unsigned i = 0; i < static_cast<unsigned>(a.size()); ++i) s += a[i] * a[i];
  return std::sqrt(s);
}

Multivector embed(const VectorN& x) {
  Multivector a(x.dim());
  for (int j = 0; j < x.dim(); ++j) a[1u << j] = x[j];
  return a;
}

Multivector kelvin_inverse(const VectorN& x) {
  const double n2 = x.squared_norm();
  if (n2 == 0.0) throw std::domain_error("Kelvin inverse of the zero vector");
  Multivector a = conjugate(embed(x));
  a *= 1.0 / n2;
  return a;
}

}  // namespace pompeiu

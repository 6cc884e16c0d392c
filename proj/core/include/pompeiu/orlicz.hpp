#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "pompeiu/grid.hpp"

namespace pompeiu {

// Young function psi: [0,inf) -> [0,inf), psi(0) = 0, nondecreasing, convex,
// psi(t) -> inf. Three parametric families plus the numerically evaluated
// Legendre-Fenchel conjugate of any of them.
class OrliczFunction {
public:
  enum class Kind {
    Power,             // t^p, p > 1
    PowerOverP,        // t^p / p, p > 1 (self-dual scaling; conjugate is s^q/q)
    ExpMinusOne,       // e^t - 1
    NumericConjugate,  // sup_{t>=0} (s t - base(t)), evaluated by golden section
  };

  static OrliczFunction power(double p);
  static OrliczFunction power_over_p(double p);
  static OrliczFunction exp_minus_one();

  Kind kind() const noexcept { return kind_; }
  double exponent() const noexcept { return p_; }
  const OrliczFunction* base() const noexcept { return base_.get(); }

  // psi(t); throws std::domain_error for t < 0.
  double operator()(double t) const;

  std::string describe() const;

private:
  OrliczFunction(Kind kind, double p) : kind_(kind), p_(p) {}
  Kind kind_;
  double p_ = 0.0;
  std::shared_ptr<const OrliczFunction> base_;

  friend OrliczFunction conjugate_psi(const OrliczFunction& psi);
};

inline double eval_psi(const OrliczFunction& psi, double t) { return psi(t); }

// Legendre-Fenchel conjugate psi*(s) = sup_{t>=0} (s t - psi(t)). Closed form
// for PowerOverP; for the other kinds the returned function maximizes
// numerically per evaluation (bracket grown geometrically, then golden
// section).
OrliczFunction conjugate_psi(const OrliczFunction& psi);

// Sampled sanity check of the Young-function axioms: psi(0) = 0, nondecreasing
// and midpoint-convex on a log-spaced grid, unbounded growth.
bool sampled_orlicz_check(const OrliczFunction& psi);

// Solver knobs for the Luxembourg infimum and the boundary-seminorm scaling
// parameter lambda.
struct NormConfig {
  double bisect_tol = 1e-10;  // relative bracket tolerance
  int max_iter = 200;
  double lambda = 1.0;  // scaling inside the Slobodeckji integrands
};

// sum_i w_i psi(|f_i| / beta). Throws std::domain_error for beta <= 0.
double modular_integral(std::span<const double> samples, std::span<const double> weights,
                        const OrliczFunction& psi, double beta);

// Luxembourg norm inf{beta > 0 : modular(beta) <= 1} by geometric bracketing
// plus bisection on the monotone modular; 0 for the zero sample vector.
// Throws ConvergenceError with the last bracket when max_iter is exhausted.
double luxembourg_norm(std::span<const double> samples, std::span<const double> weights,
                       const OrliczFunction& psi, const NormConfig& cfg = {});

// sum over the 2^n blade components of the scalar Luxembourg norm.
double clifford_luxembourg_norm(const MultivectorField& f, const OrliczFunction& psi,
                                const NormConfig& cfg = {});

// sum_A sum_{0 <= |alpha| <= k} || D^alpha f_A ||_Lpsi, k <= 2. Components
// outer, multi-indices inner, in the fixed enumeration order.
double sobolev_norm(const MultivectorField& f, int k, const OrliczFunction& psi,
                    const NormConfig& cfg = {});

// Boundary norm of order k in {1,2}:
//   sum_{|alpha| <= k-1} int psi(|D^alpha g|/lambda)
//   + sum_{|alpha| = k-1} double-int psi(|D^alpha g(x)-D^alpha g(y)|/(lambda|x-y|)) |x-y|^{2-n},
// with tangential derivatives along the boundary and the diagonal x = y
// excluded from the double sum. Throws MeshError on coincident facet centers.
double slobodeckji_norm(const BoundaryField& g, int k, const OrliczFunction& psi,
                        const NormConfig& cfg = {});

// Volume modular of the pointwise Clifford norm: sum_i h^n psi(|f_i|/lambda).
double field_modular(const MultivectorField& f, const OrliczFunction& psi, double lambda);
// Surface counterpart.
double boundary_modular(const BoundaryField& g, const OrliczFunction& psi, double lambda);

// Tangential derivative fields of order in {0,1}: arc-parameter differences
// along the loop for dim 2, local least-squares over facet neighbors for
// dim 3 (one field per tangent direction).
std::vector<BoundaryField> boundary_tangential_derivatives(const BoundaryField& g, int order);

}  // namespace pompeiu

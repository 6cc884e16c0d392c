#include "pompeiu/orlicz.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pompeiu/errors.hpp"

namespace pompeiu {

namespace {

double power_eval(double t, double p) {
  if (p == 2.0) return t * t;
  if (p == 3.0) return t * t * t;
  if (p == 1.5) return t * std::sqrt(t);
  return std::pow(t, p);
}

// sup_{t >= 0} (s t - base(t)), bracket grown until the objective turns over,
// then golden-section maximization. base is superlinear, so the sup is finite.
double numeric_conjugate_eval(const OrliczFunction& base, double s) {
  if (s == 0.0) return 0.0;
  const auto objective = [&](double t) { return s * t - base(t); };
  double t_hi = 1.0;
  double best = objective(t_hi);
  int grow = 0;
  while (objective(2.0 * t_hi) > best) {
    t_hi *= 2.0;
    best = objective(t_hi);
    if (++grow > 500 || t_hi > 1e154) {
      throw ConvergenceError("conjugate bracket did not close", 0.0, t_hi, grow);
    }
  }
  double a = 0.0, b = 2.0 * t_hi;
  constexpr double invphi = 0.6180339887498949;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = objective(x1), f2 = objective(x2);
  for (int it = 0; it < 400 && (b - a) > 1e-13 * std::max(1.0, b); ++it) {
    if (f1 >= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = objective(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = objective(x2);
    }
  }
  return std::max(0.0, objective(0.5 * (a + b)));
}

}  // namespace

OrliczFunction OrliczFunction::power(double p) {
  if (!(p > 1.0)) throw std::invalid_argument("power Orlicz function requires p > 1");
  return OrliczFunction(Kind::Power, p);
}

OrliczFunction OrliczFunction::power_over_p(double p) {
  if (!(p > 1.0)) throw std::invalid_argument("power Orlicz function requires p > 1");
  return OrliczFunction(Kind::PowerOverP, p);
}

OrliczFunction OrliczFunction::exp_minus_one() { return OrliczFunction(Kind::ExpMinusOne, 0.0); }

double OrliczFunction::operator()(double t) const {
  if (t < 0.0) throw std::domain_error("Orlicz function evaluated at negative argument");
  switch (kind_) {
    case Kind::Power:
      return power_eval(t, p_);
    case Kind::PowerOverP:
      return power_eval(t, p_) / p_;
    case Kind::ExpMinusOne:
      return std::expm1(t);
    case Kind::NumericConjugate:
      return numeric_conjugate_eval(*base_, t);
  }
  return 0.0;  // unreachable
}

std::string OrliczFunction::describe() const {
  switch (kind_) {
    case Kind::Power:
      return "power(p=" + std::to_string(p_) + ")";
    case Kind::PowerOverP:
      return "power-over-p(p=" + std::to_string(p_) + ")";
    case Kind::ExpMinusOne:
      return "exp-minus-one";
    case Kind::NumericConjugate:
      return "conjugate(" + base_->describe() + ")";
  }
  return "?";
}

OrliczFunction conjugate_psi(const OrliczFunction& psi) {
  if (psi.kind_ == OrliczFunction::Kind::PowerOverP) {
    const double q = psi.p_ / (psi.p_ - 1.0);
    return OrliczFunction::power_over_p(q);
  }
  OrliczFunction out(OrliczFunction::Kind::NumericConjugate, 0.0);
  out.base_ = std::make_shared<OrliczFunction>(psi);
  return out;
}

bool sampled_orlicz_check(const OrliczFunction& psi) {
  if (psi(0.0) != 0.0) return false;
  // log-spaced grid over [1e-6, 1e6]
  std::vector<double> grid;
  for (int i = 0; i <= 60; ++i) grid.push_back(std::pow(10.0, -6.0 + 0.2 * i));
  double prev = 0.0;
  for (double t : grid) {
    const double v = psi(t);
    if (!(v >= prev - 1e-12 * std::max(1.0, prev))) return false;
    prev = v;
  }
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double a = grid[i], b = grid[i + 1];
    const double lhs = psi(0.5 * (a + b));
    const double rhs = 0.5 * (psi(a) + psi(b));
    if (lhs > rhs + 1e-9 * std::max(1.0, rhs)) return false;
  }
  return psi(1e6) >= 1e5;  // unbounded growth proxy
}

double modular_integral(std::span<const double> samples, std::span<const double> weights,
                        const OrliczFunction& psi, double beta) {
  if (beta <= 0.0) throw std::domain_error("modular requires beta > 0");
  if (samples.size() != weights.size()) {
    throw std::invalid_argument("samples and weights must have the same length");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    s += weights[i] * psi(std::abs(samples[i]) / beta);
  }
  return s;
}

double luxembourg_norm(std::span<const double> samples, std::span<const double> weights,
                       const OrliczFunction& psi, const NormConfig& cfg) {
  if (samples.size() != weights.size()) {
    throw std::invalid_argument("samples and weights must have the same length");
  }
  double max_abs = 0.0;
  for (double v : samples) max_abs = std::max(max_abs, std::abs(v));
  if (max_abs == 0.0) return 0.0;  // zero field by convention

  const auto modal = [&](double beta) { return modular_integral(samples, weights, psi, beta); };

  // bracket [lo, hi] with modular(lo) > 1 >= modular(hi)
  int used = 0;
  double lo = 1.0, hi = 1.0;
  double m_hi = modal(1.0);
  if (m_hi > 1.0) {
    do {
      lo = hi;
      hi *= 2.0;
      m_hi = modal(hi);
      if (++used >= cfg.max_iter) throw ConvergenceError("Luxembourg bracket expansion failed", lo, hi, used);
    } while (m_hi > 1.0);
  } else {
    do {
      hi = lo;
      lo *= 0.5;
      if (++used >= cfg.max_iter) throw ConvergenceError("Luxembourg bracket shrink failed", lo, hi, used);
    } while (!(modal(lo) > 1.0));
    m_hi = modal(hi);
  }

  for (; used < cfg.max_iter; ++used) {
    if (hi - lo <= cfg.bisect_tol * hi && m_hi >= 1.0 - 10.0 * cfg.bisect_tol) return hi;
    const double mid = 0.5 * (lo + hi);
    const double m = modal(mid);
    if (m > 1.0) {
      lo = mid;
    } else {
      hi = mid;
      m_hi = m;
    }
  }
  throw ConvergenceError("Luxembourg bisection exceeded max_iter", lo, hi, cfg.max_iter);
}

namespace {

std::vector<double> uniform_weights(std::size_t count, double w) {
  return std::vector<double>(count, w);
}

std::vector<double> component_samples(const MultivectorField& f, unsigned blade) {
  std::vector<double> s(static_cast<std::size_t>(f.size()));
  for (int i = 0; i < f.size(); ++i) s[static_cast<std::size_t>(i)] = f[i][blade];
  return s;
}

std::vector<double> component_samples(const BoundaryField& g, unsigned blade) {
  std::vector<double> s(static_cast<std::size_t>(g.size()));
  for (int i = 0; i < g.size(); ++i) s[static_cast<std::size_t>(i)] = g[i][blade];
  return s;
}

}  // namespace

double clifford_luxembourg_norm(const MultivectorField& f, const OrliczFunction& psi,
                                const NormConfig& cfg) {
  const auto weights = uniform_weights(static_cast<std::size_t>(f.size()), f.domain().cell_volume());
  double sum = 0.0;
  const unsigned ncoef = 1u << f.domain().dim();
  for (unsigned blade = 0; blade < ncoef; ++blade) {
    sum += luxembourg_norm(component_samples(f, blade), weights, psi, cfg);
  }
  return sum;
}

double sobolev_norm(const MultivectorField& f, int k, const OrliczFunction& psi,
                    const NormConfig& cfg) {
  if (k < 0 || k > 2) throw std::invalid_argument("Sobolev order must be 0, 1 or 2");
  const auto alphas = multi_indices_up_to(f.domain().dim(), k);
  std::vector<MultivectorField> derivs;
  derivs.reserve(alphas.size());
  for (const MultiIndex& alpha : alphas) derivs.push_back(dalpha_apply(f, alpha));
  const auto weights = uniform_weights(static_cast<std::size_t>(f.size()), f.domain().cell_volume());
  double sum = 0.0;
  const unsigned ncoef = 1u << f.domain().dim();
  for (unsigned blade = 0; blade < ncoef; ++blade) {
    for (const MultivectorField& d : derivs) {
      sum += luxembourg_norm(component_samples(d, blade), weights, psi, cfg);
    }
  }
  return sum;
}

std::vector<BoundaryField> boundary_tangential_derivatives(const BoundaryField& g, int order) {
  if (order == 0) return {g};
  if (order != 1) throw std::invalid_argument("boundary derivative order must be 0 or 1");
  const BoundaryMesh& mesh = g.mesh();
  const int dim = mesh.dim;
  const int m = g.size();
  if (m < 3) throw MeshError("tangential derivatives need at least 3 facets");

  if (dim == 2) {
    if (!mesh.closed_loop) throw MeshError("2d boundary mesh must be an ordered loop");
    BoundaryField d(g.mesh_ptr(), dim);
    for (int i = 0; i < m; ++i) {
      const int ip = (i + 1) % m;
      const int im = (i + m - 1) % m;
      const double ds = distance(mesh.facets[static_cast<std::size_t>(ip)].center,
                                 mesh.facets[static_cast<std::size_t>(i)].center) +
                        distance(mesh.facets[static_cast<std::size_t>(i)].center,
                                 mesh.facets[static_cast<std::size_t>(im)].center);
      if (ds == 0.0) throw MeshError("coincident facet centers");
      d[i] = (1.0 / ds) * (g[ip] - g[im]);
    }
    return {d};
  }

  // dim == 3: least-squares surface gradient against two local tangents.
  if (mesh.neighbors.size() != static_cast<std::size_t>(m)) {
    throw MeshError("3d boundary mesh is missing facet adjacency");
  }
  BoundaryField d1(g.mesh_ptr(), dim), d2(g.mesh_ptr(), dim);
  for (int i = 0; i < m; ++i) {
    const Facet& fi = mesh.facets[static_cast<std::size_t>(i)];
    // tangent frame: axis least aligned with the normal, projected and crossed
    int least = 0;
    for (int a = 1; a < 3; ++a) {
      if (std::abs(fi.normal[a]) < std::abs(fi.normal[least])) least = a;
    }
    VectorN t1(3);
    t1[least] = 1.0;
    double dot = 0.0;
    for (int a = 0; a < 3; ++a) dot += t1[a] * fi.normal[a];
    for (int a = 0; a < 3; ++a) t1[a] -= dot * fi.normal[a];
    const double t1n = t1.norm();
    for (int a = 0; a < 3; ++a) t1[a] /= t1n;
    VectorN t2{fi.normal[1] * t1[2] - fi.normal[2] * t1[1],
               fi.normal[2] * t1[0] - fi.normal[0] * t1[2],
               fi.normal[0] * t1[1] - fi.normal[1] * t1[0]};

    double g11 = 0.0, g12 = 0.0, g22 = 0.0;
    Multivector r1(dim), r2(dim);
    for (int j : mesh.neighbors[static_cast<std::size_t>(i)]) {
      const VectorN dx = mesh.facets[static_cast<std::size_t>(j)].center - fi.center;
      if (dx.norm() == 0.0) throw MeshError("coincident facet centers");
      double u = 0.0, v = 0.0;
      for (int a = 0; a < 3; ++a) {
        u += dx[a] * t1[a];
        v += dx[a] * t2[a];
      }
      const Multivector dg = g[j] - g[i];
      g11 += u * u;
      g12 += u * v;
      g22 += v * v;
      r1 += u * dg;
      r2 += v * dg;
    }
    const double det = g11 * g22 - g12 * g12;
    if (std::abs(det) < 1e-14 * std::max(1.0, g11 * g22)) {
      // collinear neighborhood; leave the derivative at zero
      continue;
    }
    d1[i] = (g22 / det) * r1 - (g12 / det) * r2;
    d2[i] = (g11 / det) * r2 - (g12 / det) * r1;
  }
  return {d1, d2};
}

double slobodeckji_norm(const BoundaryField& g, int k, const OrliczFunction& psi,
                        const NormConfig& cfg) {
  if (k != 1 && k != 2) throw std::invalid_argument("Slobodeckji order must be 1 or 2");
  const BoundaryMesh& mesh = g.mesh();
  const int m = g.size();
  if (m < 2) throw MeshError("Slobodeckji norm needs at least 2 facets");
  const double lambda = cfg.lambda;
  const int dim = mesh.dim;

  double total = 0.0;
  std::vector<BoundaryField> top_derivs;
  for (int order = 0; order <= k - 1; ++order) {
    const auto derivs = boundary_tangential_derivatives(g, order);
    for (const BoundaryField& d : derivs) {
      total += boundary_modular(d, psi, lambda);
    }
    if (order == k - 1) top_derivs = derivs;
  }

  const double kernel_exp = 2.0 - dim;
  for (const BoundaryField& d : top_derivs) {
    for (int i = 0; i < m; ++i) {
      const Facet& fi = mesh.facets[static_cast<std::size_t>(i)];
      for (int j = 0; j < m; ++j) {
        if (j == i) continue;  // diagonal excluded
        const Facet& fj = mesh.facets[static_cast<std::size_t>(j)];
        const double r = distance(fi.center, fj.center);
        if (r == 0.0) throw MeshError("coincident facet centers");
        const double diff = clifford_norm(d[i] - d[j]);
        total += psi(diff / (lambda * r)) * std::pow(r, kernel_exp) * fi.weight * fj.weight;
      }
    }
  }
  return total;
}

double field_modular(const MultivectorField& f, const OrliczFunction& psi, double lambda) {
  if (lambda <= 0.0) throw std::domain_error("modular requires lambda > 0");
  double s = 0.0;
  for (int i = 0; i < f.size(); ++i) s += psi(clifford_norm(f[i]) / lambda);
  return s * f.domain().cell_volume();
}

double boundary_modular(const BoundaryField& g, const OrliczFunction& psi, double lambda) {
  if (lambda <= 0.0) throw std::domain_error("modular requires lambda > 0");
  double s = 0.0;
  for (int i = 0; i < g.size(); ++i) {
    s += g.mesh().facets[static_cast<std::size_t>(i)].weight * psi(clifford_norm(g[i]) / lambda);
  }
  return s;
}

}  // namespace pompeiu

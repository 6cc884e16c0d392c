#include "pompeiu/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "pompeiu/errors.hpp"

namespace pompeiu {

namespace {

void check_grid_dim(int dim) {
  if (dim != 2 && dim != 3) {
    throw std::invalid_argument("grid dimension must be 2 or 3, got " + std::to_string(dim));
  }
}

}  // namespace

GridDomain::GridDomain(int dim, std::array<int, 3> shape, double h, VectorN origin,
                       std::vector<std::uint8_t> mask)
    : dim_(dim), shape_(shape), h_(h), origin_(origin), mask_(std::move(mask)) {
  check_grid_dim(dim);
  if (h <= 0.0) throw std::invalid_argument("grid spacing must be positive");
  if (origin.dim() != dim) throw std::invalid_argument("origin dimension mismatch");
  for (int a = dim; a < 3; ++a) shape_[static_cast<std::size_t>(a)] = 1;
  num_cells_ = 1;
  for (int a = 0; a < 3; ++a) {
    if (shape_[static_cast<std::size_t>(a)] < 1) throw std::invalid_argument("grid shape must be positive");
    stride_[static_cast<std::size_t>(a)] = num_cells_;
    num_cells_ *= shape_[static_cast<std::size_t>(a)];
  }
  if (static_cast<std::int64_t>(mask_.size()) != num_cells_) {
    throw std::invalid_argument("mask size does not match cell count");
  }
  cell_volume_ = std::pow(h, dim);
  interior_index_.assign(static_cast<std::size_t>(num_cells_), -1);
  for (std::int64_t c = 0; c < num_cells_; ++c) {
    if (mask_[static_cast<std::size_t>(c)]) {
      interior_index_[static_cast<std::size_t>(c)] = static_cast<int>(interior_cells_.size());
      interior_cells_.push_back(c);
    }
  }
  if (interior_cells_.empty()) throw std::invalid_argument("domain has no interior cells");
}

std::int64_t GridDomain::linear_index(std::array<int, 3> coords) const noexcept {
  std::int64_t idx = 0;
  for (int a = 0; a < 3; ++a) {
    const int c = coords[static_cast<std::size_t>(a)];
    if (c < 0 || c >= shape_[static_cast<std::size_t>(a)]) return -1;
    idx += c * stride_[static_cast<std::size_t>(a)];
  }
  return idx;
}

std::array<int, 3> GridDomain::cell_coords(std::int64_t cell) const noexcept {
  std::array<int, 3> coords{};
  for (int a = 2; a >= 0; --a) {
    coords[static_cast<std::size_t>(a)] = static_cast<int>(cell / stride_[static_cast<std::size_t>(a)]);
    cell %= stride_[static_cast<std::size_t>(a)];
  }
  return coords;
}

VectorN GridDomain::cell_center(std::int64_t cell) const {
  const auto coords = cell_coords(cell);
  VectorN x(dim_);
  for (int a = 0; a < dim_; ++a) {
    x[a] = origin_[a] + (coords[static_cast<std::size_t>(a)] + 0.5) * h_;
  }
  return x;
}

std::int64_t GridDomain::neighbor(std::int64_t cell, int axis, int step) const noexcept {
  auto coords = cell_coords(cell);
  coords[static_cast<std::size_t>(axis)] += step;
  return linear_index(coords);
}

bool GridDomain::same_lattice(const GridDomain& o) const noexcept {
  if (dim_ != o.dim_ || shape_ != o.shape_) return false;
  if (std::abs(h_ - o.h_) > 1e-12 * h_) return false;
  for (int a = 0; a < dim_; ++a) {
    if (std::abs(origin_[a] - o.origin_[a]) > 1e-9 * h_) return false;
  }
  return true;
}

bool GridDomain::same_mask(const GridDomain& o) const noexcept {
  return same_lattice(o) && mask_ == o.mask_;
}

double BoundaryMesh::total_weight() const {
  double s = 0.0;
  for (const Facet& f : facets) s += f.weight;
  return s;
}

double BoundaryMesh::facet_scale() const {
  if (facets.empty()) return 0.0;
  const double mean = total_weight() / static_cast<double>(facets.size());
  return std::pow(mean, 1.0 / (dim - 1));
}

MultivectorField::MultivectorField(std::shared_ptr<const GridDomain> domain,
                                   std::vector<Multivector> values)
    : domain_(std::move(domain)), values_(std::move(values)) {
  if (!domain_) throw std::invalid_argument("field requires a domain");
  if (static_cast<int>(values_.size()) != domain_->num_interior()) {
    throw std::invalid_argument("field value count does not match interior cell count");
  }
  for (const Multivector& v : values_) {
    if (v.dim() != domain_->dim()) throw std::invalid_argument("field value dimension mismatch");
    if (!v.is_finite()) throw std::invalid_argument("field values must be finite");
  }
}

MultivectorField::MultivectorField(std::shared_ptr<const GridDomain> domain)
    : domain_(std::move(domain)) {
  if (!domain_) throw std::invalid_argument("field requires a domain");
  values_.assign(static_cast<std::size_t>(domain_->num_interior()), Multivector(domain_->dim()));
}

namespace {

void check_same_domain(const MultivectorField& a, const MultivectorField& b) {
  if (&a.domain() != &b.domain() && !a.domain().same_mask(b.domain())) {
    throw std::invalid_argument("fields live on different domains");
  }
}

}  // namespace

MultivectorField& MultivectorField::operator+=(const MultivectorField& o) {
  check_same_domain(*this, o);
  for (int i = 0; i < size(); ++i) values_[static_cast<std::size_t>(i)] += o[i];
  return *this;
}

MultivectorField& MultivectorField::operator-=(const MultivectorField& o) {
  check_same_domain(*this, o);
  for (int i = 0; i < size(); ++i) values_[static_cast<std::size_t>(i)] -= o[i];
  return *this;
}

MultivectorField& MultivectorField::operator*=(double s) noexcept {
  for (Multivector& v : values_) v *= s;
  return *this;
}

MultivectorField operator+(MultivectorField a, const MultivectorField& b) { return a += b; }
MultivectorField operator-(MultivectorField a, const MultivectorField& b) { return a -= b; }
MultivectorField operator*(double s, MultivectorField a) noexcept { return a *= s; }

BoundaryField::BoundaryField(std::shared_ptr<const BoundaryMesh> mesh,
                             std::vector<Multivector> values)
    : mesh_(std::move(mesh)), values_(std::move(values)) {
  if (!mesh_) throw std::invalid_argument("boundary field requires a mesh");
  if (values_.size() != mesh_->facets.size()) {
    throw std::invalid_argument("boundary field value count does not match facet count");
  }
}

BoundaryField::BoundaryField(std::shared_ptr<const BoundaryMesh> mesh, int dim)
    : mesh_(std::move(mesh)) {
  if (!mesh_) throw std::invalid_argument("boundary field requires a mesh");
  values_.assign(mesh_->facets.size(), Multivector(dim));
}

BoundaryField& BoundaryField::operator-=(const BoundaryField& o) {
  if (values_.size() != o.values_.size()) throw std::invalid_argument("boundary field size mismatch");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  return *this;
}

// ---------------------------------------------------------------------------
// builders

namespace {

std::shared_ptr<const GridDomain> masked_grid(int dim, const VectorN& lo, double extent, double h,
                                              const std::function<bool(const VectorN&)>& inside) {
  std::array<int, 3> shape{1, 1, 1};
  const int cells = static_cast<int>(std::ceil(extent / h - 1e-12));
  for (int a = 0; a < dim; ++a) shape[static_cast<std::size_t>(a)] = cells;
  std::int64_t total = 1;
  for (int a = 0; a < dim; ++a) total *= cells;
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(total), 0);
  std::array<int, 3> c{0, 0, 0};
  std::int64_t idx = 0;
  const int sz = (dim == 3) ? cells : 1;
  for (c[2] = 0; c[2] < sz; ++c[2]) {
    for (c[1] = 0; c[1] < cells; ++c[1]) {
      for (c[0] = 0; c[0] < cells; ++c[0], ++idx) {
        VectorN x(dim);
        for (int a = 0; a < dim; ++a) x[a] = lo[a] + (c[static_cast<std::size_t>(a)] + 0.5) * h;
        mask[static_cast<std::size_t>(idx)] = inside(x) ? 1 : 0;
      }
    }
  }
  return std::make_shared<GridDomain>(dim, shape, h, lo, std::move(mask));
}

// At least 4 interior cells along every axis and a cell whose full face
// neighborhood is interior, so central stencils exist somewhere.
void check_resolution(const GridDomain& g) {
  std::array<int, 3> lo{INT32_MAX, INT32_MAX, INT32_MAX};
  std::array<int, 3> hi{INT32_MIN, INT32_MIN, INT32_MIN};
  bool has_central = false;
  for (std::int64_t cell : g.interior_cells()) {
    const auto coords = g.cell_coords(cell);
    for (int a = 0; a < g.dim(); ++a) {
      lo[static_cast<std::size_t>(a)] = std::min(lo[static_cast<std::size_t>(a)], coords[static_cast<std::size_t>(a)]);
      hi[static_cast<std::size_t>(a)] = std::max(hi[static_cast<std::size_t>(a)], coords[static_cast<std::size_t>(a)]);
    }
    if (!has_central) {
      bool central = true;
      for (int a = 0; a < g.dim() && central; ++a) {
        for (int s : {-1, 1}) {
          const std::int64_t nb = g.neighbor(cell, a, s);
          if (nb < 0 || !g.is_interior(nb)) {
            central = false;
            break;
          }
        }
      }
      has_central = central;
    }
  }
  for (int a = 0; a < g.dim(); ++a) {
    if (hi[static_cast<std::size_t>(a)] - lo[static_cast<std::size_t>(a)] + 1 < 4) {
      throw std::invalid_argument("resolution too coarse: fewer than 4 interior cells along an axis");
    }
  }
  if (!has_central) {
    throw std::invalid_argument("resolution too coarse: no cell has a full interior neighborhood");
  }
}

std::shared_ptr<const BoundaryMesh> circle_mesh(double radius, double h) {
  const int m = std::max<int>(16, static_cast<int>(std::ceil(2.0 * std::numbers::pi * radius / h)));
  auto mesh = std::make_shared<BoundaryMesh>();
  mesh->dim = 2;
  mesh->closed_loop = true;
  const double dtheta = 2.0 * std::numbers::pi / m;
  mesh->facets.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    const double theta = (i + 0.5) * dtheta;
    const VectorN nu{std::cos(theta), std::sin(theta)};
    mesh->facets.push_back({radius * nu, nu, radius * dtheta});
  }
  return mesh;
}

std::shared_ptr<const BoundaryMesh> sphere_mesh(double radius, double h) {
  const int ntheta = std::max<int>(6, static_cast<int>(std::ceil(std::numbers::pi * radius / h)));
  const int nphi = 2 * ntheta;
  const double dtheta = std::numbers::pi / ntheta;
  const double dphi = 2.0 * std::numbers::pi / nphi;
  auto mesh = std::make_shared<BoundaryMesh>();
  mesh->dim = 3;
  mesh->facets.reserve(static_cast<std::size_t>(ntheta) * nphi);
  mesh->neighbors.resize(static_cast<std::size_t>(ntheta) * nphi);
  for (int i = 0; i < ntheta; ++i) {
    const double theta = (i + 0.5) * dtheta;
    for (int j = 0; j < nphi; ++j) {
      const double phi = (j + 0.5) * dphi;
      const VectorN nu{std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
                       std::cos(theta)};
      mesh->facets.push_back({radius * nu, nu, radius * radius * std::sin(theta) * dtheta * dphi});
      auto& nbrs = mesh->neighbors[static_cast<std::size_t>(i) * nphi + j];
      nbrs.push_back(i * nphi + (j + 1) % nphi);
      nbrs.push_back(i * nphi + (j + nphi - 1) % nphi);
      if (i > 0) nbrs.push_back((i - 1) * nphi + j);
      if (i + 1 < ntheta) nbrs.push_back((i + 1) * nphi + j);
    }
  }
  return mesh;
}

}  // namespace

Domain build_disc(double radius, double h) {
  if (radius <= 0.0 || h <= 0.0) throw std::invalid_argument("disc radius and spacing must be positive");
  const VectorN lo{-radius - 2.0 * h, -radius - 2.0 * h};
  const double r2 = radius * radius;
  auto grid = masked_grid(2, lo, 2.0 * radius + 4.0 * h, h,
                          [r2](const VectorN& x) { return x.squared_norm() < r2; });
  check_resolution(*grid);
  Domain d;
  d.grid = std::move(grid);
  d.boundary = circle_mesh(radius, h);
  d.kind = "disc";
  d.radius = radius;
  d.bump = [r2](const VectorN& x) { return 1.0 - x.squared_norm() / r2; };
  d.bump_gradient = [r2](const VectorN& x) { return (-2.0 / r2) * x; };
  return d;
}

Domain build_ball(double radius, double h) {
  if (radius <= 0.0 || h <= 0.0) throw std::invalid_argument("ball radius and spacing must be positive");
  const VectorN lo{-radius - 2.0 * h, -radius - 2.0 * h, -radius - 2.0 * h};
  const double r2 = radius * radius;
  auto grid = masked_grid(3, lo, 2.0 * radius + 4.0 * h, h,
                          [r2](const VectorN& x) { return x.squared_norm() < r2; });
  check_resolution(*grid);
  Domain d;
  d.grid = std::move(grid);
  d.boundary = sphere_mesh(radius, h);
  d.kind = "ball";
  d.radius = radius;
  d.bump = [r2](const VectorN& x) { return 1.0 - x.squared_norm() / r2; };
  d.bump_gradient = [r2](const VectorN& x) { return (-2.0 / r2) * x; };
  return d;
}

Domain build_box(std::span<const double> lengths, double h) {
  const int dim = static_cast<int>(lengths.size());
  check_grid_dim(dim);
  if (h <= 0.0) throw std::invalid_argument("box spacing must be positive");
  std::array<int, 3> shape{1, 1, 1};
  for (int a = 0; a < dim; ++a) {
    const double len = lengths[static_cast<std::size_t>(a)];
    if (len <= 0.0) throw std::invalid_argument("box side lengths must be positive");
    const int cells = static_cast<int>(std::llround(len / h));
    if (std::abs(cells * h - len) > 1e-9 * std::max(1.0, len)) {
      throw std::invalid_argument("box side lengths must be integer multiples of h");
    }
    if (cells < 4) throw std::invalid_argument("resolution too coarse: fewer than 4 cells along an axis");
    shape[static_cast<std::size_t>(a)] = cells;
  }
  std::int64_t total = 1;
  for (int a = 0; a < dim; ++a) total *= shape[static_cast<std::size_t>(a)];
  VectorN origin(dim);
  auto grid = std::make_shared<GridDomain>(dim, shape, h, origin,
                                           std::vector<std::uint8_t>(static_cast<std::size_t>(total), 1));

  auto mesh = std::make_shared<BoundaryMesh>();
  mesh->dim = dim;
  if (dim == 2) {
    // counter-clockwise perimeter loop
    mesh->closed_loop = true;
    const int sx = shape[0], sy = shape[1];
    const double lx = lengths[0], ly = lengths[1];
    for (int i = 0; i < sx; ++i)
      mesh->facets.push_back({VectorN{(i + 0.5) * h, 0.0}, VectorN{0.0, -1.0}, h});
    for (int j = 0; j < sy; ++j)
      mesh->facets.push_back({VectorN{lx, (j + 0.5) * h}, VectorN{1.0, 0.0}, h});
    for (int i = sx - 1; i >= 0; --i)
      mesh->facets.push_back({VectorN{(i + 0.5) * h, ly}, VectorN{0.0, 1.0}, h});
    for (int j = sy - 1; j >= 0; --j)
      mesh->facets.push_back({VectorN{0.0, (j + 0.5) * h}, VectorN{-1.0, 0.0}, h});
  } else {
    // six faces; neighbors within each face only
    const double w = h * h;
    for (int axis = 0; axis < 3; ++axis) {
      const int u = (axis + 1) % 3, v = (axis + 2) % 3;
      for (int side = 0; side < 2; ++side) {
        const double plane = side ? lengths[static_cast<std::size_t>(axis)] : 0.0;
        const int su = shape[static_cast<std::size_t>(u)], sv = shape[static_cast<std::size_t>(v)];
        const int base = static_cast<int>(mesh->facets.size());
        for (int j = 0; j < sv; ++j) {
          for (int i = 0; i < su; ++i) {
            VectorN c(3), nu(3);
            c[axis] = plane;
            c[u] = (i + 0.5) * h;
            c[v] = (j + 0.5) * h;
            nu[axis] = side ? 1.0 : -1.0;
            mesh->facets.push_back({c, nu, w});
            std::vector<int> nbrs;
            if (i > 0) nbrs.push_back(base + j * su + i - 1);
            if (i + 1 < su) nbrs.push_back(base + j * su + i + 1);
            if (j > 0) nbrs.push_back(base + (j - 1) * su + i);
            if (j + 1 < sv) nbrs.push_back(base + (j + 1) * su + i);
            mesh->neighbors.push_back(std::move(nbrs));
          }
        }
      }
    }
  }

  Domain d;
  d.grid = std::move(grid);
  d.boundary = std::move(mesh);
  d.kind = "box";
  d.lengths.assign(lengths.begin(), lengths.end());
  std::vector<double> len(lengths.begin(), lengths.end());
  d.bump = [len](const VectorN& x) {
    double b = 1.0;
    for (std::size_t a = 0; a < len.size(); ++a) {
      b *= 4.0 * x[static_cast<int>(a)] * (len[a] - x[static_cast<int>(a)]) / (len[a] * len[a]);
    }
    return b;
  };
  d.bump_gradient = [len](const VectorN& x) {
    const int dim = static_cast<int>(len.size());
    VectorN g(dim);
    for (int k = 0; k < dim; ++k) {
      double prod = 1.0;
      for (int a = 0; a < dim; ++a) {
        if (a == k) continue;
        prod *= 4.0 * x[a] * (len[static_cast<std::size_t>(a)] - x[a]) /
                (len[static_cast<std::size_t>(a)] * len[static_cast<std::size_t>(a)]);
      }
      g[k] = prod * 4.0 * (len[static_cast<std::size_t>(k)] - 2.0 * x[k]) /
             (len[static_cast<std::size_t>(k)] * len[static_cast<std::size_t>(k)]);
    }
    return g;
  };
  return d;
}

Domain rebuild(const Domain& domain, double h) {
  if (domain.kind == "disc") return build_disc(domain.radius, h);
  if (domain.kind == "ball") return build_ball(domain.radius, h);
  if (domain.kind == "box") return build_box(domain.lengths, h);
  throw std::invalid_argument("unknown domain kind: " + domain.kind);
}

// ---------------------------------------------------------------------------
// finite differences

std::vector<MultiIndex> multi_indices_up_to(int dim, int k) {
  if (k < 0 || k > 2) throw std::invalid_argument("derivative order must be 0, 1 or 2");
  std::vector<MultiIndex> out;
  out.push_back({});  // |alpha| = 0
  if (k >= 1) {
    for (int a = 0; a < dim; ++a) {
      MultiIndex mi;
      mi.orders[static_cast<std::size_t>(a)] = 1;
      out.push_back(mi);
    }
  }
  if (k >= 2) {
    for (int a = 0; a < dim; ++a) {
      for (int b = a; b < dim; ++b) {
        MultiIndex mi;
        mi.orders[static_cast<std::size_t>(a)] += 1;
        mi.orders[static_cast<std::size_t>(b)] += 1;
        out.push_back(mi);
      }
    }
  }
  return out;
}

namespace {

inline const Multivector* interior_value(const MultivectorField& f, std::int64_t cell) {
  if (cell < 0) return nullptr;
  const int ord = f.domain().interior_ordinal(cell);
  return ord >= 0 ? &f[ord] : nullptr;
}

}  // namespace

MultivectorField fd_partial(const MultivectorField& f, int axis) {
  const GridDomain& g = f.domain();
  if (axis < 0 || axis >= g.dim()) throw std::invalid_argument("axis out of range");
  const double h = g.spacing();
  MultivectorField out(f.domain_ptr());
  for (int ord = 0; ord < f.size(); ++ord) {
    const std::int64_t cell = g.interior_cell(ord);
    const Multivector* p1 = interior_value(f, g.neighbor(cell, axis, +1));
    const Multivector* m1 = interior_value(f, g.neighbor(cell, axis, -1));
    Multivector d(g.dim());
    if (p1 && m1) {
      d = (1.0 / (2.0 * h)) * (*p1 - *m1);
    } else if (p1) {
      const Multivector* p2 = interior_value(f, g.neighbor(cell, axis, +2));
      d = p2 ? (1.0 / (2.0 * h)) * (-3.0 * f[ord] + 4.0 * *p1 - *p2)
             : (1.0 / h) * (*p1 - f[ord]);
    } else if (m1) {
      const Multivector* m2 = interior_value(f, g.neighbor(cell, axis, -2));
      d = m2 ? (1.0 / (2.0 * h)) * (3.0 * f[ord] - 4.0 * *m1 + *m2)
             : (1.0 / h) * (f[ord] - *m1);
    }
    out[ord] = d;
  }
  return out;
}

MultivectorField dirac_apply(const MultivectorField& f) {
  const int dim = f.domain().dim();
  MultivectorField out(f.domain_ptr());
  for (int axis = 0; axis < dim; ++axis) {
    const Multivector ej = Multivector::basis_blade(dim, 1u << axis);
    const MultivectorField dj = fd_partial(f, axis);
    for (int ord = 0; ord < out.size(); ++ord) out[ord] += mv_mul(ej, dj[ord]);
  }
  return out;
}

MultivectorField dirac_bar_apply(const MultivectorField& f) {
  // conj(e_j) = -e_j, so Dbar = -D
  MultivectorField out = dirac_apply(f);
  out *= -1.0;
  return out;
}

MultivectorField laplacian_apply(const MultivectorField& f) {
  const GridDomain& g = f.domain();
  const double h2 = g.spacing() * g.spacing();
  MultivectorField out(f.domain_ptr());
  for (int ord = 0; ord < f.size(); ++ord) {
    const std::int64_t cell = g.interior_cell(ord);
    Multivector acc(g.dim());
    for (int axis = 0; axis < g.dim(); ++axis) {
      const Multivector* p1 = interior_value(f, g.neighbor(cell, axis, +1));
      const Multivector* m1 = interior_value(f, g.neighbor(cell, axis, -1));
      if (p1 && m1) {
        acc += (1.0 / h2) * (*p1 - 2.0 * f[ord] + *m1);
      } else if (p1) {
        const Multivector* p2 = interior_value(f, g.neighbor(cell, axis, +2));
        const Multivector* p3 = interior_value(f, g.neighbor(cell, axis, +3));
        if (p2 && p3) {
          acc += (1.0 / h2) * (2.0 * f[ord] - 5.0 * *p1 + 4.0 * *p2 - *p3);
        } else if (p2) {
          acc += (1.0 / h2) * (f[ord] - 2.0 * *p1 + *p2);
        }
      } else if (m1) {
        const Multivector* m2 = interior_value(f, g.neighbor(cell, axis, -2));
        const Multivector* m3 = interior_value(f, g.neighbor(cell, axis, -3));
        if (m2 && m3) {
          acc += (1.0 / h2) * (2.0 * f[ord] - 5.0 * *m1 + 4.0 * *m2 - *m3);
        } else if (m2) {
          acc += (1.0 / h2) * (f[ord] - 2.0 * *m1 + *m2);
        }
      }
    }
    out[ord] = acc;
  }
  return out;
}

MultivectorField dalpha_apply(const MultivectorField& f, const MultiIndex& alpha) {
  if (alpha.total() > 2) throw std::invalid_argument("derivative order above 2 is unsupported");
  MultivectorField out = f;
  for (int axis = 0; axis < f.domain().dim(); ++axis) {
    for (int rep = 0; rep < alpha.orders[static_cast<std::size_t>(axis)]; ++rep) {
      out = fd_partial(out, axis);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// traces

namespace {

// Linear least-squares fit value at p from interior cells within radius.
// Returns false when no interior cell is inside the radius.
bool lls_value(const MultivectorField& f, const VectorN& p, double radius, Multivector& out) {
  const GridDomain& g = f.domain();
  const int dim = g.dim();
  const double h = g.spacing();
  std::array<int, 3> lo{0, 0, 0}, hi{0, 0, 0};
  for (int a = 0; a < dim; ++a) {
    lo[static_cast<std::size_t>(a)] =
        std::max(0, static_cast<int>(std::floor((p[a] - radius - g.origin()[a]) / h - 0.5)));
    hi[static_cast<std::size_t>(a)] = std::min(
        g.shape()[static_cast<std::size_t>(a)] - 1,
        static_cast<int>(std::ceil((p[a] + radius - g.origin()[a]) / h - 0.5)));
  }
  // normal equations for model value = a + grad . (x - p), coordinates in h units
  const int m = dim + 1;
  std::array<double, 16> N{};
  std::array<std::array<double, kMaxCoeffs>, 4> rhs{};
  const int ncoef = 1 << dim;
  int count = 0;
  int nearest_ord = -1;
  double nearest_d = radius;
  std::array<int, 3> c = lo;
  for (c[2] = lo[2]; c[2] <= hi[2]; ++c[2]) {
    for (c[1] = lo[1]; c[1] <= hi[1]; ++c[1]) {
      for (c[0] = lo[0]; c[0] <= hi[0]; ++c[0]) {
        const std::int64_t cell = g.linear_index(c);
        const int ord = g.interior_ordinal(cell);
        if (ord < 0) continue;
        const VectorN x = g.cell_center(cell);
        const double d = distance(x, p);
        if (d > radius) continue;
        ++count;
        if (d < nearest_d) {
          nearest_d = d;
          nearest_ord = ord;
        }
        std::array<double, 4> row{1.0, 0.0, 0.0, 0.0};
        for (int a = 0; a < dim; ++a) row[static_cast<std::size_t>(a + 1)] = (x[a] - p[a]) / h;
        for (int r = 0; r < m; ++r) {
          for (int s = 0; s < m; ++s) N[static_cast<std::size_t>(r * 4 + s)] += row[static_cast<std::size_t>(r)] * row[static_cast<std::size_t>(s)];
          for (int b = 0; b < ncoef; ++b) {
            rhs[static_cast<std::size_t>(r)][static_cast<std::size_t>(b)] +=
                row[static_cast<std::size_t>(r)] * f[ord][static_cast<unsigned>(b)];
          }
        }
      }
    }
  }
  if (count == 0) return false;
  out = Multivector(dim);
  if (count < m) {
    out = f[nearest_ord];
    return true;
  }
  // Gaussian elimination with partial pivoting on the (m x m) normal matrix.
  std::array<std::array<double, 5 + kMaxCoeffs>, 4> aug{};
  for (int r = 0; r < m; ++r) {
    for (int s = 0; s < m; ++s) aug[static_cast<std::size_t>(r)][static_cast<std::size_t>(s)] = N[static_cast<std::size_t>(r * 4 + s)];
    for (int b = 0; b < ncoef; ++b) aug[static_cast<std::size_t>(r)][static_cast<std::size_t>(m + b)] = rhs[static_cast<std::size_t>(r)][static_cast<std::size_t>(b)];
  }
  for (int col = 0; col < m; ++col) {
    int piv = col;
    for (int r = col + 1; r < m; ++r) {
      if (std::abs(aug[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)]) >
          std::abs(aug[static_cast<std::size_t>(piv)][static_cast<std::size_t>(col)]))
        piv = r;
    }
    if (std::abs(aug[static_cast<std::size_t>(piv)][static_cast<std::size_t>(col)]) < 1e-12 * count) {
      out = f[nearest_ord];  // geometry too degenerate for a linear fit
      return true;
    }
    std::swap(aug[static_cast<std::size_t>(col)], aug[static_cast<std::size_t>(piv)]);
    for (int r = col + 1; r < m; ++r) {
      const double factor = aug[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)] /
                            aug[static_cast<std::size_t>(col)][static_cast<std::size_t>(col)];
      for (int s = col; s < m + ncoef; ++s) {
        aug[static_cast<std::size_t>(r)][static_cast<std::size_t>(s)] -=
            factor * aug[static_cast<std::size_t>(col)][static_cast<std::size_t>(s)];
      }
    }
  }
  // back-substitute; only the constant term (row 0) is needed per coefficient
  std::array<std::array<double, kMaxCoeffs>, 4> sol{};
  for (int r = m - 1; r >= 0; --r) {
    for (int b = 0; b < ncoef; ++b) {
      double v = aug[static_cast<std::size_t>(r)][static_cast<std::size_t>(m + b)];
      for (int s = r + 1; s < m; ++s) {
        v -= aug[static_cast<std::size_t>(r)][static_cast<std::size_t>(s)] * sol[static_cast<std::size_t>(s)][static_cast<std::size_t>(b)];
      }
      sol[static_cast<std::size_t>(r)][static_cast<std::size_t>(b)] =
          v / aug[static_cast<std::size_t>(r)][static_cast<std::size_t>(r)];
    }
  }
  for (int b = 0; b < ncoef; ++b) out[static_cast<unsigned>(b)] = sol[0][static_cast<std::size_t>(b)];
  return true;
}

}  // namespace

BoundaryField trace_restrict(const MultivectorField& f, std::shared_ptr<const BoundaryMesh> mesh,
                             double search_radius_cells) {
  const GridDomain& g = f.domain();
  if (!mesh) throw std::invalid_argument("trace requires a boundary mesh");
  if (mesh->dim != g.dim()) throw std::invalid_argument("mesh dimension does not match grid");
  const double h = g.spacing();
  const double radius = search_radius_cells * h;
  std::vector<Multivector> values;
  values.reserve(mesh->facets.size());
  for (const Facet& facet : mesh->facets) {
    const VectorN& p = facet.center;
    // corner cube of cell centers around p
    std::array<int, 3> base{0, 0, 0};
    std::array<double, 3> frac{0.0, 0.0, 0.0};
    for (int a = 0; a < g.dim(); ++a) {
      const double t = (p[a] - g.origin()[a]) / h - 0.5;
      base[static_cast<std::size_t>(a)] = static_cast<int>(std::floor(t));
      frac[static_cast<std::size_t>(a)] = t - base[static_cast<std::size_t>(a)];
    }
    bool cube_ok = true;
    const int corners = 1 << g.dim();
    std::array<const Multivector*, 8> corner_vals{};
    for (int k = 0; k < corners && cube_ok; ++k) {
      std::array<int, 3> c = base;
      for (int a = 0; a < g.dim(); ++a) c[static_cast<std::size_t>(a)] += (k >> a) & 1;
      const std::int64_t cell = g.linear_index(c);
      const int ord = cell >= 0 ? g.interior_ordinal(cell) : -1;
      if (ord < 0) {
        cube_ok = false;
      } else {
        corner_vals[static_cast<std::size_t>(k)] = &f[ord];
      }
    }
    Multivector v(g.dim());
    if (cube_ok) {
      for (int k = 0; k < corners; ++k) {
        double w = 1.0;
        for (int a = 0; a < g.dim(); ++a) {
          const double t = frac[static_cast<std::size_t>(a)];
          w *= ((k >> a) & 1) ? t : (1.0 - t);
        }
        v += w * *corner_vals[static_cast<std::size_t>(k)];
      }
    } else if (!lls_value(f, p, radius, v)) {
      throw MeshError("facet center has no interior cell within the search radius");
    }
    values.push_back(v);
  }
  return BoundaryField(std::move(mesh), std::move(values));
}

double zero_trace_error(const MultivectorField& f, const std::shared_ptr<const BoundaryMesh>& mesh,
                        double search_radius_cells) {
  const BoundaryField tr = trace_restrict(f, mesh, search_radius_cells);
  double m = 0.0;
  for (int i = 0; i < tr.size(); ++i) m = std::max(m, clifford_norm(tr[i]));
  return m;
}

// ---------------------------------------------------------------------------
// norms, masks, restrictions, samplers

double l2_norm(const MultivectorField& f) {
  double s = 0.0;
  for (int i = 0; i < f.size(); ++i) {
    const double n = clifford_norm(f[i]);
    s += n * n;
  }
  return std::sqrt(s * f.domain().cell_volume());
}

double boundary_l2_norm(const BoundaryField& g) {
  double s = 0.0;
  for (int i = 0; i < g.size(); ++i) {
    const double n = clifford_norm(g[i]);
    s += n * n * g.mesh().facets[static_cast<std::size_t>(i)].weight;
  }
  return std::sqrt(s);
}

double relative_l2_error(const MultivectorField& a, const MultivectorField& b) {
  const double den = l2_norm(b);
  const double num = l2_norm(a - b);
  if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return num / den;
}

std::vector<std::uint8_t> interior_distance_mask(const GridDomain& grid, const BoundaryMesh& mesh,
                                                 double min_distance) {
  std::vector<std::uint8_t> keep(static_cast<std::size_t>(grid.num_cells()), 0);
  for (std::int64_t cell : grid.interior_cells()) {
    const VectorN x = grid.cell_center(cell);
    double d = std::numeric_limits<double>::infinity();
    for (const Facet& facet : mesh.facets) {
      d = std::min(d, distance(x, facet.center));
      if (d < min_distance) break;
    }
    keep[static_cast<std::size_t>(cell)] = (d >= min_distance) ? 1 : 0;
  }
  return keep;
}

std::shared_ptr<const GridDomain> submask_domain(const GridDomain& grid,
                                                 const std::vector<std::uint8_t>& keep) {
  if (static_cast<std::int64_t>(keep.size()) != grid.num_cells()) {
    throw std::invalid_argument("keep mask size does not match grid");
  }
  std::vector<std::uint8_t> mask(keep.size());
  for (std::size_t c = 0; c < keep.size(); ++c) {
    mask[c] = (keep[c] && grid.is_interior(static_cast<std::int64_t>(c))) ? 1 : 0;
  }
  return std::make_shared<GridDomain>(grid.dim(), grid.shape(), grid.spacing(), grid.origin(),
                                      std::move(mask));
}

MultivectorField restrict_to(const MultivectorField& f, std::shared_ptr<const GridDomain> sub) {
  if (!sub || !sub->same_lattice(f.domain())) {
    throw std::invalid_argument("sub-domain must live on the same lattice");
  }
  std::vector<Multivector> values;
  values.reserve(static_cast<std::size_t>(sub->num_interior()));
  for (std::int64_t cell : sub->interior_cells()) {
    const int ord = f.domain().interior_ordinal(cell);
    if (ord < 0) throw std::invalid_argument("sub-domain is not contained in the field domain");
    values.push_back(f[ord]);
  }
  return MultivectorField(std::move(sub), std::move(values));
}

MultivectorField sample_field(std::shared_ptr<const GridDomain> domain,
                              const std::function<Multivector(const VectorN&)>& fn) {
  std::vector<Multivector> values;
  values.reserve(static_cast<std::size_t>(domain->num_interior()));
  for (std::int64_t cell : domain->interior_cells()) values.push_back(fn(domain->cell_center(cell)));
  return MultivectorField(std::move(domain), std::move(values));
}

BoundaryField sample_boundary_field(std::shared_ptr<const BoundaryMesh> mesh, int dim,
                                    const std::function<Multivector(const VectorN&)>& fn) {
  std::vector<Multivector> values;
  values.reserve(mesh->facets.size());
  for (const Facet& facet : mesh->facets) values.push_back(fn(facet.center));
  (void)dim;
  return BoundaryField(std::move(mesh), std::move(values));
}

}  // namespace pompeiu

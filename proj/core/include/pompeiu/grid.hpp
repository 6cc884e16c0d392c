#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "pompeiu/clifford.hpp"

namespace pompeiu {

// Masked uniform Cartesian grid representing a bounded domain in R^n,
// n in {2,3}. Cell (i_0..i_{n-1}) has center origin + (i + 1/2) h per axis;
// mask[cell] marks cells whose center lies inside the domain. Immutable after
// construction.
class GridDomain {
public:
  GridDomain(int dim, std::array<int, 3> shape, double h, VectorN origin,
             std::vector<std::uint8_t> mask);

  int dim() const noexcept { return dim_; }
  double spacing() const noexcept { return h_; }
  double cell_volume() const noexcept { return cell_volume_; }
  const std::array<int, 3>& shape() const noexcept { return shape_; }
  const VectorN& origin() const noexcept { return origin_; }

  std::int64_t num_cells() const noexcept { return num_cells_; }
  int num_interior() const noexcept { return static_cast<int>(interior_cells_.size()); }

  bool is_interior(std::int64_t cell) const noexcept { return mask_[static_cast<std::size_t>(cell)] != 0; }
  // -1 when the coordinates fall off the grid.
  std::int64_t linear_index(std::array<int, 3> coords) const noexcept;
  std::array<int, 3> cell_coords(std::int64_t cell) const noexcept;
  VectorN cell_center(std::int64_t cell) const;
  // Interior ordinal of a cell, or -1.
  int interior_ordinal(std::int64_t cell) const noexcept {
    return interior_index_[static_cast<std::size_t>(cell)];
  }
  std::int64_t interior_cell(int ordinal) const noexcept {
    return interior_cells_[static_cast<std::size_t>(ordinal)];
  }
  std::span<const std::int64_t> interior_cells() const noexcept { return interior_cells_; }
  // Neighbor cell along axis at +-step cells, or -1 off-grid.
  std::int64_t neighbor(std::int64_t cell, int axis, int step) const noexcept;

  // True when the grids coincide as lattices (dim, shape, h, origin).
  bool same_lattice(const GridDomain& o) const noexcept;
  bool same_mask(const GridDomain& o) const noexcept;

private:
  int dim_;
  std::array<int, 3> shape_;
  double h_;
  VectorN origin_;
  std::vector<std::uint8_t> mask_;
  double cell_volume_;
  std::int64_t num_cells_;
  std::array<std::int64_t, 3> stride_{};
  std::vector<int> interior_index_;
  std::vector<std::int64_t> interior_cells_;
};

// One boundary facet: quadrature node, outward unit normal, surface weight.
struct Facet {
  VectorN center;
  VectorN normal;
  double weight;
};

// Discretized boundary. For dim == 2 the facets are stored in order along the
// closed curve; for dim == 3 neighbors lists the adjacent facets used for
// tangential finite differences.
struct BoundaryMesh {
  int dim = 2;
  std::vector<Facet> facets;
  bool closed_loop = false;
  std::vector<std::vector<int>> neighbors;

  double total_weight() const;
  // Typical facet extent, used as the boundary length scale.
  double facet_scale() const;
};

// One multivector sample per interior cell, in interior-ordinal order.
class MultivectorField {
public:
  MultivectorField(std::shared_ptr<const GridDomain> domain, std::vector<Multivector> values);
  explicit MultivectorField(std::shared_ptr<const GridDomain> domain);  // zero field

  const GridDomain& domain() const noexcept { return *domain_; }
  const std::shared_ptr<const GridDomain>& domain_ptr() const noexcept { return domain_; }
  int size() const noexcept { return static_cast<int>(values_.size()); }
  const Multivector& operator[](int ordinal) const noexcept {
    return values_[static_cast<std::size_t>(ordinal)];
  }
  Multivector& operator[](int ordinal) noexcept { return values_[static_cast<std::size_t>(ordinal)]; }

  MultivectorField& operator+=(const MultivectorField& o);
  MultivectorField& operator-=(const MultivectorField& o);
  MultivectorField& operator*=(double s) noexcept;

private:
  std::shared_ptr<const GridDomain> domain_;
  std::vector<Multivector> values_;
};

MultivectorField operator+(MultivectorField a, const MultivectorField& b);
MultivectorField operator-(MultivectorField a, const MultivectorField& b);
MultivectorField operator*(double s, MultivectorField a) noexcept;

// One multivector sample per boundary facet.
class BoundaryField {
public:
  BoundaryField(std::shared_ptr<const BoundaryMesh> mesh, std::vector<Multivector> values);
  explicit BoundaryField(std::shared_ptr<const BoundaryMesh> mesh, int dim);  // zero field

  const BoundaryMesh& mesh() const noexcept { return *mesh_; }
  const std::shared_ptr<const BoundaryMesh>& mesh_ptr() const noexcept { return mesh_; }
  int size() const noexcept { return static_cast<int>(values_.size()); }
  const Multivector& operator[](int facet) const noexcept {
    return values_[static_cast<std::size_t>(facet)];
  }
  Multivector& operator[](int facet) noexcept { return values_[static_cast<std::size_t>(facet)]; }

  BoundaryField& operator-=(const BoundaryField& o);

private:
  std::shared_ptr<const BoundaryMesh> mesh_;
  std::vector<Multivector> values_;
};

// A model domain: grid, boundary mesh, and the analytic profile used to
// manufacture boundary-vanishing fields. bump is smooth, positive inside,
// zero on the boundary, negative outside.
struct Domain {
  std::shared_ptr<const GridDomain> grid;
  std::shared_ptr<const BoundaryMesh> boundary;
  std::function<double(const VectorN&)> bump;
  std::function<VectorN(const VectorN&)> bump_gradient;
  std::string kind;               // "disc", "ball" or "box"
  double radius = 0.0;            // disc/ball
  std::vector<double> lengths;    // box
};

// Model-domain builders. The disc and ball boundaries are parametrized
// analytically (exact normals); the box boundary is face-center facets.
// Throw std::invalid_argument when the resolution is too coarse to leave a
// central-difference stencil anywhere.
Domain build_disc(double radius, double h);
Domain build_ball(double radius, double h);
Domain build_box(std::span<const double> lengths, double h);
// Same shape at a different spacing.
Domain rebuild(const Domain& domain, double h);

// Iterated coordinate derivative order per axis; total order <= 2.
struct MultiIndex {
  std::array<int, 3> orders{0, 0, 0};
  int total() const noexcept { return orders[0] + orders[1] + orders[2]; }
};

// All multi-indices with 0 <= |alpha| <= k in a fixed enumeration order
// (by total order, then lexicographic by axis).
std::vector<MultiIndex> multi_indices_up_to(int dim, int k);

// Partial derivative along one axis: central difference where both neighbors
// are interior, second-order one-sided otherwise, first-order as a last
// resort. Exact on polynomials of degree <= 2.
MultivectorField fd_partial(const MultivectorField& f, int axis);

// Dirac operator D f = sum_j e_j d_j f and its conjugate
// Dbar f = sum_j conj(e_j) d_j f = -D f. DDbar = Laplacian componentwise.
MultivectorField dirac_apply(const MultivectorField& f);
MultivectorField dirac_bar_apply(const MultivectorField& f);

// Componentwise 2n+1 point Laplacian (one-sided second differences near the
// mask edge).
MultivectorField laplacian_apply(const MultivectorField& f);

// Composition of fd_partial per axis order; |alpha| <= 2.
MultivectorField dalpha_apply(const MultivectorField& f, const MultiIndex& alpha);

// Boundary trace: multilinear interpolation onto facet centers when the
// surrounding cell-center cube is interior, otherwise a local linear
// least-squares fit over interior cells within search_radius_cells * h.
// Throws MeshError when a facet has no interior cell within that radius.
BoundaryField trace_restrict(const MultivectorField& f,
                             std::shared_ptr<const BoundaryMesh> mesh,
                             double search_radius_cells = 2.0);

// Max facet-wise Clifford norm of the trace; small for boundary-vanishing
// fields.
double zero_trace_error(const MultivectorField& f,
                        const std::shared_ptr<const BoundaryMesh>& mesh,
                        double search_radius_cells = 2.0);

// Discrete L2 norms with volume/surface quadrature weights.
double l2_norm(const MultivectorField& f);
double boundary_l2_norm(const BoundaryField& g);
// ||a - b|| / ||b||, with 0/0 -> 0.
double relative_l2_error(const MultivectorField& a, const MultivectorField& b);

// Keep-mask of interior cells at distance >= min_distance from every facet
// center.
std::vector<std::uint8_t> interior_distance_mask(const GridDomain& grid, const BoundaryMesh& mesh,
                                                 double min_distance);
// Same lattice, mask restricted to keep (ANDed with the existing mask).
std::shared_ptr<const GridDomain> submask_domain(const GridDomain& grid,
                                                 const std::vector<std::uint8_t>& keep);
// Restriction of a field to a sub-domain of its own lattice.
MultivectorField restrict_to(const MultivectorField& f, std::shared_ptr<const GridDomain> sub);

// Pointwise samplers.
MultivectorField sample_field(std::shared_ptr<const GridDomain> domain,
                              const std::function<Multivector(const VectorN&)>& fn);
BoundaryField sample_boundary_field(std::shared_ptr<const BoundaryMesh> mesh, int dim,
                                    const std::function<Multivector(const VectorN&)>& fn);

}  // namespace pompeiu

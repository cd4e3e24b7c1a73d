#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace riesz {

// Discretized bounded open set in R^d (d = 1 or 2) with a uniform grid of
// cells over a bounding box and a cell-center membership mask. Immutable
// after construction.
struct Domain {
  int dim = 1;
  std::array<double, 2> lo{{0.0, 0.0}};
  std::array<double, 2> hi{{1.0, 1.0}};
  std::array<int, 2> n{{1, 1}};    // cells per axis (axis >= dim has n = 1)
  std::array<double, 2> h{{0.0, 0.0}};
  std::vector<std::uint8_t> mask;  // row-major over the full box, 1 = in
  std::vector<int> cells;          // flat indices of masked cells, ascending
  double cell_volume = 0.0;        // h^d
  double volume = 0.0;             // |masked cells| * cell_volume
  double diameter = 0.0;           // diameter of the union of masked cells

  int total_cells() const { return n[0] * n[1]; }
  int masked_count() const { return static_cast<int>(cells.size()); }
  bool full_box() const { return masked_count() == total_cells(); }

  // Cell-center coordinate along an axis.
  double center(int axis, int idx) const {
    return lo[axis] + (idx + 0.5) * h[axis];
  }
  // Flat (row-major) index <-> per-axis indices; axis 0 is the slow index.
  int flat(int i0, int i1) const { return i0 * n[1] + i1; }
  std::array<int, 2> unflat(int f) const { return {f / n[1], f % n[1]}; }
};

bool same_domain(const Domain& a, const Domain& b);

// Mask descriptor for build_domain: the whole box, a ball, or an explicit
// cell-index list.
struct MaskSpec {
  enum class Shape { FullBox, Ball, Cells };
  Shape shape = Shape::FullBox;
  std::array<double, 2> center{{0.0, 0.0}};
  double radius = 0.0;
  std::vector<int> cell_list;

  static MaskSpec full_box() { return MaskSpec{}; }
  static MaskSpec ball(std::array<double, 2> c, double r) {
    MaskSpec m;
    m.shape = Shape::Ball;
    m.center = c;
    m.radius = r;
    return m;
  }
  static MaskSpec cells(std::vector<int> list) {
    MaskSpec m;
    m.shape = Shape::Cells;
    m.cell_list = std::move(list);
    return m;
  }
};

// Builds a Domain with n cells per axis over the given box. Throws
// std::invalid_argument on dim outside {1,2}, n < 2, a non-finite or empty
// box, or an empty mask.
std::shared_ptr<const Domain> build_domain(int dim,
                                           std::array<double, 2> lo,
                                           std::array<double, 2> hi,
                                           int n,
                                           const MaskSpec& mask_spec);

// Real-valued function on the masked cells, extended by zero outside.
struct GridField {
  std::shared_ptr<const Domain> domain;
  std::vector<double> values;  // one per masked cell, in Domain::cells order

  double& operator[](int k) { return values[k]; }
  double operator[](int k) const { return values[k]; }
  int size() const { return static_cast<int>(values.size()); }
};

GridField zero_field(std::shared_ptr<const Domain> dom);
GridField indicator_field(std::shared_ptr<const Domain> dom);

// Builds a field from a callable f(x, y) evaluated at masked cell centers
// (y is passed as 0 for d=1).
template <class F>
GridField make_field(std::shared_ptr<const Domain> dom, F&& f) {
  GridField u;
  u.domain = dom;
  u.values.resize(dom->cells.size());
  for (std::size_t k = 0; k < dom->cells.size(); ++k) {
    const auto ij = dom->unflat(dom->cells[k]);
    const double x = dom->center(0, ij[0]);
    const double y = dom->dim == 2 ? dom->center(1, ij[1]) : 0.0;
    u.values[k] = f(x, y);
  }
  return u;
}

// Discrete L^2(Omega) pairing: sum of u*v*cell_volume over masked cells,
// accumulated by deterministic pairwise summation. Throws
// std::invalid_argument if the fields live on different domains.
double inner_product(const GridField& u, const GridField& v);
double l2_norm(const GridField& u);

// Field arithmetic, in place (same-domain checked).
void axpy(double a, const GridField& x, GridField& y);  // y += a*x
void scale(double a, GridField& x);                     // x *= a

// Plain-text field files: "# d=<d> n=<n,...> box=<lo,hi;...>" then one value
// per line in row-major masked-cell order. load_field rebuilds a full-box
// domain from the header and requires exactly n^d values.
void save_field(const GridField& u, const std::string& path);
GridField load_field(const std::string& path);

} // namespace riesz

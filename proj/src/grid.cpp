#include "riesz/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "riesz/special.hpp"

namespace riesz {

namespace {

// Diameter of the union of the closed masked cells: the farthest pair of
// cell centers plus one cell diagonal (two points inside cells are at most
// that far apart, and diagonal-opposite corners of the extreme cells attain
// it). Only per-row extremal cells can realize the center maximum, which
// keeps this O(rows^2) instead of O(cells^2).
double masked_diameter(const Domain& d) {
  std::vector<std::array<double, 2>> pts;
  if (d.dim == 1) {
    const auto lo_idx = d.unflat(d.cells.front())[0];
    const auto hi_idx = d.unflat(d.cells.back())[0];
    pts.push_back({d.center(0, lo_idx), 0.0});
    pts.push_back({d.center(0, hi_idx), 0.0});
  } else {
    // For each row i0 present in the mask, keep the min and max i1.
    std::vector<int> lo1(d.n[0], -1), hi1(d.n[0], -1);
    for (int f : d.cells) {
      const auto ij = d.unflat(f);
      if (lo1[ij[0]] < 0) lo1[ij[0]] = ij[1];
      hi1[ij[0]] = ij[1];
    }
    for (int i0 = 0; i0 < d.n[0]; ++i0) {
      if (lo1[i0] < 0) continue;
      pts.push_back({d.center(0, i0), d.center(1, lo1[i0])});
      if (hi1[i0] != lo1[i0])
        pts.push_back({d.center(0, i0), d.center(1, hi1[i0])});
    }
  }
  double best = 0.0;
  for (std::size_t a = 0; a < pts.size(); ++a) {
    for (std::size_t b = a; b < pts.size(); ++b) {
      const double dx = pts[a][0] - pts[b][0];
      const double dy = pts[a][1] - pts[b][1];
      best = std::max(best, dx * dx + dy * dy);
    }
  }
  const double cell_diag =
      d.dim == 1 ? d.h[0] : std::sqrt(d.h[0] * d.h[0] + d.h[1] * d.h[1]);
  return std::sqrt(best) + cell_diag;
}

void check_same_domain(const GridField& u, const GridField& v,
                       const char* who) {
  if (!u.domain || !v.domain) {
    throw std::invalid_argument(std::string(who) + ": field without domain");
  }
  if (u.domain == v.domain) return;
  if (!same_domain(*u.domain, *v.domain)) {
    throw std::invalid_argument(std::string(who) + ": domain mismatch");
  }
}

} // namespace

bool same_domain(const Domain& a, const Domain& b) {
  return a.dim == b.dim && a.lo == b.lo && a.hi == b.hi && a.n == b.n &&
         a.mask == b.mask;
}

std::shared_ptr<const Domain> build_domain(int dim,
                                           std::array<double, 2> lo,
                                           std::array<double, 2> hi,
                                           int n,
                                           const MaskSpec& mask_spec) {
  if (dim != 1 && dim != 2) {
    throw std::invalid_argument("build_domain: dim must be 1 or 2");
  }
  if (n < 2) {
    throw std::invalid_argument("build_domain: n >= 2 required");
  }
  for (int a = 0; a < dim; ++a) {
    if (!std::isfinite(lo[a]) || !std::isfinite(hi[a]) || !(hi[a] > lo[a])) {
      throw std::invalid_argument(
          "build_domain: box must be finite with positive extent");
    }
  }

  auto dom = std::make_shared<Domain>();
  dom->dim = dim;
  dom->lo = lo;
  dom->hi = hi;
  dom->n = {n, dim == 2 ? n : 1};
  if (dim == 1) {
    dom->lo[1] = 0.0;
    dom->hi[1] = 0.0;
  }
  dom->h = {(hi[0] - lo[0]) / n, dim == 2 ? (hi[1] - lo[1]) / n : 0.0};
  dom->cell_volume = dim == 2 ? dom->h[0] * dom->h[1] : dom->h[0];

  const int total = dom->total_cells();
  dom->mask.assign(total, 0);
  switch (mask_spec.shape) {
    case MaskSpec::Shape::FullBox:
      std::fill(dom->mask.begin(), dom->mask.end(), 1);
      break;
    case MaskSpec::Shape::Ball: {
      if (!(mask_spec.radius > 0.0)) {
        throw std::invalid_argument("build_domain: ball radius must be > 0");
      }
      const double r2 = mask_spec.radius * mask_spec.radius;
      for (int f = 0; f < total; ++f) {
        const auto ij = dom->unflat(f);
        const double dx = dom->center(0, ij[0]) - mask_spec.center[0];
        const double dy =
            dim == 2 ? dom->center(1, ij[1]) - mask_spec.center[1] : 0.0;
        if (dx * dx + dy * dy <= r2) dom->mask[f] = 1;
      }
      break;
    }
    case MaskSpec::Shape::Cells:
      for (int f : mask_spec.cell_list) {
        if (f < 0 || f >= total) {
          throw std::invalid_argument("build_domain: cell index out of range");
        }
        dom->mask[f] = 1;
      }
      break;
  }

  for (int f = 0; f < total; ++f) {
    if (dom->mask[f]) dom->cells.push_back(f);
  }
  if (dom->cells.empty()) {
    throw std::invalid_argument("build_domain: empty domain");
  }
  dom->volume = dom->cell_volume * static_cast<double>(dom->cells.size());
  dom->diameter = masked_diameter(*dom);
  return dom;
}

GridField zero_field(std::shared_ptr<const Domain> dom) {
  GridField u;
  u.domain = std::move(dom);
  u.values.assign(u.domain->cells.size(), 0.0);
  return u;
}

GridField indicator_field(std::shared_ptr<const Domain> dom) {
  GridField u;
  u.domain = std::move(dom);
  u.values.assign(u.domain->cells.size(), 1.0);
  return u;
}

double inner_product(const GridField& u, const GridField& v) {
  check_same_domain(u, v, "inner_product");
  std::vector<double> prod(u.values.size());
  for (std::size_t i = 0; i < prod.size(); ++i) {
    prod[i] = u.values[i] * v.values[i];
  }
  return pairwise_sum(prod) * u.domain->cell_volume;
}

double l2_norm(const GridField& u) {
  return std::sqrt(inner_product(u, u));
}

void axpy(double a, const GridField& x, GridField& y) {
  check_same_domain(x, y, "axpy");
  for (std::size_t i = 0; i < y.values.size(); ++i) {
    y.values[i] += a * x.values[i];
  }
}

void scale(double a, GridField& x) {
  for (double& v : x.values) v *= a;
}

void save_field(const GridField& u, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::invalid_argument("save_field: cannot open " + path);
  }
  const Domain& d = *u.domain;
  char head[256];
  if (d.dim == 1) {
    std::snprintf(head, sizeof head, "# d=1 n=%d box=%.17g,%.17g", d.n[0],
                  d.lo[0], d.hi[0]);
  } else {
    std::snprintf(head, sizeof head, "# d=2 n=%d,%d box=%.17g,%.17g;%.17g,%.17g",
                  d.n[0], d.n[1], d.lo[0], d.hi[0], d.lo[1], d.hi[1]);
  }
  out << head << "\n";
  char line[64];
  for (double v : u.values) {
    std::snprintf(line, sizeof line, "%.17g", v);
    out << line << "\n";
  }
  if (!out) {
    throw std::invalid_argument("save_field: write failed for " + path);
  }
}

GridField load_field(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("load_field: cannot open " + path);
  }
  std::string header;
  if (!std::getline(in, header) || header.rfind("# d=", 0) != 0) {
    throw std::invalid_argument("load_field: missing '# d=...' header");
  }
  int dim = 0;
  std::array<int, 2> n{{0, 0}};
  std::array<double, 2> lo{{0.0, 0.0}}, hi{{0.0, 0.0}};
  {
    // Header grammar: "# d=<d> n=<n,...> box=<lo,hi;...>"
    int consumed = 0;
    if (std::sscanf(header.c_str(), "# d=%d %n", &dim, &consumed) != 1 ||
        (dim != 1 && dim != 2)) {
      throw std::invalid_argument("load_field: bad dimension in header");
    }
    const char* rest = header.c_str() + consumed;
    bool ok = false;
    if (dim == 1) {
      ok = std::sscanf(rest, "n=%d box=%lf,%lf", &n[0], &lo[0], &hi[0]) == 3;
      n[1] = 1;
    } else {
      ok = std::sscanf(rest, "n=%d,%d box=%lf,%lf;%lf,%lf", &n[0], &n[1],
                       &lo[0], &hi[0], &lo[1], &hi[1]) == 6;
      if (ok && n[0] != n[1]) {
        throw std::invalid_argument("load_field: per-axis n must match");
      }
    }
    if (!ok) {
      throw std::invalid_argument("load_field: malformed header: " + header);
    }
  }

  auto dom = build_domain(dim, lo, hi, n[0], MaskSpec::full_box());
  GridField u = zero_field(dom);
  std::size_t count = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (count >= u.values.size()) {
      throw std::invalid_argument("load_field: more values than cells");
    }
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(line, &pos);
    } catch (const std::exception&) {
      throw std::invalid_argument("load_field: bad value line: " + line);
    }
    if (pos != line.size() || !std::isfinite(v)) {
      throw std::invalid_argument("load_field: bad value line: " + line);
    }
    u.values[count++] = v;
  }
  if (count != u.values.size()) {
    throw std::invalid_argument("load_field: value count does not fill box");
  }
  return u;
}

} // namespace riesz

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "opstat/codec.hpp"
#include "opstat/errors.hpp"
#include "opstat/parallel.hpp"
#include "opstat/tolerances.hpp"

namespace opstat::codec {
namespace {

// Working polygon for half-plane clipping: vertex k starts the edge to
// vertex k+1; edge_gen[k] identifies what generated that edge (partner site
// index, or -1..-4 for the square sides).
struct LabeledPoly {
  std::vector<Point> v;
  std::vector<int> edge_gen;
};

LabeledPoly unit_square_poly() {
  LabeledPoly p;
  p.v = {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}};
  p.edge_gen = {-1, -2, -3, -4};
  return p;
}

// Keep the side of the perpendicular bisector closer to `site`; the clipped
// boundary edge is attributed to `partner_idx`.
void clip_by_bisector(LabeledPoly& poly, const Point& site, const Point& partner,
                      int partner_idx) {
  const double mx = 0.5 * (site.x + partner.x);
  const double my = 0.5 * (site.y + partner.y);
  const double dx = partner.x - site.x;
  const double dy = partner.y - site.y;

  const std::size_t n = poly.v.size();
  std::vector<double> f(n);
  bool any_out = false, any_in = false;
  for (std::size_t k = 0; k < n; ++k) {
    f[k] = (poly.v[k].x - mx) * dx + (poly.v[k].y - my) * dy;
    (f[k] > 0.0 ? any_out : any_in) = true;
  }
  if (!any_out) return;  // untouched
  if (!any_in) {
    poly.v.clear();
    poly.edge_gen.clear();
    return;
  }

  LabeledPoly out;
  out.v.reserve(n + 2);
  out.edge_gen.reserve(n + 2);
  auto emit = [&](const Point& p, int gen) {
    if (!out.v.empty()) {
      const Point& last = out.v.back();
      if (std::fabs(last.x - p.x) <= 1e-14 && std::fabs(last.y - p.y) <= 1e-14) {
        out.edge_gen.back() = gen;  // collapse the zero-length edge
        return;
      }
    }
    out.v.push_back(p);
    out.edge_gen.push_back(gen);
  };
  auto intersect = [&](std::size_t a, std::size_t b) {
    const double t = f[a] / (f[a] - f[b]);
    return Point{poly.v[a].x + t * (poly.v[b].x - poly.v[a].x),
                 poly.v[a].y + t * (poly.v[b].y - poly.v[a].y)};
  };

  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t next = (k + 1) % n;
    const bool in_k = f[k] <= 0.0;
    const bool in_next = f[next] <= 0.0;
    if (in_k) {
      if (in_next) {
        emit(poly.v[k], poly.edge_gen[k]);
      } else {
        emit(poly.v[k], poly.edge_gen[k]);
        emit(intersect(k, next), partner_idx);
      }
    } else if (in_next) {
      emit(intersect(k, next), poly.edge_gen[k]);
    }
  }
  // collapse a duplicate across the wrap-around: the merged point keeps the
  // first vertex's outgoing edge, so its label moves onto the last slot
  if (out.v.size() >= 2) {
    const Point& first = out.v.front();
    const Point& last = out.v.back();
    if (std::fabs(first.x - last.x) <= 1e-14 && std::fabs(first.y - last.y) <= 1e-14) {
      out.edge_gen.back() = out.edge_gen.front();
      out.v.erase(out.v.begin());
      out.edge_gen.erase(out.edge_gen.begin());
    }
  }
  poly = std::move(out);
}

}  // namespace

void Tessellation::build_buckets() {
  const int n = static_cast<int>(sites.size());
  grid_dim = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(n))));
  buckets.assign(static_cast<std::size_t>(grid_dim) * grid_dim, {});
  for (int k = 0; k < n; ++k) {
    int bx = static_cast<int>(sites[k].x * grid_dim);
    int by = static_cast<int>(sites[k].y * grid_dim);
    bx = std::clamp(bx, 0, grid_dim - 1);
    by = std::clamp(by, 0, grid_dim - 1);
    buckets[static_cast<std::size_t>(by) * grid_dim + bx].push_back(k);
  }
}

int Tessellation::nearest_site(double x, double y) const {
  const int n = static_cast<int>(sites.size());
  if (n == 0) throw ValidationError("nearest site of an empty tessellation");
  if (grid_dim == 0) {
    int best = 0;
    double best_d2 = 1e300;
    for (int k = 0; k < n; ++k) {
      const double dx = sites[k].x - x, dy = sites[k].y - y;
      const double d2 = dx * dx + dy * dy;
      if (d2 < best_d2) {
        best_d2 = d2;
        best = k;
      }
    }
    return best;
  }

  int bx = std::clamp(static_cast<int>(x * grid_dim), 0, grid_dim - 1);
  int by = std::clamp(static_cast<int>(y * grid_dim), 0, grid_dim - 1);
  int best = -1;
  double best_d2 = 1e300;
  const double cell = 1.0 / grid_dim;
  for (int ring = 0; ring < grid_dim; ++ring) {
    // Any site beyond this ring is at least (ring-1) cells away.
    if (best >= 0) {
      const double safe = (ring - 1) * cell;
      if (safe > 0.0 && safe * safe > best_d2) break;
    }
    const int lo_x = bx - ring, hi_x = bx + ring;
    const int lo_y = by - ring, hi_y = by + ring;
    for (int gy = std::max(0, lo_y); gy <= std::min(grid_dim - 1, hi_y); ++gy) {
      for (int gx = std::max(0, lo_x); gx <= std::min(grid_dim - 1, hi_x); ++gx) {
        if (ring > 0 && gx != lo_x && gx != hi_x && gy != lo_y && gy != hi_y)
          continue;  // interior of the ring was already scanned
        for (const int k : buckets[static_cast<std::size_t>(gy) * grid_dim + gx]) {
          const double dx = sites[k].x - x, dy = sites[k].y - y;
          const double d2 = dx * dx + dy * dy;
          if (d2 < best_d2) {
            best_d2 = d2;
            best = k;
          }
        }
      }
    }
  }
  return best;
}

Tessellation tessellate(const HitSet& hits) {
  if (hits.points.empty()) throw ValidationError("empty hit set");
  if (hits.labels.size() != hits.points.size())
    throw ValidationError("hit set labels out of sync with points");
  for (const auto& p : hits.points)
    if (p.x < 0.0 || p.x > 1.0 || p.y < 0.0 || p.y > 1.0)
      throw ValidationError("hit point outside the unit square");

  Tessellation tess;
  // Deduplicate points within 1e-12 (first occurrence wins).
  std::vector<std::size_t> order(hits.points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (hits.points[a].x != hits.points[b].x)
      return hits.points[a].x < hits.points[b].x;
    if (hits.points[a].y != hits.points[b].y)
      return hits.points[a].y < hits.points[b].y;
    return a < b;
  });
  std::vector<char> dropped(hits.points.size(), 0);
  for (std::size_t i = 1; i < order.size(); ++i) {
    const Point& prev = hits.points[order[i - 1]];
    const Point& cur = hits.points[order[i]];
    if (std::fabs(prev.x - cur.x) <= tol::kPointDedup &&
        std::fabs(prev.y - cur.y) <= tol::kPointDedup)
      dropped[order[i]] = 1;
  }
  for (std::size_t i = 0; i < hits.points.size(); ++i) {
    if (dropped[i]) continue;
    tess.sites.push_back(hits.points[i]);
    tess.source_index.push_back(static_cast<int>(i));
  }

  const int n = static_cast<int>(tess.sites.size());
  tess.cells.resize(static_cast<std::size_t>(n));
  tess.build_buckets();

  parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
    const Point& site = tess.sites[i];
    // Partners sorted by distance; clipping stops once no closer partner can
    // still cut the (shrinking) cell.
    std::vector<int> partners;
    partners.reserve(static_cast<std::size_t>(n) - 1);
    for (int j = 0; j < n; ++j)
      if (j != static_cast<int>(i)) partners.push_back(j);
    std::sort(partners.begin(), partners.end(), [&](int a, int b) {
      const double da = (tess.sites[a].x - site.x) * (tess.sites[a].x - site.x) +
                        (tess.sites[a].y - site.y) * (tess.sites[a].y - site.y);
      const double db = (tess.sites[b].x - site.x) * (tess.sites[b].x - site.x) +
                        (tess.sites[b].y - site.y) * (tess.sites[b].y - site.y);
      if (da != db) return da < db;
      return a < b;
    });

    LabeledPoly poly = unit_square_poly();
    auto max_r2 = [&] {
      double r2 = 0.0;
      for (const auto& v : poly.v) {
        const double dx = v.x - site.x, dy = v.y - site.y;
        r2 = std::max(r2, dx * dx + dy * dy);
      }
      return r2;
    };
    double r2 = max_r2();
    for (const int j : partners) {
      const double dx = tess.sites[j].x - site.x;
      const double dy = tess.sites[j].y - site.y;
      const double d2 = dx * dx + dy * dy;
      if (d2 > 4.0 * r2) break;  // bisector cannot reach the cell
      const std::size_t before = poly.v.size();
      clip_by_bisector(poly, site, tess.sites[j], j);
      if (poly.v.size() < 3)
        throw NumericError("Voronoi cell degenerated during clipping");
      if (poly.v.size() != before) r2 = max_r2();
    }

    VoronoiCell& cell = tess.cells[i];
    cell.polygon.vertices = poly.v;
    cell.area = cell.polygon.area();
    for (const int gen : poly.edge_gen)
      if (gen >= 0) cell.neighbors.push_back(gen);
    std::sort(cell.neighbors.begin(), cell.neighbors.end());
    cell.neighbors.erase(
        std::unique(cell.neighbors.begin(), cell.neighbors.end()),
        cell.neighbors.end());
  });

  // Symmetrize adjacency (a sliver edge can survive rounding on one side only).
  for (int i = 0; i < n; ++i)
    for (const int j : tess.cells[i].neighbors) {
      auto& back = tess.cells[j].neighbors;
      if (!std::binary_search(back.begin(), back.end(), i)) {
        back.insert(std::upper_bound(back.begin(), back.end(), i), i);
      }
    }

  // Partition invariants.
  double total = 0.0;
  for (const auto& cell : tess.cells) total += cell.area;
  if (std::fabs(total - 1.0) > tol::kAreaPartition) {
    std::ostringstream msg;
    msg << "cell areas sum to " << total << ", expected 1";
    throw NumericError(msg.str());
  }
  for (int i = 0; i < n; ++i) {
    // The cell is convex; containment up to a small boundary tolerance.
    const auto& verts = tess.cells[i].polygon.vertices;
    const Point& s = tess.sites[i];
    for (std::size_t k = 0; k < verts.size(); ++k) {
      const Point& a = verts[k];
      const Point& b = verts[(k + 1) % verts.size()];
      const double cross =
          (b.x - a.x) * (s.y - a.y) - (b.y - a.y) * (s.x - a.x);
      if (cross < -1e-9)
        throw NumericError("Voronoi cell does not contain its site");
    }
  }
  return tess;
}

}  // namespace opstat::codec

#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace opstat::codec {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct Disk {
  double cx, cy, r;
};

struct Polygon {
  std::vector<Point> vertices;

  double area() const;  // shoelace, absolute value
  bool contains(double x, double y) const;  // even-odd ray cast
};

// Nearest-site labeling accelerator built by decode(); membership in a union
// of Voronoi cells is exactly "label of the nearest site".
class SiteLabeler;

// A subset of the unit square: a parametric disk or polygon, or a union of
// disjoint polygons (the decoder's output). The indicator is total on the
// square, and reference_area matches the descriptor's closed-form area.
class GeometricObject {
 public:
  using UnionPieces = std::vector<Polygon>;

  GeometricObject() : desc_(UnionPieces{}) {}  // the empty set

  static GeometricObject disk(double cx, double cy, double r);
  static GeometricObject polygon(std::vector<Point> vertices);
  static GeometricObject polygon_union(UnionPieces pieces, double exact_area,
                                       std::shared_ptr<const SiteLabeler> fast = nullptr);
  static GeometricObject empty();
  static GeometricObject whole_square();

  bool contains(double x, double y) const;
  double reference_area() const { return area_; }

  bool is_disk() const { return std::holds_alternative<Disk>(desc_); }
  const Disk& as_disk() const { return std::get<Disk>(desc_); }
  bool is_polygon() const { return std::holds_alternative<Polygon>(desc_); }
  const Polygon& as_polygon() const { return std::get<Polygon>(desc_); }
  bool is_union() const { return std::holds_alternative<UnionPieces>(desc_); }
  const UnionPieces& pieces() const { return std::get<UnionPieces>(desc_); }

  // Object descriptors as JSON: {"disk": {...}}, {"polygon": [[x,y],...]},
  // {"union": [...]}; the reader accepts the first two.
  static GeometricObject from_json_text(const std::string& text);
  std::string to_json_text() const;

 private:
  std::variant<Disk, Polygon, UnionPieces> desc_;
  double area_ = 0.0;
  std::shared_ptr<const SiteLabeler> fast_;
};

// Labeled Poisson hits on the unit square.
struct HitSet {
  std::vector<Point> points;
  std::vector<std::uint8_t> labels;
  double intensity = 0.0;
  std::uint64_t seed = 0;
};

// Homogeneous Poisson point process of the given intensity, labeled by the
// object's indicator. Deterministic per seed.
HitSet encode(const GeometricObject& obj, double intensity, std::uint64_t seed);

struct VoronoiCell {
  Polygon polygon;
  double area = 0.0;
  std::vector<int> neighbors;  // cells sharing an edge
};

// Voronoi diagram of the hit points clipped to the unit square. Cells
// partition the square (area sum 1 to 1e-9) and each contains its site.
struct Tessellation {
  std::vector<Point> sites;       // deduplicated points
  std::vector<int> source_index;  // sites[k] == hits.points[source_index[k]]
  std::vector<VoronoiCell> cells;

  int nearest_site(double x, double y) const;

  // bucket grid for nearest-site queries
  int grid_dim = 0;
  std::vector<std::vector<int>> buckets;
  void build_buckets();
};

Tessellation tessellate(const HitSet& hits);

// Membership in a union of Voronoi cells is exactly "label of the nearest
// site"; decode() attaches this as the fast indicator of its output object.
class SiteLabeler {
 public:
  SiteLabeler(std::shared_ptr<const Tessellation> tess,
              std::vector<std::uint8_t> site_labels)
      : tess_(std::move(tess)), labels_(std::move(site_labels)) {}

  bool label(double x, double y) const {
    return labels_[static_cast<std::size_t>(tess_->nearest_site(x, y))] != 0;
  }

 private:
  std::shared_ptr<const Tessellation> tess_;
  std::vector<std::uint8_t> labels_;
};

// Union of the cells whose site label is true, with exact polygon area and a
// nearest-site membership test.
GeometricObject decode(const Tessellation& tess, const HitSet& hits);

// Intersection-over-union on a resolution x resolution grid of cell centers.
// Both objects empty yields 1.
double fidelity(const GeometricObject& a, const GeometricObject& b,
                int resolution);

struct WalkResult {
  std::vector<int> sites;
  bool truncated = false;
};

// Random walk on the cell adjacency graph biased toward the goal site:
// neighbor n is chosen with probability proportional to
// exp(-dist(n, goal)/temperature); temperature 0 is greedy stepping.
// Stops at the goal or after 10 * site_count steps (flagged).
WalkResult geodesic_walk(const Tessellation& tess, int start_site,
                         int goal_site, std::uint64_t seed, double temperature);

// --- multi-round runs and the stopping conditions ---

struct RoundRecord {
  std::int64_t hits_added = 0;  // hit count contributed by this round
  double iou = 0.0;             // reconstruction fidelity after this round
};

struct CodecRunState {
  GeometricObject object;
  std::vector<RoundRecord> rounds;
  std::vector<std::uint8_t> labels_in_order;  // labels in arrival order
  HitSet hits;                                // cumulative
  Tessellation tess;                          // of the cumulative hit set
};

// One encode/tessellate/decode round per intensity entry, on a cumulative
// hit set; round r draws from sub-streams (seed, r).
CodecRunState run_codec_rounds(const GeometricObject& obj,
                               const std::vector<double>& round_intensities,
                               std::uint64_t seed, int resolution);

struct StoppingConfig {
  double stationarity_alpha = 0.01;   // chi-squared level, condition 1
  double iou_epsilon = 0.01;          // convergence window, condition 2
  double boundary_fraction_max = 0.15;  // area fraction cap, condition 3
  double independence_alpha = 0.01;   // runs-test level, condition 4
};

struct ConditionReport {
  std::string name;
  bool pass = false;
  double statistic = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct StoppingReport {
  bool all_pass = false;
  std::array<ConditionReport, 4> conditions;
};

// The four stopping conditions as implemented surrogates:
//  1. per-round hit counts pass a chi-squared uniformity test,
//  2. the IoU improvement between the last two rounds is below epsilon,
//  3. the area fraction of boundary-crossing cells is below the cap,
//  4. the arrival-order label sequence passes a runs test.
// Requires at least two completed rounds.
StoppingReport stopping_check(const CodecRunState& state,
                              const StoppingConfig& cfg = {});

}  // namespace opstat::codec

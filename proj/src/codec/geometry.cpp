#include <cmath>
#include <sstream>

#include <json.hpp>

#include "opstat/codec.hpp"
#include "opstat/errors.hpp"
#include "opstat/kernels.hpp"

namespace opstat::codec {

double Polygon::area() const {
  const std::size_t n = vertices.size();
  if (n < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = vertices[i];
    const Point& b = vertices[(i + 1) % n];
    twice += a.x * b.y - b.x * a.y;
  }
  return 0.5 * std::fabs(twice);
}

bool Polygon::contains(double x, double y) const {
  const std::size_t n = vertices.size();
  if (n < 3) return false;
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point& a = vertices[i];
    const Point& b = vertices[j];
    if ((a.y > y) != (b.y > y)) {
      const double t = (y - a.y) / (b.y - a.y);
      if (x < a.x + t * (b.x - a.x)) inside = !inside;
    }
  }
  return inside;
}

GeometricObject GeometricObject::disk(double cx, double cy, double r) {
  if (!(r > 0.0)) throw ValidationError("disk radius must be > 0");
  if (cx - r < 0.0 || cx + r > 1.0 || cy - r < 0.0 || cy + r > 1.0)
    throw ValidationError("disk must lie inside the unit square");
  GeometricObject obj;
  obj.desc_ = Disk{cx, cy, r};
  obj.area_ = M_PI * r * r;
  return obj;
}

GeometricObject GeometricObject::polygon(std::vector<Point> vertices) {
  if (vertices.size() < 3)
    throw ValidationError("polygon needs at least 3 vertices");
  for (const auto& v : vertices)
    if (v.x < 0.0 || v.x > 1.0 || v.y < 0.0 || v.y > 1.0)
      throw ValidationError("polygon vertex outside the unit square");
  GeometricObject obj;
  Polygon poly{std::move(vertices)};
  obj.area_ = poly.area();
  obj.desc_ = std::move(poly);
  return obj;
}

GeometricObject GeometricObject::polygon_union(
    UnionPieces pieces, double exact_area,
    std::shared_ptr<const SiteLabeler> fast) {
  GeometricObject obj;
  obj.desc_ = std::move(pieces);
  obj.area_ = exact_area;
  obj.fast_ = std::move(fast);
  return obj;
}

GeometricObject GeometricObject::empty() {
  return polygon_union({}, 0.0, nullptr);
}

GeometricObject GeometricObject::whole_square() {
  return polygon({{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}});
}

bool GeometricObject::contains(double x, double y) const {
  if (fast_) return fast_->label(x, y);
  if (const Disk* d = std::get_if<Disk>(&desc_)) {
    const double dx = x - d->cx, dy = y - d->cy;
    return dx * dx + dy * dy <= d->r * d->r;
  }
  if (const Polygon* p = std::get_if<Polygon>(&desc_)) return p->contains(x, y);
  for (const auto& piece : std::get<UnionPieces>(desc_))
    if (piece.contains(x, y)) return true;
  return false;
}

GeometricObject GeometricObject::from_json_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("invalid JSON object descriptor: ") +
                          e.what());
  }
  if (doc.contains("disk")) {
    const auto& d = doc["disk"];
    for (const char* key : {"cx", "cy", "r"})
      if (!d.contains(key) || !d[key].is_number())
        throw ValidationError(std::string("disk descriptor needs numeric field ") + key);
    return disk(d["cx"].get<double>(), d["cy"].get<double>(), d["r"].get<double>());
  }
  if (doc.contains("polygon")) {
    const auto& arr = doc["polygon"];
    if (!arr.is_array() || arr.size() < 3)
      throw ValidationError("polygon descriptor needs >= 3 [x, y] pairs");
    std::vector<Point> verts;
    for (const auto& pair : arr) {
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() ||
          !pair[1].is_number())
        throw ValidationError("polygon vertices must be [x, y] number pairs");
      verts.push_back({pair[0].get<double>(), pair[1].get<double>()});
    }
    return polygon(std::move(verts));
  }
  throw ValidationError("object descriptor needs a disk or polygon field");
}

std::string GeometricObject::to_json_text() const {
  nlohmann::ordered_json doc;
  if (const Disk* d = std::get_if<Disk>(&desc_)) {
    doc["disk"] = {{"cx", d->cx}, {"cy", d->cy}, {"r", d->r}};
  } else if (const Polygon* p = std::get_if<Polygon>(&desc_)) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& v : p->vertices) arr.push_back({v.x, v.y});
    doc["polygon"] = std::move(arr);
  } else {
    nlohmann::json pieces = nlohmann::json::array();
    for (const auto& piece : std::get<UnionPieces>(desc_)) {
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& v : piece.vertices) arr.push_back({v.x, v.y});
      pieces.push_back(std::move(arr));
    }
    doc["union"] = std::move(pieces);
  }
  doc["reference_area"] = area_;
  return doc.dump(2);
}

double fidelity(const GeometricObject& a, const GeometricObject& b,
                int resolution) {
  if (resolution < 100) throw ValidationError("fidelity resolution must be >= 100");
  std::vector<double> xs(static_cast<std::size_t>(resolution));
  for (int j = 0; j < resolution; ++j)
    xs[j] = (j + 0.5) / static_cast<double>(resolution);

  std::vector<std::uint8_t> mask_a(xs.size()), mask_b(xs.size());
  auto fill_row = [&](const GeometricObject& obj, double y,
                      std::vector<std::uint8_t>& mask) {
    if (obj.is_disk()) {
      const Disk& d = obj.as_disk();
      kern::ops().disk_row_mask(xs.data(), resolution, y, d.cx, d.cy,
                                d.r * d.r, mask.data());
      return;
    }
    for (int j = 0; j < resolution; ++j)
      mask[j] = obj.contains(xs[j], y) ? 1 : 0;
  };

  std::int64_t inter = 0, uni = 0;
  for (int i = 0; i < resolution; ++i) {
    const double y = (i + 0.5) / static_cast<double>(resolution);
    fill_row(a, y, mask_a);
    fill_row(b, y, mask_b);
    for (int j = 0; j < resolution; ++j) {
      inter += (mask_a[j] & mask_b[j]);
      uni += (mask_a[j] | mask_b[j]);
    }
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace opstat::codec

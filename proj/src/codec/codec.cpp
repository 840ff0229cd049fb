#include <algorithm>
#include <cmath>
#include <sstream>

#include "opstat/codec.hpp"
#include "opstat/errors.hpp"
#include "opstat/rng.hpp"
#include "opstat/stats.hpp"

namespace opstat::codec {
namespace {

// Poisson count by unit-rate arrivals: N = #{n : E_1 + ... + E_n <= lambda}.
// Exact and free of the underflow the product method hits at large lambda.
std::int64_t poisson_count(double lambda, Philox& gen) {
  std::int64_t n = 0;
  double acc = gen.next_exponential(1.0);
  while (acc <= lambda) {
    ++n;
    acc += gen.next_exponential(1.0);
  }
  return n;
}

HitSet encode_round(const GeometricObject& obj, double intensity,
                    std::uint64_t seed, std::uint64_t round) {
  HitSet hits;
  hits.intensity = intensity;
  hits.seed = seed;
  Philox count_gen(seed, stream_id(Stream::kCodecCount, round));
  Philox pos_gen(seed, stream_id(Stream::kCodecPoints, round));
  const std::int64_t n = poisson_count(intensity, count_gen);
  hits.points.reserve(static_cast<std::size_t>(n));
  hits.labels.reserve(static_cast<std::size_t>(n));
  for (std::int64_t k = 0; k < n; ++k) {
    const double x = pos_gen.next_double();
    const double y = pos_gen.next_double();
    hits.points.push_back({x, y});
    hits.labels.push_back(obj.contains(x, y) ? 1 : 0);
  }
  return hits;
}

}  // namespace

HitSet encode(const GeometricObject& obj, double intensity, std::uint64_t seed) {
  if (!(intensity > 0.0)) throw ValidationError("intensity must be > 0");
  return encode_round(obj, intensity, seed, 0);
}

GeometricObject decode(const Tessellation& tess, const HitSet& hits) {
  if (tess.sites.empty()) throw ValidationError("decode of an empty tessellation");
  if (tess.source_index.size() != tess.sites.size())
    throw ValidationError("tessellation site bookkeeping is inconsistent");
  for (std::size_t k = 0; k < tess.sites.size(); ++k) {
    const int src = tess.source_index[k];
    if (src < 0 || static_cast<std::size_t>(src) >= hits.points.size())
      throw ValidationError("tessellation was not built from this hit set");
    if (hits.points[src].x != tess.sites[k].x ||
        hits.points[src].y != tess.sites[k].y)
      throw ValidationError("tessellation was not built from this hit set");
  }

  GeometricObject::UnionPieces pieces;
  std::vector<std::uint8_t> site_labels(tess.sites.size(), 0);
  double area = 0.0;
  for (std::size_t k = 0; k < tess.sites.size(); ++k) {
    const bool truth = hits.labels[tess.source_index[k]] != 0;
    site_labels[k] = truth ? 1 : 0;
    if (truth) {
      pieces.push_back(tess.cells[k].polygon);
      area += tess.cells[k].area;
    }
  }
  auto tess_copy = std::make_shared<const Tessellation>(tess);
  auto labeler = std::make_shared<const SiteLabeler>(std::move(tess_copy),
                                                     std::move(site_labels));
  return GeometricObject::polygon_union(std::move(pieces), area, std::move(labeler));
}

WalkResult geodesic_walk(const Tessellation& tess, int start_site,
                         int goal_site, std::uint64_t seed, double temperature) {
  const int n = static_cast<int>(tess.sites.size());
  if (start_site < 0 || start_site >= n || goal_site < 0 || goal_site >= n)
    throw ValidationError("walk endpoints must be site indices");
  if (!(temperature >= 0.0)) throw ValidationError("temperature must be >= 0");

  const Point goal = tess.sites[goal_site];
  auto dist_to_goal = [&](int k) {
    const double dx = tess.sites[k].x - goal.x;
    const double dy = tess.sites[k].y - goal.y;
    return std::sqrt(dx * dx + dy * dy);
  };

  WalkResult result;
  result.sites.push_back(start_site);
  if (start_site == goal_site) return result;

  Philox gen(seed, stream_id(Stream::kCodecWalk));
  const std::int64_t max_steps = 10ll * n;
  int current = start_site;
  for (std::int64_t step = 0; step < max_steps; ++step) {
    const auto& nbrs = tess.cells[current].neighbors;
    if (nbrs.empty()) break;  // single-cell tessellation; goal unreachable
    int next;
    if (temperature == 0.0) {
      next = nbrs.front();
      double best = dist_to_goal(next);
      for (const int nb : nbrs) {
        const double d = dist_to_goal(nb);
        if (d < best) {
          best = d;
          next = nb;
        }
      }
    } else {
      // weights exp(-d/T), shifted by the minimum for stability
      std::vector<double> cum(nbrs.size());
      double dmin = 1e300;
      for (const int nb : nbrs) dmin = std::min(dmin, dist_to_goal(nb));
      double acc = 0.0;
      for (std::size_t k = 0; k < nbrs.size(); ++k) {
        acc += std::exp(-(dist_to_goal(nbrs[k]) - dmin) / temperature);
        cum[k] = acc;
      }
      next = nbrs[gen.next_categorical(cum)];
    }
    result.sites.push_back(next);
    current = next;
    if (current == goal_site) return result;
  }
  result.truncated = true;
  return result;
}

CodecRunState run_codec_rounds(const GeometricObject& obj,
                               const std::vector<double>& round_intensities,
                               std::uint64_t seed, int resolution) {
  if (round_intensities.empty())
    throw ValidationError("need at least one round intensity");
  CodecRunState state;
  state.object = obj;
  state.hits.seed = seed;
  for (std::size_t r = 0; r < round_intensities.size(); ++r) {
    const double lambda = round_intensities[r];
    if (!(lambda > 0.0)) throw ValidationError("round intensity must be > 0");
    const HitSet fresh = encode_round(obj, lambda, seed, r);
    state.hits.intensity += lambda;
    for (std::size_t k = 0; k < fresh.points.size(); ++k) {
      state.hits.points.push_back(fresh.points[k]);
      state.hits.labels.push_back(fresh.labels[k]);
      state.labels_in_order.push_back(fresh.labels[k]);
    }
    RoundRecord rec;
    rec.hits_added = static_cast<std::int64_t>(fresh.points.size());
    if (!state.hits.points.empty()) {
      state.tess = tessellate(state.hits);
      const GeometricObject rebuilt = decode(state.tess, state.hits);
      rec.iou = fidelity(obj, rebuilt, resolution);
    }
    state.rounds.push_back(rec);
  }
  return state;
}

StoppingReport stopping_check(const CodecRunState& state,
                              const StoppingConfig& cfg) {
  if (state.rounds.size() < 2)
    throw ValidationError("not enough rounds: stopping check needs >= 2");
  StoppingReport report;

  // 1. stationarity: chi-squared uniformity of per-round hit counts
  {
    std::vector<std::int64_t> counts;
    for (const auto& r : state.rounds) counts.push_back(r.hits_added);
    const Chi2Result chi = chi2_uniformity(counts);
    ConditionReport& c = report.conditions[0];
    c.name = "poisson_stationarity";
    c.statistic = chi.p_value;
    c.threshold = cfg.stationarity_alpha;
    c.pass = chi.p_value >= cfg.stationarity_alpha;
    std::ostringstream d;
    d << "chi2=" << chi.statistic << " dof=" << chi.dof << " p=" << chi.p_value;
    c.detail = d.str();
  }

  // 2. gradient surrogate: IoU improvement below epsilon
  {
    const double last = state.rounds.back().iou;
    const double prev = state.rounds[state.rounds.size() - 2].iou;
    ConditionReport& c = report.conditions[1];
    c.name = "iou_converged";
    c.statistic = std::fabs(last - prev);
    c.threshold = cfg.iou_epsilon;
    c.pass = c.statistic < cfg.iou_epsilon;
    std::ostringstream d;
    d << "iou " << prev << " -> " << last;
    c.detail = d.str();
  }

  // 3. boundary band: area fraction of cells whose site and vertices disagree
  {
    double band = 0.0;
    for (std::size_t k = 0; k < state.tess.sites.size(); ++k) {
      const bool site_in = state.object.contains(state.tess.sites[k].x,
                                                 state.tess.sites[k].y);
      bool mixed = false;
      for (const auto& v : state.tess.cells[k].polygon.vertices) {
        if (state.object.contains(v.x, v.y) != site_in) {
          mixed = true;
          break;
        }
      }
      if (mixed) band += state.tess.cells[k].area;
    }
    ConditionReport& c = report.conditions[2];
    c.name = "boundary_band";
    c.statistic = band;
    c.threshold = cfg.boundary_fraction_max;
    c.pass = band < cfg.boundary_fraction_max;
    std::ostringstream d;
    d << "boundary cell area fraction " << band;
    c.detail = d.str();
  }

  // 4. independence: runs test on the arrival-order labels
  {
    const RunsResult runs = runs_test(state.labels_in_order);
    ConditionReport& c = report.conditions[3];
    c.name = "label_independence";
    c.statistic = runs.p_value;
    c.threshold = cfg.independence_alpha;
    c.pass = runs.p_value >= cfg.independence_alpha;
    std::ostringstream d;
    d << "runs=" << runs.runs << " z=" << runs.z << " p=" << runs.p_value;
    c.detail = d.str();
  }

  report.all_pass = true;
  for (const auto& c : report.conditions) report.all_pass &= c.pass;
  return report;
}

}  // namespace opstat::codec

#include "opstat/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "opstat/channel.hpp"
#include "opstat/codec.hpp"
#include "opstat/errors.hpp"
#include "opstat/holevo.hpp"
#include "opstat/kernels.hpp"
#include "opstat/matrix_io.hpp"
#include "opstat/parallel.hpp"
#include "opstat/poisson_ops.hpp"
#include "opstat/random_ops.hpp"
#include "opstat/rng.hpp"
#include "opstat/sde.hpp"
#include "opstat/tolerances.hpp"

namespace opstat::app {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr const char* kVersion = "0.1.0";

int64_t get_int(const json& p, const char* key, int64_t fallback) {
  if (!p.contains(key)) return fallback;
  if (!p[key].is_number_integer())
    throw ValidationError(std::string("parameter ") + key + " must be an integer");
  return p[key].get<int64_t>();
}

double get_double(const json& p, const char* key, double fallback) {
  if (!p.contains(key)) return fallback;
  if (!p[key].is_number())
    throw ValidationError(std::string("parameter ") + key + " must be a number");
  return p[key].get<double>();
}

std::string get_string(const json& p, const char* key, const std::string& fallback) {
  if (!p.contains(key)) return fallback;
  if (!p[key].is_string())
    throw ValidationError(std::string("parameter ") + key + " must be a string");
  return p[key].get<std::string>();
}

bool get_bool(const json& p, const char* key, bool fallback) {
  if (!p.contains(key)) return fallback;
  if (!p[key].is_boolean())
    throw ValidationError(std::string("parameter ") + key + " must be a boolean");
  return p[key].get<bool>();
}

std::vector<double> get_double_array(const json& p, const char* key,
                                     std::vector<double> fallback) {
  if (!p.contains(key)) return fallback;
  if (!p[key].is_array())
    throw ValidationError(std::string("parameter ") + key + " must be an array");
  std::vector<double> out;
  for (const auto& v : p[key]) {
    if (!v.is_number())
      throw ValidationError(std::string("parameter ") + key +
                            " must contain numbers only");
    out.push_back(v.get<double>());
  }
  return out;
}

std::vector<int> get_int_array(const json& p, const char* key,
                               std::vector<int> fallback) {
  if (!p.contains(key)) return fallback;
  if (!p[key].is_array())
    throw ValidationError(std::string("parameter ") + key + " must be an array");
  std::vector<int> out;
  for (const auto& v : p[key]) {
    if (!v.is_number_integer())
      throw ValidationError(std::string("parameter ") + key +
                            " must contain integers only");
    out.push_back(v.get<int>());
  }
  return out;
}

std::filesystem::path out_path(const ExperimentContext& ctx, const char* name) {
  std::filesystem::create_directories(ctx.out_dir);
  return std::filesystem::path(ctx.out_dir) / name;
}

void write_manifest(const ExperimentContext& ctx, double wall_seconds) {
  ordered_json m;
  m["experiment"] = ctx.experiment;
  ordered_json cfg = ordered_json::object();
  cfg["seed"] = ctx.seed;
  cfg["out"] = ctx.out_dir;
  for (const auto& [k, v] : ctx.params.items()) cfg[k] = v;
  m["config"] = std::move(cfg);
  m["version"] = kVersion;
  m["kernel_lane"] = std::string(kern::active_lane());
  m["threads"] = max_threads();
  m["wall_time_s"] = wall_seconds;
  const auto now = std::chrono::system_clock::now().time_since_epoch();
  m["timestamp_unix_ms"] =
      std::chrono::duration_cast<std::chrono::milliseconds>(now).count();
  write_text_file(out_path(ctx, "manifest.json").string(), m.dump(2) + "\n");
}

struct WallClock {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
  }
};

std::uint64_t derive_seed(std::uint64_t master, Stream purpose, std::uint64_t idx) {
  Philox gen(master, stream_id(purpose, idx));
  return gen.next_u64();
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write file: " + path);
  out << content;
  if (!out) throw ValidationError("failed writing file: " + path);
}

void run_spectral(const ExperimentContext& ctx) {
  WallClock clock;
  const int cells = static_cast<int>(get_int(ctx.params, "partition", 8));
  const std::string matrix_file = get_string(ctx.params, "matrix", "");
  const int dim = static_cast<int>(get_int(ctx.params, "dim", 4));

  HermitianOperator h =
      matrix_file.empty()
          ? random_hermitian(dim, ctx.seed, 10.0)
          : HermitianOperator(matrix_from_json_file(matrix_file));

  const UnitaryOperator u = cayley_transform(h);
  const SpectralDecomposition s = eig_unitary(u);
  const std::vector<BorelArc> partition = equal_partition(cells);
  const std::vector<ProjectionOperator> projectors =
      resolution_of_identity(s, partition);

  ComplexMatrix sum = ComplexMatrix::zero(u.dim());
  double idem_max = 0.0, herm_max = 0.0, pair_max = 0.0, commute_max = 0.0;
  for (const auto& p : projectors) {
    sum += p.matrix();
    idem_max = std::max(idem_max, max_abs_diff(p.matrix() * p.matrix(), p.matrix()));
    herm_max = std::max(herm_max, max_abs_diff(p.matrix(), p.matrix().adjoint()));
    commute_max = std::max(
        commute_max, max_abs_diff(p.matrix() * u.matrix(), u.matrix() * p.matrix()));
  }
  for (std::size_t i = 0; i < projectors.size(); ++i)
    for (std::size_t j = i + 1; j < projectors.size(); ++j)
      pair_max = std::max(pair_max,
                          (projectors[i].matrix() * projectors[j].matrix()).max_abs());
  const double completeness =
      max_abs_diff(sum, ComplexMatrix::identity(u.dim()));
  const double roundtrip =
      max_abs_diff(inverse_cayley(u).matrix(), h.matrix());

  ordered_json report;
  report["dim"] = u.dim();
  report["partition_cells"] = cells;
  report["eigenphases"] = s.phases();
  json ranks = json::array();
  for (const auto& p : projectors) ranks.push_back(p.rank());
  report["projector_ranks"] = std::move(ranks);
  report["completeness_defect"] = completeness;
  report["max_idempotence_defect"] = idem_max;
  report["max_selfadjoint_defect"] = herm_max;
  report["max_pairwise_product"] = pair_max;
  report["max_commutator_with_u"] = commute_max;
  report["cayley_roundtrip_error"] = roundtrip;
  report["tolerances"] = {{"idempotent", tol::kIdempotent},
                          {"selfadjoint", tol::kHermitian},
                          {"completeness", tol::kCompleteness}};
  write_text_file(out_path(ctx, "spectral_report.json").string(),
                  report.dump(2) + "\n");
  write_manifest(ctx, clock.seconds());
}

void run_poisson(const ExperimentContext& ctx) {
  WallClock clock;
  const int dim = static_cast<int>(get_int(ctx.params, "dim", 4));
  const int arcs = static_cast<int>(get_int(ctx.params, "arcs", 8));
  const int trials = static_cast<int>(get_int(ctx.params, "trials", 200));
  PoissonConfig pcfg;
  pcfg.rate = get_double(ctx.params, "rate", 1.0);
  pcfg.horizon = get_double(ctx.params, "horizon", 1.0);
  pcfg.seed = ctx.seed;

  const UnitaryOperator u = cayley_transform(random_hermitian(dim, ctx.seed, 10.0));
  const std::vector<BorelArc> partition = equal_partition(arcs);

  const JumpPath jumps = sample_poisson_path(pcfg);
  std::ostringstream csv;
  csv << "t\n";
  for (const double t : jumps.jump_times) csv << format_double(t) << "\n";
  write_text_file(out_path(ctx, "jumps.csv").string(), csv.str());

  const ProjectionPoissonPath ppath = projection_poisson_path(u, partition, pcfg);
  std::ostringstream pcsv;
  pcsv << "t,cell,rank\n";
  for (std::size_t k = 0; k < ppath.count(); ++k)
    pcsv << format_double(ppath.times[k]) << "," << ppath.cells[k] << ","
         << ppath.projector_at(k).rank() << "\n";
  write_text_file(out_path(ctx, "projection_path.csv").string(), pcsv.str());

  const SigmaAdditivityReport report =
      sigma_additivity_test(u, partition, trials, pcfg);
  write_text_file(out_path(ctx, "additivity_report.json").string(),
                  report.to_json() + "\n");
  write_manifest(ctx, clock.seconds());
}

void run_holevo(const ExperimentContext& ctx) {
  WallClock clock;
  OptimizerConfig opt;
  opt.ensemble_size = static_cast<int>(get_int(ctx.params, "ensemble_size", 0));
  opt.restarts = static_cast<int>(get_int(ctx.params, "restarts", 16));
  opt.max_iters = static_cast<int>(get_int(ctx.params, "max_iters", 300));
  opt.tolerance = get_double(ctx.params, "tolerance", 1e-5);

  const std::string mode = get_string(ctx.params, "channels", "random");
  struct Pair {
    std::string id_a, id_b;
    QuantumChannel a, b;
  };
  std::vector<Pair> work;

  if (mode == "random") {
    const int dim = static_cast<int>(get_int(ctx.params, "dim", 2));
    const int kraus = static_cast<int>(get_int(ctx.params, "kraus", 2));
    const int pairs = static_cast<int>(get_int(ctx.params, "pairs", 20));
    if (pairs < 1) throw ValidationError("pairs must be >= 1");
    for (int i = 0; i < pairs; ++i) {
      const std::uint64_t sa = derive_seed(ctx.seed, Stream::kChannelSample,
                                           2 * static_cast<std::uint64_t>(i));
      const std::uint64_t sb = derive_seed(ctx.seed, Stream::kChannelSample,
                                           2 * static_cast<std::uint64_t>(i) + 1);
      std::ostringstream ia, ib;
      ia << "random(dim=" << dim << ",kraus=" << kraus << ",seed=" << sa << ")";
      ib << "random(dim=" << dim << ",kraus=" << kraus << ",seed=" << sb << ")";
      work.push_back(Pair{ia.str(), ib.str(), random_channel(dim, kraus, sa),
                          random_channel(dim, kraus, sb)});
    }
  } else if (mode == "files") {
    const std::string fa = get_string(ctx.params, "channel_a", "");
    const std::string fb = get_string(ctx.params, "channel_b", "");
    if (fa.empty() || fb.empty())
      throw ValidationError("channels=files needs channel_a and channel_b paths");
    auto load = [](const std::string& path) {
      std::ifstream in(path);
      if (!in) throw ValidationError("cannot open channel file: " + path);
      std::stringstream buf;
      buf << in.rdbuf();
      json doc;
      try {
        doc = json::parse(buf.str());
      } catch (const json::parse_error& e) {
        throw ValidationError(path + ": invalid JSON: " + e.what());
      }
      if (!doc.contains("dim_in") || !doc["dim_in"].is_number_integer())
        throw ValidationError(path + ": field dim_in must be an integer");
      if (!doc.contains("dim_out") || !doc["dim_out"].is_number_integer())
        throw ValidationError(path + ": field dim_out must be an integer");
      if (!doc.contains("kraus") || !doc["kraus"].is_array() || doc["kraus"].empty())
        throw ValidationError(path + ": field kraus must be a non-empty array");
      std::vector<ComplexMatrix> kraus;
      for (const auto& k : doc["kraus"]) kraus.push_back(matrix_from_json_text(k.dump()));
      return QuantumChannel(doc["dim_in"].get<int>(), doc["dim_out"].get<int>(),
                            std::move(kraus));
    };
    work.push_back(Pair{fa, fb, load(fa), load(fb)});
  } else {
    throw ValidationError("parameter channels must be 'random' or 'files'");
  }

  std::vector<AdditivityReport> reports(work.size(),
                                        AdditivityReport{});
  for (std::size_t i = 0; i < work.size(); ++i) {
    OptimizerConfig o = opt;
    o.seed = derive_seed(ctx.seed, Stream::kOptimizerRestart, i);
    reports[i] = additivity_experiment(work[i].a, work[i].b, o);
  }

  std::ostringstream csv;
  csv << "channel_a,channel_b,chi_1,chi_2,chi_joint,defect,verdict\n";
  for (std::size_t i = 0; i < work.size(); ++i) {
    const auto& r = reports[i];
    csv << work[i].id_a << "," << work[i].id_b << "," << format_double(r.chi_1)
        << "," << format_double(r.chi_2) << "," << format_double(r.chi_joint)
        << "," << format_double(r.defect) << "," << verdict_name(r.verdict)
        << "\n";
  }
  write_text_file(out_path(ctx, "additivity.csv").string(), csv.str());

  ordered_json jreports = ordered_json::array();
  for (std::size_t i = 0; i < work.size(); ++i) {
    const auto& r = reports[i];
    ordered_json doc;
    doc["channel_a"] = work[i].id_a;
    doc["channel_b"] = work[i].id_b;
    doc["chi_1"] = r.chi_1;
    doc["chi_2"] = r.chi_2;
    doc["chi_joint"] = r.chi_joint;
    doc["defect"] = r.defect;
    doc["optimizer_tolerance"] = r.optimizer_tolerance;
    doc["verdict"] = std::string(verdict_name(r.verdict));
    doc["floor_violated"] = r.floor_violated;
    jreports.push_back(std::move(doc));
  }
  write_text_file(out_path(ctx, "additivity_reports.json").string(),
                  jreports.dump(2) + "\n");
  write_manifest(ctx, clock.seconds());
}

void run_sde(const ExperimentContext& ctx) {
  WallClock clock;
  SDEConfig cfg;
  cfg.x0 = get_double(ctx.params, "x0", 1.0);
  cfg.drift_coeff = get_double(ctx.params, "drift", 2.0);
  cfg.omega = get_double(ctx.params, "omega", 1.0);
  cfg.t_end = get_double(ctx.params, "t_end", 1.0);
  cfg.seed = ctx.seed;
  const std::vector<int> steps =
      get_int_array(ctx.params, "steps", {32, 64, 128, 256, 512});
  const int paths = static_cast<int>(get_int(ctx.params, "paths", 1000));
  const int ensemble_paths =
      static_cast<int>(get_int(ctx.params, "ensemble_paths", 100000));
  const int sample_paths = static_cast<int>(get_int(ctx.params, "sample_paths", 8));
  const bool antithetic = get_bool(ctx.params, "antithetic", true);
  cfg.n_steps = steps.back();

  const ConvergenceStudy study = convergence_study(cfg, steps, paths, antithetic);
  std::ostringstream table;
  table << "dt,strong_err,weak_err\n";
  for (const auto& row : study.rows)
    table << format_double(row.dt) << "," << format_double(row.strong_error)
          << "," << format_double(row.weak_error) << "\n";
  write_text_file(out_path(ctx, "convergence.csv").string(), table.str());

  const EnsembleStats stats = gbm_ensemble_stats(cfg, ensemble_paths);

  if (sample_paths > 0) {
    std::vector<SamplePath> sp;
    for (int p = 0; p < sample_paths; ++p)
      sp.push_back(euler_maruyama(cfg, sample_increments(cfg, p)));
    std::ostringstream pcsv;
    pcsv << "t";
    for (int p = 0; p < sample_paths; ++p) pcsv << ",x" << p;
    pcsv << "\n";
    for (std::size_t k = 0; k < sp.front().times.size(); ++k) {
      pcsv << format_double(sp.front().times[k]);
      for (int p = 0; p < sample_paths; ++p)
        pcsv << "," << format_double(sp[p].values[k]);
      pcsv << "\n";
    }
    write_text_file(out_path(ctx, "paths.csv").string(), pcsv.str());
  }

  ordered_json report;
  report["strong_order"] = study.strong_order;
  report["weak_order"] = study.weak_order;
  report["paths"] = study.paths;
  ordered_json ens;
  ens["paths"] = stats.paths;
  ens["mean"] = stats.mean;
  ens["mean_se"] = stats.mean_se;
  ens["expected_mean"] = stats.expected_mean;
  ens["z_mean"] = stats.z_mean;
  ens["mean_sq"] = stats.mean_sq;
  ens["mean_sq_se"] = stats.mean_sq_se;
  ens["expected_mean_sq"] = stats.expected_mean_sq;
  ens["z_mean_sq"] = stats.z_mean_sq;
  report["ensemble"] = std::move(ens);
  write_text_file(out_path(ctx, "sde_report.json").string(), report.dump(2) + "\n");
  write_manifest(ctx, clock.seconds());
}

void run_codec(const ExperimentContext& ctx) {
  WallClock clock;
  codec::GeometricObject obj = [&] {
    const std::string file = get_string(ctx.params, "object_file", "");
    if (!file.empty()) {
      std::ifstream in(file);
      if (!in) throw ValidationError("cannot open object file: " + file);
      std::stringstream buf;
      buf << in.rdbuf();
      return codec::GeometricObject::from_json_text(buf.str());
    }
    const std::string inline_json = get_string(ctx.params, "object", "");
    if (!inline_json.empty())
      return codec::GeometricObject::from_json_text(inline_json);
    return codec::GeometricObject::disk(0.5, 0.5, 0.25);
  }();

  const std::vector<double> intensities =
      get_double_array(ctx.params, "intensities", {250, 500, 1000, 2000});
  const int seeds = static_cast<int>(get_int(ctx.params, "seeds", 20));
  const int resolution = static_cast<int>(get_int(ctx.params, "resolution", 1000));
  const int rounds = static_cast<int>(get_int(ctx.params, "rounds", 4));
  const double walk_temperature = get_double(ctx.params, "walk_temperature", 0.5);
  // With resample=true the reconstruction is carried over to a second, fresh
  // tessellation: its points are labeled by the first-stage decode only (the
  // object is never consulted), then decoded again.
  const bool resample = get_bool(ctx.params, "resample", false);
  if (seeds < 1) throw ValidationError("seeds must be >= 1");
  if (rounds < 2) throw ValidationError("rounds must be >= 2");

  // fidelity study over intensities x seeds
  struct Row {
    double intensity;
    int seed_index;
    double iou;
  };
  std::vector<Row> rows(intensities.size() * static_cast<std::size_t>(seeds));
  parallel_for(rows.size(), [&](std::size_t idx) {
    const std::size_t li = idx / seeds;
    const int si = static_cast<int>(idx % seeds);
    const std::uint64_t s = derive_seed(ctx.seed, Stream::kCodecSeed, idx);
    const codec::HitSet hits = codec::encode(obj, intensities[li], s);
    const codec::Tessellation tess = codec::tessellate(hits);
    codec::GeometricObject rebuilt = codec::decode(tess, hits);
    if (resample) {
      codec::HitSet fresh =
          codec::encode(codec::GeometricObject::whole_square(), intensities[li],
                        derive_seed(ctx.seed, Stream::kCodecSeed, idx + (1u << 24)));
      for (std::size_t k = 0; k < fresh.points.size(); ++k)
        fresh.labels[k] =
            rebuilt.contains(fresh.points[k].x, fresh.points[k].y) ? 1 : 0;
      rebuilt = codec::decode(codec::tessellate(fresh), fresh);
    }
    rows[idx] = {intensities[li], si, codec::fidelity(obj, rebuilt, resolution)};
  });
  std::ostringstream csv;
  csv << "intensity,seed,iou\n";
  for (const auto& row : rows)
    csv << format_double(row.intensity) << "," << row.seed_index << ","
        << format_double(row.iou) << "\n";
  write_text_file(out_path(ctx, "study.csv").string(), csv.str());

  // stopping-condition run: the largest intensity split over equal rounds
  const double total = intensities.back();
  const std::vector<double> round_intensities(
      static_cast<std::size_t>(rounds), total / rounds);
  const codec::CodecRunState state = codec::run_codec_rounds(
      obj, round_intensities, derive_seed(ctx.seed, Stream::kCodecSeed, 1u << 20),
      resolution);
  const codec::StoppingReport stopping = codec::stopping_check(state);
  ordered_json sj;
  sj["all_pass"] = stopping.all_pass;
  ordered_json conds = ordered_json::array();
  for (const auto& c : stopping.conditions) {
    ordered_json cj;
    cj["name"] = c.name;
    cj["pass"] = c.pass;
    cj["statistic"] = c.statistic;
    cj["threshold"] = c.threshold;
    cj["detail"] = c.detail;
    conds.push_back(std::move(cj));
  }
  sj["conditions"] = std::move(conds);
  ordered_json rj = ordered_json::array();
  for (const auto& r : state.rounds) {
    ordered_json one;
    one["hits"] = r.hits_added;
    one["iou"] = r.iou;
    rj.push_back(std::move(one));
  }
  sj["rounds"] = std::move(rj);
  write_text_file(out_path(ctx, "stopping_report.json").string(), sj.dump(2) + "\n");

  // artifacts for plotting: hit set, reconstruction, a geodesic walk
  std::ostringstream hits_csv;
  hits_csv << "x,y,label\n";
  for (std::size_t k = 0; k < state.hits.points.size(); ++k)
    hits_csv << format_double(state.hits.points[k].x) << ","
             << format_double(state.hits.points[k].y) << ","
             << static_cast<int>(state.hits.labels[k]) << "\n";
  write_text_file(out_path(ctx, "hits.csv").string(), hits_csv.str());

  const codec::GeometricObject rebuilt = codec::decode(state.tess, state.hits);
  write_text_file(out_path(ctx, "reconstruction.json").string(),
                  rebuilt.to_json_text() + "\n");

  const int start = state.tess.nearest_site(0.05, 0.05);
  const int goal = state.tess.nearest_site(0.95, 0.95);
  const codec::WalkResult walk = codec::geodesic_walk(
      state.tess, start, goal, ctx.seed, walk_temperature);
  std::ostringstream wcsv;
  wcsv << "step,site,x,y\n";
  for (std::size_t k = 0; k < walk.sites.size(); ++k)
    wcsv << k << "," << walk.sites[k] << ","
         << format_double(state.tess.sites[walk.sites[k]].x) << ","
         << format_double(state.tess.sites[walk.sites[k]].y) << "\n";
  write_text_file(out_path(ctx, "walk.csv").string(), wcsv.str());

  write_manifest(ctx, clock.seconds());
}

bool run_selftest(const ExperimentContext& ctx, bool inject_fault) {
  WallClock clock;
  std::cout << "opstat " << kVersion << " (kernel lane: " << kern::active_lane()
            << ")\n";
  struct Group {
    std::string name;
    bool pass;
    std::string detail;
  };
  std::vector<Group> groups;

  auto check = [&](const std::string& name, bool ok, const std::string& detail) {
    groups.push_back({name, ok, detail});
    std::cout << (ok ? "PASS " : "FAIL ") << name
              << (detail.empty() ? "" : "  (" + detail + ")") << "\n";
  };

  // 1. kernel lane equivalence on a complex product
  {
    bool ok = true;
    std::ostringstream detail;
    const HermitianOperator h = random_hermitian(6, ctx.seed ^ 0x5eed, 5.0);
    const ComplexMatrix a = h.matrix();
    const ComplexMatrix b = a.adjoint() * a;
    const auto lanes = kern::available_lanes();
    if (lanes.size() > 1) {
      const std::string prev(kern::active_lane());
      kern::set_lane("scalar");
      const ComplexMatrix ref = a * b;
      kern::set_lane(lanes.back());
      const ComplexMatrix alt = a * b;
      kern::set_lane(prev);
      const double diff = max_abs_diff(ref, alt);
      ok = diff == 0.0;
      detail << "lanes " << lanes.size() << ", max diff " << diff;
    } else {
      detail << "single lane";
    }
    check("kernel_lanes", ok, detail.str());
  }

  // 2. projector axioms on random 4-dim operators
  {
    const double idem_tol = inject_fault ? 1e-30 : tol::kIdempotent;
    bool ok = true;
    double worst = 0.0;
    for (int rep = 0; rep < 5 && ok; ++rep) {
      const UnitaryOperator u =
          cayley_transform(random_hermitian(4, ctx.seed + rep, 10.0));
      const auto projectors = resolution_of_identity(u, equal_partition(5));
      ComplexMatrix sum = ComplexMatrix::zero(4);
      for (const auto& p : projectors) {
        sum += p.matrix();
        const double idem = max_abs_diff(p.matrix() * p.matrix(), p.matrix());
        worst = std::max(worst, idem);
        ok &= idem <= idem_tol;
        ok &= max_abs_diff(p.matrix(), p.matrix().adjoint()) <= tol::kHermitian;
      }
      ok &= max_abs_diff(sum, ComplexMatrix::identity(4)) <= tol::kCompleteness;
    }
    std::ostringstream detail;
    detail << "worst idempotence defect " << worst;
    check("projector_axioms", ok, detail.str());
  }

  // 3. Cayley round trip
  {
    bool ok = true;
    double worst = 0.0;
    for (int rep = 0; rep < 5 && ok; ++rep) {
      const HermitianOperator h = random_hermitian(3 + rep % 3, ctx.seed + 17 + rep, 10.0);
      const double err =
          max_abs_diff(inverse_cayley(cayley_transform(h)).matrix(), h.matrix());
      worst = std::max(worst, err);
      ok &= err <= tol::kCayleyRoundTrip;
    }
    std::ostringstream detail;
    detail << "worst round-trip error " << worst;
    check("cayley_roundtrip", ok, detail.str());
  }

  // 4. semigroup law and series agreement
  {
    bool ok = true;
    double worst = 0.0;
    for (int rep = 0; rep < 3 && ok; ++rep) {
      const UnitaryOperator u =
          cayley_transform(random_hermitian(4, ctx.seed + 31 + rep, 10.0));
      const SpectralDecomposition s = eig_unitary(u);
      const double rate = 0.7, t1 = 0.4, t2 = 0.8;
      const ComplexMatrix lhs =
          poisson_semigroup(s, rate, t1) * poisson_semigroup(s, rate, t2);
      const ComplexMatrix rhs = poisson_semigroup(s, rate, t1 + t2);
      worst = std::max(worst, max_abs_diff(lhs, rhs));
      ok &= max_abs_diff(lhs, rhs) <= tol::kAdditivity;
      const ComplexMatrix series = poisson_semigroup_series(u, rate, t1, 40);
      ok &= max_abs_diff(series, poisson_semigroup(s, rate, t1)) <= 1e-10;
    }
    std::ostringstream detail;
    detail << "worst semigroup defect " << worst;
    check("semigroup_law", ok, detail.str());
  }

  // 5. entropy bounds
  {
    bool ok = true;
    for (int rep = 0; rep < 4 && ok; ++rep) {
      const QuantumChannel ch = random_channel(2, 2, ctx.seed + 41 + rep);
      const DensityMatrix rho = apply_channel(ch, DensityMatrix::maximally_mixed(2));
      const double s = von_neumann_entropy(rho);
      ok &= s >= 0.0 && s <= 1.0 + 1e-12;
      const UnitaryOperator u = random_haar_unitary(2, ctx.seed + 59 + rep);
      const DensityMatrix rotated(
          (u.matrix() * rho.matrix()) * u.matrix().adjoint());
      ok &= std::fabs(von_neumann_entropy(rotated) - s) <= 1e-9;
    }
    check("entropy_bounds", ok, "");
  }

  bool all_pass = true;
  for (const auto& g : groups) all_pass &= g.pass;

  ordered_json doc;
  ordered_json arr = ordered_json::array();
  for (const auto& g : groups) {
    ordered_json gj;
    gj["name"] = g.name;
    gj["pass"] = g.pass;
    gj["detail"] = g.detail;
    arr.push_back(std::move(gj));
  }
  doc["groups"] = std::move(arr);
  doc["all_pass"] = all_pass;
  write_text_file(out_path(ctx, "selftest.json").string(), doc.dump(2) + "\n");
  write_manifest(ctx, clock.seconds());
  return all_pass;
}

}  // namespace opstat::app

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "opstat/errors.hpp"
#include "opstat/experiments.hpp"
#include "opstat/parallel.hpp"
#include "opstat/tomlmini.hpp"

namespace {

using nlohmann::json;

// Flags every subcommand shares. The seed must come from the flag or the
// config file; there is no ambient entropy anywhere in the pipeline.
struct Common {
  std::string config_file;
  std::string out = ".";
  std::uint64_t seed = 0;
  int threads = 0;
  CLI::Option* seed_opt = nullptr;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_file,
                    "Config file (TOML preferred, JSON accepted); flags override");
    cmd->add_option("--out", out, "Output directory (default: current)");
    seed_opt = cmd->add_option("--seed", seed, "Master seed (64-bit)");
    cmd->add_option("--threads", threads, "Worker thread cap (0 = hardware)");
  }

  opstat::app::ExperimentContext context(const std::string& name,
                                         const json& flag_params) const {
    opstat::app::ExperimentContext ctx;
    ctx.experiment = name;
    ctx.out_dir = out;
    json params = json::object();
    bool have_seed = false;
    std::uint64_t config_seed = 0;
    if (!config_file.empty()) {
      json cfg = opstat::app::load_config_file(config_file);
      if (cfg.contains("seed")) {
        if (!cfg["seed"].is_number_integer())
          throw opstat::ValidationError("config seed must be an integer");
        config_seed = cfg["seed"].get<std::uint64_t>();
        have_seed = true;
        cfg.erase("seed");
      }
      if (cfg.contains("experiment")) {
        const std::string want = cfg["experiment"].get<std::string>();
        if (want != name)
          throw opstat::ValidationError("config is for experiment '" + want +
                                        "', not '" + name + "'");
        cfg.erase("experiment");
      }
      for (const auto& [k, v] : cfg.items()) params[k] = v;
    }
    for (const auto& [k, v] : flag_params.items()) params[k] = v;
    if (seed_opt && seed_opt->count() > 0) {
      ctx.seed = seed;
    } else if (have_seed) {
      ctx.seed = config_seed;
    } else {
      throw opstat::ValidationError(
          "seed is required (pass --seed or set it in the config file)");
    }
    ctx.params = std::move(params);
    return ctx;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"opstat: a finite-dimensional operator-statistics laboratory"};
  app.require_subcommand(1);

  // --- spectral ---
  auto* spectral = app.add_subcommand(
      "spectral", "Cayley transform and projection-valued measure report");
  Common c_spectral;
  c_spectral.attach(spectral);
  std::string sp_matrix;
  int sp_partition = 0, sp_dim = 0;
  auto* sp_matrix_opt =
      spectral->add_option("--matrix", sp_matrix, "Operator JSON file");
  auto* sp_part_opt = spectral->add_option("--partition", sp_partition,
                                           "Number of equal arcs (default 8)");
  auto* sp_dim_opt = spectral->add_option(
      "--dim", sp_dim, "Random operator dimension when no --matrix (default 4)");

  // --- poisson ---
  auto* poisson = app.add_subcommand(
      "poisson", "Poisson paths and the sigma-additivity certification");
  Common c_poisson;
  c_poisson.attach(poisson);
  int po_dim = 0, po_arcs = 0, po_trials = 0;
  double po_rate = 0, po_horizon = 0;
  auto* po_dim_opt = poisson->add_option("--dim", po_dim, "Operator dimension");
  auto* po_arcs_opt = poisson->add_option("--arcs", po_arcs, "Partition cells");
  auto* po_trials_opt = poisson->add_option("--trials", po_trials, "Monte Carlo trials");
  auto* po_rate_opt = poisson->add_option("--rate", po_rate, "Process rate");
  auto* po_horizon_opt = poisson->add_option("--horizon", po_horizon, "Time horizon");

  // --- holevo ---
  auto* holevo = app.add_subcommand(
      "holevo", "Holevo capacity additivity experiments");
  Common c_holevo;
  c_holevo.attach(holevo);
  std::string ho_channels, ho_file_a, ho_file_b;
  int ho_dim = 0, ho_kraus = 0, ho_pairs = 0, ho_restarts = 0, ho_iters = 0;
  double ho_tol = 0;
  auto* ho_channels_opt = holevo->add_option(
      "--channels", ho_channels, "'random' or 'files' (default random)");
  auto* ho_dim_opt = holevo->add_option("--dim", ho_dim, "Channel dimension");
  auto* ho_kraus_opt = holevo->add_option("--kraus", ho_kraus, "Kraus rank");
  auto* ho_pairs_opt = holevo->add_option("--pairs", ho_pairs, "Channel pairs");
  auto* ho_restarts_opt =
      holevo->add_option("--restarts", ho_restarts, "Optimizer restarts");
  auto* ho_iters_opt =
      holevo->add_option("--max-iters", ho_iters, "Optimizer iteration cap");
  auto* ho_tol_opt =
      holevo->add_option("--tolerance", ho_tol, "Optimizer tolerance (bits)");
  auto* ho_fa_opt = holevo->add_option("--channel-a", ho_file_a, "Channel JSON file");
  auto* ho_fb_opt = holevo->add_option("--channel-b", ho_file_b, "Channel JSON file");

  // --- sde ---
  auto* sde = app.add_subcommand(
      "sde", "Euler-Maruyama versus the geometric-Brownian-motion oracle");
  Common c_sde;
  c_sde.attach(sde);
  double sd_x0 = 0, sd_drift = 0, sd_omega = 0, sd_tend = 0;
  int sd_paths = 0, sd_ens = 0, sd_sample = 0;
  std::vector<int> sd_steps;
  auto* sd_x0_opt = sde->add_option("--x0", sd_x0, "Initial value");
  auto* sd_drift_opt = sde->add_option("--drift", sd_drift, "Drift coefficient a");
  auto* sd_omega_opt = sde->add_option("--omega", sd_omega, "Diffusion coefficient");
  auto* sd_tend_opt = sde->add_option("--t-end", sd_tend, "End time");
  auto* sd_paths_opt =
      sde->add_option("--paths", sd_paths, "Paths for the convergence study");
  auto* sd_ens_opt =
      sde->add_option("--ensemble-paths", sd_ens, "Paths for the moment check");
  auto* sd_sample_opt =
      sde->add_option("--sample-paths", sd_sample, "Trajectories written to CSV");
  auto* sd_steps_opt =
      sde->add_option("--steps", sd_steps, "Grid ladder (e.g. 32 64 128 256 512)");

  // --- codec ---
  auto* codec_cmd = app.add_subcommand(
      "codec", "Encode-by-hitting / decode-by-tessellation study");
  Common c_codec;
  c_codec.attach(codec_cmd);
  std::string cd_object, cd_object_file;
  std::vector<double> cd_intensities;
  int cd_seeds = 0, cd_resolution = 0, cd_rounds = 0;
  double cd_walk_temp = 0;
  auto* cd_object_opt = codec_cmd->add_option(
      "--object", cd_object, "Inline JSON object descriptor");
  auto* cd_object_file_opt =
      codec_cmd->add_option("--object-file", cd_object_file, "Object JSON file");
  auto* cd_int_opt = codec_cmd->add_option("--intensities", cd_intensities,
                                           "Hit intensities (default 250..2000)");
  auto* cd_seeds_opt =
      codec_cmd->add_option("--seeds", cd_seeds, "Seeds per intensity");
  auto* cd_res_opt =
      codec_cmd->add_option("--resolution", cd_resolution, "IoU grid resolution");
  auto* cd_rounds_opt =
      codec_cmd->add_option("--rounds", cd_rounds, "Rounds for the stopping check");
  auto* cd_walk_opt = codec_cmd->add_option("--walk-temperature", cd_walk_temp,
                                            "Geodesic walk temperature");
  bool cd_resample = false;
  auto* cd_resample_opt = codec_cmd->add_flag(
      "--resample", cd_resample, "Decode through a second, fresh tessellation");

  // --- selftest ---
  auto* selftest = app.add_subcommand(
      "selftest", "Fast invariant suite (projector axioms, semigroup, entropy)");
  Common c_selftest;
  c_selftest.attach(selftest);
  bool st_inject = false;
  selftest->add_flag("--inject-fault", st_inject,
                     "Corrupt one tolerance to demonstrate failure reporting");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    json p = json::object();
    if (spectral->parsed()) {
      opstat::set_max_threads(c_spectral.threads);
      if (sp_matrix_opt->count()) p["matrix"] = sp_matrix;
      if (sp_part_opt->count()) p["partition"] = sp_partition;
      if (sp_dim_opt->count()) p["dim"] = sp_dim;
      opstat::app::run_spectral(c_spectral.context("spectral", p));
    } else if (poisson->parsed()) {
      opstat::set_max_threads(c_poisson.threads);
      if (po_dim_opt->count()) p["dim"] = po_dim;
      if (po_arcs_opt->count()) p["arcs"] = po_arcs;
      if (po_trials_opt->count()) p["trials"] = po_trials;
      if (po_rate_opt->count()) p["rate"] = po_rate;
      if (po_horizon_opt->count()) p["horizon"] = po_horizon;
      opstat::app::run_poisson(c_poisson.context("poisson", p));
    } else if (holevo->parsed()) {
      opstat::set_max_threads(c_holevo.threads);
      if (ho_channels_opt->count()) p["channels"] = ho_channels;
      if (ho_dim_opt->count()) p["dim"] = ho_dim;
      if (ho_kraus_opt->count()) p["kraus"] = ho_kraus;
      if (ho_pairs_opt->count()) p["pairs"] = ho_pairs;
      if (ho_restarts_opt->count()) p["restarts"] = ho_restarts;
      if (ho_iters_opt->count()) p["max_iters"] = ho_iters;
      if (ho_tol_opt->count()) p["tolerance"] = ho_tol;
      if (ho_fa_opt->count()) p["channel_a"] = ho_file_a;
      if (ho_fb_opt->count()) p["channel_b"] = ho_file_b;
      opstat::app::run_holevo(c_holevo.context("holevo-additivity", p));
    } else if (sde->parsed()) {
      opstat::set_max_threads(c_sde.threads);
      if (sd_x0_opt->count()) p["x0"] = sd_x0;
      if (sd_drift_opt->count()) p["drift"] = sd_drift;
      if (sd_omega_opt->count()) p["omega"] = sd_omega;
      if (sd_tend_opt->count()) p["t_end"] = sd_tend;
      if (sd_paths_opt->count()) p["paths"] = sd_paths;
      if (sd_ens_opt->count()) p["ensemble_paths"] = sd_ens;
      if (sd_sample_opt->count()) p["sample_paths"] = sd_sample;
      if (sd_steps_opt->count()) p["steps"] = sd_steps;
      opstat::app::run_sde(c_sde.context("sde-convergence", p));
    } else if (codec_cmd->parsed()) {
      opstat::set_max_threads(c_codec.threads);
      if (cd_object_opt->count()) p["object"] = cd_object;
      if (cd_object_file_opt->count()) p["object_file"] = cd_object_file;
      if (cd_int_opt->count()) p["intensities"] = cd_intensities;
      if (cd_seeds_opt->count()) p["seeds"] = cd_seeds;
      if (cd_res_opt->count()) p["resolution"] = cd_resolution;
      if (cd_rounds_opt->count()) p["rounds"] = cd_rounds;
      if (cd_walk_opt->count()) p["walk_temperature"] = cd_walk_temp;
      if (cd_resample_opt->count()) p["resample"] = cd_resample;
      opstat::app::run_codec(c_codec.context("codec-study", p));
    } else if (selftest->parsed()) {
      opstat::set_max_threads(c_selftest.threads);
      const bool ok =
          opstat::app::run_selftest(c_selftest.context("selftest", p), st_inject);
      return ok ? 0 : 2;
    }
  } catch (const opstat::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 1;
  } catch (const opstat::NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const opstat::DomainError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

namespace opstat::app {

// A resolved experiment invocation: canonical name, merged parameters
// (defaults < config file < command-line flags), mandatory seed, output
// directory. Every runner writes its artifact files plus manifest.json
// (config echo, version, kernel lane, wall time) into out_dir.
struct ExperimentContext {
  std::string experiment;
  nlohmann::json params;  // experiment-specific table
  std::uint64_t seed = 0;
  std::string out_dir = ".";
};

void run_spectral(const ExperimentContext& ctx);
void run_poisson(const ExperimentContext& ctx);
void run_holevo(const ExperimentContext& ctx);
void run_sde(const ExperimentContext& ctx);
void run_codec(const ExperimentContext& ctx);

// Fast invariant suite; prints one pass/fail line per group and writes
// selftest.json. Returns true when every group passes. inject_fault
// deliberately corrupts one tolerance to prove failures are reported.
bool run_selftest(const ExperimentContext& ctx, bool inject_fault);

// Shared output helpers (deterministic formatting).
std::string format_double(double x);  // shortest exact decimal (%.17g)
void write_text_file(const std::string& path, const std::string& content);

}  // namespace opstat::app

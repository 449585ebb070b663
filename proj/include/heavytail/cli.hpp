#pragma once

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

namespace heavytail::cli {

enum ExitCode : int { kOk = 0, kValidation = 1, kStatistical = 2, kRuntime = 3 };

/// What a run consumed and produced. Two runs with equal config hash, seed,
/// subcommand and params write identical artifacts.
struct RunManifest {
  std::string subcommand;
  std::string config_hash;
  std::uint64_t seed = 0;
  int workers = 1;
  nlohmann::json params = nlohmann::json::object();  // result-affecting flags only
  std::vector<std::string> artifacts;
  double wall_clock_seconds = 0.0;

  /// Hash over subcommand, config hash, seed and params. Worker count, output
  /// paths and timing stay out so that it tags results, not runs.
  std::string hash() const;
  nlohmann::json to_json() const;
};

/// 16 hex digits of the FNV-1a hash of the canonical JSON dump.
std::string config_hash(const nlohmann::json& config);

void write_manifest(const RunManifest& manifest, const std::string& path);

/// JSON number, or the strings "inf", "-inf", "nan" for non-finite values.
nlohmann::json number(double v);

/// Full command line without the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int dispatch(int argc, const char* const* argv);

}  // namespace heavytail::cli

#include <cmath>
#include <cstdio>
#include <fstream>

#include "heavytail/cli.hpp"
#include "heavytail/errors.hpp"
#include "heavytail/rng.hpp"

namespace heavytail::cli {

namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

std::string config_hash(const nlohmann::json& config) { return hex64(fnv1a64(config.dump())); }

std::string RunManifest::hash() const {
  const nlohmann::json key = {
      {"subcommand", subcommand}, {"config_hash", config_hash}, {"seed", seed}, {"params", params}};
  return hex64(fnv1a64(key.dump()));
}

nlohmann::json RunManifest::to_json() const {
  return {{"manifest_hash", hash()}, {"subcommand", subcommand},     {"config_hash", config_hash},
          {"seed", seed},            {"workers", workers},           {"params", params},
          {"artifacts", artifacts},  {"wall_clock_seconds", wall_clock_seconds}};
}

void write_manifest(const RunManifest& manifest, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path);
  out << manifest.to_json().dump(2) << '\n';
}

nlohmann::json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

}  // namespace heavytail::cli

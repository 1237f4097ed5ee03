#include "manifest.hpp"

#include <chrono>
#include <ctime>
#include <fstream>

#include "mata/errors.hpp"

#ifndef MATA_VERSION_STRING
#define MATA_VERSION_STRING "unknown"
#endif

namespace mata::cli {

std::string tool_version() { return MATA_VERSION_STRING; }

nlohmann::ordered_json RunManifest::deterministic_json() const {
  nlohmann::ordered_json j;
  j["tool"] = "mata";
  j["version"] = tool_version();
  j["command"] = command;
  j["config"] = config;
  if (seed) j["seed"] = *seed;
  return j;
}

std::vector<std::string> RunManifest::comment_lines() const {
  return {"mata " + tool_version() + " " + command, "manifest " + deterministic_json().dump()};
}

void RunManifest::write_sidecar(const std::filesystem::path& output) const {
  nlohmann::ordered_json j = deterministic_json();
  j["argv"] = argv;
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &utc);
  j["timestamp"] = stamp;
  const auto path = std::filesystem::path(output).concat(".manifest.json");
  std::ofstream os(path);
  if (!os) throw InputError("cannot write " + path.string());
  os << j.dump(2) << '\n';
}

}  // namespace mata::cli

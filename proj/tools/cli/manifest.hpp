#pragma once

#include <filesystem>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace mata::cli {

/// What produced an output file. The CSV carries the deterministic part as a
/// comment line; the sidecar `<out>.manifest.json` adds argv and a timestamp.
struct RunManifest {
  std::string command;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  std::optional<std::uint64_t> seed;
  std::vector<std::string> argv;

  nlohmann::ordered_json deterministic_json() const;
  /// Comment lines for the CSV, without the leading '#'.
  std::vector<std::string> comment_lines() const;
  void write_sidecar(const std::filesystem::path& output) const;
};

std::string tool_version();

}  // namespace mata::cli

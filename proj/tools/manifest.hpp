#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace loopqrng::cli {

/// Run record written next to each command's primary output:
/// command echo, resolved configuration, input/output paths with SHA-256
/// digests, tool version and timestamp.
struct RunManifest {
  std::string command;
  nlohmann::ordered_json config;
  std::vector<std::filesystem::path> inputs;
  std::vector<std::filesystem::path> outputs;
};

std::string sha256_file(const std::filesystem::path& path);

std::filesystem::path manifest_path(const std::filesystem::path& primary_output);

/// Writes <primary_output>.manifest.json (atomic).
void write_manifest(const RunManifest& manifest);

/// Loads the config echo of "<input>.manifest.json" when present;
/// returns a null json otherwise.
nlohmann::ordered_json sibling_manifest_config(const std::filesystem::path& input);

}  // namespace loopqrng::cli

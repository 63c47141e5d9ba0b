#include "manifest.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <ctime>
#include <fstream>

#include "loopqrng/errors.hpp"
#include "loopqrng/file_io.hpp"
#include "loopqrng/version.hpp"

namespace loopqrng::cli {

using nlohmann::ordered_json;

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open for digest: " + path.string());

  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx) throw std::runtime_error("EVP_MD_CTX_new failed");
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof(buf));
    EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);

  std::string hex(2 * len, '0');
  for (unsigned int i = 0; i < len; ++i)
    std::snprintf(hex.data() + 2 * i, 3, "%02x", digest[i]);
  return hex;
}

std::filesystem::path manifest_path(const std::filesystem::path& primary_output) {
  std::filesystem::path p = primary_output;
  p += ".manifest.json";
  return p;
}

void write_manifest(const RunManifest& manifest) {
  if (manifest.outputs.empty()) return;
  ordered_json j;
  j["tool"] = "loopqrng";
  j["version"] = kVersion;
  j["command"] = manifest.command;
  j["config"] = manifest.config;
  ordered_json inputs = ordered_json::array();
  for (const auto& path : manifest.inputs)
    inputs.push_back({{"path", path.string()}, {"sha256", sha256_file(path)}});
  j["inputs"] = std::move(inputs);
  ordered_json outputs = ordered_json::array();
  for (const auto& path : manifest.outputs)
    outputs.push_back({{"path", path.string()}, {"sha256", sha256_file(path)}});
  j["outputs"] = std::move(outputs);
  j["created_unix"] = static_cast<std::int64_t>(std::time(nullptr));
  write_file_atomic(manifest_path(manifest.outputs.front()), j.dump(2) + "\n");
}

nlohmann::ordered_json sibling_manifest_config(const std::filesystem::path& input) {
  const std::filesystem::path path = manifest_path(input);
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return nullptr;
  try {
    const ordered_json j = ordered_json::parse(read_file(path));
    if (j.contains("config")) return j["config"];
  } catch (...) {
    // a broken sibling manifest only loses the provenance echo
  }
  return nullptr;
}

}  // namespace loopqrng::cli

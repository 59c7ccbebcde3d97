#pragma once

#include <openssl/evp.h>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wealthtail/errors.hpp"
#include "wealthtail/version.hpp"

namespace wealthtail {

using json = nlohmann::ordered_json;

inline std::string sha256_hex(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw validation_error("cannot open " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buffer[1 << 16];
  while (in.read(buffer, sizeof buffer) || in.gcount() > 0)
    EVP_DigestUpdate(ctx, buffer, static_cast<std::size_t>(in.gcount()));
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_DigestFinal_ex(ctx, digest, &length);
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

/// Reproducibility record embedded in every result payload: the subcommand,
/// the fully resolved configuration, digests of the input files, the seed,
/// and the interpretation conventions that shaped the numbers. Deliberately
/// free of timestamps so reruns are byte-comparable.
struct RunManifest {
  std::string subcommand;
  json config = json::object();
  std::vector<std::pair<std::string, std::string>> inputs;  // path, sha256
  std::uint64_t seed = 0;
  json conventions = json::object();

  void add_input(const std::filesystem::path& path) {
    inputs.emplace_back(path.string(), sha256_hex(path));
  }

  json to_json() const {
    json j;
    j["subcommand"] = subcommand;
    j["library_version"] = library_version;
    j["seed"] = seed;
    j["config"] = config;
    json in = json::array();
    for (const auto& [path, digest] : inputs)
      in.push_back(json{{"path", path}, {"sha256", digest}});
    j["inputs"] = in;
    j["conventions"] = conventions;
    return j;
  }
};

/// Conventions shared by every subcommand; individual commands add their
/// own entries.
inline json base_conventions() {
  return json{
      {"tail_comparison", "inclusive at w_min"},
      {"w0_boundary", "point at w0 belongs to the body"},
      {"share_sums", "wealth-weighted (sum of w_i n(w_i) / N)"},
      {"wijk_curve_comparison", "strict above threshold"},
      {"cm_trapezoid", "consecutive observed pairs only"},
  };
}

}  // namespace wealthtail

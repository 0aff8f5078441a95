#include "gaitforge/checkpoint.hpp"

#include <bit>
#include <fstream>

#include <nlohmann/json.hpp>

#include "gaitforge/sha256.hpp"

namespace gaitforge::nn {

using json = nlohmann::json;

static_assert(std::endian::native == std::endian::little,
              "checkpoint raw format is little-endian");

void save_checkpoint(const std::string& stem, const std::vector<int>& layer_sizes,
                     const Vector& params, uint64_t seed) {
  json manifest;
  manifest["layer_sizes"] = layer_sizes;
  manifest["parameter_count"] = params.size();
  manifest["seed"] = seed;
  manifest["byte_order"] = "little-endian";
  manifest["dtype"] = "f64";
  {
    std::ofstream out(stem + ".json", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + stem + ".json");
    out << manifest.dump(2) << "\n";
  }
  {
    std::ofstream out(stem + ".f64", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + stem + ".f64");
    out.write(reinterpret_cast<const char*>(params.data()),
              std::streamsize(sizeof(double) * size_t(params.size())));
  }
}

Checkpoint load_checkpoint(const std::string& stem) {
  std::ifstream mf(stem + ".json", std::ios::binary);
  if (!mf) throw std::runtime_error("cannot open " + stem + ".json");
  json manifest = json::parse(mf);
  if (manifest.at("dtype").get<std::string>() != "f64" ||
      manifest.at("byte_order").get<std::string>() != "little-endian") {
    throw std::runtime_error("unsupported checkpoint encoding in " + stem + ".json");
  }

  Checkpoint ckpt;
  ckpt.layer_sizes = manifest.at("layer_sizes").get<std::vector<int>>();
  ckpt.seed = manifest.at("seed").get<uint64_t>();
  const long count = manifest.at("parameter_count").get<long>();

  std::ifstream raw(stem + ".f64", std::ios::binary);
  if (!raw) throw std::runtime_error("cannot open " + stem + ".f64");
  ckpt.params.resize(count);
  raw.read(reinterpret_cast<char*>(ckpt.params.data()),
           std::streamsize(sizeof(double) * size_t(count)));
  if (raw.gcount() != std::streamsize(sizeof(double) * size_t(count))) {
    throw std::runtime_error("truncated checkpoint: " + stem + ".f64");
  }
  if (!ckpt.params.allFinite()) throw std::runtime_error("non-finite checkpoint: " + stem);
  return ckpt;
}

std::string params_hash(const Vector& params) {
  Sha256 h;
  h.update(params.data(), sizeof(double) * size_t(params.size()));
  return h.hex_digest();
}

}  // namespace gaitforge::nn

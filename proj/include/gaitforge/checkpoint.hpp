#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gaitforge/nncore.hpp"

namespace gaitforge::nn {

// Checkpoint pair: <stem>.json manifest + <stem>.f64 raw little-endian
// doubles in declaration order. `extra` holds trailing non-layer parameters
// (e.g. a policy's state-independent log-std).
struct Checkpoint {
  std::vector<int> layer_sizes;
  Vector params;  // mlp flat params followed by extras
  uint64_t seed = 0;
};

void save_checkpoint(const std::string& stem, const std::vector<int>& layer_sizes,
                     const Vector& params, uint64_t seed);
Checkpoint load_checkpoint(const std::string& stem);

// Content hash of the raw parameter bytes (used in run manifests).
std::string params_hash(const Vector& params);

}  // namespace gaitforge::nn

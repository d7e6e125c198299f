#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "motif/encoder.h"
#include "motif/optim.h"

namespace motif {

inline constexpr uint32_t kCheckpointFormatVersion = 1;

struct OptimizerState {
  AdamWConfig config;
  long steps_taken = 0;
  ModelWeights first_moment;
  ModelWeights second_moment;
};

struct Checkpoint {
  EncoderConfig encoder;
  ExpanderConfig expander;
  ModelWeights weights;
  std::optional<OptimizerState> optimizer;
  long global_step = 0;
  std::string rng_state;
  nlohmann::json meta = nlohmann::json::object();  // free-form run description (stage, method, seed)
};

/// Layout: "MOTIFCKP", u32 format_version, u64 header length, JSON header (configs,
/// step, RNG state, tensor table), then each tensor's doubles in column-major order,
/// all little-endian.
std::vector<uint8_t> serialize_checkpoint(const Checkpoint& ck);
Checkpoint deserialize_checkpoint(const std::vector<uint8_t>& bytes);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ck);
Checkpoint load_checkpoint(const std::filesystem::path& path);

Model model_from_checkpoint(const Checkpoint& ck);

}  // namespace motif

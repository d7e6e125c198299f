#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>

#include "json.hpp"
#include "motif/augment.h"
#include "motif/clustering.h"
#include "motif/encoder.h"
#include "motif/losses.h"
#include "motif/training.h"

namespace motif {

nlohmann::json to_json(const EncoderConfig& c);
EncoderConfig encoder_config_from_json(const nlohmann::json& j, EncoderConfig base = {});
nlohmann::json to_json(const ExpanderConfig& c);
ExpanderConfig expander_config_from_json(const nlohmann::json& j, ExpanderConfig base = {});
nlohmann::json to_json(const AdamWConfig& c);
AdamWConfig adamw_config_from_json(const nlohmann::json& j);

struct IngestConfig {
  int steps_per_bar = 16;
  std::set<TrackRole> roles{TrackRole::Accompaniment};
  std::map<std::string, TrackRole> role_by_name;
};

struct EvalConfig {
  std::optional<int> k_max;  // unset: sweep up to the largest relevant-set size
  int random_dim = 32;
};

struct VizConfig {
  DbscanConfig dbscan;
  bool row_normalize = false;
};

/// Every module's configuration plus paths and the global seed. Seeds of individual
/// sections default to the global seed unless set explicitly.
struct RunConfig {
  uint64_t seed = 0;
  std::filesystem::path work_dir = "work";
  IngestConfig ingest;
  AugmentConfig augment;
  EncoderConfig encoder;
  ExpanderConfig expander;
  TripletConfig triplet;
  VICRegConfig vicreg;
  TrainConfig train;
  EvalConfig eval;
  VizConfig viz;
  bool encoder_explicit = false;  // encoder/expander sections were present in the file

  void validate() const;
};

nlohmann::json to_json(const RunConfig& c);
/// Overlays the keys present in j onto base. Unknown keys raise ConfigError naming the field.
RunConfig run_config_from_json(const nlohmann::json& j, RunConfig base = {});
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace motif

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "motif/checkpoint.h"
#include "motif/losses.h"
#include "motif/sampling.h"

namespace motif {

enum class Stage { Pretrain, Finetune, Scratch };
enum class Method { VICReg, CL, NECL };

const char* stage_name(Stage s);
Stage stage_from_name(const std::string& name);
const char* method_name(Method m);
Method method_from_name(const std::string& name);

inline constexpr double kPretrainLearningRate = 1e-4;
inline constexpr double kFinetuneLearningRate = 1e-5;

struct TrainConfig {
  Stage stage = Stage::Pretrain;
  Method method = Method::VICReg;
  std::optional<double> learning_rate;  // unset: 1e-4 for pretrain/scratch, 1e-5 for finetune
  int batch_size = 64;
  long max_steps = 1000;  // total step count; a resumed run continues up to it
  double weight_decay = 0.01;
  uint64_t seed = 0;
  bool freeze_encoder = false;
  bool resume = false;  // restore optimizer, step and RNG from checkpoint_in
  std::optional<std::filesystem::path> checkpoint_in;
  std::optional<std::filesystem::path> checkpoint_out;
  long checkpoint_every = 0;  // 0 disables periodic checkpoints
  std::optional<std::filesystem::path> metrics_path;
  int necl_pool = 16;
  /// Labeled stages only: half of each batch is drawn from TrainingData::views instead.
  bool add_view_positives = false;

  double effective_learning_rate() const;
  void validate() const;
};

struct StepMetrics {
  long step = 0;  // 1-based
  double total = 0.0;
  std::optional<double> invariance, variance, covariance, triplet;
  double learning_rate = 0.0;
};

struct TrainingData {
  const std::vector<ViewSet>* views = nullptr;  // pretrain corpora
  LabeledView labeled;                           // finetune / scratch
};

struct ModelSetup {
  EncoderConfig encoder;
  ExpanderConfig expander;
  TripletConfig triplet;
  VICRegConfig vicreg;
  /// When the encoder/expander configs were given explicitly they must match a loaded checkpoint.
  bool strict_architecture = false;
};

struct TrainResult {
  Checkpoint checkpoint;
  std::vector<StepMetrics> history;
  size_t warnings = 0;
};

/// Periodic checkpoints go to "<checkpoint_out stem>.step<N><ext>".
std::filesystem::path periodic_checkpoint_path(const std::filesystem::path& out, long step);

TrainResult run_training(const TrainingData& data, const TrainConfig& cfg, const ModelSetup& setup);

/// Loss the next optimization step would log, recomputed from a checkpoint written
/// by run_training (its RNG state positions the batch draw).
StepMetrics replay_next_step(const Checkpoint& ck, const TrainingData& data, const TrainConfig& cfg,
                             const ModelSetup& setup);

void write_metrics_csv(const std::filesystem::path& path, const std::vector<StepMetrics>& rows);

/// Mean over embedding dimensions of the per-dimension standard deviation across chunks.
double mean_embedding_std(const Model& model, const std::vector<PianoRollChunk>& chunks);

}  // namespace motif

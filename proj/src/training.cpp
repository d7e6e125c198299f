#include "motif/training.h"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "motif/errors.h"

namespace motif {

const char* stage_name(Stage s) {
  switch (s) {
    case Stage::Pretrain: return "pretrain";
    case Stage::Finetune: return "finetune";
    case Stage::Scratch: return "scratch";
  }
  return "?";
}

Stage stage_from_name(const std::string& name) {
  if (name == "pretrain") return Stage::Pretrain;
  if (name == "finetune") return Stage::Finetune;
  if (name == "scratch") return Stage::Scratch;
  throw ConfigError("unknown stage '" + name + "' (expected pretrain, finetune or scratch)");
}

const char* method_name(Method m) {
  switch (m) {
    case Method::VICReg: return "vicreg";
    case Method::CL: return "cl";
    case Method::NECL: return "necl";
  }
  return "?";
}

Method method_from_name(const std::string& name) {
  if (name == "vicreg") return Method::VICReg;
  if (name == "cl") return Method::CL;
  if (name == "necl") return Method::NECL;
  throw ConfigError("unknown method '" + name + "' (expected vicreg, cl or necl)");
}

double TrainConfig::effective_learning_rate() const {
  if (learning_rate) return *learning_rate;
  return stage == Stage::Finetune ? kFinetuneLearningRate : kPretrainLearningRate;
}

void TrainConfig::validate() const {
  if (!(effective_learning_rate() > 0.0) || !std::isfinite(effective_learning_rate())) {
    throw ConfigError("train.learning_rate must be positive");
  }
  if (batch_size < 2) throw ConfigError("train.batch_size must be at least 2");
  if (max_steps < 0) throw ConfigError("train.max_steps must be non-negative");
  if (weight_decay < 0.0) throw ConfigError("train.weight_decay must be non-negative");
  if (checkpoint_every < 0) throw ConfigError("train.checkpoint_every must be non-negative");
  if (necl_pool < 1) throw ConfigError("train.necl_pool must be positive");
  if (stage == Stage::Finetune && !checkpoint_in) throw ConfigError("finetune needs a pretrained checkpoint");
  if (resume && !checkpoint_in) throw ConfigError("resume needs checkpoint_in");
  if (add_view_positives && stage == Stage::Pretrain) throw ConfigError("train.add_view_positives applies to labeled stages only");
}

std::filesystem::path periodic_checkpoint_path(const std::filesystem::path& out, long step) {
  auto p = out;
  p.replace_filename(out.stem().string() + ".step" + std::to_string(step) + out.extension().string());
  return p;
}

namespace {

std::vector<const PianoRollChunk*> concat(std::initializer_list<const std::vector<const PianoRollChunk*>*> parts) {
  std::vector<const PianoRollChunk*> out;
  for (const auto* p : parts) out.insert(out.end(), p->begin(), p->end());
  return out;
}

bool uses_labels(Stage s) { return s != Stage::Pretrain; }

void append(PairBatch& into, PairBatch&& from) {
  into.anchors.insert(into.anchors.end(), from.anchors.begin(), from.anchors.end());
  into.positives.insert(into.positives.end(), from.positives.begin(), from.positives.end());
  into.provenance.insert(into.provenance.end(), from.provenance.begin(), from.provenance.end());
}

void append(TripletBatch& into, TripletBatch&& from) {
  into.anchors.insert(into.anchors.end(), from.anchors.begin(), from.anchors.end());
  into.positives.insert(into.positives.end(), from.positives.begin(), from.positives.end());
  into.negatives.insert(into.negatives.end(), from.negatives.begin(), from.negatives.end());
}

PairBatch draw_pairs(const TrainingData& data, const TrainConfig& cfg, Rng& rng) {
  const int n = cfg.batch_size;
  if (!uses_labels(cfg.stage)) return sample_pair_batch(*data.views, n, rng);
  if (!cfg.add_view_positives) return sample_pair_batch(data.labeled, n, rng);
  PairBatch b = sample_pair_batch(data.labeled, n - n / 2, rng);
  append(b, sample_pair_batch(*data.views, n / 2, rng));
  return b;
}

TripletBatch draw_triplets(const TrainingData& data, const TrainConfig& cfg, Rng& rng, Warnings* warnings) {
  const int n = cfg.batch_size;
  const NegativeOptions neg{cfg.method == Method::NECL, cfg.necl_pool};
  if (!uses_labels(cfg.stage)) return sample_triplet_batch(*data.views, n, rng, neg, warnings);
  if (!cfg.add_view_positives) return sample_triplet_batch(data.labeled, n, rng, neg, warnings);
  TripletBatch b = sample_triplet_batch(data.labeled, n - n / 2, rng, neg, warnings);
  append(b, sample_triplet_batch(*data.views, n / 2, rng, neg, warnings));
  return b;
}

/// Draws one batch and evaluates the loss; gradients are accumulated into grads when given.
StepMetrics evaluate_step(const Model& model, const TrainingData& data, const TrainConfig& cfg, const ModelSetup& setup,
                          Rng& rng, Warnings* warnings, ModelWeights* grads) {
  StepMetrics m;
  m.learning_rate = cfg.effective_learning_rate();

  if (cfg.method == Method::VICReg) {
    const PairBatch batch = draw_pairs(data, cfg, rng);
    EncoderTape etape;
    ExpanderTape xtape;
    const Mat z = model.encode_forward(concat({&batch.anchors, &batch.positives}), grads ? &etape : nullptr);
    const Mat zp = model.expand_forward(z, grads ? &xtape : nullptr);
    const long b = static_cast<long>(batch.size());
    Mat da, db;
    const VICRegTerms terms = vicreg_loss(zp.topRows(b), zp.bottomRows(b), setup.vicreg, grads ? &da : nullptr,
                                          grads ? &db : nullptr);
    m.total = terms.total;
    m.invariance = terms.invariance;
    m.variance = terms.variance;
    m.covariance = terms.covariance;
    if (grads && std::isfinite(m.total)) {
      Mat dzp(zp.rows(), zp.cols());
      dzp << da, db;
      const Mat dz = model.expand_backward(xtape, dzp, *grads);
      model.encode_backward(etape, dz, *grads);
    }
    return m;
  }

  const TripletBatch batch = draw_triplets(data, cfg, rng, warnings);
  EncoderTape tape;
  const Mat z = model.encode_forward(concat({&batch.anchors, &batch.positives, &batch.negatives}), grads ? &tape : nullptr);
  const long b = static_cast<long>(batch.size());
  Mat da, dp, dn;
  m.total = triplet_loss(z.topRows(b), z.middleRows(b, b), z.bottomRows(b), setup.triplet, grads ? &da : nullptr,
                         grads ? &dp : nullptr, grads ? &dn : nullptr);
  m.triplet = m.total;
  if (grads && std::isfinite(m.total)) {
    Mat dz(z.rows(), z.cols());
    dz << da, dp, dn;
    model.encode_backward(tape, dz, *grads);
  }
  return m;
}

void check_data(const TrainingData& data, const TrainConfig& cfg) {
  if (uses_labels(cfg.stage)) {
    if (!data.labeled.chunks || !data.labeled.labels) throw ConfigError(std::string(stage_name(cfg.stage)) + " needs a labeled dataset");
    if (cfg.add_view_positives && (!data.views || data.views->empty())) {
      throw ConfigError("train.add_view_positives needs a view corpus");
    }
  } else if (!data.views || data.views->empty()) {
    throw ConfigError("pretraining needs an augmented view corpus");
  }
}

Model initial_model(const TrainConfig& cfg, const ModelSetup& setup, const Checkpoint* loaded) {
  if (!loaded) return Model(setup.encoder, setup.expander, cfg.seed);
  if (setup.strict_architecture && (!(loaded->encoder == setup.encoder) || !(loaded->expander == setup.expander))) {
    throw ConfigError("encoder/expander config does not match checkpoint " + cfg.checkpoint_in->string());
  }
  return model_from_checkpoint(*loaded);
}

nlohmann::json run_meta(const TrainConfig& cfg, const Checkpoint* parent) {
  nlohmann::json meta = {{"stage", stage_name(cfg.stage)},
                         {"method", method_name(cfg.method)},
                         {"seed", cfg.seed},
                         {"batch_size", cfg.batch_size},
                         {"learning_rate", cfg.effective_learning_rate()},
                         {"freeze_encoder", cfg.freeze_encoder}};
  if (parent && cfg.resume && parent->meta.contains("parent")) meta["parent"] = parent->meta.at("parent");
  if (parent && !cfg.resume) meta["parent"] = parent->meta;
  return meta;
}

Checkpoint snapshot(const Model& model, const AdamW& opt, long step, const Rng& rng, const nlohmann::json& meta) {
  Checkpoint ck;
  ck.encoder = model.encoder_config();
  ck.expander = model.expander_config();
  ck.weights = model.weights();
  ck.optimizer = OptimizerState{opt.config(), opt.steps_taken(), opt.first_moment(), opt.second_moment()};
  ck.global_step = step;
  ck.rng_state = rng_state(rng);
  ck.meta = meta;
  return ck;
}

}  // namespace

TrainResult run_training(const TrainingData& data, const TrainConfig& cfg, const ModelSetup& setup) {
  cfg.validate();
  check_data(data, cfg);

  std::optional<Checkpoint> loaded;
  if (cfg.checkpoint_in) loaded = load_checkpoint(*cfg.checkpoint_in);
  Model model = initial_model(cfg, setup, loaded ? &*loaded : nullptr);

  AdamW opt(AdamWConfig{cfg.effective_learning_rate(), 0.9, 0.999, 1e-8, cfg.weight_decay}, model.weights());
  Rng rng = derive_stream(cfg.seed, "train");
  long step = 0;
  if (cfg.resume) {
    if (!loaded->optimizer) throw CheckpointError("checkpoint " + cfg.checkpoint_in->string() + " has no optimizer state");
    opt.first_moment() = loaded->optimizer->first_moment;
    opt.second_moment() = loaded->optimizer->second_moment;
    opt.set_steps_taken(loaded->optimizer->steps_taken);
    step = loaded->global_step;
    restore_rng_state(rng, loaded->rng_state);
  }
  const auto meta = run_meta(cfg, loaded ? &*loaded : nullptr);

  std::function<bool(const std::string&)> trainable;
  if (cfg.freeze_encoder) trainable = [](const std::string& name) { return !is_transformer_block_param(name); };

  TrainResult result;
  Warnings warnings;
  while (step < cfg.max_steps) {
    ModelWeights grads = zeros_like(model.weights());
    StepMetrics m = evaluate_step(model, data, cfg, setup, rng, &warnings, &grads);
    m.step = step + 1;
    if (!std::isfinite(m.total)) {
      throw TrainingError("non-finite loss at step " + std::to_string(m.step), m.step);
    }
    opt.step(model.weights(), grads, trainable);
    ++step;
    result.history.push_back(m);
    if (cfg.checkpoint_every > 0 && cfg.checkpoint_out && step % cfg.checkpoint_every == 0) {
      save_checkpoint(periodic_checkpoint_path(*cfg.checkpoint_out, step), snapshot(model, opt, step, rng, meta));
    }
  }

  result.checkpoint = snapshot(model, opt, step, rng, meta);
  result.warnings = warnings.messages().size();
  if (cfg.checkpoint_out) save_checkpoint(*cfg.checkpoint_out, result.checkpoint);
  if (cfg.metrics_path) write_metrics_csv(*cfg.metrics_path, result.history);
  return result;
}

StepMetrics replay_next_step(const Checkpoint& ck, const TrainingData& data, const TrainConfig& cfg,
                             const ModelSetup& setup) {
  check_data(data, cfg);
  const Model model = model_from_checkpoint(ck);
  Rng rng;
  restore_rng_state(rng, ck.rng_state);
  Warnings warnings;
  StepMetrics m = evaluate_step(model, data, cfg, setup, rng, &warnings, nullptr);
  m.step = ck.global_step + 1;
  return m;
}

void write_metrics_csv(const std::filesystem::path& path, const std::vector<StepMetrics>& rows) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ConfigError("cannot write metrics file " + path.string());
  out << "step,loss_total,loss_inv,loss_var,loss_cov,loss_triplet,lr\n";
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  auto opt = [&](const std::optional<double>& v) { return v ? num(*v) : std::string(); };
  for (const auto& r : rows) {
    out << r.step << ',' << num(r.total) << ',' << opt(r.invariance) << ',' << opt(r.variance) << ','
        << opt(r.covariance) << ',' << opt(r.triplet) << ',' << num(r.learning_rate) << '\n';
  }
}

double mean_embedding_std(const Model& model, const std::vector<PianoRollChunk>& chunks) {
  if (chunks.size() < 2) throw DomainError("mean_embedding_std needs at least two chunks");
  const Mat z = model.encode(chunks);
  const Mat centered = z.rowwise() - z.colwise().mean();
  const Eigen::RowVectorXd var = centered.colwise().squaredNorm() / static_cast<double>(z.rows() - 1);
  return var.array().sqrt().mean();
}

}  // namespace motif

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "motif/augment.h"
#include "motif/checkpoint.h"
#include "motif/chunking.h"
#include "motif/clustering.h"
#include "motif/config.h"
#include "motif/dataset_io.h"
#include "motif/errors.h"
#include "motif/experiments.h"
#include "motif/image.h"
#include "motif/midi.h"
#include "motif/retrieval.h"
#include "motif/structure.h"
#include "motif/synth.h"
#include "motif/training.h"

namespace fs = std::filesystem;
using namespace motif;

namespace {

class RunLog {
 public:
  explicit RunLog(const fs::path& dir) {
    fs::create_directories(dir);
    out_.open(dir / "run.log", std::ios::trunc);
  }
  void operator()(const std::string& line) {
    out_ << line << '\n';
    out_.flush();
    std::cerr << line << '\n';
  }

 private:
  std::ofstream out_;
};

struct Common {
  std::string config;
  std::optional<uint64_t> seed;
  std::string work_dir;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "JSON config file; flags override its values")->check(CLI::ExistingFile);
  sub->add_option("--seed", c.seed, "global seed");
  sub->add_option("--work-dir", c.work_dir, "work directory (default: $MOTIF_WORK_DIR or config work_dir)");
}

RunConfig resolve(const Common& c) {
  RunConfig cfg = c.config.empty() ? RunConfig{} : load_run_config(c.config);
  if (const char* env = std::getenv("MOTIF_WORK_DIR"); env && *env && c.work_dir.empty()) cfg.work_dir = env;
  if (!c.work_dir.empty()) cfg.work_dir = c.work_dir;
  if (c.seed) {
    cfg.seed = *c.seed;
    cfg.augment.seed = *c.seed;
    cfg.train.seed = *c.seed;
  }
  return cfg;
}

void write_snapshot(const fs::path& dir, const RunConfig& cfg, const std::string& command, const nlohmann::json& args) {
  nlohmann::json j = to_json(cfg);
  j["run"] = {{"command", command}, {"args", args}};
  write_json(dir / "resolved_config.json", j);
}

fs::path out_or(const std::string& out, const RunConfig& cfg, const fs::path& fallback) {
  return out.empty() ? cfg.work_dir / fallback : fs::path(out);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

// ---------------------------------------------------------------- ingest

struct IngestArgs {
  std::vector<std::string> midi;
  std::string labels_csv;
  std::string out;
  std::optional<int> steps_per_bar;
};

std::vector<fs::path> midi_files(const std::vector<std::string>& inputs) {
  std::vector<fs::path> files;
  for (const auto& in : inputs) {
    if (fs::is_directory(in)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::recursive_directory_iterator(in)) {
        const auto ext = e.path().extension().string();
        if (e.is_regular_file() && (ext == ".mid" || ext == ".midi" || ext == ".MID")) found.push_back(e.path());
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else if (fs::is_regular_file(in)) {
      files.emplace_back(in);
    } else {
      throw ConfigError("--midi: no such file or directory: " + in);
    }
  }
  return files;
}

int run_ingest(const Common& common, const IngestArgs& a) {
  RunConfig cfg = resolve(common);
  if (a.steps_per_bar) cfg.ingest.steps_per_bar = cfg.encoder.steps_per_bar = *a.steps_per_bar;
  cfg.validate();
  const fs::path out = out_or(a.out, cfg, "datasets/ingested");
  RunLog log(out);
  write_snapshot(out, cfg, "ingest", {{"midi", a.midi}, {"labels_csv", a.labels_csv}, {"out", out.string()}});

  Warnings warnings;
  std::vector<Song> songs;
  for (const auto& f : midi_files(a.midi)) {
    MidiParseOptions opts;
    opts.song_id = f.stem().string();
    opts.role_by_name = cfg.ingest.role_by_name;
    songs.push_back(parse_midi_file(f, opts, &warnings));
  }
  LabeledDataset ds = build_labeled_dataset(songs, cfg.ingest.roles, cfg.ingest.steps_per_bar, &warnings);
  if (!a.labels_csv.empty()) {
    ds.labels = read_labels_csv(a.labels_csv);
    ds.summary = summarize_labels(ds.labels);
  }
  for (const auto& w : warnings.messages()) log("warning: " + w);

  write_chunks_jsonl(out / "chunks.jsonl", ds.chunks);
  write_labels_jsonl(out / "labels.jsonl", ds.labels);
  write_json(out / "summary.json", {{"n_songs", songs.size()},
                                    {"n_chunks", ds.chunks.size()},
                                    {"n_labels", ds.labels.size()},
                                    {"mean_motifs_per_song", ds.summary.mean_motifs_per_song},
                                    {"mean_occurrences_per_motif", ds.summary.mean_occurrences_per_motif},
                                    {"n_warnings", warnings.messages().size()}});
  log("ingested " + std::to_string(songs.size()) + " songs, " + std::to_string(ds.chunks.size()) + " chunks, " +
      std::to_string(ds.labels.size()) + " labels into " + out.string());
  log("mean motifs/song " + fmt(ds.summary.mean_motifs_per_song) + ", mean occurrences/motif " +
      fmt(ds.summary.mean_occurrences_per_motif));
  return 0;
}

// ---------------------------------------------------------------- augment-preview

struct AugmentArgs {
  std::string data;
  std::string out;
  int preview = 8;
  std::optional<int> n_views;
};

Image contact_sheet(const std::vector<ViewSet>& sets, int max_rows) {
  const int rows = std::min<int>(max_rows, static_cast<int>(sets.size()));
  size_t cols = 1;
  int S = 16;
  for (int r = 0; r < rows; ++r) {
    cols = std::max(cols, sets[r].views.size());
    if (!sets[r].views.empty()) S = sets[r].views.front().steps_per_bar;
  }
  constexpr int kPad = 4, kStepPx = 3;
  const int cell_w = S * kStepPx, cell_h = 128;
  Image img(static_cast<int>(cols) * (cell_w + kPad) + kPad, std::max(1, rows) * (cell_h + kPad) + kPad, {200, 200, 200});
  for (int r = 0; r < rows; ++r) {
    for (size_t c = 0; c < sets[r].views.size(); ++c) {
      const int x0 = kPad + static_cast<int>(c) * (cell_w + kPad);
      const int y0 = kPad + r * (cell_h + kPad);
      img.fill_rect(x0, y0, cell_w, cell_h, {255, 255, 255});
      const Rgb ink = c == 0 ? Rgb{30, 30, 30} : Rgb{33, 102, 172};
      for (const auto& n : sets[r].views[c].notes) {
        img.fill_rect(x0 + n.onset_step * kStepPx, y0 + (127 - n.pitch), n.duration_steps * kStepPx - 1, 1, ink);
      }
    }
  }
  return img;
}

int run_augment(const Common& common, const AugmentArgs& a) {
  RunConfig cfg = resolve(common);
  if (a.n_views) cfg.augment.n_views = *a.n_views;
  cfg.validate();
  const fs::path out = out_or(a.out, cfg, "datasets/views");
  RunLog log(out);
  write_snapshot(out, cfg, "augment-preview", {{"data", a.data}, {"out", out.string()}, {"preview", a.preview}});

  const auto chunks = read_chunks_jsonl(a.data);
  const auto sets = make_view_corpus(chunks, cfg.augment);
  write_viewsets_jsonl(out / "viewsets.jsonl", sets);
  write_png(out / "preview.png", contact_sheet(sets, a.preview));
  log("wrote " + std::to_string(sets.size()) + " view sets of " + std::to_string(cfg.augment.n_views + 1) +
      " views to " + (out / "viewsets.jsonl").string());
  return 0;
}

// ---------------------------------------------------------------- pretrain / finetune

struct TrainArgs {
  std::string data;
  std::string labels;
  std::string views;
  std::string checkpoint;
  std::string resume;
  std::string method;
  std::string out;
  std::optional<long> steps;
  std::optional<int> batch_size;
  std::optional<double> lr;
  std::optional<long> checkpoint_every;
  bool scratch = false;
  bool freeze_encoder = false;
  bool add_view_positives = false;
};

void apply_train_flags(RunConfig& cfg, const TrainArgs& a) {
  if (!a.method.empty()) cfg.train.method = method_from_name(a.method);
  if (a.steps) cfg.train.max_steps = *a.steps;
  if (a.batch_size) cfg.train.batch_size = *a.batch_size;
  if (a.lr) cfg.train.learning_rate = *a.lr;
  if (a.checkpoint_every) cfg.train.checkpoint_every = *a.checkpoint_every;
  if (a.freeze_encoder) cfg.train.freeze_encoder = true;
  if (a.add_view_positives) cfg.train.add_view_positives = true;
}

int train_and_report(RunConfig& cfg, const TrainingData& data, const fs::path& out, RunLog& log, const TrainArgs& a,
                     const std::string& command) {
  cfg.train.checkpoint_out = out / "model.ckpt";
  cfg.train.metrics_path = out / "metrics.csv";
  if (!a.resume.empty()) {
    cfg.train.checkpoint_in = a.resume;
    cfg.train.resume = true;
  } else if (!a.checkpoint.empty()) {
    cfg.train.checkpoint_in = a.checkpoint;
  }
  cfg.validate();
  write_snapshot(out, cfg, command,
                 {{"data", a.data}, {"labels", a.labels}, {"views", a.views}, {"checkpoint", a.checkpoint},
                  {"resume", a.resume}, {"out", out.string()}});

  ModelSetup setup{cfg.encoder, cfg.expander, cfg.triplet, cfg.vicreg, cfg.encoder_explicit};
  log(std::string(command) + ": stage " + stage_name(cfg.train.stage) + ", method " + method_name(cfg.train.method) +
      ", lr " + fmt(cfg.train.effective_learning_rate()) + ", " + std::to_string(cfg.train.max_steps) + " steps");
  const TrainResult r = run_training(data, cfg.train, setup);
  if (!r.history.empty()) {
    log("step 1 loss " + fmt(r.history.front().total) + ", step " + std::to_string(r.history.back().step) + " loss " +
        fmt(r.history.back().total));
  }
  if (r.warnings > 0) log(std::to_string(r.warnings) + " sampling warnings");
  log("checkpoint " + cfg.train.checkpoint_out->string());
  return 0;
}

int run_pretrain(const Common& common, const TrainArgs& a) {
  RunConfig cfg = resolve(common);
  cfg.train.stage = Stage::Pretrain;
  apply_train_flags(cfg, a);
  const fs::path out = out_or(a.out, cfg, fs::path("checkpoints") / ("pretrain_" + std::string(method_name(cfg.train.method))));
  RunLog log(out);
  const auto views = read_viewsets_jsonl(a.data);
  TrainingData data{&views, {}};
  return train_and_report(cfg, data, out, log, a, "pretrain");
}

int run_finetune(const Common& common, const TrainArgs& a) {
  RunConfig cfg = resolve(common);
  cfg.train.stage = a.scratch ? Stage::Scratch : Stage::Finetune;
  apply_train_flags(cfg, a);
  if (!a.scratch && a.checkpoint.empty() && a.resume.empty()) {
    throw ConfigError("finetune needs --checkpoint (a pretrained model) unless --scratch is given");
  }
  if (a.scratch && !a.checkpoint.empty()) throw ConfigError("--scratch and --checkpoint are mutually exclusive");
  const std::string name = std::string(a.scratch ? "scratch_" : "finetune_") + method_name(cfg.train.method);
  const fs::path out = out_or(a.out, cfg, fs::path("checkpoints") / name);
  RunLog log(out);
  const auto chunks = read_chunks_jsonl(a.data);
  const auto labels = read_labels_jsonl(a.labels);
  std::vector<ViewSet> views;
  if (!a.views.empty()) views = read_viewsets_jsonl(a.views);
  TrainingData data{views.empty() ? nullptr : &views, {&chunks, &labels}};
  return train_and_report(cfg, data, out, log, a, a.scratch ? "finetune --scratch" : "finetune");
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  std::string suite;
  std::vector<std::string> checkpoints;
  bool ibpr = false;
  bool random = false;
  std::string data;
  std::string labels;
  std::string out;
  std::optional<int> k_max;
};

int run_eval(const Common& common, const EvalArgs& a) {
  RunConfig cfg = resolve(common);
  if (a.k_max) cfg.eval.k_max = *a.k_max;
  cfg.validate();
  const Suite suite = suite_from_name(a.suite);
  const fs::path out = out_or(a.out, cfg, fs::path("reports") / ("suite_" + a.suite));
  RunLog log(out);
  write_snapshot(out, cfg, "eval",
                 {{"suite", a.suite}, {"checkpoints", a.checkpoints}, {"ibpr", a.ibpr}, {"random", a.random},
                  {"data", a.data}, {"labels", a.labels}, {"out", out.string()}});

  std::vector<MethodSpec> methods;
  for (const auto& spec : a.checkpoints) {
    const auto eq = spec.find('=');
    MethodSpec m;
    m.kind = MethodSpec::Kind::Checkpoint;
    m.checkpoint = eq == std::string::npos ? spec : spec.substr(eq + 1);
    m.name = eq == std::string::npos ? fs::path(spec).parent_path().filename().string() : spec.substr(0, eq);
    if (m.name.empty()) m.name = fs::path(spec).stem().string();
    methods.push_back(m);
  }
  if (a.ibpr) methods.push_back({"ibpr", MethodSpec::Kind::Ibpr, std::nullopt});
  if (a.random) methods.push_back({"random", MethodSpec::Kind::Random, std::nullopt});

  std::vector<ViewSet> views;
  std::vector<PianoRollChunk> chunks;
  std::vector<MotifLabel> labels;
  SuiteInputs inputs;
  if (suite == Suite::A) {
    views = read_viewsets_jsonl(a.data);
    inputs.views = &views;
  } else {
    if (a.labels.empty()) throw ConfigError("--labels is required for suites b, c and d");
    chunks = read_chunks_jsonl(a.data);
    labels = read_labels_jsonl(a.labels);
    inputs.chunks = &chunks;
    inputs.labels = &labels;
  }
  const SuiteResult r = run_experiment_suite(suite, methods, inputs, {cfg.eval.k_max, cfg.eval.random_dim, cfg.seed});
  write_suite_outputs(r, out);
  for (const auto& m : r.reports) {
    log(m.name + ": AUC-PR " + fmt(m.report.auc_pr) + " over " + std::to_string(m.report.n_anchors) + " anchors" +
        (m.report.degenerate ? " (degenerate: all distances equal)" : ""));
  }
  log("report " + (out / "report.json").string());
  return 0;
}

// ---------------------------------------------------------------- visualize

struct VizArgs {
  std::string checkpoint;
  std::string data;
  std::string song;
  std::string out;
  std::optional<double> eps;
  std::optional<int> min_pts;
  bool row_normalize = false;
};

int run_visualize(const Common& common, const VizArgs& a) {
  RunConfig cfg = resolve(common);
  if (a.eps) cfg.viz.dbscan.eps = *a.eps;
  if (a.min_pts) cfg.viz.dbscan.min_pts = *a.min_pts;
  if (a.row_normalize) cfg.viz.row_normalize = true;
  cfg.validate();
  const fs::path out = out_or(a.out, cfg, fs::path("figures") / a.song);
  RunLog log(out);
  write_snapshot(out, cfg, "visualize",
                 {{"checkpoint", a.checkpoint}, {"data", a.data}, {"song", a.song}, {"out", out.string()}});

  std::vector<PianoRollChunk> song;
  for (auto& c : read_chunks_jsonl(a.data)) {
    if (c.song_id == a.song) song.push_back(std::move(c));
  }
  if (song.empty()) throw ConfigError("--song: no chunks for song '" + a.song + "' in " + a.data);
  std::stable_sort(song.begin(), song.end(), [](const auto& x, const auto& y) { return x.bar_index < y.bar_index; });

  const Model model = model_from_checkpoint(load_checkpoint(a.checkpoint));
  const Mat z = model.encode(song);
  Warnings warnings;
  const ClusterAssignment assignment = cluster_motifs(z, cfg.viz.dbscan, &warnings);
  const StructureMap map = structure_map(z, assignment);
  RenderOptions ro;
  ro.row_normalize = cfg.viz.row_normalize;
  render_outputs(map, song, assignment, out, ro, &warnings);
  for (const auto& w : warnings.messages()) log("warning: " + w);
  log(std::to_string(assignment.centers.size()) + " clusters over " + std::to_string(song.size()) + " bars (eps " +
      fmt(assignment.eps) + ")");
  return 0;
}

// ---------------------------------------------------------------- synth-fixtures

struct SynthArgs {
  std::string out;
  int origins = 50;
  int heldout = 100;
  int labeled_songs = 20;
  int eval_songs = 10;
  bool midi = false;
};

void export_midi(const std::vector<Song>& songs, const fs::path& dir) {
  fs::create_directories(dir);
  for (const auto& s : songs) {
    const auto bytes = write_midi(s);
    std::ofstream f(dir / (s.song_id + ".mid"), std::ios::binary | std::ios::trunc);
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  }
}

int run_synth(const Common& common, const SynthArgs& a) {
  RunConfig cfg = resolve(common);
  cfg.validate();
  const fs::path out = out_or(a.out, cfg, "datasets/synth");
  RunLog log(out);
  write_snapshot(out, cfg, "synth-fixtures",
                 {{"out", out.string()}, {"origins", a.origins}, {"heldout", a.heldout},
                  {"labeled_songs", a.labeled_songs}, {"eval_songs", a.eval_songs}, {"midi", a.midi}});
  const int S = cfg.ingest.steps_per_bar;

  PretrainFixtureConfig pc;
  pc.n_origins = a.origins;
  pc.steps_per_bar = S;
  pc.seed = cfg.seed;
  const auto pretrain_songs = synth_pretrain_songs(pc);
  const auto pretrain_chunks = chunk_synthetic(pretrain_songs, S);
  write_chunks_jsonl(out / "pretrain_chunks.jsonl", pretrain_chunks);
  write_viewsets_jsonl(out / "pretrain_views.jsonl", make_view_corpus(pretrain_chunks, cfg.augment));

  pc.n_origins = a.heldout;
  pc.song_prefix = "held";
  const auto heldout_songs = synth_pretrain_songs(pc);
  write_viewsets_jsonl(out / "heldout_views.jsonl", make_view_corpus(chunk_synthetic(heldout_songs, S), cfg.augment));

  LabeledFixtureConfig lc;
  lc.n_songs = a.labeled_songs;
  lc.steps_per_bar = S;
  lc.seed = cfg.seed;
  const auto train_songs = synth_labeled_songs(lc);
  const auto train = build_labeled_dataset(train_songs, {TrackRole::Accompaniment}, S);
  write_chunks_jsonl(out / "finetune_chunks.jsonl", train.chunks);
  write_labels_jsonl(out / "finetune_labels.jsonl", train.labels);
  write_viewsets_jsonl(out / "finetune_views.jsonl", make_view_corpus(train.chunks, cfg.augment));

  lc.n_songs = a.eval_songs;
  lc.song_prefix = "evl";
  const auto eval_songs = synth_labeled_songs(lc);
  const auto eval = build_labeled_dataset(eval_songs, {TrackRole::Accompaniment}, S);
  write_chunks_jsonl(out / "eval_chunks.jsonl", eval.chunks);
  write_labels_jsonl(out / "eval_labels.jsonl", eval.labels);

  if (a.midi) {
    export_midi(pretrain_songs, out / "midi" / "pretrain");
    export_midi(train_songs, out / "midi" / "finetune");
    export_midi(eval_songs, out / "midi" / "eval");
  }
  write_json(out / "manifest.json", {{"pretrain_origins", pretrain_chunks.size()},
                                     {"heldout_songs", heldout_songs.size()},
                                     {"finetune_songs", train_songs.size()},
                                     {"finetune_labels", train.labels.size()},
                                     {"eval_songs", eval_songs.size()},
                                     {"eval_labels", eval.labels.size()},
                                     {"seed", cfg.seed}});
  log("fixtures written to " + out.string());
  return 0;
}

const char* category(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return "config";
  if (dynamic_cast<const ParseError*>(&e)) return "parse";
  if (dynamic_cast<const DomainError*>(&e)) return "domain";
  if (dynamic_cast<const SamplingError*>(&e)) return "sampling";
  if (dynamic_cast<const CheckpointError*>(&e)) return "checkpoint";
  if (dynamic_cast<const EvaluationError*>(&e)) return "evaluation";
  if (dynamic_cast<const TrainingError*>(&e)) return "training";
  if (dynamic_cast<const std::filesystem::filesystem_error*>(&e)) return "io";
  return "internal";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Motif representation learning for symbolic music: ingest, augment, train, evaluate, visualize."};
  app.require_subcommand(1);
  Common common;

  IngestArgs ingest;
  auto* s_ingest = app.add_subcommand("ingest", "parse MIDI files into bar chunks and motif labels");
  add_common(s_ingest, common);
  s_ingest->add_option("--midi", ingest.midi, "MIDI files or directories")->required();
  s_ingest->add_option("--labels-csv", ingest.labels_csv, "external labels (song_id,bar_index,motif_id)")->check(CLI::ExistingFile);
  s_ingest->add_option("--out", ingest.out, "output directory");
  s_ingest->add_option("--steps-per-bar", ingest.steps_per_bar, "time steps per bar");

  AugmentArgs augment;
  auto* s_aug = app.add_subcommand("augment-preview", "build augmented view sets and a preview contact sheet");
  add_common(s_aug, common);
  s_aug->add_option("--data", augment.data, "chunks JSONL")->required()->check(CLI::ExistingFile);
  s_aug->add_option("--out", augment.out, "output directory");
  s_aug->add_option("--preview", augment.preview, "origins shown in preview.png");
  s_aug->add_option("--views", augment.n_views, "augmented views per origin");

  TrainArgs pre;
  auto* s_pre = app.add_subcommand("pretrain", "self-supervised pretraining on view sets");
  add_common(s_pre, common);
  s_pre->add_option("--data", pre.data, "view sets JSONL")->required()->check(CLI::ExistingFile);
  s_pre->add_option("--method", pre.method, "vicreg, cl or necl");
  s_pre->add_option("--out", pre.out, "output directory");
  s_pre->add_option("--steps", pre.steps, "total optimization steps");
  s_pre->add_option("--batch-size", pre.batch_size);
  s_pre->add_option("--lr", pre.lr, "learning rate");
  s_pre->add_option("--checkpoint-every", pre.checkpoint_every);
  s_pre->add_option("--resume", pre.resume, "continue from a checkpoint of this run")->check(CLI::ExistingFile);

  TrainArgs fin;
  auto* s_fin = app.add_subcommand("finetune", "train on labeled motif occurrences");
  add_common(s_fin, common);
  s_fin->add_option("--data", fin.data, "chunks JSONL")->required()->check(CLI::ExistingFile);
  s_fin->add_option("--labels", fin.labels, "labels JSONL")->required()->check(CLI::ExistingFile);
  s_fin->add_option("--checkpoint", fin.checkpoint, "pretrained checkpoint")->check(CLI::ExistingFile);
  s_fin->add_flag("--scratch", fin.scratch, "train from random initialization");
  s_fin->add_option("--method", fin.method, "vicreg, cl or necl");
  s_fin->add_option("--out", fin.out, "output directory");
  s_fin->add_option("--steps", fin.steps, "total optimization steps");
  s_fin->add_option("--batch-size", fin.batch_size);
  s_fin->add_option("--lr", fin.lr, "learning rate");
  s_fin->add_option("--checkpoint-every", fin.checkpoint_every);
  s_fin->add_option("--resume", fin.resume, "continue from a checkpoint of this run")->check(CLI::ExistingFile);
  s_fin->add_flag("--freeze-encoder", fin.freeze_encoder, "keep Transformer layers fixed");
  s_fin->add_option("--views", fin.views, "view sets JSONL for --add-view-positives")->check(CLI::ExistingFile);
  s_fin->add_flag("--add-view-positives", fin.add_view_positives, "draw half of each batch from --views");

  EvalArgs ev;
  auto* s_eval = app.add_subcommand("eval", "retrieval evaluation (suites a-d)");
  add_common(s_eval, common);
  s_eval->add_option("--suite", ev.suite, "a, b, c or d")->required();
  s_eval->add_option("--checkpoint", ev.checkpoints, "checkpoint, optionally name=path (repeatable)");
  s_eval->add_flag("--ibpr", ev.ibpr, "include the interval-based piano roll baseline");
  s_eval->add_flag("--random", ev.random, "include a random-embedding baseline");
  s_eval->add_option("--data", ev.data, "view sets (suite a) or chunks JSONL")->required()->check(CLI::ExistingFile);
  s_eval->add_option("--labels", ev.labels, "labels JSONL (suites b-d)")->check(CLI::ExistingFile);
  s_eval->add_option("--out", ev.out, "output directory");
  s_eval->add_option("--k-max", ev.k_max, "largest K in the sweep");

  VizArgs viz;
  auto* s_viz = app.add_subcommand("visualize", "cluster one song's bars and render its motif structure");
  add_common(s_viz, common);
  s_viz->add_option("--checkpoint", viz.checkpoint)->required()->check(CLI::ExistingFile);
  s_viz->add_option("--data", viz.data, "chunks JSONL")->required()->check(CLI::ExistingFile);
  s_viz->add_option("--song", viz.song, "song id")->required();
  s_viz->add_option("--out", viz.out, "output directory");
  s_viz->add_option("--eps", viz.eps, "DBSCAN radius (default: automatic)");
  s_viz->add_option("--min-pts", viz.min_pts, "DBSCAN density threshold");
  s_viz->add_flag("--row-normalize", viz.row_normalize, "scale each heatmap row to [0, 1]");

  SynthArgs synth;
  auto* s_synth = app.add_subcommand("synth-fixtures", "generate deterministic synthetic corpora");
  add_common(s_synth, common);
  s_synth->add_option("--out", synth.out, "output directory");
  s_synth->add_option("--origins", synth.origins, "pretraining origins");
  s_synth->add_option("--heldout", synth.heldout, "held-out origins for suite a");
  s_synth->add_option("--labeled-songs", synth.labeled_songs, "labeled fine-tuning songs");
  s_synth->add_option("--eval-songs", synth.eval_songs, "labeled evaluation songs");
  s_synth->add_flag("--midi", synth.midi, "also export the songs as MIDI files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (s_ingest->parsed()) return run_ingest(common, ingest);
    if (s_aug->parsed()) return run_augment(common, augment);
    if (s_pre->parsed()) return run_pretrain(common, pre);
    if (s_fin->parsed()) return run_finetune(common, fin);
    if (s_eval->parsed()) return run_eval(common, ev);
    if (s_viz->parsed()) return run_visualize(common, viz);
    if (s_synth->parsed()) return run_synth(common, synth);
  } catch (const std::exception& e) {
    std::cerr << "error [" << category(e) << "]: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

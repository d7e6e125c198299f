#include "motif/experiments.h"

#include <algorithm>
#include <set>

#include "motif/checkpoint.h"
#include "motif/dataset_io.h"
#include "motif/errors.h"
#include "motif/image.h"

namespace motif {

char suite_letter(Suite s) { return static_cast<char>('a' + static_cast<int>(s)); }

Suite suite_from_name(const std::string& name) {
  if (name.size() == 1 && name[0] >= 'a' && name[0] <= 'd') return static_cast<Suite>(name[0] - 'a');
  throw ConfigError("unknown suite '" + name + "' (expected a, b, c or d)");
}

namespace {

const char* required_stage(Suite s) {
  switch (s) {
    case Suite::A:
    case Suite::B: return "pretrain";
    case Suite::C: return "scratch";
    case Suite::D: return "finetune";
  }
  return "";
}

const char* build_hint(Suite s) {
  switch (s) {
    case Suite::A:
    case Suite::B: return "run `motif pretrain` first";
    case Suite::C: return "run `motif finetune --scratch` first";
    case Suite::D: return "run `motif pretrain` then `motif finetune` first";
  }
  return "";
}

void check_inputs(Suite suite, const std::vector<MethodSpec>& methods, const SuiteInputs& in) {
  std::vector<std::string> missing;
  if (suite == Suite::A && (!in.views || in.views->empty())) missing.push_back("held-out view sets (`motif augment-preview` or `synth-fixtures`)");
  if (suite != Suite::A && (!in.chunks || !in.labels)) missing.push_back("labeled dataset (`motif ingest` or `synth-fixtures`)");
  if (methods.empty()) missing.push_back("at least one method");
  std::set<std::string> names;
  for (const auto& m : methods) {
    if (!names.insert(m.name).second) throw ConfigError("duplicate method name '" + m.name + "'");
    if (m.kind != MethodSpec::Kind::Checkpoint) continue;
    if (!m.checkpoint || !std::filesystem::exists(*m.checkpoint)) {
      missing.push_back(std::string(required_stage(suite)) + " checkpoint for '" + m.name + "'" +
                        (m.checkpoint ? " at " + m.checkpoint->string() : std::string()) + " (" + build_hint(suite) + ")");
    }
  }
  if (!missing.empty()) {
    std::string msg = std::string("suite ") + suite_letter(suite) + " is missing artifacts:";
    for (const auto& m : missing) msg += "\n  - " + m;
    throw EvaluationError(msg);
  }
}

}  // namespace

SuiteResult run_experiment_suite(Suite suite, const std::vector<MethodSpec>& methods, const SuiteInputs& inputs,
                                 const SuiteOptions& options) {
  check_inputs(suite, methods, inputs);

  std::vector<PianoRollChunk> items;
  std::vector<std::optional<std::string>> keys;
  if (suite == Suite::A) {
    for (const auto& vs : *inputs.views) items.insert(items.end(), vs.views.begin(), vs.views.end());
    keys = keys_by_origin(items);
  } else {
    items = *inputs.chunks;
    keys = keys_by_label(items, *inputs.labels);
  }

  SuiteResult result;
  result.suite = suite;
  std::optional<std::vector<int>> grid;
  for (const auto& m : methods) {
    EmbeddedCorpus corpus;
    switch (m.kind) {
      case MethodSpec::Kind::Ibpr: corpus = embed_corpus_ibpr(items, keys); break;
      case MethodSpec::Kind::Random: corpus = embed_corpus_random(items, options.random_dim, options.seed, keys); break;
      case MethodSpec::Kind::Checkpoint: {
        const Checkpoint ck = load_checkpoint(*m.checkpoint);
        const std::string stage = ck.meta.value("stage", std::string("unknown"));
        if (stage != required_stage(suite)) {
          throw EvaluationError(std::string("suite ") + suite_letter(suite) + " expects a " + required_stage(suite) +
                                " checkpoint but '" + m.name + "' (" + m.checkpoint->string() + ") is a " + stage +
                                " checkpoint");
        }
        corpus = embed_corpus(items, model_from_checkpoint(ck), keys);
        break;
      }
    }
    if (!grid) {
      RetrievalReport full = retrieval_pr(corpus);
      grid = full.k_values;
      if (options.k_max) {
        const int limit = std::min<int>(*options.k_max, static_cast<int>(items.size()) - 1);
        grid->clear();
        for (int k = 1; k <= limit; ++k) grid->push_back(k);
      }
    }
    result.reports.push_back({m.name, retrieval_pr(corpus, grid)});
  }
  return result;
}

double relative_improvement(double auc_new, double auc_base) {
  if (auc_base == 0.0) throw DomainError("relative improvement over a zero baseline");
  return (auc_new - auc_base) / auc_base;
}

nlohmann::json suite_to_json(const SuiteResult& r) {
  nlohmann::json methods = nlohmann::json::array();
  for (const auto& m : r.reports) methods.push_back({{"name", m.name}, {"report", report_to_json(m.report)}});
  return {{"suite", std::string(1, suite_letter(r.suite))}, {"methods", methods}};
}

void write_suite_outputs(const SuiteResult& r, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  write_json(out_dir / "report.json", suite_to_json(r));
  std::vector<Curve> curves;
  for (const auto& m : r.reports) {
    write_curve_csv(out_dir / ("curve_" + m.name + ".csv"), m.report);
    curves.push_back({m.name, m.report.mean_recall, m.report.mean_precision});
  }
  write_curve_svg(out_dir / "pr_curve.svg", curves, "recall", "precision");
}

}  // namespace motif

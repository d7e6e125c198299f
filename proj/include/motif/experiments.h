#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "motif/retrieval.h"
#include "motif/types.h"

namespace motif {

enum class Suite { A, B, C, D };

char suite_letter(Suite s);
Suite suite_from_name(const std::string& name);

struct MethodSpec {
  enum class Kind { Checkpoint, Ibpr, Random };
  std::string name;
  Kind kind = Kind::Checkpoint;
  std::optional<std::filesystem::path> checkpoint;
};

struct SuiteInputs {
  const std::vector<ViewSet>* views = nullptr;  // suite a: held-out view sets
  const std::vector<PianoRollChunk>* chunks = nullptr;  // suites b-d
  const std::vector<MotifLabel>* labels = nullptr;
};

struct SuiteOptions {
  std::optional<int> k_max;
  int random_dim = 32;
  uint64_t seed = 0;
};

struct MethodReport {
  std::string name;
  RetrievalReport report;
};

struct SuiteResult {
  Suite suite = Suite::A;
  std::vector<MethodReport> reports;  // in method order, all on the same K grid
};

/// Suite a needs pretrained checkpoints and held-out views (relevance = shared origin);
/// b pretrained, c scratch-trained and d fine-tuned checkpoints on labeled data
/// (relevance = shared song and motif). Checkpoint stages are read from their metadata.
SuiteResult run_experiment_suite(Suite suite, const std::vector<MethodSpec>& methods, const SuiteInputs& inputs,
                                 const SuiteOptions& options = {});

/// (auc_new - auc_base) / auc_base.
double relative_improvement(double auc_new, double auc_base);

nlohmann::json suite_to_json(const SuiteResult& r);
/// report.json, one curve_<method>.csv per method and pr_curve.svg.
void write_suite_outputs(const SuiteResult& r, const std::filesystem::path& out_dir);

}  // namespace motif

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "nade/corpus.hpp"
#include "nade/model.hpp"
#include "nade/random.hpp"

namespace nade {

enum class SelectionMetric { dev_ppl, dev_ir_precision };

std::string_view to_string(SelectionMetric m);
SelectionMetric parse_selection_metric(std::string_view s);

struct TrainConfig {
  double learning_rate = 0.001;
  int hidden_size = 50;
  int passes = 2000;
  Activation activation = Activation::sigmoid;
  bool scaling = false;
  std::uint64_t seed = 1;
  ModelKind model_kind = ModelKind::idocnade;
  OutputKind output_kind = OutputKind::tree;
  Objective objective = Objective::exact;
  SelectionMetric selection_metric = SelectionMetric::dev_ppl;
  double init_scale = 1.0;
  int eval_every = 100;
  double selection_fraction = 0.02;  // retrieval fraction for dev_ir_precision
  int threads = 1;                   // dev evaluation workers
  bool verbose = false;

  void validate() const;
};

struct DevEvaluation {
  int pass = 0;
  double metric = 0.0;
};

struct TrainingHistory {
  int passes_run = 0;
  int best_pass = 0;
  double best_metric = 0.0;
  std::vector<double> train_nll;  // mean per-document NLL, one per pass
  std::vector<DevEvaluation> dev;
};

struct Checkpoint {
  TrainConfig config;
  ModelParams params;
  Vocabulary vocab;
  TrainingHistory history;
};

// W, U ~ U[-init_scale/sqrt(H), init_scale/sqrt(H)], biases zero. The tree
// (tree mode) and the draws come from separate streams derived from `seed`.
ModelParams init_params(std::size_t K, std::size_t H, OutputKind output, std::uint64_t seed, double init_scale);
ModelParams init_params(std::size_t K, const TrainConfig& config);

struct PassStats {
  double mean_nll = 0.0;
  std::size_t documents = 0;
};

// One seeded-shuffled pass of per-document SGD.
PassStats sgd_pass(ModelParams& params, const std::vector<Document>& train, const TrainConfig& config, Rng& rng);

// Returns the checkpoint with the best dev metric among all evaluations,
// including the initial one at pass 0.
Checkpoint train(const Corpus& corpus, const TrainConfig& config);

struct GridResult {
  Checkpoint best;
  std::vector<double> learning_rates;
  std::vector<double> best_metrics;  // per learning rate
};

// Trains once per learning rate and keeps the best dev result.
GridResult train_grid(const Corpus& corpus, TrainConfig config, const std::vector<double>& learning_rates);

bool metric_improves(SelectionMetric metric, double candidate, double incumbent);

// Binary checkpoint plus `<path>.json` training-metadata sidecar.
void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

std::string config_to_json(const TrainConfig& config);
TrainConfig config_from_json(const std::string& text);
std::string history_to_json(const TrainingHistory& history);

}  // namespace nade

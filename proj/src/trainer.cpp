#include "nade/trainer.hpp"

#include <cmath>
#include <iostream>
#include <numeric>

#include <json.hpp>

#include "nade/error.hpp"
#include "nade/eval.hpp"

namespace nade {

using json = nlohmann::json;

std::string_view to_string(SelectionMetric m) {
  return m == SelectionMetric::dev_ppl ? "dev_ppl" : "dev_ir_precision";
}

SelectionMetric parse_selection_metric(std::string_view s) {
  if (s == "dev_ppl") return SelectionMetric::dev_ppl;
  if (s == "dev_ir_precision") return SelectionMetric::dev_ir_precision;
  throw Error("unknown selection metric '" + std::string(s) + "' (expected dev_ppl|dev_ir_precision)");
}

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) throw Error("learning rate must be a finite value >= 0");
  if (hidden_size < 1) throw Error("hidden size must be >= 1");
  if (passes < 0) throw Error("passes must be >= 0");
  if (eval_every < 1) throw Error("eval_every must be >= 1");
  if (!(init_scale >= 0.0)) throw Error("init_scale must be >= 0");
  if (!(selection_fraction > 0.0 && selection_fraction <= 1.0)) throw Error("selection fraction must lie in (0, 1]");
}

ModelParams init_params(std::size_t K, std::size_t H, OutputKind output, std::uint64_t seed, double init_scale) {
  if (K < 1 || H < 1) throw Error("init_params: K and H must be >= 1");
  const auto k = static_cast<Eigen::Index>(K);
  const auto h = static_cast<Eigen::Index>(H);
  ModelParams p;
  p.output = output;
  Eigen::Index rows = k;
  if (output == OutputKind::tree) {
    p.tree = std::make_shared<const WordTree>(build_tree(K, derive_rng(seed, "tree").next_u64()));
    rows = k - 1;
  }
  const double bound = init_scale / std::sqrt(static_cast<double>(H));
  Rng rng = derive_rng(seed, "init");
  p.W.resize(h, k);
  for (Eigen::Index v = 0; v < k; ++v)
    for (Eigen::Index j = 0; j < h; ++j) p.W(j, v) = rng.uniform(-bound, bound);
  p.U.resize(rows, h);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index j = 0; j < h; ++j) p.U(r, j) = rng.uniform(-bound, bound);
  p.b_fwd = Eigen::VectorXd::Zero(rows);
  p.b_bwd = Eigen::VectorXd::Zero(rows);
  p.c_fwd = Eigen::VectorXd::Zero(h);
  p.c_bwd = Eigen::VectorXd::Zero(h);
  return p;
}

ModelParams init_params(std::size_t K, const TrainConfig& config) {
  ModelParams p = init_params(K, static_cast<std::size_t>(config.hidden_size), config.output_kind, config.seed,
                              config.init_scale);
  p.activation = config.activation;
  p.scaling = config.scaling;
  return p;
}

PassStats sgd_pass(ModelParams& params, const std::vector<Document>& train, const TrainConfig& config, Rng& rng) {
  if (train.empty()) throw Error("training split is empty");
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);

  const DirectionWeights weights =
      config.model_kind == ModelKind::docnade ? DirectionWeights{1.0, 0.0} : DirectionWeights{0.5, 0.5};
  Gradients grads(params);
  PassStats stats;
  double total_nll = 0.0;
  for (std::size_t idx : order) {
    grads.clear();
    double objective = config.objective == Objective::pseudo
                           ? accumulate_pseudo_gradients(params, train[idx], 1.0, grads)
                           : accumulate_gradients(params, train[idx], weights, grads);
    if (!std::isfinite(objective) || !grads.all_finite())
      throw NumericalError("non-finite update at training document " + std::to_string(idx));
    apply_update(params, grads, config.learning_rate);
    total_nll -= objective;
  }
  stats.documents = train.size();
  stats.mean_nll = total_nll / static_cast<double>(train.size());
  return stats;
}

bool metric_improves(SelectionMetric metric, double candidate, double incumbent) {
  return metric == SelectionMetric::dev_ppl ? candidate < incumbent : candidate > incumbent;
}

namespace {

double dev_metric(const ModelParams& params, const TrainConfig& config, const std::vector<Document>& train,
                  const std::vector<Document>& dev) {
  if (config.selection_metric == SelectionMetric::dev_ppl)
    return perplexity(params, config.model_kind, dev, config.threads).perplexity;
  return retrieval_precision(params, config.model_kind, train, dev, {config.selection_fraction}, config.threads)
      .precision.front();
}

}  // namespace

Checkpoint train(const Corpus& corpus, const TrainConfig& config) {
  config.validate();
  const auto train_docs = corpus.documents_in(Split::train);
  const auto dev_docs = corpus.documents_in(Split::dev);
  if (train_docs.empty()) throw Error("training split is empty");
  if (dev_docs.empty() && config.passes > 0) throw Error("dev split is empty");

  Checkpoint best;
  best.config = config;
  best.vocab = corpus.vocab;
  best.params = init_params(corpus.vocab.size(), config);

  TrainingHistory history;
  ModelParams params = best.params;
  if (!dev_docs.empty()) {
    history.best_metric = dev_metric(params, config, train_docs, dev_docs);
    history.dev.push_back({0, history.best_metric});
  }
  history.best_pass = 0;

  Rng shuffle_rng = derive_rng(config.seed, "shuffle");
  for (int pass = 1; pass <= config.passes; ++pass) {
    PassStats stats = sgd_pass(params, train_docs, config, shuffle_rng);
    history.train_nll.push_back(stats.mean_nll);
    history.passes_run = pass;
    if (pass % config.eval_every == 0 || pass == config.passes) {
      double metric = dev_metric(params, config, train_docs, dev_docs);
      history.dev.push_back({pass, metric});
      if (config.verbose)
        std::cerr << "pass " << pass << " train_nll " << stats.mean_nll << " " << to_string(config.selection_metric)
                  << " " << metric << "\n";
      if (metric_improves(config.selection_metric, metric, history.best_metric)) {
        history.best_metric = metric;
        history.best_pass = pass;
        best.params = params;
      }
    }
  }
  best.history = std::move(history);
  return best;
}

GridResult train_grid(const Corpus& corpus, TrainConfig config, const std::vector<double>& learning_rates) {
  if (learning_rates.empty()) throw Error("empty learning-rate grid");
  GridResult result;
  bool have = false;
  for (double lr : learning_rates) {
    config.learning_rate = lr;
    Checkpoint ck = train(corpus, config);
    result.learning_rates.push_back(lr);
    result.best_metrics.push_back(ck.history.best_metric);
    if (!have || metric_improves(config.selection_metric, ck.history.best_metric, result.best.history.best_metric)) {
      result.best = std::move(ck);
      have = true;
    }
  }
  return result;
}

std::string config_to_json(const TrainConfig& c) {
  json j;
  j["learning_rate"] = c.learning_rate;
  j["hidden_size"] = c.hidden_size;
  j["passes"] = c.passes;
  j["activation"] = std::string(to_string(c.activation));
  j["scaling"] = c.scaling;
  j["seed"] = c.seed;
  j["model_kind"] = std::string(to_string(c.model_kind));
  j["output_kind"] = std::string(to_string(c.output_kind));
  j["objective"] = std::string(to_string(c.objective));
  j["selection_metric"] = std::string(to_string(c.selection_metric));
  j["init_scale"] = c.init_scale;
  j["eval_every"] = c.eval_every;
  j["selection_fraction"] = c.selection_fraction;
  return j.dump();
}

TrainConfig config_from_json(const std::string& text) {
  json j = json::parse(text);
  TrainConfig c;
  c.learning_rate = j.at("learning_rate").get<double>();
  c.hidden_size = j.at("hidden_size").get<int>();
  c.passes = j.at("passes").get<int>();
  c.activation = parse_activation(j.at("activation").get<std::string>());
  c.scaling = j.at("scaling").get<bool>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.model_kind = parse_model_kind(j.at("model_kind").get<std::string>());
  c.output_kind = parse_output_kind(j.at("output_kind").get<std::string>());
  c.objective = parse_objective(j.at("objective").get<std::string>());
  c.selection_metric = parse_selection_metric(j.at("selection_metric").get<std::string>());
  c.init_scale = j.at("init_scale").get<double>();
  c.eval_every = j.at("eval_every").get<int>();
  c.selection_fraction = j.at("selection_fraction").get<double>();
  return c;
}

std::string history_to_json(const TrainingHistory& h) {
  json j;
  j["passes_run"] = h.passes_run;
  j["best_pass"] = h.best_pass;
  j["best_metric"] = h.best_metric;
  j["train_nll"] = h.train_nll;
  json dev = json::array();
  for (const auto& e : h.dev) dev.push_back({{"pass", e.pass}, {"metric", e.metric}});
  j["dev"] = dev;
  return j.dump(2);
}

}  // namespace nade

#include <gtest/gtest.h>

#include <cmath>

#include "nade/error.hpp"
#include "nade/eval.hpp"
#include "nade/synthetic.hpp"
#include "nade/trainer.hpp"

namespace nade {
namespace {

Corpus small_corpus(std::uint64_t seed = 3) {
  SyntheticSpec spec;
  spec.words_per_topic = 10;
  spec.min_length = 5;
  spec.max_length = 10;
  spec.train = 40;
  spec.dev = 10;
  spec.test = 10;
  spec.seed = seed;
  auto s = generate_synthetic(spec);
  return assemble_corpus(s.train, s.dev, s.test, CorpusFormat{});
}

bool same_params(const ModelParams& a, const ModelParams& b) {
  return a.W == b.W && a.U == b.U && a.b_fwd == b.b_fwd && a.b_bwd == b.b_bwd && a.c_fwd == b.c_fwd &&
         a.c_bwd == b.c_bwd;
}

TEST(Init, DeterministicAndBounded) {
  auto a = init_params(30, 6, OutputKind::tree, 11, 1.0);
  auto b = init_params(30, 6, OutputKind::tree, 11, 1.0);
  auto c = init_params(30, 6, OutputKind::tree, 12, 1.0);
  EXPECT_TRUE(same_params(a, b));
  EXPECT_EQ(*a.tree, *b.tree);
  EXPECT_FALSE(same_params(a, c));
  const double bound = 1.0 / std::sqrt(6.0);
  EXPECT_LE(a.W.cwiseAbs().maxCoeff(), bound);
  EXPECT_LE(a.U.cwiseAbs().maxCoeff(), bound);
  EXPECT_EQ(a.b_fwd.squaredNorm() + a.c_fwd.squaredNorm() + a.b_bwd.squaredNorm() + a.c_bwd.squaredNorm(), 0.0);
}

TEST(Init, Shapes) {
  auto t = init_params(2000, 200, OutputKind::tree, 1, 1.0);
  EXPECT_EQ(t.W.rows(), 200);
  EXPECT_EQ(t.W.cols(), 2000);
  EXPECT_EQ(t.U.rows(), 1999);
  EXPECT_EQ(t.U.cols(), 200);
  EXPECT_EQ(t.b_fwd.size(), 1999);
  EXPECT_EQ(t.c_fwd.size(), 200);
  auto f = init_params(50, 8, OutputKind::flat, 1, 1.0);
  EXPECT_EQ(f.U.rows(), 50);
  EXPECT_EQ(f.b_bwd.size(), 50);
}

TEST(Sgd, ZeroLearningRateLeavesParamsUnchanged) {
  Corpus c = small_corpus();
  TrainConfig cfg;
  cfg.hidden_size = 4;
  cfg.learning_rate = 0.0;
  auto p = init_params(c.vocab.size(), cfg);
  auto before = p;
  Rng rng(1);
  sgd_pass(p, c.documents_in(Split::train), cfg, rng);
  EXPECT_TRUE(same_params(p, before));
}

TEST(Sgd, SmallStepDecreasesDocumentNll) {
  Corpus c = small_corpus();
  for (auto kind : {ModelKind::docnade, ModelKind::idocnade}) {
    for (auto out : {OutputKind::tree, OutputKind::flat}) {
      TrainConfig cfg;
      cfg.hidden_size = 5;
      cfg.model_kind = kind;
      cfg.output_kind = out;
      cfg.learning_rate = 1e-3;
      auto p = init_params(c.vocab.size(), cfg);
      const Document d = c.documents_in(Split::train).front();
      const double before = loglik(p, d, kind);
      Rng rng(1);
      sgd_pass(p, {d}, cfg, rng);
      EXPECT_GT(loglik(p, d, kind), before);
    }
  }
}

TEST(Train, SameSeedSameResult) {
  Corpus c = small_corpus();
  TrainConfig cfg;
  cfg.hidden_size = 4;
  cfg.passes = 5;
  cfg.eval_every = 2;
  cfg.learning_rate = 0.01;
  auto a = train(c, cfg);
  auto b = train(c, cfg);
  EXPECT_TRUE(same_params(a.params, b.params));
  EXPECT_EQ(a.history.train_nll, b.history.train_nll);
  cfg.seed = 2;
  EXPECT_FALSE(same_params(a.params, train(c, cfg).params));
}

TEST(Train, ZeroPassesReturnsInitialParameters) {
  Corpus c = small_corpus();
  TrainConfig cfg;
  cfg.hidden_size = 4;
  cfg.passes = 0;
  auto ck = train(c, cfg);
  EXPECT_TRUE(same_params(ck.params, init_params(c.vocab.size(), cfg)));
  EXPECT_EQ(ck.history.best_pass, 0);
  EXPECT_EQ(ck.vocab, c.vocab);
}

TEST(Train, ReturnedCheckpointHasBestDevMetric) {
  Corpus c = small_corpus();
  TrainConfig cfg;
  cfg.hidden_size = 6;
  cfg.passes = 12;
  cfg.eval_every = 3;
  cfg.learning_rate = 0.05;
  auto ck = train(c, cfg);
  ASSERT_GE(ck.history.dev.size(), 2u);
  EXPECT_EQ(ck.history.dev.front().pass, 0);
  EXPECT_EQ(ck.history.dev.back().pass, 12);
  for (const auto& e : ck.history.dev) EXPECT_LE(ck.history.best_metric, e.metric);
  const double dev_ppl = perplexity(ck.params, cfg.model_kind, c.documents_in(Split::dev)).perplexity;
  EXPECT_DOUBLE_EQ(dev_ppl, ck.history.best_metric);
}

TEST(Train, IrSelectionMetricPrefersHigher) {
  EXPECT_TRUE(metric_improves(SelectionMetric::dev_ir_precision, 0.6, 0.5));
  EXPECT_FALSE(metric_improves(SelectionMetric::dev_ppl, 60, 50));
  Corpus c = small_corpus();
  TrainConfig cfg;
  cfg.hidden_size = 4;
  cfg.passes = 4;
  cfg.eval_every = 2;
  cfg.selection_metric = SelectionMetric::dev_ir_precision;
  auto ck = train(c, cfg);
  for (const auto& e : ck.history.dev) EXPECT_GE(ck.history.best_metric, e.metric);
}

TEST(Train, GridKeepsBestLearningRate) {
  Corpus c = small_corpus();
  TrainConfig cfg;
  cfg.hidden_size = 4;
  cfg.passes = 6;
  cfg.eval_every = 3;
  auto g = train_grid(c, cfg, {0.0, 0.05});
  ASSERT_EQ(g.best_metrics.size(), 2u);
  EXPECT_EQ(g.best.history.best_metric, std::min(g.best_metrics[0], g.best_metrics[1]));
}

TEST(Train, RejectsInvalidConfig) {
  Corpus c = small_corpus();
  TrainConfig cfg;
  cfg.hidden_size = 0;
  EXPECT_THROW(train(c, cfg), Error);
  cfg.hidden_size = 3;
  cfg.learning_rate = -1;
  EXPECT_THROW(train(c, cfg), Error);
}

TEST(Train, DivergenceReportsNumericalError) {
  Corpus c = small_corpus();
  TrainConfig cfg;
  cfg.hidden_size = 4;
  cfg.passes = 3;
  cfg.output_kind = OutputKind::flat;
  cfg.learning_rate = 1e308;
  EXPECT_THROW(train(c, cfg), NumericalError);
}

TEST(Config, JsonRoundTrip) {
  TrainConfig cfg;
  cfg.learning_rate = 0.0123;
  cfg.hidden_size = 17;
  cfg.model_kind = ModelKind::docnade;
  cfg.output_kind = OutputKind::flat;
  cfg.activation = Activation::tanh;
  cfg.objective = Objective::pseudo;
  cfg.scaling = true;
  cfg.seed = 987654321987ULL;
  auto back = config_from_json(config_to_json(cfg));
  EXPECT_EQ(config_to_json(back), config_to_json(cfg));
  EXPECT_EQ(back.seed, cfg.seed);
  EXPECT_EQ(back.learning_rate, cfg.learning_rate);
}

}  // namespace
}  // namespace nade

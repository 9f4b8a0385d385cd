#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "nade/error.hpp"
#include "nade/eval.hpp"
#include "nade/trainer.hpp"
#include "oracles.hpp"

namespace nade {
namespace {

Document doc_of(std::vector<WordId> w, std::vector<int> labels = {}) { return Document{std::move(w), std::move(labels)}; }

TEST(Perplexity, ClosedFormForUniformTree) {
  // zero tree model over K=8 scores every word at exactly log(1/8)
  ModelParams p = init_params(8, 3, OutputKind::tree, 1, 0.0);
  std::vector<Document> docs = {doc_of({0, 1, 2}), doc_of({7}), doc_of({3, 3, 3, 3, 5})};
  auto r = perplexity(p, ModelKind::idocnade, docs);
  EXPECT_DOUBLE_EQ(r.perplexity, 8.0);
  EXPECT_EQ(r.documents, 3u);
}

TEST(Perplexity, ZeroFlatModelEqualsK) {
  for (std::size_t K : {5u, 10u, 37u}) {
    ModelParams p = init_params(K, 4, OutputKind::flat, 2, 0.0);
    Rng rng(K);
    std::vector<Document> docs;
    for (int i = 0; i < 10; ++i) docs.push_back(oracle::random_doc(K, 1 + rng.index(15), rng));
    for (auto kind : {ModelKind::docnade, ModelKind::idocnade})
      EXPECT_DOUBLE_EQ(perplexity(p, kind, docs).perplexity, static_cast<double>(K));
  }
}

TEST(Perplexity, ThreadCountDoesNotChangeResult) {
  Rng rng(3);
  ModelParams p = oracle::random_params(20, 5, OutputKind::tree, rng);
  std::vector<Document> docs;
  for (int i = 0; i < 25; ++i) docs.push_back(oracle::random_doc(20, 1 + rng.index(20), rng));
  EXPECT_EQ(perplexity(p, ModelKind::idocnade, docs, 1).perplexity,
            perplexity(p, ModelKind::idocnade, docs, 4).perplexity);
}

TEST(Perplexity, VocabularyMismatchIsCompatibilityError) {
  Checkpoint ck;
  ck.vocab = Vocabulary({"a", "b", "c"});
  ck.params = init_params(3, 2, OutputKind::flat, 1, 0.0);
  Corpus c;
  c.vocab = Vocabulary({"a", "b", "d"});
  c.documents = {doc_of({0, 1})};
  c.splits = {Split::test};
  EXPECT_THROW(perplexity(ck, c, Split::test), CompatibilityError);
  c.vocab = ck.vocab;
  c.rejected[static_cast<int>(Split::test)] = 2;
  auto r = perplexity(ck, c, Split::test);
  EXPECT_DOUBLE_EQ(r.perplexity, 3.0);
  EXPECT_EQ(r.excluded, 2u);
}

TEST(Retrieval, AllSameLabelGivesOne) {
  std::vector<Eigen::VectorXd> db = {Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1), Eigen::Vector2d(1, 1)};
  std::vector<Eigen::VectorXd> q = {Eigen::Vector2d(1, 0.2)};
  auto r = retrieval_precision(db, {{0}, {0}, {0}}, q, {{0}}, {0.1, 0.5, 1.0});
  for (double p : r.precision) EXPECT_EQ(p, 1.0);
}

TEST(Retrieval, HalfOfTwoRetrieved) {
  // two nearest docs carry labels {A} and {B}; query is A
  std::vector<Eigen::VectorXd> db = {Eigen::Vector2d(1, 0.1), Eigen::Vector2d(1, -0.1), Eigen::Vector2d(-1, 0)};
  std::vector<Eigen::VectorXd> q = {Eigen::Vector2d(1, 0)};
  auto r = retrieval_precision(db, {{0}, {1}, {0}}, q, {{0}}, {2.0 / 3.0});
  EXPECT_DOUBLE_EQ(r.precision[0], 0.5);
}

TEST(Retrieval, MultiLabelAveragesOverQueryLabels) {
  std::vector<Eigen::VectorXd> db = {Eigen::Vector2d(1, 0), Eigen::Vector2d(0.9, 0.1), Eigen::Vector2d(-1, 0)};
  std::vector<Eigen::VectorXd> q = {Eigen::Vector2d(1, 0)};
  // top-2: {0,1} and {1}; label 0 -> 1/2, label 1 -> 2/2
  auto r = retrieval_precision(db, {{0, 1}, {1}, {0}}, q, {{0, 1}}, {0.5});
  EXPECT_DOUBLE_EQ(r.precision[0], 0.75);
}

TEST(Retrieval, FullFractionIsLabelBaseRate) {
  Rng rng(4);
  std::vector<Eigen::VectorXd> db, q;
  std::vector<std::vector<int>> dbl, ql;
  for (int i = 0; i < 40; ++i) {
    db.push_back(Eigen::VectorXd::Random(3));
    dbl.push_back({static_cast<int>(rng.index(3))});
  }
  double expected = 0.0;
  for (int i = 0; i < 10; ++i) {
    q.push_back(Eigen::VectorXd::Random(3));
    int label = static_cast<int>(rng.index(3));
    ql.push_back({label});
    expected += static_cast<double>(std::count(dbl.begin(), dbl.end(), std::vector<int>{label})) / 40.0;
  }
  auto r = retrieval_precision(db, dbl, q, ql, {1.0, 0.3});
  EXPECT_NEAR(r.precision[0], expected / 10.0, 1e-15);
  EXPECT_GE(r.precision[1], 0.0);
  EXPECT_LE(r.precision[1], 1.0);
}

TEST(Retrieval, ZeroNormCountedAndRejectsBadFractions) {
  std::vector<Eigen::VectorXd> db = {Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0)};
  std::vector<Eigen::VectorXd> q = {Eigen::Vector2d(1, 0)};
  auto r = retrieval_precision(db, {{0}, {1}}, q, {{1}}, {0.5});
  EXPECT_EQ(r.zero_norm, 1u);
  EXPECT_DOUBLE_EQ(r.precision[0], 1.0);
  EXPECT_THROW(retrieval_precision(db, {{0}, {1}}, q, {{1}}, {0.0}), Error);
  EXPECT_THROW(retrieval_precision(db, {{0}, {1}}, q, {{1}}, {1.5}), Error);
  EXPECT_THROW(retrieval_precision(db, {{0}, {}}, q, {{1}}, {0.5}), Error);
}

TEST(Classify, SeparableFeaturesPerfect) {
  Rng rng(5);
  auto make = [&](int n) {
    LabeledFeatures f;
    f.X.resize(n, 3);
    for (int i = 0; i < n; ++i) {
      const int y = i % 2;
      f.X(i, 0) = (y ? 1.0 : -1.0) * rng.uniform(0.5, 2.0);
      f.X(i, 1) = rng.uniform(-1, 1);
      f.X(i, 2) = rng.uniform(-1, 1);
      f.labels.push_back({y});
    }
    return f;
  };
  auto r = classify_features(make(60), make(20), make(40), 2, {0.01, 0.1, 1.0, 10.0});
  EXPECT_EQ(r.accuracy, 1.0);
  EXPECT_EQ(r.macro_f1, 1.0);
  EXPECT_FALSE(r.multi_label);
}

TEST(Classify, ZeroEmbeddingsPredictMajority) {
  ModelParams p = init_params(6, 3, OutputKind::flat, 1, 0.0);
  Corpus c;
  c.vocab = Vocabulary({"a", "b", "c", "d", "e", "f"});
  c.label_names = {"x", "y"};
  for (int i = 0; i < 10; ++i) {
    c.documents.push_back(doc_of({i % 6}, {i < 7 ? 0 : 1}));
    c.splits.push_back(Split::train);
  }
  c.documents.push_back(doc_of({1}, {0}));
  c.splits.push_back(Split::dev);
  for (int i = 0; i < 8; ++i) {
    c.documents.push_back(doc_of({i % 6}, {i < 5 ? 0 : 1}));
    c.splits.push_back(Split::test);
  }
  auto r = classify(p, c, {0.01, 1.0});
  EXPECT_DOUBLE_EQ(r.accuracy, 5.0 / 8.0);
  for (const auto& pred : r.test_predictions) EXPECT_EQ(pred, std::vector<int>{0});
}

TEST(Classify, PredictionsInvariantToFeatureScaling) {
  Rng rng(6);
  auto make = [&](int n) {
    LabeledFeatures f;
    f.X.resize(n, 4);
    for (int i = 0; i < n; ++i) {
      const int y = static_cast<int>(rng.index(3));
      for (int j = 0; j < 4; ++j) f.X(i, j) = rng.uniform(-1, 1) + (j == y ? 0.8 : 0.0);
      f.labels.push_back({y});
    }
    return f;
  };
  auto train = make(90), dev = make(30), test = make(30);
  auto doubled = [](LabeledFeatures f) {
    f.X *= 2.0;
    return f;
  };
  auto a = classify_features(train, dev, test, 3, {1e-9});
  auto b = classify_features(doubled(train), doubled(dev), doubled(test), 3, {1e-9});
  EXPECT_EQ(a.test_predictions, b.test_predictions);
}

TEST(Classify, MultiLabelOneVsRest) {
  Rng rng(7);
  auto make = [&](int n) {
    LabeledFeatures f;
    f.X.resize(n, 2);
    for (int i = 0; i < n; ++i) {
      const bool l0 = rng.uniform() < 0.5, l1 = rng.uniform() < 0.5;
      f.X(i, 0) = (l0 ? 1.0 : -1.0) + rng.uniform(-0.3, 0.3);
      f.X(i, 1) = (l1 ? 1.0 : -1.0) + rng.uniform(-0.3, 0.3);
      std::vector<int> ls;
      if (l0) ls.push_back(0);
      if (l1) ls.push_back(1);
      if (ls.empty()) ls.push_back(2);
      f.labels.push_back(ls);
    }
    return f;
  };
  auto r = classify_features(make(100), make(30), make(50), 3, {0.01, 0.1});
  EXPECT_TRUE(r.multi_label);
  EXPECT_GT(r.macro_f1, 0.9);
}

TEST(Classify, UnseenTestLabelIsCountedWrong) {
  LabeledFeatures train, test;
  train.X = Eigen::MatrixXd::Random(6, 2);
  train.labels = {{0}, {1}, {0}, {1}, {0}, {1}};
  test.X = Eigen::MatrixXd::Random(2, 2);
  test.labels = {{2}, {2}};
  auto r = classify_features(train, {}, test, 3, {1.0});
  EXPECT_EQ(r.unseen_test_labels, std::vector<int>{2});
  EXPECT_EQ(r.accuracy, 0.0);
}

TEST(Topics, TopWordsFromRows) {
  ModelParams p = init_params(5, 2, OutputKind::flat, 1, 0.0);
  p.W.row(0) << -1, -2, 3, -4, -5;
  p.W.row(1) << 0.1, 0.5, 0.5, 0.9, -1;
  auto topics = topic_words(p, 3);
  ASSERT_EQ(topics.size(), 2u);
  EXPECT_EQ(topics[0].words, (std::vector<WordId>{2, 0, 1}));
  EXPECT_EQ(topics[1].words, (std::vector<WordId>{3, 1, 2}));  // tie 0.5 goes to lower id
  EXPECT_EQ(topic_words(p, 1)[0].words, std::vector<WordId>{2});
  EXPECT_THROW(topic_words(p, 6), Error);
}

TEST(Coherence, AlwaysTogetherIsOne) {
  // words 0 and 1 only ever appear together
  std::vector<Document> ref = {doc_of({0, 1, 2}), doc_of({3, 2}), doc_of({0, 1}), doc_of({4, 3})};
  CooccurrenceStats stats(ref, 10);
  EXPECT_EQ(stats.npmi(0, 1), 1.0);
  // and in every window
  CooccurrenceStats every({doc_of({0, 1}), doc_of({1, 0})}, 10);
  EXPECT_EQ(every.npmi(0, 1), 1.0);
}

TEST(Coherence, IndependentIsZero) {
  // p(a) = p(b) = 1/2, p(a,b) = 1/4
  std::vector<Document> ref = {doc_of({0, 1}), doc_of({0, 2}), doc_of({3, 1}), doc_of({3, 2})};
  CooccurrenceStats stats(ref, 10);
  EXPECT_NEAR(stats.npmi(0, 1), 0.0, 1e-10);
}

TEST(Coherence, NeverTogetherIsMinusOne) {
  CooccurrenceStats stats({doc_of({0, 2}), doc_of({1, 2})}, 2);
  EXPECT_EQ(stats.npmi(0, 1), -1.0);
}

TEST(Coherence, SlidingWindowCounts) {
  // D=5, window 3 -> 3 windows: {0,1,2} {1,2,3} {2,3,4}
  CooccurrenceStats stats({doc_of({0, 1, 2, 3, 4})}, 3);
  EXPECT_EQ(stats.windows(), 3u);
  EXPECT_EQ(stats.count(2), 3u);
  EXPECT_EQ(stats.joint(0, 4), 0u);
  EXPECT_EQ(stats.joint(1, 3), 1u);
  EXPECT_EQ(stats.joint(3, 1), 1u);
}

TEST(Coherence, BoundedAndSkipsAbsentWords) {
  Rng rng(8);
  std::vector<Document> ref;
  for (int i = 0; i < 30; ++i) ref.push_back(oracle::random_doc(15, 3 + rng.index(20), rng));
  CooccurrenceStats stats(ref, 5);
  for (WordId a = 0; a < 15; ++a)
    for (WordId b = a + 1; b < 15; ++b) {
      if (stats.count(a) == 0 || stats.count(b) == 0) continue;
      const double v = stats.npmi(a, b);
      EXPECT_GE(v, -1.0);
      EXPECT_LE(v, 1.0);
    }
  auto r = coherence_npmi({{0, 1, 99}}, ref, 5);
  EXPECT_EQ(r.skipped_pairs, 2u);
  EXPECT_THROW(CooccurrenceStats(ref, 1), Error);
  EXPECT_THROW(CooccurrenceStats({}, 5), Error);
}

TEST(Neighbors, DuplicateColumnFirstAndOrthogonalZero) {
  ModelParams p = init_params(4, 3, OutputKind::flat, 1, 0.0);
  p.W.col(0) << 1, 0, 0;
  p.W.col(1) << 0, 1, 0;
  p.W.col(2) << 1, 0, 0;
  p.W.col(3) << 0.5, 0.5, 0;
  Vocabulary v({"a", "b", "c", "d"});
  auto n = word_neighbors(p, v, 0, 3);
  ASSERT_EQ(n.size(), 3u);
  EXPECT_EQ(n[0].token, "c");
  EXPECT_DOUBLE_EQ(n[0].cosine, 1.0);
  EXPECT_EQ(n[2].token, "b");
  EXPECT_EQ(n[2].cosine, 0.0);
  EXPECT_THROW(word_neighbors(p, v, 0, 4), Error);
}

TEST(Neighbors, UnknownWordSuggestsClosestTokens) {
  Checkpoint ck;
  ck.vocab = Vocabulary({"jesus", "christ", "god", "rocket"});
  ck.params = init_params(4, 2, OutputKind::flat, 1, 1.0);
  try {
    word_neighbors(ck, "jesu", 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("jesus"), std::string::npos) << e.what();
  }
  EXPECT_EQ(closest_tokens(ck.vocab, "gods", 1), std::vector<std::string>{"god"});
}

}  // namespace
}  // namespace nade

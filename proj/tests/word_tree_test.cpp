#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "nade/error.hpp"
#include "nade/random.hpp"
#include "nade/word_tree.hpp"
#include "oracles.hpp"

namespace nade {
namespace {

std::pair<std::size_t, std::size_t> depth_range(const WordTree& t) {
  std::size_t lo = SIZE_MAX, hi = 0;
  for (std::size_t w = 0; w < t.leaf_count(); ++w) {
    lo = std::min(lo, t.depth(static_cast<WordId>(w)));
    hi = std::max(hi, t.depth(static_cast<WordId>(w)));
  }
  return {lo, hi};
}

TEST(WordTree, FourLeaves) {
  WordTree t = build_tree(4, 3);
  EXPECT_EQ(t.internal_count(), 3u);
  for (WordId w = 0; w < 4; ++w) EXPECT_EQ(t.depth(w), 2u);
}

TEST(WordTree, FiveLeavesBalanced) {
  // Halving 5 leaves gives subtrees of 3 and 2: depths {3,3,2} and {2,2}.
  WordTree t = build_tree(5, 11);
  EXPECT_EQ(t.internal_count(), 4u);
  std::multiset<std::size_t> depths;
  for (WordId w = 0; w < 5; ++w) depths.insert(t.depth(w));
  EXPECT_EQ(depths, (std::multiset<std::size_t>{2, 2, 2, 3, 3}));
}

TEST(WordTree, StructuralInvariants) {
  for (std::size_t K : {2u, 3u, 7u, 16u, 33u, 100u, 257u}) {
    WordTree t = build_tree(K, K * 17);
    auto [lo, hi] = depth_range(t);
    EXPECT_LE(hi - lo, 1u) << K;
    // distinct leaves: bit paths are unique and none is a prefix of another
    std::set<std::vector<std::uint8_t>> paths;
    std::set<std::int32_t> internal;
    for (std::size_t w = 0; w < K; ++w) {
      const auto word = static_cast<WordId>(w);
      EXPECT_EQ(t.nodes(word).front(), 0) << "paths start at the root";
      paths.insert(t.bits(word));
      internal.insert(t.nodes(word).begin(), t.nodes(word).end());
    }
    EXPECT_EQ(paths.size(), K);
    EXPECT_EQ(internal.size(), K - 1);
    // the serialized form reloads and validates
    std::vector<std::vector<std::int32_t>> nodes;
    std::vector<std::vector<std::uint8_t>> bits;
    for (std::size_t w = 0; w < K; ++w) {
      nodes.push_back(t.nodes(static_cast<WordId>(w)));
      bits.push_back(t.bits(static_cast<WordId>(w)));
    }
    EXPECT_EQ(WordTree(nodes, bits, t.seed()), t);
  }
}

TEST(WordTree, DeterministicPerSeed) {
  EXPECT_EQ(build_tree(50, 9), build_tree(50, 9));
  EXPECT_FALSE(build_tree(50, 9) == build_tree(50, 10));
}

TEST(WordTree, RejectsTinyVocabulary) {
  EXPECT_THROW(build_tree(1, 0), Error);
  EXPECT_THROW(build_tree(0, 0), Error);
}

TEST(WordTree, RejectsInconsistentPaths) {
  // Two words on the same leaf.
  EXPECT_THROW(WordTree({{0}, {0}, {0}}, {{0}, {1}, {1}}, 0), Error);
}

TEST(PathLogprob, ZeroParamsGiveUniform) {
  for (std::size_t K : {4u, 8u}) {
    WordTree t = build_tree(K, 1);
    Eigen::MatrixXd U = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(K) - 1, 3);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(K) - 1);
    Eigen::VectorXd h = Eigen::VectorXd::Random(3);
    for (WordId w = 0; w < static_cast<WordId>(K); ++w)
      EXPECT_DOUBLE_EQ(path_logprob(t, w, h, U, b), std::log(1.0 / static_cast<double>(K)));
  }
}

TEST(PathLogprob, MatchesDirectProduct) {
  Rng rng(5);
  WordTree t = build_tree(6, 2);
  Eigen::MatrixXd U(5, 3);
  Eigen::VectorXd b(5), h(3);
  for (Eigen::Index i = 0; i < U.size(); ++i) U.data()[i] = rng.uniform(-2, 2);
  for (Eigen::Index i = 0; i < 5; ++i) b(i) = rng.uniform(-1, 1);
  for (Eigen::Index i = 0; i < 3; ++i) h(i) = rng.uniform(0, 1);
  for (WordId w = 0; w < 6; ++w)
    EXPECT_NEAR(path_logprob(t, w, h, U, b), std::log(oracle::direct_tree_prob(t, U, b, h, w)), 1e-12);
}

TEST(FullDistribution, TwoLeaves) {
  WordTree t = build_tree(2, 0);
  Eigen::MatrixXd U = Eigen::MatrixXd::Zero(1, 1);
  Eigen::VectorXd b(1);
  b(0) = std::log(0.7 / 0.3);  // sigmoid^-1(0.7)
  Eigen::VectorXd h = Eigen::VectorXd::Zero(1);
  Eigen::VectorXd p = full_distribution(t, h, U, b);
  // the word on the right leaf (bit 1) gets 0.7
  const WordId right = t.bits(0)[0] == 1 ? 0 : 1;
  EXPECT_NEAR(p(right), 0.7, 1e-15);
  EXPECT_NEAR(p(1 - right), 0.3, 1e-15);
}

TEST(FullDistribution, SumsToOne) {
  Rng rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t K = 2 + rng.index(60);
    const Eigen::Index H = 1 + static_cast<Eigen::Index>(rng.index(6));
    WordTree t = build_tree(K, rng.next_u64());
    Eigen::MatrixXd U(static_cast<Eigen::Index>(K) - 1, H);
    Eigen::VectorXd b(static_cast<Eigen::Index>(K) - 1), h(H);
    for (Eigen::Index i = 0; i < U.size(); ++i) U.data()[i] = rng.uniform(-3, 3);
    for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = rng.uniform(-3, 3);
    for (Eigen::Index i = 0; i < H; ++i) h(i) = rng.uniform(-1, 1);
    EXPECT_NEAR(full_distribution(t, h, U, b).sum(), 1.0, 1e-10);
  }
}

TEST(PathLogprob, ClampKeepsLogprobFinite) {
  WordTree t = build_tree(4, 0);
  Eigen::MatrixXd U = Eigen::MatrixXd::Constant(3, 1, 1e6);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(3);
  Eigen::VectorXd h = Eigen::VectorXd::Ones(1);
  for (WordId w = 0; w < 4; ++w) EXPECT_TRUE(std::isfinite(path_logprob(t, w, h, U, b)));
}

TEST(PathLogprob, NonFiniteHiddenRejected) {
  WordTree t = build_tree(4, 0);
  Eigen::MatrixXd U = Eigen::MatrixXd::Zero(3, 2);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(3);
  Eigen::VectorXd h(2);
  h << 0.5, std::nan("");
  try {
    path_logprob(t, 0, h, U, b);
    FAIL();
  } catch (const NumericalError& e) {
    EXPECT_STREQ(e.what(), "non-finite activation");
  }
}

TEST(LogSigmoid, StableAtExtremes) {
  EXPECT_NEAR(log_sigmoid(-800), -800, 1e-9);
  EXPECT_NEAR(log_sigmoid(800), 0, 1e-300);
  EXPECT_NEAR(log_sigmoid(0), std::log(0.5), 1e-15);
}

}  // namespace
}  // namespace nade

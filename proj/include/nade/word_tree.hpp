#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "nade/corpus.hpp"

namespace nade {

// Balanced full binary tree with one vocabulary word per leaf. Internal
// nodes are numbered in pre-order, so node 0 is the root. Bit 0 selects the
// left child, bit 1 the right child.
class WordTree {
 public:
  WordTree() = default;
  // Rebuilds from serialized per-word paths; validates that they form a tree.
  WordTree(std::vector<std::vector<std::int32_t>> nodes, std::vector<std::vector<std::uint8_t>> bits,
           std::uint64_t seed);

  std::size_t leaf_count() const { return nodes_.size(); }
  std::size_t internal_count() const { return leaf_count() == 0 ? 0 : leaf_count() - 1; }
  std::uint64_t seed() const { return seed_; }

  const std::vector<std::int32_t>& nodes(WordId w) const { return nodes_[static_cast<std::size_t>(w)]; }
  const std::vector<std::uint8_t>& bits(WordId w) const { return bits_[static_cast<std::size_t>(w)]; }
  std::size_t depth(WordId w) const { return nodes(w).size(); }

  friend bool operator==(const WordTree&, const WordTree&) = default;

 private:
  friend WordTree build_tree(std::size_t, std::uint64_t);
  std::vector<std::vector<std::int32_t>> nodes_;
  std::vector<std::vector<std::uint8_t>> bits_;
  std::uint64_t seed_ = 0;
};

// Words are placed on leaves by a seeded random permutation.
WordTree build_tree(std::size_t K, std::uint64_t seed);

// Node pre-activations are clamped to this range wherever a tree
// probability or its gradient is evaluated.
inline constexpr double kLogitClamp = 30.0;

double clamp_logit(double z);

// log sigmoid(z) without overflow.
double log_sigmoid(double z);
double sigmoid(double z);

// Sum over the word's path of log p(bit | h), p(1) = sigmoid(b_n + U_n . h).
double path_logprob(const WordTree& tree, WordId word, const Eigen::Ref<const Eigen::VectorXd>& hidden,
                    const Eigen::MatrixXd& U, const Eigen::VectorXd& b);

// exp(path_logprob) for every word.
Eigen::VectorXd full_distribution(const WordTree& tree, const Eigen::Ref<const Eigen::VectorXd>& hidden,
                                  const Eigen::MatrixXd& U, const Eigen::VectorXd& b);

}  // namespace nade

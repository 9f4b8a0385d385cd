#include "nade/word_tree.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "nade/error.hpp"
#include "nade/random.hpp"

namespace nade {

namespace {

struct Builder {
  std::vector<WordId> leaf_word;  // slot -> word
  std::vector<std::vector<std::int32_t>>& nodes;
  std::vector<std::vector<std::uint8_t>>& bits;
  std::int32_t next_node = 0;
  std::vector<std::int32_t> path_nodes;
  std::vector<std::uint8_t> path_bits;

  // Leaves [lo, hi) hang below the current path.
  void build(std::size_t lo, std::size_t hi) {
    if (hi - lo == 1) {
      auto w = static_cast<std::size_t>(leaf_word[lo]);
      nodes[w] = path_nodes;
      bits[w] = path_bits;
      return;
    }
    std::int32_t id = next_node++;
    std::size_t mid = lo + (hi - lo + 1) / 2;
    path_nodes.push_back(id);
    path_bits.push_back(0);
    build(lo, mid);
    path_bits.back() = 1;
    build(mid, hi);
    path_nodes.pop_back();
    path_bits.pop_back();
  }
};

void check_hidden(const Eigen::Ref<const Eigen::VectorXd>& hidden) {
  if (!hidden.allFinite()) throw NumericalError("non-finite activation");
}

}  // namespace

WordTree build_tree(std::size_t K, std::uint64_t seed) {
  if (K < 2) throw Error("word tree needs K >= 2 (use the flat output layer for K = 1)");
  WordTree tree;
  tree.seed_ = seed;
  tree.nodes_.resize(K);
  tree.bits_.resize(K);

  std::vector<WordId> perm(K);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(seed);
  rng.shuffle(perm);

  Builder b{perm, tree.nodes_, tree.bits_, 0, {}, {}};
  b.build(0, K);
  return tree;
}

WordTree::WordTree(std::vector<std::vector<std::int32_t>> nodes, std::vector<std::vector<std::uint8_t>> bits,
                   std::uint64_t seed)
    : nodes_(std::move(nodes)), bits_(std::move(bits)), seed_(seed) {
  const std::size_t K = nodes_.size();
  if (K < 2 || bits_.size() != K) throw Error("word tree: inconsistent path tables");
  // Paths must be prefix-free, and equal bit prefixes must name the same node.
  std::vector<std::vector<std::uint8_t>> paths;
  std::map<std::vector<std::uint8_t>, std::int32_t> node_at;
  for (std::size_t w = 0; w < K; ++w) {
    if (nodes_[w].size() != bits_[w].size() || nodes_[w].empty()) throw Error("word tree: bad path for word " + std::to_string(w));
    for (auto n : nodes_[w])
      if (n < 0 || static_cast<std::size_t>(n) >= K - 1) throw Error("word tree: node id out of range");
    for (auto bit : bits_[w])
      if (bit > 1) throw Error("word tree: bit out of range");
    for (std::size_t m = 0; m < nodes_[w].size(); ++m) {
      std::vector<std::uint8_t> prefix(bits_[w].begin(), bits_[w].begin() + static_cast<std::ptrdiff_t>(m));
      auto [it, inserted] = node_at.emplace(std::move(prefix), nodes_[w][m]);
      if (!inserted && it->second != nodes_[w][m]) throw Error("word tree: inconsistent node ids");
    }
    paths.push_back(bits_[w]);
  }
  if (node_at.size() != K - 1) throw Error("word tree: expected K-1 internal nodes");
  std::sort(paths.begin(), paths.end());
  for (std::size_t i = 1; i < paths.size(); ++i) {
    const auto& a = paths[i - 1];
    const auto& b = paths[i];
    if (a.size() <= b.size() && std::equal(a.begin(), a.end(), b.begin()))
      throw Error("word tree: a leaf path is a prefix of another");
  }
}

double clamp_logit(double z) { return std::clamp(z, -kLogitClamp, kLogitClamp); }

double log_sigmoid(double z) {
  return z >= 0 ? -std::log1p(std::exp(-z)) : z - std::log1p(std::exp(z));
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

double path_logprob(const WordTree& tree, WordId word, const Eigen::Ref<const Eigen::VectorXd>& hidden,
                    const Eigen::MatrixXd& U, const Eigen::VectorXd& b) {
  check_hidden(hidden);
  if (word < 0 || static_cast<std::size_t>(word) >= tree.leaf_count()) throw Error("word id out of range");
  const auto& nodes = tree.nodes(word);
  const auto& bits = tree.bits(word);
  double lp = 0.0;
  for (std::size_t m = 0; m < nodes.size(); ++m) {
    const auto n = nodes[m];
    double z = clamp_logit(b(n) + U.row(n).dot(hidden));
    lp += bits[m] ? log_sigmoid(z) : log_sigmoid(-z);
  }
  return lp;
}

Eigen::VectorXd full_distribution(const WordTree& tree, const Eigen::Ref<const Eigen::VectorXd>& hidden,
                                  const Eigen::MatrixXd& U, const Eigen::VectorXd& b) {
  const auto K = static_cast<Eigen::Index>(tree.leaf_count());
  Eigen::VectorXd p(K);
  for (Eigen::Index w = 0; w < K; ++w) p(w) = std::exp(path_logprob(tree, static_cast<WordId>(w), hidden, U, b));
  return p;
}

}  // namespace nade

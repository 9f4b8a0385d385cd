#pragma once

#include <memory>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "nade/corpus.hpp"
#include "nade/word_tree.hpp"

namespace nade {

enum class OutputKind { tree, flat };
enum class ModelKind { docnade, idocnade };
enum class Activation { sigmoid, tanh };
enum class Objective { exact, pseudo };
enum class Direction { forward, backward };

std::string_view to_string(OutputKind v);
std::string_view to_string(ModelKind v);
std::string_view to_string(Activation v);
std::string_view to_string(Objective v);
OutputKind parse_output_kind(std::string_view s);
ModelKind parse_model_kind(std::string_view s);
Activation parse_activation(std::string_view s);
Objective parse_objective(std::string_view s);

// Full learned state. W and U are shared by both directions; only the
// biases are direction specific.
struct ModelParams {
  Eigen::MatrixXd W;      // H x K, column v is word v's embedding
  Eigen::MatrixXd U;      // T x H (tree) or K x H (flat)
  Eigen::VectorXd b_fwd;  // length T or K
  Eigen::VectorXd b_bwd;
  Eigen::VectorXd c_fwd;  // length H
  Eigen::VectorXd c_bwd;
  OutputKind output = OutputKind::tree;
  Activation activation = Activation::sigmoid;
  bool scaling = false;  // multiply hidden biases by document length
  std::shared_ptr<const WordTree> tree;  // required in tree mode

  Eigen::Index hidden_size() const { return W.rows(); }
  Eigen::Index vocab_size() const { return W.cols(); }
  Eigen::Index output_rows() const { return U.rows(); }

  // Dimension consistency; with `check_finite` also scans every entry.
  void validate(bool check_finite = true) const;

  const Eigen::VectorXd& b(Direction d) const { return d == Direction::forward ? b_fwd : b_bwd; }
  const Eigen::VectorXd& c(Direction d) const { return d == Direction::forward ? c_fwd : c_bwd; }
};

// Column i holds position i (0-based). a_* are pre-activation accumulators.
// h_fwd.col(i) sees words before i only, h_bwd.col(i) words after i only.
struct HiddenStates {
  Eigen::MatrixXd a_fwd, h_fwd;
  Eigen::MatrixXd a_bwd, h_bwd;
};

Eigen::VectorXd activate(Activation g, const Eigen::VectorXd& a);
// g'(a) expressed through h = g(a).
Eigen::VectorXd activation_slope(Activation g, const Eigen::VectorXd& h);

// Incremental O(HD) accumulation. The backward accumulator walks the document
// from the end so that both directions share one summation order.
HiddenStates hidden_states(const ModelParams& params, const Document& doc);

// log p(word | h) under the direction's output biases (tree path or flat softmax).
double output_logprob(const ModelParams& params, WordId word, const Eigen::Ref<const Eigen::VectorXd>& hidden,
                      Direction dir);
// Conditional over the whole vocabulary.
Eigen::VectorXd conditional_distribution(const ModelParams& params, const Eigen::Ref<const Eigen::VectorXd>& hidden,
                                         Direction dir);

struct DirectionalLoglik {
  double forward = 0.0;   // sum_i log p(v_i | v_<i), summed i = 1..D
  double backward = 0.0;  // sum_i log p(v_i | v_>i), summed i = D..1
};

DirectionalLoglik loglik_directional(const ModelParams& params, const Document& doc);
double loglik_docnade(const ModelParams& params, const Document& doc);
double loglik_idocnade(const ModelParams& params, const Document& doc);
double loglik_pseudo(const ModelParams& params, const Document& doc);
double loglik(const ModelParams& params, const Document& doc, ModelKind kind);

// Gradient buffers shaped like ModelParams. Tracks which W columns and U
// rows were written so a reused buffer can be cleared and applied sparsely.
class Gradients {
 public:
  Gradients() = default;
  explicit Gradients(const ModelParams& like);

  Eigen::MatrixXd W, U;
  Eigen::VectorXd b_fwd, b_bwd, c_fwd, c_bwd;

  void touch_word(WordId w);
  void touch_row(Eigen::Index r);
  const std::vector<WordId>& touched_words() const { return touched_words_; }
  const std::vector<Eigen::Index>& touched_rows() const { return touched_rows_; }

  // Zero everything written since the last clear.
  void clear();
  bool all_finite() const;

 private:
  std::vector<WordId> touched_words_;
  std::vector<Eigen::Index> touched_rows_;
  std::vector<char> word_mark_, row_mark_;
};

struct DirectionWeights {
  double forward = 0.5;
  double backward = 0.5;
};

// Adds the gradient of -(wf * L_fwd + wb * L_bwd) into `out` and returns
// wf * L_fwd + wb * L_bwd. Directions with zero weight are skipped.
double accumulate_gradients(const ModelParams& params, const Document& doc, DirectionWeights weights,
                            Gradients& out);
// Adds the gradient of -weight * loglik_pseudo into `out`; returns weight * loglik_pseudo.
double accumulate_pseudo_gradients(const ModelParams& params, const Document& doc, double weight, Gradients& out);

Gradients gradients_docnade(const ModelParams& params, const Document& doc);
Gradients gradients_idocnade(const ModelParams& params, const Document& doc);
Gradients gradients_pseudo(const ModelParams& params, const Document& doc);

// params -= lr * grads over the touched region.
void apply_update(ModelParams& params, const Gradients& grads, double learning_rate);

// iDocNADE: g(s c_fwd + sum_{k<D} W_v_k) + g(s c_bwd + sum_{k>1} W_v_k).
// DocNADE: the forward term alone. `include_all_words` sums every word in
// both terms instead of dropping the last/first one.
Eigen::VectorXd document_representation(const ModelParams& params, const Document& doc, ModelKind kind,
                                        bool include_all_words = false);

}  // namespace nade

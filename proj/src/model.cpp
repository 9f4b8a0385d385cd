#include "nade/model.hpp"
#include "nade/summation.hpp"

#include <cmath>
#include <string>

#include "nade/error.hpp"

namespace nade {

std::string_view to_string(OutputKind v) { return v == OutputKind::tree ? "tree" : "flat"; }
std::string_view to_string(ModelKind v) { return v == ModelKind::docnade ? "docnade" : "idocnade"; }
std::string_view to_string(Activation v) { return v == Activation::sigmoid ? "sigmoid" : "tanh"; }
std::string_view to_string(Objective v) { return v == Objective::exact ? "exact" : "pseudo"; }

OutputKind parse_output_kind(std::string_view s) {
  if (s == "tree") return OutputKind::tree;
  if (s == "flat") return OutputKind::flat;
  throw Error("unknown output kind '" + std::string(s) + "' (expected tree|flat)");
}
ModelKind parse_model_kind(std::string_view s) {
  if (s == "docnade") return ModelKind::docnade;
  if (s == "idocnade") return ModelKind::idocnade;
  throw Error("unknown model '" + std::string(s) + "' (expected docnade|idocnade)");
}
Activation parse_activation(std::string_view s) {
  if (s == "sigmoid") return Activation::sigmoid;
  if (s == "tanh") return Activation::tanh;
  throw Error("unknown activation '" + std::string(s) + "' (expected sigmoid|tanh)");
}
Objective parse_objective(std::string_view s) {
  if (s == "exact") return Objective::exact;
  if (s == "pseudo") return Objective::pseudo;
  throw Error("unknown objective '" + std::string(s) + "' (expected exact|pseudo)");
}

void ModelParams::validate(bool check_finite) const {
  const Eigen::Index H = hidden_size();
  const Eigen::Index K = vocab_size();
  if (H < 1 || K < 1) throw Error("model has empty W");
  if (c_fwd.size() != H || c_bwd.size() != H) throw Error("hidden bias length does not match H");
  if (U.cols() != H) throw Error("U column count does not match H");
  if (output == OutputKind::tree) {
    if (!tree) throw Error("tree output layer without a word tree");
    if (static_cast<Eigen::Index>(tree->leaf_count()) != K) throw Error("word tree leaf count does not match K");
    if (U.rows() != K - 1) throw Error("U must have K-1 rows in tree mode");
  } else if (U.rows() != K) {
    throw Error("U must have K rows in flat mode");
  }
  if (b_fwd.size() != U.rows() || b_bwd.size() != U.rows()) throw Error("output bias length does not match U");
  if (check_finite) {
    bool ok = W.allFinite() && U.allFinite() && b_fwd.allFinite() && b_bwd.allFinite() && c_fwd.allFinite() &&
              c_bwd.allFinite();
    if (!ok) throw NumericalError("non-finite model parameter");
  }
}

Eigen::VectorXd activate(Activation g, const Eigen::VectorXd& a) {
  if (g == Activation::tanh) return a.array().tanh().matrix();
  Eigen::VectorXd h(a.size());
  for (Eigen::Index j = 0; j < a.size(); ++j) h(j) = sigmoid(a(j));
  return h;
}

Eigen::VectorXd activation_slope(Activation g, const Eigen::VectorXd& h) {
  if (g == Activation::tanh) return (1.0 - h.array().square()).matrix();
  return (h.array() * (1.0 - h.array())).matrix();
}

namespace {

void check_doc(const ModelParams& params, const Document& doc) {
  if (doc.words.empty()) throw Error("document has no words");
  const auto K = params.vocab_size();
  for (WordId w : doc.words)
    if (w < 0 || w >= K) throw Error("word id " + std::to_string(w) + " outside vocabulary of size " + std::to_string(K));
}

double bias_scale(const ModelParams& params, const Document& doc) {
  return params.scaling ? static_cast<double>(doc.size()) : 1.0;
}

// a.col(i) = s c + sum_{k<i} W_v_k
void forward_accumulators(const ModelParams& params, const Document& doc, Eigen::MatrixXd& a) {
  const auto D = static_cast<Eigen::Index>(doc.size());
  a.resize(params.hidden_size(), D);
  Eigen::VectorXd acc = bias_scale(params, doc) * params.c_fwd;
  for (Eigen::Index i = 0; i < D; ++i) {
    a.col(i) = acc;
    acc += params.W.col(doc.words[static_cast<std::size_t>(i)]);
  }
}

// a.col(i) = s c + sum_{k>i} W_v_k, accumulated from the last word backwards.
void backward_accumulators(const ModelParams& params, const Document& doc, Eigen::MatrixXd& a) {
  const auto D = static_cast<Eigen::Index>(doc.size());
  a.resize(params.hidden_size(), D);
  Eigen::VectorXd acc = bias_scale(params, doc) * params.c_bwd;
  for (Eigen::Index i = D - 1; i >= 0; --i) {
    a.col(i) = acc;
    acc += params.W.col(doc.words[static_cast<std::size_t>(i)]);
  }
}

Eigen::MatrixXd activate_columns(Activation g, const Eigen::MatrixXd& a) {
  if (!a.allFinite()) throw NumericalError("non-finite activation");
  Eigen::MatrixXd h(a.rows(), a.cols());
  for (Eigen::Index i = 0; i < a.cols(); ++i) h.col(i) = activate(g, a.col(i));
  return h;
}

double flat_logprob(const Eigen::MatrixXd& U, const Eigen::VectorXd& b, WordId word,
                    const Eigen::Ref<const Eigen::VectorXd>& hidden) {
  Eigen::VectorXd z = b + U * hidden;
  const double zmax = z.maxCoeff();
  const double lse = zmax + std::log((z.array() - zmax).exp().sum());
  return z(word) - lse;
}

// Backprop of -weight * log p(word | h) through the output layer. Returns
// d/dh, accumulates output-parameter gradients and stores log p in `logprob`.
Eigen::VectorXd output_backprop(const ModelParams& params, WordId word, const Eigen::Ref<const Eigen::VectorXd>& h,
                                Direction dir, double weight, Gradients& out, double& logprob) {
  const auto& b = params.b(dir);
  Eigen::VectorXd& gb = dir == Direction::forward ? out.b_fwd : out.b_bwd;
  Eigen::VectorXd dh = Eigen::VectorXd::Zero(h.size());
  logprob = 0.0;
  if (params.output == OutputKind::tree) {
    const auto& nodes = params.tree->nodes(word);
    const auto& bits = params.tree->bits(word);
    for (std::size_t m = 0; m < nodes.size(); ++m) {
      const auto n = nodes[m];
      const double z = clamp_logit(b(n) + params.U.row(n).dot(h));
      const double dz = weight * (sigmoid(z) - bits[m]);
      logprob += bits[m] ? log_sigmoid(z) : log_sigmoid(-z);
      gb(n) += dz;
      out.U.row(n) += dz * h.transpose();
      out.touch_row(n);
      dh += dz * params.U.row(n).transpose();
    }
  } else {
    Eigen::VectorXd z = b + params.U * h;
    const double zmax = z.maxCoeff();
    Eigen::VectorXd p = (z.array() - zmax).exp().matrix();
    const double total = p.sum();
    p /= total;
    logprob = z(word) - zmax - std::log(total);
    Eigen::VectorXd dz = weight * p;
    dz(word) -= weight;
    gb += dz;
    out.U.noalias() += dz * h.transpose();
    for (Eigen::Index r = 0; r < params.U.rows(); ++r) out.touch_row(r);
    dh.noalias() = params.U.transpose() * dz;
  }
  return dh;
}

}  // namespace

HiddenStates hidden_states(const ModelParams& params, const Document& doc) {
  params.validate(false);
  check_doc(params, doc);
  HiddenStates hs;
  forward_accumulators(params, doc, hs.a_fwd);
  backward_accumulators(params, doc, hs.a_bwd);
  hs.h_fwd = activate_columns(params.activation, hs.a_fwd);
  hs.h_bwd = activate_columns(params.activation, hs.a_bwd);
  return hs;
}

double output_logprob(const ModelParams& params, WordId word, const Eigen::Ref<const Eigen::VectorXd>& hidden,
                      Direction dir) {
  if (params.output == OutputKind::tree) return path_logprob(*params.tree, word, hidden, params.U, params.b(dir));
  if (!hidden.allFinite()) throw NumericalError("non-finite activation");
  return flat_logprob(params.U, params.b(dir), word, hidden);
}

Eigen::VectorXd conditional_distribution(const ModelParams& params, const Eigen::Ref<const Eigen::VectorXd>& hidden,
                                         Direction dir) {
  if (params.output == OutputKind::tree) return full_distribution(*params.tree, hidden, params.U, params.b(dir));
  Eigen::VectorXd z = params.b(dir) + params.U * hidden;
  Eigen::VectorXd p = (z.array() - z.maxCoeff()).exp().matrix();
  return p / p.sum();
}

DirectionalLoglik loglik_directional(const ModelParams& params, const Document& doc) {
  HiddenStates hs = hidden_states(params, doc);
  const auto D = static_cast<Eigen::Index>(doc.size());
  CompensatedSum fwd, bwd;
  for (Eigen::Index i = 0; i < D; ++i)
    fwd += output_logprob(params, doc.words[static_cast<std::size_t>(i)], hs.h_fwd.col(i), Direction::forward);
  for (Eigen::Index i = D - 1; i >= 0; --i)
    bwd += output_logprob(params, doc.words[static_cast<std::size_t>(i)], hs.h_bwd.col(i), Direction::backward);
  return {fwd.value(), bwd.value()};
}

double loglik_docnade(const ModelParams& params, const Document& doc) {
  params.validate(false);
  check_doc(params, doc);
  Eigen::MatrixXd a;
  forward_accumulators(params, doc, a);
  Eigen::MatrixXd h = activate_columns(params.activation, a);
  CompensatedSum ll;
  for (Eigen::Index i = 0; i < h.cols(); ++i)
    ll += output_logprob(params, doc.words[static_cast<std::size_t>(i)], h.col(i), Direction::forward);
  return ll.value();
}

double loglik_idocnade(const ModelParams& params, const Document& doc) {
  auto ll = loglik_directional(params, doc);
  return 0.5 * (ll.forward + ll.backward);
}

namespace {

// a.col(i) = s c_fwd + sum_{k != i} W_v_k
Eigen::MatrixXd pseudo_accumulators(const ModelParams& params, const Document& doc) {
  Eigen::MatrixXd before, after;
  forward_accumulators(params, doc, before);
  // Reuse the backward pass for the suffix sums, without its bias.
  Eigen::VectorXd suffix = Eigen::VectorXd::Zero(params.hidden_size());
  Eigen::MatrixXd a = before;
  for (Eigen::Index i = a.cols() - 1; i >= 0; --i) {
    a.col(i) += suffix;
    suffix += params.W.col(doc.words[static_cast<std::size_t>(i)]);
  }
  return a;
}

}  // namespace

double loglik_pseudo(const ModelParams& params, const Document& doc) {
  params.validate(false);
  check_doc(params, doc);
  Eigen::MatrixXd h = activate_columns(params.activation, pseudo_accumulators(params, doc));
  CompensatedSum ll;
  for (Eigen::Index i = 0; i < h.cols(); ++i)
    ll += output_logprob(params, doc.words[static_cast<std::size_t>(i)], h.col(i), Direction::forward);
  return ll.value();
}

double loglik(const ModelParams& params, const Document& doc, ModelKind kind) {
  return kind == ModelKind::docnade ? loglik_docnade(params, doc) : loglik_idocnade(params, doc);
}

Gradients::Gradients(const ModelParams& like)
    : W(Eigen::MatrixXd::Zero(like.W.rows(), like.W.cols())),
      U(Eigen::MatrixXd::Zero(like.U.rows(), like.U.cols())),
      b_fwd(Eigen::VectorXd::Zero(like.b_fwd.size())),
      b_bwd(Eigen::VectorXd::Zero(like.b_bwd.size())),
      c_fwd(Eigen::VectorXd::Zero(like.c_fwd.size())),
      c_bwd(Eigen::VectorXd::Zero(like.c_bwd.size())),
      word_mark_(static_cast<std::size_t>(like.W.cols()), 0),
      row_mark_(static_cast<std::size_t>(like.U.rows()), 0) {}

void Gradients::touch_word(WordId w) {
  auto& m = word_mark_[static_cast<std::size_t>(w)];
  if (!m) {
    m = 1;
    touched_words_.push_back(w);
  }
}

void Gradients::touch_row(Eigen::Index r) {
  auto& m = row_mark_[static_cast<std::size_t>(r)];
  if (!m) {
    m = 1;
    touched_rows_.push_back(r);
  }
}

void Gradients::clear() {
  for (WordId w : touched_words_) {
    W.col(w).setZero();
    word_mark_[static_cast<std::size_t>(w)] = 0;
  }
  for (Eigen::Index r : touched_rows_) {
    U.row(r).setZero();
    b_fwd(r) = 0.0;
    b_bwd(r) = 0.0;
    row_mark_[static_cast<std::size_t>(r)] = 0;
  }
  touched_words_.clear();
  touched_rows_.clear();
  c_fwd.setZero();
  c_bwd.setZero();
}

bool Gradients::all_finite() const {
  for (WordId w : touched_words_)
    if (!W.col(w).allFinite()) return false;
  for (Eigen::Index r : touched_rows_)
    if (!U.row(r).allFinite() || !std::isfinite(b_fwd(r)) || !std::isfinite(b_bwd(r))) return false;
  return c_fwd.allFinite() && c_bwd.allFinite();
}

double accumulate_gradients(const ModelParams& params, const Document& doc, DirectionWeights weights,
                            Gradients& out) {
  HiddenStates hs = hidden_states(params, doc);
  const auto D = static_cast<Eigen::Index>(doc.size());
  const double scale = bias_scale(params, doc);
  auto word = [&](Eigen::Index i) { return doc.words[static_cast<std::size_t>(i)]; };

  for (Eigen::Index i = 0; i < D; ++i) out.touch_word(word(i));
  double lp = 0.0;
  CompensatedSum fwd_ll, bwd_ll;

  if (weights.forward != 0.0) {
    // Position k feeds every forward hidden layer after it.
    Eigen::VectorXd later = Eigen::VectorXd::Zero(params.hidden_size());
    for (Eigen::Index i = D - 1; i >= 0; --i) {
      out.W.col(word(i)) += later;
      Eigen::VectorXd dh = output_backprop(params, word(i), hs.h_fwd.col(i), Direction::forward, weights.forward, out, lp);
      fwd_ll += lp;
      Eigen::VectorXd da = dh.cwiseProduct(activation_slope(params.activation, hs.h_fwd.col(i)));
      out.c_fwd += scale * da;
      later += da;
    }
  }
  if (weights.backward != 0.0) {
    // Position k feeds every backward hidden layer before it.
    Eigen::VectorXd earlier = Eigen::VectorXd::Zero(params.hidden_size());
    for (Eigen::Index i = 0; i < D; ++i) {
      out.W.col(word(i)) += earlier;
      Eigen::VectorXd dh =
          output_backprop(params, word(i), hs.h_bwd.col(i), Direction::backward, weights.backward, out, lp);
      bwd_ll += lp;
      Eigen::VectorXd da = dh.cwiseProduct(activation_slope(params.activation, hs.h_bwd.col(i)));
      out.c_bwd += scale * da;
      earlier += da;
    }
  }
  return weights.forward * fwd_ll.value() + weights.backward * bwd_ll.value();
}

double accumulate_pseudo_gradients(const ModelParams& params, const Document& doc, double weight, Gradients& out) {
  params.validate(false);
  check_doc(params, doc);
  Eigen::MatrixXd h = activate_columns(params.activation, pseudo_accumulators(params, doc));
  const auto D = static_cast<Eigen::Index>(doc.size());
  const double scale = bias_scale(params, doc);
  Eigen::MatrixXd da(params.hidden_size(), D);
  Eigen::VectorXd total = Eigen::VectorXd::Zero(params.hidden_size());
  CompensatedSum ll;
  double lp = 0.0;
  for (Eigen::Index i = 0; i < D; ++i) {
    WordId w = doc.words[static_cast<std::size_t>(i)];
    Eigen::VectorXd dh = output_backprop(params, w, h.col(i), Direction::forward, weight, out, lp);
    ll += lp;
    da.col(i) = dh.cwiseProduct(activation_slope(params.activation, h.col(i)));
    total += da.col(i);
  }
  out.c_fwd += scale * total;
  // Every occurrence feeds all hidden layers except its own.
  for (Eigen::Index i = 0; i < D; ++i) {
    WordId w = doc.words[static_cast<std::size_t>(i)];
    out.touch_word(w);
    out.W.col(w) += total - da.col(i);
  }
  return weight * ll.value();
}

Gradients gradients_docnade(const ModelParams& params, const Document& doc) {
  Gradients g(params);
  accumulate_gradients(params, doc, {1.0, 0.0}, g);
  return g;
}

Gradients gradients_idocnade(const ModelParams& params, const Document& doc) {
  Gradients g(params);
  accumulate_gradients(params, doc, {0.5, 0.5}, g);
  return g;
}

Gradients gradients_pseudo(const ModelParams& params, const Document& doc) {
  Gradients g(params);
  accumulate_pseudo_gradients(params, doc, 1.0, g);
  return g;
}

void apply_update(ModelParams& params, const Gradients& grads, double learning_rate) {
  for (WordId w : grads.touched_words()) params.W.col(w) -= learning_rate * grads.W.col(w);
  for (Eigen::Index r : grads.touched_rows()) {
    params.U.row(r) -= learning_rate * grads.U.row(r);
    params.b_fwd(r) -= learning_rate * grads.b_fwd(r);
    params.b_bwd(r) -= learning_rate * grads.b_bwd(r);
  }
  params.c_fwd -= learning_rate * grads.c_fwd;
  params.c_bwd -= learning_rate * grads.c_bwd;
}

Eigen::VectorXd document_representation(const ModelParams& params, const Document& doc, ModelKind kind,
                                        bool include_all_words) {
  params.validate(false);
  check_doc(params, doc);
  const auto D = doc.size();
  const double scale = bias_scale(params, doc);

  Eigen::VectorXd fwd = scale * params.c_fwd;
  const std::size_t fwd_end = include_all_words ? D : D - 1;
  for (std::size_t k = 0; k < fwd_end; ++k) fwd += params.W.col(doc.words[k]);
  if (!fwd.allFinite()) throw NumericalError("non-finite activation");
  Eigen::VectorXd rep = activate(params.activation, fwd);
  if (kind == ModelKind::docnade) return rep;

  Eigen::VectorXd bwd = scale * params.c_bwd;
  const std::size_t bwd_begin = include_all_words ? 0 : 1;
  for (std::size_t k = D; k-- > bwd_begin;) bwd += params.W.col(doc.words[k]);
  if (!bwd.allFinite()) throw NumericalError("non-finite activation");
  return rep + activate(params.activation, bwd);
}

}  // namespace nade

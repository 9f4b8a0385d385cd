#include "nade/eval.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <set>

#include "nade/error.hpp"
#include "nade/logistic.hpp"
#include "nade/parallel.hpp"
#include "nade/summation.hpp"
#include "nade/trainer.hpp"

namespace nade {

PerplexityReport perplexity(const ModelParams& params, ModelKind kind, const std::vector<Document>& docs,
                            int threads) {
  if (docs.empty()) throw Error("perplexity: empty split");
  std::vector<double> per_word(docs.size());
  parallel_for(docs.size(), threads, [&](std::size_t t) {
    per_word[t] = loglik(params, docs[t], kind) / static_cast<double>(docs[t].size());
  });
  CompensatedSum total;
  for (double v : per_word) total += v;
  PerplexityReport r;
  r.documents = docs.size();
  r.mean_word_loglik = total.value() / static_cast<double>(docs.size());
  r.perplexity = std::exp(-r.mean_word_loglik);
  return r;
}

PerplexityReport perplexity(const Checkpoint& checkpoint, const Corpus& corpus, Split split, int threads) {
  if (corpus.vocab.fingerprint() != checkpoint.vocab.fingerprint())
    throw CompatibilityError("corpus vocabulary does not match the checkpoint vocabulary");
  auto report = perplexity(checkpoint.params, checkpoint.config.model_kind, corpus.documents_in(split), threads);
  report.excluded = corpus.rejected_in(split);
  return report;
}

std::vector<double> default_fractions() {
  return {0.0001, 0.0005, 0.001, 0.002, 0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.3};
}

std::vector<Eigen::VectorXd> representations(const ModelParams& params, ModelKind kind,
                                             const std::vector<Document>& docs, bool include_all_words,
                                             int threads) {
  std::vector<Eigen::VectorXd> reps(docs.size());
  parallel_for(docs.size(), threads, [&](std::size_t t) {
    reps[t] = document_representation(params, docs[t], kind, include_all_words);
  });
  return reps;
}

RetrievalReport retrieval_precision(const std::vector<Eigen::VectorXd>& database,
                                    const std::vector<std::vector<int>>& database_labels,
                                    const std::vector<Eigen::VectorXd>& queries,
                                    const std::vector<std::vector<int>>& query_labels,
                                    const std::vector<double>& fractions, int threads) {
  if (database.empty() || queries.empty()) throw Error("retrieval: empty database or query set");
  if (database.size() != database_labels.size() || queries.size() != query_labels.size())
    throw Error("retrieval: label list size mismatch");
  if (fractions.empty()) throw Error("retrieval: no fractions given");
  for (double f : fractions)
    if (!(f > 0.0 && f <= 1.0)) throw Error("retrieval: fractions must lie in (0, 1]");
  for (const auto& l : database_labels)
    if (l.empty()) throw Error("retrieval: unlabeled database document");
  for (const auto& l : query_labels)
    if (l.empty()) throw Error("retrieval: unlabeled query document");

  const std::size_t N = database.size();
  std::vector<std::size_t> cutoffs;
  for (double f : fractions) {
    // Guard against f * N landing a hair above an integer.
    auto n = static_cast<std::size_t>(std::ceil(f * static_cast<double>(N) - 1e-9));
    cutoffs.push_back(std::clamp<std::size_t>(n, 1, N));
  }
  const std::size_t max_cut = *std::max_element(cutoffs.begin(), cutoffs.end());

  RetrievalReport report;
  report.fractions = fractions;
  report.queries = queries.size();

  std::vector<double> db_norm(N);
  for (std::size_t d = 0; d < N; ++d) {
    db_norm[d] = database[d].norm();
    if (db_norm[d] == 0.0) ++report.zero_norm;
  }
  for (const auto& q : queries)
    if (q.norm() == 0.0) ++report.zero_norm;
  if (report.zero_norm > 0)
    std::cerr << "warning: " << report.zero_norm << " zero-norm representation(s); cosine taken as 0\n";

  std::vector<std::vector<double>> per_query(queries.size(), std::vector<double>(fractions.size()));
  parallel_for(queries.size(), threads, [&](std::size_t qi) {
    const auto& q = queries[qi];
    const double qn = q.norm();
    std::vector<double> sim(N);
    for (std::size_t d = 0; d < N; ++d) sim[d] = (qn == 0.0 || db_norm[d] == 0.0) ? 0.0 : q.dot(database[d]) / (qn * db_norm[d]);
    std::vector<std::size_t> order(N);
    std::iota(order.begin(), order.end(), 0);
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(max_cut), order.end(),
                      [&](std::size_t a, std::size_t b) { return sim[a] > sim[b] || (sim[a] == sim[b] && a < b); });

    const auto& labels = query_labels[qi];
    for (std::size_t fi = 0; fi < fractions.size(); ++fi) {
      const std::size_t n = cutoffs[fi];
      double sum = 0.0;
      for (int label : labels) {
        std::size_t hits = 0;
        for (std::size_t r = 0; r < n; ++r) {
          const auto& dl = database_labels[order[r]];
          if (std::binary_search(dl.begin(), dl.end(), label)) ++hits;
        }
        sum += static_cast<double>(hits) / static_cast<double>(n);
      }
      per_query[qi][fi] = sum / static_cast<double>(labels.size());
    }
  });

  report.precision.assign(fractions.size(), 0.0);
  for (const auto& row : per_query)
    for (std::size_t fi = 0; fi < fractions.size(); ++fi) report.precision[fi] += row[fi];
  for (double& p : report.precision) p /= static_cast<double>(queries.size());
  return report;
}

RetrievalReport retrieval_precision(const ModelParams& params, ModelKind kind, const std::vector<Document>& train_docs,
                                    const std::vector<Document>& query_docs, const std::vector<double>& fractions,
                                    int threads) {
  auto labels_of = [](const std::vector<Document>& docs) {
    std::vector<std::vector<int>> out;
    out.reserve(docs.size());
    for (const auto& d : docs) out.push_back(d.labels);
    return out;
  };
  return retrieval_precision(representations(params, kind, train_docs, false, threads), labels_of(train_docs),
                             representations(params, kind, query_docs, false, threads), labels_of(query_docs),
                             fractions, threads);
}

LabeledFeatures summed_word_features(const ModelParams& params, const std::vector<Document>& docs) {
  LabeledFeatures f;
  f.X = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(docs.size()), params.hidden_size());
  for (std::size_t t = 0; t < docs.size(); ++t) {
    for (WordId w : docs[t].words) f.X.row(static_cast<Eigen::Index>(t)) += params.W.col(w).transpose();
    f.labels.push_back(docs[t].labels);
  }
  return f;
}

namespace {

struct Standardizer {
  Eigen::RowVectorXd mean, scale;

  explicit Standardizer(const Eigen::MatrixXd& X) {
    mean = X.colwise().mean();
    scale = Eigen::RowVectorXd::Ones(X.cols());
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
      double var = (X.col(j).array() - mean(j)).square().mean();
      if (var > 0.0) scale(j) = std::sqrt(var);
    }
  }

  Eigen::MatrixXd apply(const Eigen::MatrixXd& X) const {
    Eigen::MatrixXd Z = X.rowwise() - mean;
    return Z.array().rowwise() / scale.array();
  }
};

// Per-label F1 over the union of true and predicted labels; returns macro mean.
double macro_f1(const std::vector<std::vector<int>>& truth, const std::vector<std::vector<int>>& pred, int num_labels,
                std::vector<double>* per_label) {
  std::vector<double> tp(num_labels, 0), fp(num_labels, 0), fn(num_labels, 0);
  std::vector<char> seen(num_labels, 0);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    for (int l : truth[i]) {
      seen[l] = 1;
      if (std::find(pred[i].begin(), pred[i].end(), l) != pred[i].end()) tp[l] += 1; else fn[l] += 1;
    }
    for (int l : pred[i]) {
      seen[l] = 1;
      if (std::find(truth[i].begin(), truth[i].end(), l) == truth[i].end()) fp[l] += 1;
    }
  }
  if (per_label) per_label->assign(num_labels, 0.0);
  double sum = 0.0;
  int n = 0;
  for (int l = 0; l < num_labels; ++l) {
    if (!seen[l]) continue;
    double denom = 2 * tp[l] + fp[l] + fn[l];
    double f1 = denom > 0 ? 2 * tp[l] / denom : 0.0;
    if (per_label) (*per_label)[l] = f1;
    sum += f1;
    ++n;
  }
  return n > 0 ? sum / n : 0.0;
}

double exact_match(const std::vector<std::vector<int>>& truth, const std::vector<std::vector<int>>& pred) {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i)
    if (truth[i] == pred[i]) ++hits;
  return truth.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(truth.size());
}

// Fitted classifier over the labels that occur in training.
class LabelModel {
 public:
  LabelModel(const Eigen::MatrixXd& X, const std::vector<std::vector<int>>& labels, int num_labels, bool multi,
             double l2)
      : multi_(multi) {
    std::vector<char> present(num_labels, 0);
    for (const auto& ls : labels)
      for (int l : ls) present[l] = 1;
    for (int l = 0; l < num_labels; ++l)
      if (present[l]) classes_.push_back(l);

    LogisticOptions opts;
    opts.l2 = l2;
    if (!multi_) {
      std::vector<int> y;
      for (const auto& ls : labels) y.push_back(index_of(ls.front()));
      if (classes_.size() > 1) softmax_ = LogisticRegression::fit(X, y, static_cast<int>(classes_.size()), opts);
      return;
    }
    for (int l : classes_) {
      std::vector<int> y;
      bool any_negative = false;
      for (const auto& ls : labels) {
        bool has = std::binary_search(ls.begin(), ls.end(), l);
        y.push_back(has ? 1 : 0);
        any_negative |= !has;
      }
      // A label carried by every training document is always predicted.
      if (!any_negative) {
        binary_.emplace_back();
        always_.push_back(1);
      } else {
        binary_.push_back(LogisticRegression::fit(X, y, 2, opts));
        always_.push_back(0);
      }
    }
  }

  std::vector<std::vector<int>> predict(const Eigen::MatrixXd& X) const {
    std::vector<std::vector<int>> out(static_cast<std::size_t>(X.rows()));
    if (!multi_) {
      if (classes_.size() == 1) {
        for (auto& o : out) o = {classes_.front()};
        return out;
      }
      auto y = softmax_.predict(X);
      for (std::size_t i = 0; i < y.size(); ++i) out[i] = {classes_[static_cast<std::size_t>(y[i])]};
      return out;
    }
    for (std::size_t c = 0; c < classes_.size(); ++c) {
      std::vector<int> y;
      if (always_[c]) y.assign(out.size(), 1); else y = binary_[c].predict(X);
      for (std::size_t i = 0; i < y.size(); ++i)
        if (y[i] == 1) out[i].push_back(classes_[c]);
    }
    return out;
  }

  const std::vector<int>& classes() const { return classes_; }

 private:
  int index_of(int label) const {
    return static_cast<int>(std::lower_bound(classes_.begin(), classes_.end(), label) - classes_.begin());
  }

  bool multi_;
  std::vector<int> classes_;
  LogisticRegression softmax_;
  std::vector<LogisticRegression> binary_;
  std::vector<char> always_;
};

}  // namespace

ClassificationReport classify_features(const LabeledFeatures& train, const LabeledFeatures& dev,
                                       const LabeledFeatures& test, int num_labels,
                                       const std::vector<double>& l2_grid) {
  if (l2_grid.empty()) throw Error("classify: empty l2 grid");
  if (train.X.rows() == 0 || test.X.rows() == 0) throw Error("classify: empty train or test split");
  ClassificationReport report;
  for (const auto* part : {&train, &dev, &test})
    for (const auto& ls : part->labels) {
      if (ls.empty()) throw Error("classify: unlabeled document");
      if (ls.size() > 1) report.multi_label = true;
      for (int l : ls)
        if (l < 0 || l >= num_labels) throw Error("classify: label id out of range");
    }

  Standardizer standardizer(train.X);
  const Eigen::MatrixXd Xtrain = standardizer.apply(train.X);
  const bool have_dev = dev.X.rows() > 0;
  if (!have_dev) std::cerr << "warning: no dev split, selecting l2 on the training split\n";
  const Eigen::MatrixXd Xdev = have_dev ? standardizer.apply(dev.X) : Xtrain;
  const auto& dev_labels = have_dev ? dev.labels : train.labels;

  std::size_t best = 0;
  std::vector<LabelModel> models;
  for (std::size_t g = 0; g < l2_grid.size(); ++g) {
    models.emplace_back(Xtrain, train.labels, num_labels, report.multi_label, l2_grid[g]);
    double f1 = macro_f1(dev_labels, models.back().predict(Xdev), num_labels, nullptr);
    report.dev_macro_f1.push_back(f1);
    if (f1 > report.dev_macro_f1[best]) best = g;
  }
  report.chosen_l2 = l2_grid[best];

  const auto& model = models[best];
  std::set<int> known(model.classes().begin(), model.classes().end());
  std::set<int> unseen;
  for (const auto& ls : test.labels)
    for (int l : ls)
      if (!known.count(l)) unseen.insert(l);
  report.unseen_test_labels.assign(unseen.begin(), unseen.end());
  if (!unseen.empty())
    std::cerr << "warning: " << unseen.size() << " test label(s) never seen in training; counted as wrong\n";

  report.test_predictions = model.predict(standardizer.apply(test.X));
  report.macro_f1 = macro_f1(test.labels, report.test_predictions, num_labels, &report.per_label_f1);
  report.accuracy = exact_match(test.labels, report.test_predictions);
  return report;
}

ClassificationReport classify(const ModelParams& params, const Corpus& corpus, const std::vector<double>& l2_grid) {
  return classify_features(summed_word_features(params, corpus.documents_in(Split::train)),
                           summed_word_features(params, corpus.documents_in(Split::dev)),
                           summed_word_features(params, corpus.documents_in(Split::test)),
                           static_cast<int>(corpus.label_names.size()), l2_grid);
}

std::vector<Topic> topic_words(const ModelParams& params, std::size_t top_n) {
  const auto K = static_cast<std::size_t>(params.vocab_size());
  if (top_n > K) throw Error("topic_words: top_n exceeds vocabulary size");
  std::vector<Topic> topics;
  for (Eigen::Index j = 0; j < params.hidden_size(); ++j) {
    std::vector<WordId> order(K);
    std::iota(order.begin(), order.end(), 0);
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(top_n), order.end(),
                      [&](WordId a, WordId b) {
                        const double wa = params.W(j, a), wb = params.W(j, b);
                        return wa > wb || (wa == wb && a < b);
                      });
    order.resize(top_n);
    topics.push_back({static_cast<int>(j), std::move(order), 0.0});
  }
  return topics;
}

namespace {

std::uint64_t pair_key(WordId a, WordId b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
}

}  // namespace

CooccurrenceStats::CooccurrenceStats(const std::vector<Document>& reference, std::size_t window,
                                     const std::vector<WordId>* vocabulary_of_interest) {
  if (window < 2) throw Error("coherence: window must be >= 2");
  if (reference.empty()) throw Error("coherence: empty reference corpus");
  std::set<WordId> interest;
  if (vocabulary_of_interest) interest.insert(vocabulary_of_interest->begin(), vocabulary_of_interest->end());
  auto wanted = [&](WordId w) { return !vocabulary_of_interest || interest.count(w) > 0; };

  std::vector<WordId> present;
  for (const auto& doc : reference) {
    const std::size_t D = doc.size();
    const std::size_t n_windows = D > window ? D - window + 1 : 1;
    const std::size_t width = std::min(D, window);
    for (std::size_t s = 0; s < n_windows; ++s) {
      present.assign(doc.words.begin() + static_cast<std::ptrdiff_t>(s),
                     doc.words.begin() + static_cast<std::ptrdiff_t>(s + width));
      std::sort(present.begin(), present.end());
      present.erase(std::unique(present.begin(), present.end()), present.end());
      present.erase(std::remove_if(present.begin(), present.end(), [&](WordId w) { return !wanted(w); }),
                    present.end());
      ++windows_;
      for (std::size_t i = 0; i < present.size(); ++i) {
        ++single_[present[i]];
        for (std::size_t j = i + 1; j < present.size(); ++j) ++pair_[pair_key(present[i], present[j])];
      }
    }
  }
}

std::size_t CooccurrenceStats::count(WordId w) const {
  auto it = single_.find(w);
  return it == single_.end() ? 0 : it->second;
}

std::size_t CooccurrenceStats::joint(WordId a, WordId b) const {
  if (a == b) return count(a);
  auto it = pair_.find(pair_key(a, b));
  return it == pair_.end() ? 0 : it->second;
}

double CooccurrenceStats::npmi(WordId a, WordId b) const {
  const std::size_t ca = count(a), cb = count(b), cab = joint(a, b);
  if (cab == 0) return -1.0;
  if (cab == ca && cab == cb) return 1.0;
  const double n = static_cast<double>(windows_);
  const double pa = ca / n, pb = cb / n, pab = cab / n;
  const double value = std::log((pab + kNpmiEpsilon) / (pa * pb)) / -std::log(pab + kNpmiEpsilon);
  return std::clamp(value, -1.0, 1.0);
}

CoherenceReport coherence_npmi(const std::vector<std::vector<WordId>>& topics, const CooccurrenceStats& stats) {
  CoherenceReport report;
  double total = 0.0;
  std::size_t scored_topics = 0;
  for (const auto& words : topics) {
    double sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < words.size(); ++i)
      for (std::size_t j = i + 1; j < words.size(); ++j) {
        if (stats.count(words[i]) == 0 || stats.count(words[j]) == 0) {
          ++report.skipped_pairs;
          continue;
        }
        sum += stats.npmi(words[i], words[j]);
        ++pairs;
      }
    const double score = pairs > 0 ? sum / static_cast<double>(pairs) : std::nan("");
    report.per_topic.push_back(score);
    if (pairs > 0) {
      total += score;
      ++scored_topics;
    }
  }
  if (report.skipped_pairs > 0)
    std::cerr << "warning: " << report.skipped_pairs << " word pair(s) skipped, word absent from reference corpus\n";
  report.mean = scored_topics > 0 ? total / static_cast<double>(scored_topics) : std::nan("");
  return report;
}

CoherenceReport coherence_npmi(const std::vector<std::vector<WordId>>& topics, const std::vector<Document>& reference,
                               std::size_t window) {
  std::vector<WordId> words;
  for (const auto& t : topics) words.insert(words.end(), t.begin(), t.end());
  CooccurrenceStats stats(reference, window, &words);
  return coherence_npmi(topics, stats);
}

std::vector<Neighbor> word_neighbors(const ModelParams& params, const Vocabulary& vocab, WordId word, std::size_t k) {
  const auto K = params.vocab_size();
  if (word < 0 || word >= K) throw Error("word_neighbors: word id out of range");
  if (k >= static_cast<std::size_t>(K)) throw Error("word_neighbors: k must be smaller than the vocabulary size");
  const Eigen::VectorXd q = params.W.col(word);
  const double qn = q.norm();
  std::vector<Neighbor> all;
  for (Eigen::Index v = 0; v < K; ++v) {
    if (v == word) continue;
    const double vn = params.W.col(v).norm();
    const double cos = (qn == 0.0 || vn == 0.0) ? 0.0 : q.dot(params.W.col(v)) / (qn * vn);
    all.push_back({static_cast<WordId>(v), vocab.empty() ? std::string() : vocab.token(static_cast<WordId>(v)), cos});
  }
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(),
                    [](const Neighbor& a, const Neighbor& b) {
                      return a.cosine > b.cosine || (a.cosine == b.cosine && a.word < b.word);
                    });
  all.resize(k);
  return all;
}

std::vector<Neighbor> word_neighbors(const Checkpoint& checkpoint, const std::string& token, std::size_t k) {
  auto id = checkpoint.vocab.find(token);
  if (!id) {
    std::string msg = "unknown word '" + token + "'; closest vocabulary tokens:";
    for (const auto& t : closest_tokens(checkpoint.vocab, token, 5)) msg += " " + t;
    throw Error(msg);
  }
  return word_neighbors(checkpoint.params, checkpoint.vocab, *id, k);
}

namespace {

std::size_t levenshtein(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  std::iota(prev.begin(), prev.end(), 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

}  // namespace

std::vector<std::string> closest_tokens(const Vocabulary& vocab, const std::string& token, std::size_t n) {
  std::vector<std::pair<std::size_t, std::string>> scored;
  for (const auto& t : vocab.tokens()) scored.emplace_back(levenshtein(t, token), t);
  n = std::min(n, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(n), scored.end());
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(scored[i].second);
  return out;
}

}  // namespace nade

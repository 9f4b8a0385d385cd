#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "nade/corpus.hpp"
#include "nade/model.hpp"

namespace nade {

struct Checkpoint;

struct PerplexityReport {
  double perplexity = 0.0;
  double mean_word_loglik = 0.0;  // mean over documents of log p(v) / |v|
  std::size_t documents = 0;
  std::size_t excluded = 0;  // rejected at load (empty after OOV filtering)
};

// exp(-(1/N) sum_t log p(v_t) / |v_t|), with log p from loglik_docnade or
// loglik_idocnade. Per-document terms are summed in document order.
PerplexityReport perplexity(const ModelParams& params, ModelKind kind, const std::vector<Document>& docs,
                            int threads = 1);
// Checks the corpus vocabulary against the checkpoint (CompatibilityError).
PerplexityReport perplexity(const Checkpoint& checkpoint, const Corpus& corpus, Split split, int threads = 1);

// Fraction grid plotted for retrieval curves.
std::vector<double> default_fractions();

struct RetrievalReport {
  std::vector<double> fractions;
  std::vector<double> precision;  // mean over queries, one per fraction
  std::size_t queries = 0;
  std::size_t zero_norm = 0;      // representations with zero norm (cosine taken as 0)
};

std::vector<Eigen::VectorXd> representations(const ModelParams& params, ModelKind kind,
                                             const std::vector<Document>& docs, bool include_all_words = false,
                                             int threads = 1);

// Cosine-ranked retrieval of ceil(f * |database|) neighbours per query. Per
// query precision is averaged over the query's labels; ties in similarity go
// to the lower database index.
RetrievalReport retrieval_precision(const std::vector<Eigen::VectorXd>& database,
                                    const std::vector<std::vector<int>>& database_labels,
                                    const std::vector<Eigen::VectorXd>& queries,
                                    const std::vector<std::vector<int>>& query_labels,
                                    const std::vector<double>& fractions, int threads = 1);
RetrievalReport retrieval_precision(const ModelParams& params, ModelKind kind, const std::vector<Document>& train_docs,
                                    const std::vector<Document>& query_docs, const std::vector<double>& fractions,
                                    int threads = 1);

struct ClassificationReport {
  bool multi_label = false;
  double macro_f1 = 0.0;
  double accuracy = 0.0;  // exact-match accuracy in multi-label mode
  double chosen_l2 = 0.0;
  std::vector<double> dev_macro_f1;      // one per l2 candidate
  std::vector<double> per_label_f1;      // indexed by label id
  std::vector<int> unseen_test_labels;   // labels never seen in training
  std::vector<std::vector<int>> test_predictions;
};

struct LabeledFeatures {
  Eigen::MatrixXd X;  // one row per document
  std::vector<std::vector<int>> labels;
};

// Bag-of-embeddings features: row t = sum_i W_{:, v_i}.
LabeledFeatures summed_word_features(const ModelParams& params, const std::vector<Document>& docs);

// Features are standardized with training-row statistics. One model per l2
// candidate is fitted on train; the candidate with the best dev macro-F1 is
// scored on test. Single-label data uses one softmax model, multi-label data
// one binary model per label.
ClassificationReport classify_features(const LabeledFeatures& train, const LabeledFeatures& dev,
                                       const LabeledFeatures& test, int num_labels,
                                       const std::vector<double>& l2_grid);
ClassificationReport classify(const ModelParams& params, const Corpus& corpus, const std::vector<double>& l2_grid);

struct Topic {
  int id = 0;
  std::vector<WordId> words;  // ranked, distinct
  double coherence = 0.0;
};

// Row j of W ranked descending; equal weights go to the lower word id.
std::vector<Topic> topic_words(const ModelParams& params, std::size_t top_n);

struct CoherenceReport {
  std::vector<double> per_topic;
  double mean = 0.0;
  std::size_t skipped_pairs = 0;  // pairs with a word absent from the reference corpus
};

// Sliding-window co-occurrence statistics over a reference corpus. Each
// document yields max(1, D - window + 1) windows.
class CooccurrenceStats {
 public:
  // With `vocabulary_of_interest`, pair counts are only kept for those words.
  CooccurrenceStats(const std::vector<Document>& reference, std::size_t window,
                    const std::vector<WordId>* vocabulary_of_interest = nullptr);

  std::size_t windows() const { return windows_; }
  std::size_t count(WordId w) const;
  std::size_t joint(WordId a, WordId b) const;
  // In [-1, 1]; -1 when the pair never co-occurs; 1 when a and b only
  // ever appear together.
  double npmi(WordId a, WordId b) const;

 private:
  std::size_t windows_ = 0;
  std::unordered_map<WordId, std::size_t> single_;
  std::unordered_map<std::uint64_t, std::size_t> pair_;
};

inline constexpr double kNpmiEpsilon = 1e-12;

CoherenceReport coherence_npmi(const std::vector<std::vector<WordId>>& topics, const CooccurrenceStats& stats);
CoherenceReport coherence_npmi(const std::vector<std::vector<WordId>>& topics, const std::vector<Document>& reference,
                               std::size_t window = 10);

struct Neighbor {
  WordId word = 0;
  std::string token;
  double cosine = 0.0;
};

// Cosine neighbours of W_{:, word} among all other columns, descending.
std::vector<Neighbor> word_neighbors(const ModelParams& params, const Vocabulary& vocab, WordId word, std::size_t k);
std::vector<Neighbor> word_neighbors(const Checkpoint& checkpoint, const std::string& token, std::size_t k);

// Vocabulary tokens closest to `token` by Levenshtein distance.
std::vector<std::string> closest_tokens(const Vocabulary& vocab, const std::string& token, std::size_t n);

}  // namespace nade

// nade: train and evaluate document NADE topic models.
//
//   nade train --train train.txt [--dev dev.txt] --out model.nade
//   nade eval  --checkpoint model.nade --task ppl --test test.txt
//   nade repr  --checkpoint model.nade --input docs.txt --out repr.csv
//   nade topics --checkpoint model.nade [--reference train.txt]
//
// Exit codes: 0 success, 2 usage or input error, 3 checkpoint/corpus
// incompatibility, 4 numerical failure.

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nade/corpus.hpp"
#include "nade/error.hpp"
#include "nade/eval.hpp"
#include "nade/parallel.hpp"
#include "nade/random.hpp"
#include "nade/trainer.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitCompat = 3;
constexpr int kExitNumerical = 4;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw nade::Error("cannot open file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string hex64(std::uint64_t v) {
  std::ostringstream ss;
  ss << std::hex << std::setw(16) << std::setfill('0') << v;
  return ss.str();
}

// Shortest text that reads back to the same double.
std::string num(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string file_digest(const fs::path& path) { return "fnv1a64:" + hex64(nade::fnv1a64(read_file(path))); }

void write_text(const std::optional<fs::path>& path, const std::string& text) {
  if (!path) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(*path, std::ios::binary | std::ios::trunc);
  if (!out) throw nade::Error("cannot write " + path->string());
  out << text;
  if (!out) throw nade::Error("failed writing " + path->string());
}

std::vector<double> parse_double_list(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw CLI::ValidationError(flag, "not a number: '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw CLI::ValidationError(flag, "expected a comma-separated list of numbers");
  return out;
}

// Manifest shared by every subcommand.
struct Manifest {
  json j;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  explicit Manifest(const std::string& subcommand) {
    j["subcommand"] = subcommand;
    j["inputs"] = json::object();
    j["outputs"] = json::array();
  }
  void input(const std::string& role, const fs::path& path) {
    j["inputs"][role] = {{"path", path.string()}, {"digest", file_digest(path)}};
  }
  void output(const fs::path& path) { j["outputs"].push_back(path.string()); }
  void write(const fs::path& path) {
    j["wall_clock_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw nade::Error("cannot write manifest " + path.string());
    out << j.dump(2) << "\n";
  }
};

// ---------------------------------------------------------------- corpus I/O

struct CorpusFiles {
  std::string train, dev, test;
  bool no_lowercase = false;
  std::size_t max_vocab = 2000;
};

CLI::Option* add_corpus_flags(CLI::App* app, CorpusFiles& f) {
  app->add_option("--train,--corpus", f.train, "Training documents (labels<TAB>tokens per line)");
  auto* dev = app->add_option("--dev", f.dev, "Development documents");
  app->add_option("--test", f.test, "Test documents");
  app->add_flag("--no-lowercase", f.no_lowercase, "Keep token case");
  return dev;
}

std::vector<nade::RawDocument> read_optional(const std::string& path, bool lowercase) {
  if (path.empty()) return {};
  if (!fs::exists(path)) throw nade::Error("corpus file not found: " + path);
  return nade::read_corpus_file(path, lowercase);
}

void record_inputs(Manifest& m, const CorpusFiles& f) {
  if (!f.train.empty()) m.input("train", f.train);
  if (!f.dev.empty()) m.input("dev", f.dev);
  if (!f.test.empty()) m.input("test", f.test);
}

// Documents are encoded against `vocab`; out-of-vocabulary tokens are dropped.
nade::Corpus load_for_checkpoint(const CorpusFiles& f, const nade::Vocabulary& vocab) {
  nade::CorpusFormat format;
  format.lowercase = !f.no_lowercase;
  return nade::assemble_corpus(read_optional(f.train, format.lowercase), read_optional(f.dev, format.lowercase),
                               read_optional(f.test, format.lowercase), format, &vocab);
}

nade::Checkpoint load_checked(const std::string& path, const std::string& vocab_path) {
  if (!fs::exists(path)) throw nade::Error("checkpoint not found: " + path);
  nade::Checkpoint ck = nade::load_checkpoint(path);
  if (!vocab_path.empty()) {
    nade::Vocabulary v = nade::read_vocabulary(vocab_path);
    if (v.fingerprint() != ck.vocab.fingerprint())
      throw nade::CompatibilityError("vocabulary " + vocab_path + " (fingerprint " + hex64(v.fingerprint()) +
                                     ") does not match checkpoint " + path + " (fingerprint " +
                                     hex64(ck.vocab.fingerprint()) + ")");
  }
  return ck;
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  CorpusFiles files;
  std::string out = "model.nade";
  std::string lr = "0.001";
  std::string model = "idocnade", output = "tree", activation = "sigmoid", objective = "exact";
  std::string selection = "dev_ppl";
  double dev_fraction = 0.1;
  bool quiet = false;
  nade::TrainConfig config;
};

// Moves a seeded random ceil(fraction * N) of the training documents to dev.
void carve_dev(std::vector<nade::RawDocument>& train, std::vector<nade::RawDocument>& dev, double fraction,
               std::uint64_t seed) {
  if (fraction <= 0.0 || train.empty()) return;
  const std::size_t n = train.size();
  std::size_t take = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9));
  take = std::min(take, n - 1);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  nade::Rng rng = nade::derive_rng(seed, "dev-split");
  rng.shuffle(order);
  std::vector<bool> to_dev(n, false);
  for (std::size_t i = 0; i < take; ++i) to_dev[order[i]] = true;
  std::vector<nade::RawDocument> kept;
  for (std::size_t i = 0; i < n; ++i) (to_dev[i] ? dev : kept).push_back(std::move(train[i]));
  train = std::move(kept);
}

int cmd_train(TrainArgs& a) {
  Manifest manifest("train");
  nade::TrainConfig cfg = a.config;
  cfg.model_kind = nade::parse_model_kind(a.model);
  cfg.output_kind = nade::parse_output_kind(a.output);
  cfg.activation = nade::parse_activation(a.activation);
  cfg.objective = nade::parse_objective(a.objective);
  cfg.selection_metric = nade::parse_selection_metric(a.selection);
  cfg.verbose = !a.quiet;
  const std::vector<double> lrs = parse_double_list(a.lr, "--lr");
  cfg.learning_rate = lrs.front();
  if (a.files.train.empty()) throw CLI::RequiredError("--train");

  nade::CorpusFormat format;
  format.lowercase = !a.files.no_lowercase;
  format.max_vocab = a.files.max_vocab;
  auto train_raw = read_optional(a.files.train, format.lowercase);
  auto dev_raw = read_optional(a.files.dev, format.lowercase);
  auto test_raw = read_optional(a.files.test, format.lowercase);
  if (a.files.dev.empty()) carve_dev(train_raw, dev_raw, a.dev_fraction, cfg.seed);
  nade::Corpus corpus = nade::assemble_corpus(train_raw, dev_raw, test_raw, format);
  record_inputs(manifest, a.files);

  nade::GridResult grid = nade::train_grid(corpus, cfg, lrs);
  const nade::Checkpoint& ck = grid.best;

  const fs::path out = a.out;
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  nade::save_checkpoint(ck, out);
  const fs::path vocab_path = fs::path(a.out + ".vocab");
  nade::write_vocabulary(ck.vocab, vocab_path);
  manifest.output(out);
  manifest.output(a.out + ".json");
  manifest.output(vocab_path);

  std::cout << "vocabulary " << ck.vocab.size() << " words, train " << corpus.count(nade::Split::train) << " dev "
            << corpus.count(nade::Split::dev) << " test " << corpus.count(nade::Split::test) << " documents\n";
  for (std::size_t i = 0; i < grid.learning_rates.size(); ++i)
    std::cout << "lr " << grid.learning_rates[i] << " best " << nade::to_string(cfg.selection_metric) << " "
              << grid.best_metrics[i] << "\n";
  std::cout << "dev trajectory (lr " << ck.config.learning_rate << "):\n";
  for (const auto& e : ck.history.dev) std::cout << "  pass " << e.pass << " " << e.metric << "\n";
  std::cout << "selected pass " << ck.history.best_pass << " " << nade::to_string(cfg.selection_metric) << " "
            << ck.history.best_metric << "\nwrote " << out.string() << "\n";

  manifest.j["config"] = json::parse(nade::config_to_json(ck.config));
  manifest.j["learning_rate_grid"] = lrs;
  manifest.j["seed"] = cfg.seed;
  manifest.j["dev_fraction"] = a.files.dev.empty() ? a.dev_fraction : 0.0;
  manifest.j["max_vocab"] = a.files.max_vocab;
  manifest.j["lowercase"] = format.lowercase;
  manifest.write(a.out + ".manifest.json");
  return kExitOk;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  CorpusFiles files;
  std::string checkpoint, vocab, task = "ppl", split = "test", format, out, word, reference, fractions;
  std::string l2 = "0.001,0.01,0.1,1,10,100";
  std::size_t k = 10, top = 10, window = 10;
  bool include_all_words = false;
  int threads = nade::default_threads();
};

json topics_json(const nade::Checkpoint& ck, std::size_t top, const nade::Corpus* reference, std::size_t window) {
  auto topics = nade::topic_words(ck.params, top);
  json arr = json::array();
  std::optional<nade::CoherenceReport> coh;
  if (reference) {
    std::vector<std::vector<nade::WordId>> words;
    for (const auto& t : topics) words.push_back(t.words);
    coh = nade::coherence_npmi(words, reference->documents_in(nade::Split::train), window);
  }
  for (std::size_t i = 0; i < topics.size(); ++i) {
    json t = {{"id", topics[i].id}, {"words", json::array()}};
    for (auto w : topics[i].words) t["words"].push_back(ck.vocab.token(w));
    if (coh) t["npmi"] = coh->per_topic[i];
    arr.push_back(t);
  }
  json j = {{"topics", arr}, {"top", top}};
  if (coh) {
    j["mean_npmi"] = coh->mean;
    j["window"] = window;
    j["skipped_pairs"] = coh->skipped_pairs;
  }
  return j;
}

std::string topics_text(const json& j) {
  std::ostringstream ss;
  for (const auto& t : j["topics"]) {
    ss << "topic " << t["id"].get<int>();
    if (t.contains("npmi")) ss << " npmi " << t["npmi"].get<double>();
    ss << ":";
    for (const auto& w : t["words"]) ss << " " << w.get<std::string>();
    ss << "\n";
  }
  if (j.contains("mean_npmi")) ss << "mean npmi " << j["mean_npmi"].get<double>() << "\n";
  return ss.str();
}

int cmd_eval(EvalArgs& a) {
  Manifest manifest("eval");
  nade::Checkpoint ck = load_checked(a.checkpoint, a.vocab);
  manifest.input("checkpoint", a.checkpoint);
  if (!a.vocab.empty()) manifest.input("vocab", a.vocab);
  const nade::ModelKind kind = ck.config.model_kind;
  const nade::Split split = nade::parse_split(a.split);
  const std::string format = a.format.empty() ? (a.task == "ir" ? "csv" : "json") : a.format;
  if (format != "json" && format != "text" && format != "csv")
    throw CLI::ValidationError("--format", "expected json, text or csv");
  if (format == "csv" && a.task != "ir") throw CLI::ValidationError("--format", "csv is only available for --task ir");

  auto require = [](const std::string& path, const char* flag, const char* task) {
    if (path.empty()) throw CLI::ValidationError(flag, std::string("required for --task ") + task);
  };
  auto split_file = [&]() -> const std::string& {
    switch (split) {
      case nade::Split::train: return a.files.train;
      case nade::Split::dev: return a.files.dev;
      default: return a.files.test;
    }
  };

  json report = {{"task", a.task}, {"checkpoint", a.checkpoint}, {"model", nade::to_string(kind)}};
  std::string text;

  if (a.task == "ppl") {
    require(split_file(), split == nade::Split::train ? "--train" : split == nade::Split::dev ? "--dev" : "--test",
            "ppl");
    nade::Corpus corpus = load_for_checkpoint(a.files, ck.vocab);
    auto r = nade::perplexity(ck, corpus, split, a.threads);
    report["split"] = a.split;
    report["perplexity"] = r.perplexity;
    report["mean_word_loglik"] = r.mean_word_loglik;
    report["documents"] = r.documents;
    report["excluded"] = r.excluded;
    std::ostringstream ss;
    ss << std::setprecision(10) << "perplexity " << r.perplexity << " over " << r.documents << " documents ("
       << r.excluded << " excluded)\n";
    text = ss.str();
  } else if (a.task == "ir") {
    require(a.files.train, "--train", "ir");
    require(split_file(), "--test", "ir");
    nade::Corpus corpus = load_for_checkpoint(a.files, ck.vocab);
    const auto fractions = a.fractions.empty() ? nade::default_fractions() : parse_double_list(a.fractions, "--fractions");
    auto db = nade::representations(ck.params, kind, corpus.documents_in(nade::Split::train), a.include_all_words,
                                    a.threads);
    auto q = nade::representations(ck.params, kind, corpus.documents_in(split), a.include_all_words, a.threads);
    auto labels = [](const std::vector<nade::Document>& docs) {
      std::vector<std::vector<int>> out;
      for (const auto& d : docs) out.push_back(d.labels);
      return out;
    };
    auto r = nade::retrieval_precision(db, labels(corpus.documents_in(nade::Split::train)), q,
                                       labels(corpus.documents_in(split)), fractions, a.threads);
    report["split"] = a.split;
    report["queries"] = r.queries;
    report["zero_norm"] = r.zero_norm;
    report["fractions"] = r.fractions;
    report["precision"] = r.precision;
    std::ostringstream ss;
    ss << "fraction,precision\n";
    for (std::size_t i = 0; i < r.fractions.size(); ++i) ss << num(r.fractions[i]) << "," << num(r.precision[i]) << "\n";
    text = ss.str();
  } else if (a.task == "classify") {
    require(a.files.train, "--train", "classify");
    require(a.files.test, "--test", "classify");
    nade::Corpus corpus = load_for_checkpoint(a.files, ck.vocab);
    auto r = nade::classify(ck.params, corpus, parse_double_list(a.l2, "--l2"));
    report["multi_label"] = r.multi_label;
    report["accuracy"] = r.accuracy;
    report["macro_f1"] = r.macro_f1;
    report["chosen_l2"] = r.chosen_l2;
    report["dev_macro_f1"] = r.dev_macro_f1;
    json per = json::object();
    for (std::size_t i = 0; i < r.per_label_f1.size() && i < corpus.label_names.size(); ++i)
      per[corpus.label_names[i]] = r.per_label_f1[i];
    report["per_label_f1"] = per;
    json unseen = json::array();
    for (int l : r.unseen_test_labels) unseen.push_back(corpus.label_names[static_cast<std::size_t>(l)]);
    report["unseen_test_labels"] = unseen;
    std::ostringstream ss;
    ss << std::setprecision(10) << "accuracy " << r.accuracy << "\nmacro_f1 " << r.macro_f1 << "\nl2 " << r.chosen_l2
       << "\n";
    text = ss.str();
  } else if (a.task == "coherence" || a.task == "topics") {
    std::optional<nade::Corpus> ref;
    if (a.task == "coherence" && a.reference.empty() && a.files.train.empty())
      throw CLI::ValidationError("--reference", "required for --task coherence");
    const std::string ref_path = a.reference.empty() ? a.files.train : a.reference;
    if (!ref_path.empty()) {
      CorpusFiles rf;
      rf.train = ref_path;
      rf.no_lowercase = a.files.no_lowercase;
      ref = load_for_checkpoint(rf, ck.vocab);
      manifest.input("reference", ref_path);
    }
    report.update(topics_json(ck, a.top, ref ? &*ref : nullptr, a.window));
    text = topics_text(report);
  } else if (a.task == "neighbors") {
    if (a.word.empty()) throw CLI::ValidationError("--word", "required for --task neighbors");
    auto ns = nade::word_neighbors(ck, a.word, a.k);
    report["word"] = a.word;
    json arr = json::array();
    std::ostringstream ss;
    ss << std::setprecision(6);
    for (const auto& n : ns) {
      arr.push_back({{"word", n.token}, {"cosine", n.cosine}});
      ss << n.token << " " << n.cosine << "\n";
    }
    report["neighbors"] = arr;
    text = ss.str();
  } else {
    throw CLI::ValidationError("--task", "unknown task '" + a.task + "'");
  }
  record_inputs(manifest, a.files);

  const std::optional<fs::path> out = a.out.empty() ? std::nullopt : std::optional<fs::path>(a.out);
  write_text(out, format == "json" ? report.dump(2) + "\n" : text);
  if (out) {
    manifest.output(*out);
    manifest.j["task"] = a.task;
    manifest.j["config"] = json::parse(nade::config_to_json(ck.config));
    manifest.j["seed"] = ck.config.seed;
    manifest.write(a.out + ".manifest.json");
  }
  return kExitOk;
}

// ---------------------------------------------------------------- repr

struct ReprArgs {
  std::string checkpoint, vocab, input, out;
  bool no_lowercase = false, include_all_words = false;
};

int cmd_repr(ReprArgs& a) {
  Manifest manifest("repr");
  nade::Checkpoint ck = load_checked(a.checkpoint, a.vocab);
  if (!fs::exists(a.input)) throw nade::Error("corpus file not found: " + a.input);
  auto raw = nade::read_corpus_file(a.input, !a.no_lowercase);
  manifest.input("checkpoint", a.checkpoint);
  manifest.input("input", a.input);
  const auto H = static_cast<Eigen::Index>(ck.params.W.rows());
  std::ostringstream ss;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    Eigen::VectorXd h;
    try {
      nade::Document d = nade::encode_document(raw[i].tokens, ck.vocab, nade::OovPolicy::skip);
      h = nade::document_representation(ck.params, d, ck.config.model_kind, a.include_all_words);
    } catch (const nade::NumericalError&) {
      throw;
    } catch (const nade::Error& e) {
      std::cerr << "warning: document " << i + 1 << " of " << a.input << ": " << e.what() << "; writing NaN row\n";
      h = Eigen::VectorXd::Constant(H, std::numeric_limits<double>::quiet_NaN());
    }
    for (Eigen::Index j = 0; j < H; ++j) ss << (j ? "," : "") << num(h[j]);
    ss << "\n";
  }
  const std::optional<fs::path> out = a.out.empty() ? std::nullopt : std::optional<fs::path>(a.out);
  write_text(out, ss.str());
  if (out) {
    manifest.output(*out);
    manifest.j["config"] = json::parse(nade::config_to_json(ck.config));
    manifest.j["seed"] = ck.config.seed;
    manifest.write(a.out + ".manifest.json");
  }
  return kExitOk;
}

// ---------------------------------------------------------------- topics

struct TopicsArgs {
  std::string checkpoint, reference, out, format = "text";
  std::size_t top = 10, window = 10;
  bool no_lowercase = false;
};

int cmd_topics(TopicsArgs& a) {
  nade::Checkpoint ck = load_checked(a.checkpoint, "");
  std::optional<nade::Corpus> ref;
  if (!a.reference.empty()) {
    CorpusFiles rf;
    rf.train = a.reference;
    rf.no_lowercase = a.no_lowercase;
    ref = load_for_checkpoint(rf, ck.vocab);
  }
  json j = topics_json(ck, a.top, ref ? &*ref : nullptr, a.window);
  write_text(a.out.empty() ? std::nullopt : std::optional<fs::path>(a.out),
             a.format == "json" ? j.dump(2) + "\n" : topics_text(j));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Document NADE topic models: training and evaluation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "nade 1.0.0");

  TrainArgs ta;
  auto* train = app.add_subcommand("train", "Train a model and write a checkpoint");
  auto* train_dev = add_corpus_flags(train, ta.files);
  train->add_option("--max-vocab", ta.files.max_vocab, "Vocabulary size (most frequent training words)")
      ->check(CLI::PositiveNumber);
  train->add_option("--dev-fraction", ta.dev_fraction, "Share of training documents held out when --dev is absent")
      ->check(CLI::Range(0.0, 0.9))
      ->excludes(train_dev);
  train->add_option("--out,-o", ta.out, "Checkpoint path");
  train->add_option("--model", ta.model, "docnade or idocnade")->check(CLI::IsMember({"docnade", "idocnade"}));
  train->add_option("--output-layer", ta.output, "tree or flat")->check(CLI::IsMember({"tree", "flat"}));
  train->add_option("--hidden", ta.config.hidden_size, "Hidden units")->check(CLI::PositiveNumber);
  train->add_option("--lr", ta.lr, "Learning rate, or comma-separated grid");
  train->add_option("--passes", ta.config.passes, "Training passes")->check(CLI::NonNegativeNumber);
  train->add_option("--activation", ta.activation, "sigmoid or tanh")->check(CLI::IsMember({"sigmoid", "tanh"}));
  train->add_flag("--scaling", ta.config.scaling, "Scale hidden bias by document length");
  train->add_option("--objective", ta.objective, "exact or pseudo")->check(CLI::IsMember({"exact", "pseudo"}));
  train->add_option("--selection", ta.selection, "dev_ppl or dev_ir_precision")
      ->check(CLI::IsMember({"dev_ppl", "dev_ir_precision"}));
  train->add_option("--selection-fraction", ta.config.selection_fraction, "Retrieval fraction for dev_ir_precision")
      ->check(CLI::Range(1e-9, 1.0));
  train->add_option("--init-scale", ta.config.init_scale, "Initial weight scale")->check(CLI::NonNegativeNumber);
  train->add_option("--eval-every", ta.config.eval_every, "Passes between dev evaluations")->check(CLI::PositiveNumber);
  train->add_option("--seed", ta.config.seed, "Random seed");
  ta.config.threads = nade::default_threads();
  train->add_option("--threads", ta.config.threads, "Evaluation workers (default: NADE_THREADS or 1)")
      ->check(CLI::PositiveNumber);
  train->add_flag("--quiet,-q", ta.quiet, "Do not print per-evaluation progress");

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint");
  add_corpus_flags(eval, ea.files);
  eval->add_option("--checkpoint,-m", ea.checkpoint, "Checkpoint path")->required();
  eval->add_option("--vocab", ea.vocab, "Vocabulary file that the checkpoint must match");
  eval->add_option("--task", ea.task, "ppl, ir, classify, coherence, topics or neighbors")
      ->check(CLI::IsMember({"ppl", "ir", "classify", "coherence", "topics", "neighbors"}));
  eval->add_option("--split", ea.split, "Split evaluated by ppl and queried by ir")
      ->check(CLI::IsMember({"train", "dev", "test"}));
  eval->add_option("--format", ea.format, "json, text or csv (ir defaults to csv, others to json)");
  eval->add_option("--out,-o", ea.out, "Report path (default stdout)");
  eval->add_option("--fractions", ea.fractions, "Retrieval fractions, comma-separated");
  eval->add_flag("--include-all-words", ea.include_all_words, "Representation sums every word in both directions");
  eval->add_option("--l2", ea.l2, "Classifier L2 grid, comma-separated");
  eval->add_option("--word", ea.word, "Query word for neighbors");
  eval->add_option("--k", ea.k, "Number of neighbours")->check(CLI::PositiveNumber);
  eval->add_option("--top", ea.top, "Words per topic")->check(CLI::PositiveNumber);
  eval->add_option("--reference", ea.reference, "Reference corpus for coherence (default --train)");
  eval->add_option("--window", ea.window, "Coherence sliding window")->check(CLI::Range(2, 1000000));
  eval->add_option("--threads", ea.threads, "Evaluation workers (default: NADE_THREADS or 1)")
      ->check(CLI::PositiveNumber);

  ReprArgs ra;
  auto* repr = app.add_subcommand("repr", "Write one document representation per input line as CSV");
  repr->add_option("--checkpoint,-m", ra.checkpoint, "Checkpoint path")->required();
  repr->add_option("--vocab", ra.vocab, "Vocabulary file that the checkpoint must match");
  repr->add_option("--input,-i", ra.input, "Documents (labels<TAB>tokens per line)")->required();
  repr->add_option("--out,-o", ra.out, "CSV path (default stdout)");
  repr->add_flag("--no-lowercase", ra.no_lowercase, "Keep token case");
  repr->add_flag("--include-all-words", ra.include_all_words, "Sum every word in both directions");

  TopicsArgs tpa;
  auto* topics = app.add_subcommand("topics", "List the top words of every hidden unit");
  topics->add_option("--checkpoint,-m", tpa.checkpoint, "Checkpoint path")->required();
  topics->add_option("--top", tpa.top, "Words per topic")->check(CLI::PositiveNumber);
  topics->add_option("--reference", tpa.reference, "Reference corpus; adds NPMI coherence");
  topics->add_option("--window", tpa.window, "Coherence sliding window")->check(CLI::Range(2, 1000000));
  topics->add_option("--format", tpa.format, "text or json")->check(CLI::IsMember({"text", "json"}));
  topics->add_option("--out,-o", tpa.out, "Output path (default stdout)");
  topics->add_flag("--no-lowercase", tpa.no_lowercase, "Keep token case");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*train) return cmd_train(ta);
    if (*eval) return cmd_eval(ea);
    if (*repr) return cmd_repr(ra);
    if (*topics) return cmd_topics(tpa);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.get_name() << ": " << e.what() << "\n";
    return kExitUsage;
  } catch (const nade::CompatibilityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCompat;
  } catch (const nade::NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

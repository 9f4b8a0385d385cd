#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <json.hpp>

#include "nade/corpus.hpp"
#include "nade/error.hpp"
#include "nade/eval.hpp"
#include "nade/synthetic.hpp"
#include "nade/trainer.hpp"

namespace py = pybind11;
using namespace nade;

namespace {

using RawPairs = std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>>;

std::vector<RawDocument> to_raw(const RawPairs& docs, bool lowercase) {
  std::vector<RawDocument> out;
  out.reserve(docs.size());
  for (const auto& [labels, tokens] : docs) {
    RawDocument d{labels, tokens};
    if (lowercase)
      for (auto& t : d.tokens)
        for (auto& ch : t) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    out.push_back(std::move(d));
  }
  return out;
}

RawPairs to_pairs(const std::vector<RawDocument>& docs) {
  RawPairs out;
  for (const auto& d : docs) out.emplace_back(d.labels, d.tokens);
  return out;
}

TrainConfig make_config(const py::kwargs& kw) {
  nlohmann::json j = nlohmann::json::parse(config_to_json(TrainConfig{}));
  for (auto item : kw) {
    const auto key = py::cast<std::string>(item.first);
    if (!j.contains(key)) throw Error("unknown training option '" + key + "'");
    const py::handle v = item.second;
    if (py::isinstance<py::bool_>(v))
      j[key] = py::cast<bool>(v);
    else if (py::isinstance<py::int_>(v))
      j[key] = py::cast<long long>(v);
    else if (py::isinstance<py::float_>(v))
      j[key] = py::cast<double>(v);
    else
      j[key] = py::cast<std::string>(v);
  }
  if (j["learning_rate"].is_number_integer()) j["learning_rate"] = j["learning_rate"].get<double>();
  if (j["init_scale"].is_number_integer()) j["init_scale"] = j["init_scale"].get<double>();
  if (j["selection_fraction"].is_number_integer()) j["selection_fraction"] = j["selection_fraction"].get<double>();
  return config_from_json(j.dump());
}

py::dict history_dict(const TrainingHistory& h) {
  py::dict d;
  d["passes_run"] = h.passes_run;
  d["best_pass"] = h.best_pass;
  d["best_metric"] = h.best_metric;
  d["train_nll"] = h.train_nll;
  py::list dev;
  for (const auto& e : h.dev) dev.append(py::make_tuple(e.pass, e.metric));
  d["dev"] = dev;
  return d;
}

Document encode(const Checkpoint& ck, const std::vector<std::string>& tokens) {
  return encode_document(tokens, ck.vocab, OovPolicy::skip);
}

}  // namespace

PYBIND11_MODULE(_nade, m) {
  m.doc() = "Document NADE topic models";

  static py::exception<Error> error(m, "Error", PyExc_ValueError);
  static py::exception<CompatibilityError> compat(m, "CompatibilityError", error.ptr());
  static py::exception<NumericalError> numerical(m, "NumericalError", error.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const CompatibilityError& e) {
      PyErr_SetString(compat.ptr(), e.what());
    } catch (const NumericalError& e) {
      PyErr_SetString(numerical.ptr(), e.what());
    } catch (const Error& e) {
      PyErr_SetString(error.ptr(), e.what());
    }
  });

  py::enum_<Split>(m, "Split").value("train", Split::train).value("dev", Split::dev).value("test", Split::test);

  py::class_<Corpus>(m, "Corpus")
      .def_property_readonly("vocabulary", [](const Corpus& c) { return c.vocab.tokens(); })
      .def_readonly("label_names", &Corpus::label_names)
      .def("count", &Corpus::count)
      .def("rejected", &Corpus::rejected_in)
      .def("documents", [](const Corpus& c, Split s) {
        std::vector<std::vector<WordId>> out;
        for (const auto& d : c.documents_in(s)) out.push_back(d.words);
        return out;
      })
      .def("labels", [](const Corpus& c, Split s) {
        std::vector<std::vector<int>> out;
        for (const auto& d : c.documents_in(s)) out.push_back(d.labels);
        return out;
      });

  m.def(
      "read_corpus",
      [](const std::filesystem::path& path, bool lowercase) { return to_pairs(read_corpus_file(path, lowercase)); },
      py::arg("path"), py::arg("lowercase") = true,
      "Reads `labels<TAB>tokens` lines into (labels, tokens) pairs.");

  m.def(
      "make_corpus",
      [](const RawPairs& train, const RawPairs& dev, const RawPairs& test, bool lowercase, std::size_t max_vocab,
         std::optional<std::vector<std::string>> vocabulary) {
        CorpusFormat f;
        f.lowercase = lowercase;
        f.max_vocab = max_vocab;
        std::optional<Vocabulary> v;
        if (vocabulary) v.emplace(*vocabulary);
        return assemble_corpus(to_raw(train, lowercase), to_raw(dev, lowercase), to_raw(test, lowercase), f,
                               v ? &*v : nullptr);
      },
      py::arg("train"), py::arg("dev") = RawPairs{}, py::arg("test") = RawPairs{}, py::arg("lowercase") = true,
      py::arg("max_vocab") = 2000, py::arg("vocabulary") = py::none(),
      "Builds the vocabulary from `train` (or uses `vocabulary`) and encodes all splits.");

  m.def(
      "synthetic_corpus",
      [](int topics, int words_per_topic, std::size_t train, std::size_t dev, std::size_t test, double noise,
         std::uint64_t seed) {
        SyntheticSpec s;
        s.topics = topics;
        s.words_per_topic = words_per_topic;
        s.train = train;
        s.dev = dev;
        s.test = test;
        s.noise = noise;
        s.seed = seed;
        auto c = generate_synthetic(s);
        return py::make_tuple(to_pairs(c.train), to_pairs(c.dev), to_pairs(c.test));
      },
      py::arg("topics") = 2, py::arg("words_per_topic") = 50, py::arg("train") = 400, py::arg("dev") = 50,
      py::arg("test") = 100, py::arg("noise") = 0.1, py::arg("seed") = 1,
      "Topic-mixture documents as (train, dev, test) lists of (labels, tokens).");

  py::class_<Checkpoint>(m, "Checkpoint")
      .def_property_readonly("W", [](const Checkpoint& c) { return c.params.W; })
      .def_property_readonly("U", [](const Checkpoint& c) { return c.params.U; })
      .def_property_readonly("b_fwd", [](const Checkpoint& c) { return c.params.b_fwd; })
      .def_property_readonly("b_bwd", [](const Checkpoint& c) { return c.params.b_bwd; })
      .def_property_readonly("c_fwd", [](const Checkpoint& c) { return c.params.c_fwd; })
      .def_property_readonly("c_bwd", [](const Checkpoint& c) { return c.params.c_bwd; })
      .def_property_readonly("vocabulary", [](const Checkpoint& c) { return c.vocab.tokens(); })
      .def_property_readonly("config",
                             [](const Checkpoint& c) {
                               return py::module_::import("json").attr("loads")(config_to_json(c.config));
                             })
      .def_property_readonly("history", [](const Checkpoint& c) { return history_dict(c.history); })
      .def("save", [](const Checkpoint& c, const std::filesystem::path& p) { save_checkpoint(c, p); })
      .def(
          "loglik",
          [](const Checkpoint& c, const std::vector<std::string>& tokens) {
            return loglik(c.params, encode(c, tokens), c.config.model_kind);
          },
          py::arg("tokens"), "Log-likelihood of a token list under the checkpoint's model.")
      .def(
          "representation",
          [](const Checkpoint& c, const std::vector<std::string>& tokens, bool include_all_words) {
            return document_representation(c.params, encode(c, tokens), c.config.model_kind, include_all_words);
          },
          py::arg("tokens"), py::arg("include_all_words") = false);

  m.def("load_checkpoint", [](const std::filesystem::path& p) { return load_checkpoint(p); }, py::arg("path"));

  m.def(
      "train",
      [](const Corpus& corpus, std::vector<double> learning_rates, const py::kwargs& kw) {
        TrainConfig cfg = make_config(kw);
        py::gil_scoped_release release;
        return train_grid(corpus, cfg, learning_rates).best;
      },
      py::arg("corpus"), py::arg("learning_rates") = std::vector<double>{0.001},
      "Trains once per learning rate and returns the checkpoint with the best dev metric. Keyword arguments set "
      "training options (hidden_size, passes, model_kind, output_kind, activation, scaling, seed, ...).");

  m.def(
      "perplexity",
      [](const Checkpoint& c, const Corpus& corpus, Split split, int threads) {
        auto r = perplexity(c, corpus, split, threads);
        py::dict d;
        d["perplexity"] = r.perplexity;
        d["mean_word_loglik"] = r.mean_word_loglik;
        d["documents"] = r.documents;
        d["excluded"] = r.excluded;
        return d;
      },
      py::arg("checkpoint"), py::arg("corpus"), py::arg("split") = Split::test, py::arg("threads") = 1);

  m.def(
      "retrieval_precision",
      [](const Checkpoint& c, const Corpus& corpus, std::optional<std::vector<double>> fractions, Split split,
         int threads) {
        if (c.vocab.fingerprint() != corpus.vocab.fingerprint())
          throw CompatibilityError("corpus vocabulary does not match checkpoint");
        auto r = retrieval_precision(c.params, c.config.model_kind, corpus.documents_in(Split::train),
                                     corpus.documents_in(split), fractions ? *fractions : default_fractions(),
                                     threads);
        return py::make_tuple(r.fractions, r.precision);
      },
      py::arg("checkpoint"), py::arg("corpus"), py::arg("fractions") = py::none(), py::arg("split") = Split::test,
      py::arg("threads") = 1, "Returns (fractions, precision) with the train split as the database.");

  m.def(
      "classify",
      [](const Checkpoint& c, const Corpus& corpus, std::vector<double> l2_grid) {
        if (c.vocab.fingerprint() != corpus.vocab.fingerprint())
          throw CompatibilityError("corpus vocabulary does not match checkpoint");
        auto r = classify(c.params, corpus, l2_grid);
        py::dict d;
        d["accuracy"] = r.accuracy;
        d["macro_f1"] = r.macro_f1;
        d["chosen_l2"] = r.chosen_l2;
        d["multi_label"] = r.multi_label;
        d["predictions"] = r.test_predictions;
        return d;
      },
      py::arg("checkpoint"), py::arg("corpus"),
      py::arg("l2_grid") = std::vector<double>{0.001, 0.01, 0.1, 1.0, 10.0, 100.0});

  m.def(
      "topics",
      [](const Checkpoint& c, std::size_t top, const Corpus* reference, std::size_t window) {
        auto topics = topic_words(c.params, top);
        std::vector<std::vector<WordId>> ids;
        py::list words;
        for (const auto& t : topics) {
          ids.push_back(t.words);
          std::vector<std::string> tokens;
          for (auto w : t.words) tokens.push_back(c.vocab.token(w));
          words.append(tokens);
        }
        if (!reference) return py::tuple(py::make_tuple(words, py::none()));
        if (reference->vocab.fingerprint() != c.vocab.fingerprint())
          throw CompatibilityError("reference corpus vocabulary does not match checkpoint");
        auto coh = coherence_npmi(ids, reference->documents_in(Split::train), window);
        return py::tuple(py::make_tuple(words, coh.per_topic));
      },
      py::arg("checkpoint"), py::arg("top") = 10, py::arg("reference") = nullptr, py::arg("window") = 10,
      "Top words per hidden unit and, with a reference corpus, their NPMI coherence.");

  m.def(
      "neighbors",
      [](const Checkpoint& c, const std::string& word, std::size_t k) {
        std::vector<std::pair<std::string, double>> out;
        for (const auto& n : word_neighbors(c, word, k)) out.emplace_back(n.token, n.cosine);
        return out;
      },
      py::arg("checkpoint"), py::arg("word"), py::arg("k") = 10);
}

#include "nade/synthetic.hpp"

#include <cmath>
#include <cstdio>

#include "nade/error.hpp"
#include "nade/random.hpp"

namespace nade {

std::string synthetic_token(int topic, int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "t%dw%02d", topic, index);
  return buf;
}

SyntheticCorpus generate_synthetic(const SyntheticSpec& spec) {
  if (spec.topics < 1 || spec.words_per_topic < 1) throw Error("synthetic: need at least one topic and word");
  if (spec.min_length < 1 || spec.max_length < spec.min_length) throw Error("synthetic: bad length range");
  if (!(spec.noise >= 0.0 && spec.noise <= 1.0)) throw Error("synthetic: noise must lie in [0, 1]");

  std::vector<double> cdf(static_cast<std::size_t>(spec.words_per_topic));
  double acc = 0.0;
  for (int r = 0; r < spec.words_per_topic; ++r) {
    acc += 1.0 / std::pow(r + 1.0, spec.zipf_exponent);
    cdf[static_cast<std::size_t>(r)] = acc;
  }
  for (double& c : cdf) c /= acc;

  Rng rng = derive_rng(spec.seed, "synthetic");
  const int K = spec.topics * spec.words_per_topic;
  auto draw_doc = [&] {
    RawDocument doc;
    const int topic = static_cast<int>(rng.index(static_cast<std::uint64_t>(spec.topics)));
    const int length = spec.min_length + static_cast<int>(rng.index(static_cast<std::uint64_t>(spec.max_length - spec.min_length + 1)));
    doc.labels = {"topic" + std::to_string(topic)};
    for (int i = 0; i < length; ++i) {
      if (rng.uniform() < spec.noise) {
        const int w = static_cast<int>(rng.index(static_cast<std::uint64_t>(K)));
        doc.tokens.push_back(synthetic_token(w / spec.words_per_topic, w % spec.words_per_topic));
      } else {
        const double u = rng.uniform();
        int r = 0;
        while (r + 1 < spec.words_per_topic && cdf[static_cast<std::size_t>(r)] <= u) ++r;
        doc.tokens.push_back(synthetic_token(topic, r));
      }
    }
    return doc;
  };

  SyntheticCorpus out;
  for (std::size_t i = 0; i < spec.train; ++i) out.train.push_back(draw_doc());
  for (std::size_t i = 0; i < spec.dev; ++i) out.dev.push_back(draw_doc());
  for (std::size_t i = 0; i < spec.test; ++i) out.test.push_back(draw_doc());
  return out;
}

std::string format_corpus(const std::vector<RawDocument>& docs) {
  std::string text;
  for (const auto& d : docs) {
    for (std::size_t i = 0; i < d.labels.size(); ++i) {
      if (i) text += ',';
      text += d.labels[i];
    }
    text += '\t';
    for (std::size_t i = 0; i < d.tokens.size(); ++i) {
      if (i) text += ' ';
      text += d.tokens[i];
    }
    text += '\n';
  }
  return text;
}

}  // namespace nade

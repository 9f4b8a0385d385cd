#pragma once

#include <cstdint>
#include <vector>

#include "nade/corpus.hpp"

namespace nade {

// Documents drawn from one of `topics` latent topics. Topic t owns a block
// of `words_per_topic` word types with Zipf-distributed frequencies; each
// token is replaced by a uniform draw over the whole vocabulary with
// probability `noise`. Documents are labeled "topic<t>".
struct SyntheticSpec {
  int topics = 2;
  int words_per_topic = 50;
  int min_length = 20;
  int max_length = 40;
  double noise = 0.1;
  double zipf_exponent = 1.0;
  std::size_t train = 400;
  std::size_t dev = 50;
  std::size_t test = 100;
  std::uint64_t seed = 1;
};

struct SyntheticCorpus {
  std::vector<RawDocument> train, dev, test;
};

SyntheticCorpus generate_synthetic(const SyntheticSpec& spec);

// Token name for word `index` of topic `topic`, e.g. "t1w07".
std::string synthetic_token(int topic, int index);

// One `labels<TAB>tokens` line per document.
std::string format_corpus(const std::vector<RawDocument>& docs);

}  // namespace nade

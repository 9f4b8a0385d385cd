#include "nade/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "nade/error.hpp"
#include "nade/random.hpp"

namespace nade {

Vocabulary::Vocabulary(std::vector<std::string> tokens) : id_to_token_(std::move(tokens)) {
  token_to_id_.reserve(id_to_token_.size());
  for (std::size_t i = 0; i < id_to_token_.size(); ++i) {
    auto [it, inserted] = token_to_id_.emplace(id_to_token_[i], static_cast<WordId>(i));
    if (!inserted) throw Error("duplicate vocabulary token '" + id_to_token_[i] + "'");
  }
}

std::optional<WordId> Vocabulary::find(std::string_view token) const {
  auto it = token_to_id_.find(std::string(token));
  if (it == token_to_id_.end()) return std::nullopt;
  return it->second;
}

std::uint64_t Vocabulary::fingerprint() const {
  std::uint64_t h = fnv1a64("nade-vocab");
  for (const auto& t : id_to_token_) {
    h = fnv1a64(t, h);
    h = fnv1a64("\n", h);
  }
  return h;
}

std::string_view to_string(Split split) {
  switch (split) {
    case Split::train: return "train";
    case Split::dev: return "dev";
    case Split::test: return "test";
  }
  return "?";
}

Split parse_split(std::string_view name) {
  if (name == "train") return Split::train;
  if (name == "dev") return Split::dev;
  if (name == "test") return Split::test;
  throw Error("unknown split '" + std::string(name) + "'");
}

std::vector<Document> Corpus::documents_in(Split split) const {
  std::vector<Document> out;
  for (std::size_t i = 0; i < documents.size(); ++i)
    if (splits[i] == split) out.push_back(documents[i]);
  return out;
}

std::size_t Corpus::count(Split split) const {
  return static_cast<std::size_t>(std::count(splits.begin(), splits.end(), split));
}

Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& raw_docs, std::size_t max_size) {
  if (max_size < 1) throw Error("max_size must be >= 1");
  std::map<std::string, std::size_t> counts;
  for (const auto& doc : raw_docs)
    for (const auto& tok : doc) ++counts[tok];
  if (counts.empty()) throw Error("empty corpus");

  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  // counts is already in token order, so a stable sort on frequency keeps ties lexicographic.
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (ranked.size() > max_size) ranked.resize(max_size);

  std::vector<std::string> tokens;
  tokens.reserve(ranked.size());
  for (auto& [tok, _] : ranked) tokens.push_back(tok);
  return Vocabulary(std::move(tokens));
}

Document encode_document(const std::vector<std::string>& tokens, const Vocabulary& vocab, OovPolicy oov) {
  Document doc;
  doc.words.reserve(tokens.size());
  for (const auto& tok : tokens) {
    if (auto id = vocab.find(tok)) {
      doc.words.push_back(*id);
    } else if (oov == OovPolicy::error) {
      throw Error("out-of-vocabulary token '" + tok + "'");
    }
  }
  if (doc.words.empty()) throw Error("document empty after OOV filtering");
  return doc;
}

std::vector<std::string> decode_document(const Document& doc, const Vocabulary& vocab) {
  std::vector<std::string> out;
  out.reserve(doc.words.size());
  for (WordId w : doc.words) out.push_back(vocab.token(w));
  return out;
}

namespace {

std::string lower_ascii(std::string s) {
  for (char& c : s)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return s;
}

std::vector<std::string> split_on(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t end = s.find(sep, start);
    if (end == std::string_view::npos) end = s.size();
    if (end > start) out.emplace_back(s.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

std::vector<std::string> split_whitespace(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string tok;
  while (in >> tok) out.push_back(std::move(tok));
  return out;
}

}  // namespace

std::vector<RawDocument> parse_corpus(std::string_view text, bool lowercase, std::string_view source) {
  std::vector<RawDocument> docs;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

    auto where = [&] { return std::string(source) + ":" + std::to_string(line_no) + ": "; };
    std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos) throw Error(where() + "malformed line, missing TAB between labels and text");

    RawDocument doc;
    for (auto& label : split_on(line.substr(0, tab), ',')) {
      auto first = label.find_first_not_of(' ');
      auto last = label.find_last_not_of(' ');
      if (first != std::string::npos) doc.labels.push_back(label.substr(first, last - first + 1));
    }
    std::sort(doc.labels.begin(), doc.labels.end());
    doc.labels.erase(std::unique(doc.labels.begin(), doc.labels.end()), doc.labels.end());

    doc.tokens = split_whitespace(line.substr(tab + 1));
    if (doc.tokens.empty()) throw Error(where() + "malformed line, no tokens after TAB");
    if (lowercase)
      for (auto& t : doc.tokens) t = lower_ascii(std::move(t));
    docs.push_back(std::move(doc));
  }
  return docs;
}

std::vector<RawDocument> read_corpus_file(const std::filesystem::path& path, bool lowercase) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open corpus file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_corpus(buf.str(), lowercase, path.string());
}

Corpus assemble_corpus(const std::vector<RawDocument>& train, const std::vector<RawDocument>& dev,
                       const std::vector<RawDocument>& test, const CorpusFormat& format,
                       const Vocabulary* fixed_vocab, const std::vector<std::string>* fixed_labels) {
  Corpus corpus;
  if (fixed_vocab) {
    corpus.vocab = *fixed_vocab;
  } else {
    std::vector<std::vector<std::string>> token_lists;
    token_lists.reserve(train.size());
    for (const auto& d : train) token_lists.push_back(d.tokens);
    corpus.vocab = build_vocabulary(token_lists, format.max_vocab);
  }

  if (fixed_labels) {
    corpus.label_names = *fixed_labels;
  } else {
    std::set<std::string> names;
    for (const auto* part : {&train, &dev, &test})
      for (const auto& d : *part) names.insert(d.labels.begin(), d.labels.end());
    corpus.label_names.assign(names.begin(), names.end());
  }
  std::map<std::string, int> label_index;
  for (std::size_t i = 0; i < corpus.label_names.size(); ++i) label_index[corpus.label_names[i]] = static_cast<int>(i);

  auto add = [&](const std::vector<RawDocument>& part, Split split) {
    for (const auto& raw : part) {
      Document doc;
      try {
        doc = encode_document(raw.tokens, corpus.vocab, format.oov);
      } catch (const Error&) {
        if (format.oov == OovPolicy::error) throw;
        ++corpus.rejected[static_cast<int>(split)];
        continue;
      }
      for (const auto& name : raw.labels) {
        auto it = label_index.find(name);
        // Labels unknown to a fixed label table get appended so they still count as distinct.
        if (it == label_index.end()) {
          it = label_index.emplace(name, static_cast<int>(corpus.label_names.size())).first;
          corpus.label_names.push_back(name);
        }
        doc.labels.push_back(it->second);
      }
      std::sort(doc.labels.begin(), doc.labels.end());
      corpus.documents.push_back(std::move(doc));
      corpus.splits.push_back(split);
    }
  };
  add(train, Split::train);
  add(dev, Split::dev);
  add(test, Split::test);

  std::size_t rejected = corpus.rejected[0] + corpus.rejected[1] + corpus.rejected[2];
  if (rejected > 0)
    std::cerr << "warning: " << rejected << " document(s) empty after OOV filtering were rejected\n";
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path, const CorpusFormat& format, const Vocabulary* fixed_vocab) {
  auto raw = read_corpus_file(path, format.lowercase);
  if (raw.empty() && !fixed_vocab) throw Error("empty corpus");
  return assemble_corpus(raw, {}, {}, format, fixed_vocab);
}

Vocabulary read_vocabulary(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open vocabulary file " + path.string());
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    tokens.push_back(line);
  }
  if (tokens.empty()) throw Error("empty vocabulary file " + path.string());
  return Vocabulary(std::move(tokens));
}

void write_vocabulary(const Vocabulary& vocab, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write vocabulary file " + path.string());
  for (const auto& t : vocab.tokens()) out << t << '\n';
}

}  // namespace nade

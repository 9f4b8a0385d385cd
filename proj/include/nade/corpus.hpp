#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace nade {

using WordId = std::int32_t;

class Vocabulary {
 public:
  Vocabulary() = default;
  // Ids follow the order of `tokens`; duplicates are rejected.
  explicit Vocabulary(std::vector<std::string> tokens);

  std::size_t size() const { return id_to_token_.size(); }
  bool empty() const { return id_to_token_.empty(); }
  std::optional<WordId> find(std::string_view token) const;
  const std::string& token(WordId id) const { return id_to_token_.at(static_cast<std::size_t>(id)); }
  const std::vector<std::string>& tokens() const { return id_to_token_; }

  // Stable hash of the id->token table; equal fingerprints mean equal encodings.
  std::uint64_t fingerprint() const;

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.id_to_token_ == b.id_to_token_; }

 private:
  std::vector<std::string> id_to_token_;
  std::unordered_map<std::string, WordId> token_to_id_;
};

struct Document {
  std::vector<WordId> words;
  std::vector<int> labels;  // sorted, unique

  std::size_t size() const { return words.size(); }
};

enum class Split { train, dev, test };

std::string_view to_string(Split split);
Split parse_split(std::string_view name);

enum class OovPolicy { skip, error };

// One line of a corpus file before encoding.
struct RawDocument {
  std::vector<std::string> labels;
  std::vector<std::string> tokens;
};

struct CorpusFormat {
  bool lowercase = true;
  OovPolicy oov = OovPolicy::skip;
  std::size_t max_vocab = 2000;
};

struct Corpus {
  std::vector<Document> documents;
  std::vector<Split> splits;  // parallel to documents
  Vocabulary vocab;
  std::vector<std::string> label_names;
  // Lines dropped because no token survived OOV filtering, per split.
  std::size_t rejected[3] = {0, 0, 0};

  std::vector<Document> documents_in(Split split) const;
  std::size_t count(Split split) const;
  std::size_t rejected_in(Split split) const { return rejected[static_cast<int>(split)]; }
};

// Top `max_size` tokens by (frequency desc, token asc). Throws "empty corpus".
Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& raw_docs, std::size_t max_size);

// Word order and repetition are preserved. Throws when nothing survives OOV
// filtering, or on the first OOV token under OovPolicy::error.
Document encode_document(const std::vector<std::string>& tokens, const Vocabulary& vocab,
                         OovPolicy oov = OovPolicy::skip);

std::vector<std::string> decode_document(const Document& doc, const Vocabulary& vocab);

// Parses `label1,label2<TAB>tok tok ...` lines. Blank lines are skipped;
// anything else without a TAB or without tokens is an error naming the line.
std::vector<RawDocument> read_corpus_file(const std::filesystem::path& path, bool lowercase = true);
std::vector<RawDocument> parse_corpus(std::string_view text, bool lowercase = true,
                                      std::string_view source = "<string>");

// Builds the vocabulary from `train` (unless one is supplied) and encodes all
// three parts against it. Labels are numbered in sorted name order.
Corpus assemble_corpus(const std::vector<RawDocument>& train, const std::vector<RawDocument>& dev,
                       const std::vector<RawDocument>& test, const CorpusFormat& format,
                       const Vocabulary* fixed_vocab = nullptr,
                       const std::vector<std::string>* fixed_labels = nullptr);

// Single file, every document tagged train.
Corpus load_corpus(const std::filesystem::path& path, const CorpusFormat& format = {},
                   const Vocabulary* fixed_vocab = nullptr);

Vocabulary read_vocabulary(const std::filesystem::path& path);
void write_vocabulary(const Vocabulary& vocab, const std::filesystem::path& path);

}  // namespace nade

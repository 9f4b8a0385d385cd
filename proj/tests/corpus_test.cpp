#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "nade/corpus.hpp"
#include "nade/error.hpp"

namespace nade {
namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
  auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << text;
  return path;
}

TEST(Vocabulary, KeepsMostFrequentTokens) {
  Vocabulary v = build_vocabulary({{"a", "b", "a"}, {"b", "c"}}, 2);
  ASSERT_EQ(v.size(), 2u);
  EXPECT_TRUE(v.find("a"));
  EXPECT_TRUE(v.find("b"));
  EXPECT_FALSE(v.find("c"));
}

TEST(Vocabulary, TiesBrokenLexicographically) {
  Vocabulary v = build_vocabulary({{"b", "a", "c", "c"}}, 3);
  EXPECT_EQ(v.tokens(), (std::vector<std::string>{"c", "a", "b"}));
}

TEST(Vocabulary, SingleToken) {
  Vocabulary v = build_vocabulary({{"x"}}, 5);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(*v.find("x"), 0);
}

TEST(Vocabulary, EmptyCorpusIsAnError) {
  EXPECT_THROW(build_vocabulary({}, 10), Error);
  try {
    build_vocabulary({{}}, 10);
    FAIL();
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "empty corpus");
  }
}

TEST(Vocabulary, Deterministic) {
  std::vector<std::vector<std::string>> docs = {{"q", "w", "e", "r", "q"}, {"e", "t", "y"}};
  EXPECT_EQ(build_vocabulary(docs, 4), build_vocabulary(docs, 4));
  EXPECT_EQ(build_vocabulary(docs, 4).fingerprint(), build_vocabulary(docs, 4).fingerprint());
}

TEST(Vocabulary, DuplicateTokensRejected) { EXPECT_THROW(Vocabulary({"a", "a"}), Error); }

TEST(Encode, DropsOovAndKeepsOrder) {
  Vocabulary v({"a", "b"});
  Document d = encode_document({"a", "z", "b"}, v, OovPolicy::skip);
  EXPECT_EQ(d.words, (std::vector<WordId>{0, 1}));
  EXPECT_EQ(encode_document({"a", "b", "a"}, v).words, (std::vector<WordId>{0, 1, 0}));
}

TEST(Encode, AllOovIsAnError) {
  Vocabulary v({"a", "b"});
  try {
    encode_document({"z"}, v, OovPolicy::skip);
    FAIL();
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "document empty after OOV filtering");
  }
}

TEST(Encode, ErrorPolicyNamesToken) {
  Vocabulary v({"a"});
  try {
    encode_document({"a", "zebra"}, v, OovPolicy::error);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("zebra"), std::string::npos);
  }
}

TEST(Encode, RoundTripDropsOnlyOov) {
  Vocabulary v({"the", "rocket", "engine"});
  std::vector<std::string> tokens = {"the", "big", "rocket", "the", "engine", "xx"};
  auto back = decode_document(encode_document(tokens, v), v);
  EXPECT_EQ(back, (std::vector<std::string>{"the", "rocket", "the", "engine"}));
}

TEST(Parse, LabelsAndTokens) {
  auto docs = parse_corpus("sci.space,comp.os\tthe rocket engine\n");
  ASSERT_EQ(docs.size(), 1u);
  EXPECT_EQ(docs[0].labels, (std::vector<std::string>{"comp.os", "sci.space"}));
  EXPECT_EQ(docs[0].tokens.size(), 3u);
}

TEST(Parse, EmptyLabelFieldAndLowercase) {
  auto docs = parse_corpus("\tThe Rocket\n");
  ASSERT_EQ(docs.size(), 1u);
  EXPECT_TRUE(docs[0].labels.empty());
  EXPECT_EQ(docs[0].tokens, (std::vector<std::string>{"the", "rocket"}));
  EXPECT_EQ(parse_corpus("\tThe\n", false)[0].tokens[0], "The");
}

TEST(Parse, MalformedLineReportsLineNumber) {
  try {
    parse_corpus("a\tx y\nno tab here\n", true, "c.txt");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("c.txt:2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_corpus("a\t   \n"), Error);
}

TEST(LoadCorpus, ThreeLines) {
  auto path = write_temp("nade_corpus_three.txt", "a\tx y z\nb\ty y\n\tz x\n");
  Corpus c = load_corpus(path);
  EXPECT_EQ(c.documents.size(), 3u);
  EXPECT_EQ(c.count(Split::train), 3u);
  EXPECT_EQ(c.label_names, (std::vector<std::string>{"a", "b"}));
  EXPECT_TRUE(c.documents[2].labels.empty());
  // file order preserved
  EXPECT_EQ(decode_document(c.documents[1], c.vocab), (std::vector<std::string>{"y", "y"}));
}

TEST(LoadCorpus, MissingFile) { EXPECT_THROW(load_corpus("/nonexistent/corpus.txt"), Error); }

TEST(AssembleCorpus, SplitsPartitionAndRejectsEmptyDocs) {
  auto train = parse_corpus("a\tx y\nb\ty z\n");
  auto dev = parse_corpus("a\tx\n");
  auto test = parse_corpus("b\tz\nb\tqqq\n");  // second line is all OOV
  CorpusFormat fmt;
  Corpus c = assemble_corpus(train, dev, test, fmt);
  EXPECT_EQ(c.count(Split::train), 2u);
  EXPECT_EQ(c.count(Split::dev), 1u);
  EXPECT_EQ(c.count(Split::test), 1u);
  EXPECT_EQ(c.rejected_in(Split::test), 1u);
  EXPECT_EQ(c.count(Split::train) + c.count(Split::dev) + c.count(Split::test), c.documents.size());
}

TEST(VocabularyFile, RoundTrip) {
  Vocabulary v({"alpha", "beta", "gamma"});
  auto path = std::filesystem::temp_directory_path() / "nade_vocab_rt.txt";
  write_vocabulary(v, path);
  EXPECT_EQ(read_vocabulary(path), v);
}

}  // namespace
}  // namespace nade

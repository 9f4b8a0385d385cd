// Checkpoint container, all integers and floats little-endian:
//
//   char[8]  magic "NADECKPT"
//   u32      format version (1)
//   u64 n, n bytes   training config as JSON
//   u64 K, u64 H, u64 R (rows of U), u8 output kind (0 tree, 1 flat),
//   u8 activation (0 sigmoid, 1 tanh), u8 scaling, u8 model kind (0 docnade, 1 idocnade)
//   K x (u32 n, n bytes)   vocabulary tokens, id order
//   u64      vocabulary fingerprint
//   tree mode only: u64 tree seed, then per word: u32 depth, depth x i32 node ids, depth x u8 bits
//   f64[H*K] W, column-major (column v = word v)
//   f64[R*H] U, row-major
//   f64[R] b_fwd, f64[R] b_bwd, f64[H] c_fwd, f64[H] c_bwd
//
// Training history goes to the `<path>.json` sidecar.

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "nade/error.hpp"
#include "nade/trainer.hpp"

namespace nade {

namespace {

constexpr char kMagic[8] = {'N', 'A', 'D', 'E', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  template <typename T>
  void uint(T v) {
    unsigned char buf[sizeof(T)];
    for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<unsigned char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xff);
    out_.write(reinterpret_cast<const char*>(buf), sizeof(T));
  }
  void f64(double v) { uint(std::bit_cast<std::uint64_t>(v)); }
  void bytes(std::string_view s) {
    uint<std::uint64_t>(s.size());
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }

 private:
  std::ostream& out_;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  template <typename T>
  T uint() {
    unsigned char buf[sizeof(T)];
    read(buf, sizeof(T));
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return static_cast<T>(v);
  }
  double f64() { return std::bit_cast<double>(uint<std::uint64_t>()); }
  std::string bytes(std::uint64_t limit = 1ULL << 32) {
    auto n = uint<std::uint64_t>();
    if (n > limit) throw Error("checkpoint: string length out of range");
    std::string s(n, '\0');
    read(s.data(), n);
    return s;
  }
  void read(void* dst, std::size_t n) {
    in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) throw Error("checkpoint: truncated file");
  }

 private:
  std::istream& in_;
};

}  // namespace

void save_checkpoint(const Checkpoint& ck, const std::filesystem::path& path) {
  const auto& p = ck.params;
  p.validate();
  if (static_cast<std::size_t>(p.vocab_size()) != ck.vocab.size())
    throw Error("checkpoint: vocabulary size does not match W");

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write checkpoint " + path.string());
  Writer w(out);
  out.write(kMagic, sizeof(kMagic));
  w.uint<std::uint32_t>(kVersion);
  w.bytes(config_to_json(ck.config));
  w.uint<std::uint64_t>(static_cast<std::uint64_t>(p.vocab_size()));
  w.uint<std::uint64_t>(static_cast<std::uint64_t>(p.hidden_size()));
  w.uint<std::uint64_t>(static_cast<std::uint64_t>(p.output_rows()));
  w.uint<std::uint8_t>(p.output == OutputKind::tree ? 0 : 1);
  w.uint<std::uint8_t>(p.activation == Activation::sigmoid ? 0 : 1);
  w.uint<std::uint8_t>(p.scaling ? 1 : 0);
  w.uint<std::uint8_t>(ck.config.model_kind == ModelKind::docnade ? 0 : 1);
  for (const auto& tok : ck.vocab.tokens()) {
    w.uint<std::uint32_t>(static_cast<std::uint32_t>(tok.size()));
    out.write(tok.data(), static_cast<std::streamsize>(tok.size()));
  }
  w.uint<std::uint64_t>(ck.vocab.fingerprint());
  if (p.output == OutputKind::tree) {
    w.uint<std::uint64_t>(p.tree->seed());
    for (std::size_t v = 0; v < p.tree->leaf_count(); ++v) {
      const auto word = static_cast<WordId>(v);
      w.uint<std::uint32_t>(static_cast<std::uint32_t>(p.tree->depth(word)));
      for (auto n : p.tree->nodes(word)) w.uint<std::uint32_t>(static_cast<std::uint32_t>(n));
      for (auto b : p.tree->bits(word)) w.uint<std::uint8_t>(b);
    }
  }
  for (Eigen::Index v = 0; v < p.W.cols(); ++v)
    for (Eigen::Index j = 0; j < p.W.rows(); ++j) w.f64(p.W(j, v));
  for (Eigen::Index r = 0; r < p.U.rows(); ++r)
    for (Eigen::Index j = 0; j < p.U.cols(); ++j) w.f64(p.U(r, j));
  for (const auto* vec : {&p.b_fwd, &p.b_bwd, &p.c_fwd, &p.c_bwd})
    for (Eigen::Index i = 0; i < vec->size(); ++i) w.f64((*vec)(i));
  if (!out) throw Error("failed writing checkpoint " + path.string());

  std::ofstream side(path.string() + ".json", std::ios::binary | std::ios::trunc);
  if (!side) throw Error("cannot write checkpoint sidecar for " + path.string());
  side << history_to_json(ck.history) << '\n';
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint " + path.string());
  Reader r(in);
  char magic[8];
  r.read(magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) throw Error("not a checkpoint file: " + path.string());
  if (auto version = r.uint<std::uint32_t>(); version != kVersion)
    throw Error("unsupported checkpoint version " + std::to_string(version));

  Checkpoint ck;
  ck.config = config_from_json(r.bytes());
  const auto K = r.uint<std::uint64_t>();
  const auto H = r.uint<std::uint64_t>();
  const auto R = r.uint<std::uint64_t>();
  if (K == 0 || H == 0 || K > (1ULL << 31) || H > (1ULL << 20) || R > K) throw Error("checkpoint: bad dimensions");
  auto& p = ck.params;
  p.output = r.uint<std::uint8_t>() == 0 ? OutputKind::tree : OutputKind::flat;
  p.activation = r.uint<std::uint8_t>() == 0 ? Activation::sigmoid : Activation::tanh;
  p.scaling = r.uint<std::uint8_t>() != 0;
  ck.config.model_kind = r.uint<std::uint8_t>() == 0 ? ModelKind::docnade : ModelKind::idocnade;

  std::vector<std::string> tokens(K);
  for (auto& tok : tokens) {
    tok.resize(r.uint<std::uint32_t>());
    r.read(tok.data(), tok.size());
  }
  ck.vocab = Vocabulary(std::move(tokens));
  if (r.uint<std::uint64_t>() != ck.vocab.fingerprint()) throw Error("checkpoint: vocabulary fingerprint mismatch");

  if (p.output == OutputKind::tree) {
    const auto seed = r.uint<std::uint64_t>();
    std::vector<std::vector<std::int32_t>> nodes(K);
    std::vector<std::vector<std::uint8_t>> bits(K);
    for (std::size_t v = 0; v < K; ++v) {
      const auto depth = r.uint<std::uint32_t>();
      if (depth == 0 || depth >= K) throw Error("checkpoint: bad tree depth");
      nodes[v].resize(depth);
      bits[v].resize(depth);
      for (auto& n : nodes[v]) n = static_cast<std::int32_t>(r.uint<std::uint32_t>());
      for (auto& b : bits[v]) b = r.uint<std::uint8_t>();
    }
    p.tree = std::make_shared<const WordTree>(std::move(nodes), std::move(bits), seed);
  }

  const auto k = static_cast<Eigen::Index>(K), h = static_cast<Eigen::Index>(H), rows = static_cast<Eigen::Index>(R);
  p.W.resize(h, k);
  for (Eigen::Index v = 0; v < k; ++v)
    for (Eigen::Index j = 0; j < h; ++j) p.W(j, v) = r.f64();
  p.U.resize(rows, h);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < h; ++j) p.U(i, j) = r.f64();
  p.b_fwd.resize(rows);
  p.b_bwd.resize(rows);
  p.c_fwd.resize(h);
  p.c_bwd.resize(h);
  for (auto* vec : {&p.b_fwd, &p.b_bwd, &p.c_fwd, &p.c_bwd})
    for (Eigen::Index i = 0; i < vec->size(); ++i) (*vec)(i) = r.f64();
  p.validate();

  std::ifstream side(path.string() + ".json");
  if (side) {
    auto j = nlohmann::json::parse(side, nullptr, false);
    if (!j.is_discarded() && j.is_object()) {
      auto& hist = ck.history;
      hist.passes_run = j.value("passes_run", 0);
      hist.best_pass = j.value("best_pass", 0);
      hist.best_metric = j.value("best_metric", 0.0);
      hist.train_nll = j.value("train_nll", std::vector<double>{});
      if (j.contains("dev"))
        for (const auto& e : j["dev"]) hist.dev.push_back({e.value("pass", 0), e.value("metric", 0.0)});
    }
  }
  return ck;
}

}  // namespace nade

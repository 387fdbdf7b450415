#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include "keygest/error.hpp"
#include "keygest/pipeline.hpp"

namespace keygest {
namespace {

constexpr char kMagic[8] = {'K', 'G', 'S', 'T', 'M', 'D', 'L', '\0'};

enum Tag : std::uint16_t {
  kConfig = 1,
  kClassNames = 2,
  kCodebook = 3,
  kCueAccuracies = 4,
  kWeights = 5,
  kClassifier = 6,
};

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) { le(v, 2); }
  void u32(std::uint32_t v) { le(v, 4); }
  void u64(std::uint64_t v) { le(v, 8); }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    u64(s.size());
    out_.insert(out_.end(), s.begin(), s.end());
  }
  void bytes(const std::vector<std::uint8_t>& b) { out_.insert(out_.end(), b.begin(), b.end()); }
  void record(Tag tag, const Writer& payload) {
    u16(tag);
    u64(payload.out_.size());
    bytes(payload.out_);
  }
  std::vector<std::uint8_t>& data() { return out_; }

 private:
  void le(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  bool done() const { return pos_ == in_.size(); }
  std::uint8_t u8() { return need(1)[0]; }
  std::uint16_t u16() { return static_cast<std::uint16_t>(le(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
  std::uint64_t u64() { return le(8); }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const std::uint64_t n = u64();
    auto b = need(n);
    return std::string(b.begin(), b.end());
  }
  std::span<const std::uint8_t> need(std::uint64_t n) {
    if (n > in_.size() - pos_) throw Error(ErrorCode::UndecodableFile, "model file is truncated");
    auto s = in_.subspan(pos_, static_cast<std::size_t>(n));
    pos_ += static_cast<std::size_t>(n);
    return s;
  }

 private:
  std::uint64_t le(int n) {
    auto b = need(static_cast<std::uint64_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(b[static_cast<std::size_t>(i)]) << (8 * i);
    return v;
  }
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

void write_matrix(Writer& w, const Matrix& m) {
  w.u64(m.rows());
  w.u64(m.cols());
  for (double v : m.data()) w.f64(v);
}

Matrix read_matrix(Reader& r) {
  const std::uint64_t rows = r.u64(), cols = r.u64();
  if (cols != 0 && rows > (1ULL << 32) / cols) throw Error(ErrorCode::UndecodableFile, "matrix too large");
  Matrix m(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols));
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (double& v : m.row(i)) v = r.f64();
  }
  return m;
}

}  // namespace

std::vector<std::uint8_t> serialize_model(const TrainedModel& model) {
  Writer w;
  for (char c : kMagic) w.u8(static_cast<std::uint8_t>(c));
  w.u32(TrainedModel::kFormatVersion);

  Writer config;
  config.str(format_config(model.config));
  w.record(kConfig, config);

  Writer names;
  names.u64(model.class_names.size());
  for (const auto& n : model.class_names) names.str(n);
  w.record(kClassNames, names);

  Writer codebook;
  codebook.u64(model.codebook.seed);
  write_matrix(codebook, model.codebook.centroids);
  w.record(kCodebook, codebook);

  Writer acc;
  acc.u64(model.cue_accuracies.size());
  for (double v : model.cue_accuracies) acc.f64(v);
  w.record(kCueAccuracies, acc);

  Writer weights;
  weights.u64(model.weights.values.size());
  for (int v : model.weights.values) weights.i32(v);
  w.record(kWeights, weights);

  Writer clf;
  write_matrix(clf, model.classifier.weights());
  for (double b : model.classifier.bias()) clf.f64(b);
  w.record(kClassifier, clf);

  return std::move(w.data());
}

TrainedModel deserialize_model(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  auto magic = r.need(sizeof kMagic);
  if (std::memcmp(magic.data(), kMagic, sizeof kMagic) != 0) {
    throw Error(ErrorCode::UndecodableFile, "not a keygest model file");
  }
  const std::uint32_t version = r.u32();
  if (version != TrainedModel::kFormatVersion) {
    throw Error(ErrorCode::FormatVersion, "model format version " + std::to_string(version) + " is not supported (expected " +
                                              std::to_string(TrainedModel::kFormatVersion) + ")");
  }

  TrainedModel model;
  unsigned seen = 0;
  Matrix clf_weights;
  std::vector<double> clf_bias;
  while (!r.done()) {
    const std::uint16_t tag = r.u16();
    Reader p(r.need(r.u64()));
    switch (tag) {
      case kConfig: {
        std::istringstream in(p.str());
        model.config = parse_config(in);
        break;
      }
      case kClassNames: {
        const std::uint64_t n = p.u64();
        model.class_names.clear();
        for (std::uint64_t i = 0; i < n; ++i) model.class_names.push_back(p.str());
        break;
      }
      case kCodebook:
        model.codebook.seed = p.u64();
        model.codebook.centroids = read_matrix(p);
        break;
      case kCueAccuracies: {
        const std::uint64_t n = p.u64();
        model.cue_accuracies.clear();
        for (std::uint64_t i = 0; i < n; ++i) model.cue_accuracies.push_back(p.f64());
        break;
      }
      case kWeights: {
        const std::uint64_t n = p.u64();
        model.weights.values.clear();
        for (std::uint64_t i = 0; i < n; ++i) model.weights.values.push_back(p.i32());
        break;
      }
      case kClassifier:
        clf_weights = read_matrix(p);
        clf_bias.clear();
        for (std::size_t i = 0; i < clf_weights.rows(); ++i) clf_bias.push_back(p.f64());
        break;
      default:
        continue;  // unknown field from a compatible writer
    }
    if (!p.done()) throw Error(ErrorCode::UndecodableFile, "model field " + std::to_string(tag) + " has trailing bytes");
    seen |= 1u << tag;
  }
  constexpr unsigned kRequired = (1u << kConfig) | (1u << kClassNames) | (1u << kCodebook) | (1u << kCueAccuracies) |
                                 (1u << kWeights) | (1u << kClassifier);
  if ((seen & kRequired) != kRequired) throw Error(ErrorCode::UndecodableFile, "model file is missing fields");
  model.classifier = LinearModel(std::move(clf_weights), std::move(clf_bias), model.class_names);
  if (model.weights.values.size() != 2 || model.classifier.dim() != model.feature_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "model components are dimensionally inconsistent");
  }
  return model;
}

void save_model(const std::filesystem::path& path, const TrainedModel& model) {
  const std::vector<std::uint8_t> bytes = serialize_model(model);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::Io, "failed writing " + path.string());
}

TrainedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_model(bytes);
}

}  // namespace keygest

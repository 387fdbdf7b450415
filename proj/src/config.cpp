#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>

#include "keygest/error.hpp"
#include "keygest/pipeline.hpp"

namespace keygest {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  throw Error(ErrorCode::InvalidArgument, "bad value '" + std::string(value) + "' for config key '" + std::string(key) + "'");
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) bad_value(key, value);
  return out;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void PipelineConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidArgument, "invalid config: " + what); };
  // LBP-TOP needs three key frames along time
  if (n_keyframes < 3) fail("n_keyframes must be at least 3");
  if (dictionary_size < 1) fail("dictionary_size must be at least 1");
  if (stride < 1) fail("stride must be at least 1");
  if (appearance != "patch-gradient" && appearance != "lbp") fail("appearance must be patch-gradient or lbp");
  if (!(svm_c > 0.0)) fail("svm_c must be positive");
  if (svm_epochs < 1) fail("svm_epochs must be at least 1");
  if (splits < 1) fail("splits must be at least 1");
  if (!(train_fraction > 0.0 && validation_fraction > 0.0 && test_fraction > 0.0)) fail("fractions must be positive");
  if (train_fraction + validation_fraction + test_fraction > 1.0 + 1e-9) fail("fractions must sum to at most 1");
  if (dc && !(*dc > 0.0)) fail("dc must be positive");
  if (target_size && (target_size->width < kPatchSize || target_size->height < kPatchSize)) {
    fail("target size must be at least 16x16");
  }
  if (codebook_sample_cap < 1) fail("codebook_sample_cap must be at least 1");
}

void apply_config_entry(PipelineConfig& cfg, std::string_view key, std::string_view value) {
  auto size_value = [&] {
    auto v = parse_number<long long>(key, value);
    if (v < 0) bad_value(key, value);
    return static_cast<std::size_t>(v);
  };
  auto target = [&]() -> Size2& {
    if (!cfg.target_size) cfg.target_size = Size2{0, 0};
    return *cfg.target_size;
  };

  if (key == "n_keyframes") cfg.n_keyframes = size_value();
  else if (key == "dictionary_size") cfg.dictionary_size = size_value();
  else if (key == "kernel") cfg.kernel = parse_kernel(value);
  else if (key == "dc") cfg.dc = value == "auto" ? std::nullopt : std::optional<double>(parse_number<double>(key, value));
  else if (key == "stride") cfg.stride = parse_number<int>(key, value);
  else if (key == "appearance") cfg.appearance = std::string(value);
  else if (key == "svm_c") cfg.svm_c = parse_number<double>(key, value);
  else if (key == "svm_epochs") cfg.svm_epochs = parse_number<int>(key, value);
  else if (key == "seed") cfg.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "splits") cfg.splits = size_value();
  else if (key == "train_fraction") cfg.train_fraction = parse_number<double>(key, value);
  else if (key == "validation_fraction") cfg.validation_fraction = parse_number<double>(key, value);
  else if (key == "test_fraction") cfg.test_fraction = parse_number<double>(key, value);
  else if (key == "width") target().width = parse_number<int>(key, value);
  else if (key == "height") target().height = parse_number<int>(key, value);
  else if (key == "codebook_sample_cap") cfg.codebook_sample_cap = size_value();
  else throw Error(ErrorCode::InvalidArgument, "unknown config key '" + std::string(key) + "'");
}

PipelineConfig parse_config(std::istream& in, PipelineConfig base) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view s = line;
    if (auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::InvalidArgument, "config line " + std::to_string(lineno) + ": expected key = value");
    }
    apply_config_entry(base, trim(s.substr(0, eq)), trim(s.substr(eq + 1)));
  }
  return base;
}

PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot read config " + path.string());
  return parse_config(in, std::move(base));
}

std::string format_config(const PipelineConfig& cfg) {
  std::ostringstream out;
  out << "n_keyframes = " << cfg.n_keyframes << '\n'
      << "dictionary_size = " << cfg.dictionary_size << '\n'
      << "kernel = " << to_string(cfg.kernel) << '\n'
      << "dc = " << (cfg.dc ? format_double(*cfg.dc) : std::string("auto")) << '\n'
      << "stride = " << cfg.stride << '\n'
      << "appearance = " << cfg.appearance << '\n'
      << "svm_c = " << format_double(cfg.svm_c) << '\n'
      << "svm_epochs = " << cfg.svm_epochs << '\n'
      << "seed = " << cfg.seed << '\n'
      << "splits = " << cfg.splits << '\n'
      << "train_fraction = " << format_double(cfg.train_fraction) << '\n'
      << "validation_fraction = " << format_double(cfg.validation_fraction) << '\n'
      << "test_fraction = " << format_double(cfg.test_fraction) << '\n';
  if (cfg.target_size) {
    out << "width = " << cfg.target_size->width << '\n' << "height = " << cfg.target_size->height << '\n';
  }
  out << "codebook_sample_cap = " << cfg.codebook_sample_cap << '\n';
  return out.str();
}

}  // namespace keygest

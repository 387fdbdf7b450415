#include "keygest/descriptors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "keygest/error.hpp"

namespace keygest {
namespace {

// Clockwise from east, y pointing down.
constexpr int kOffsetA[8] = {1, 1, 0, -1, -1, -1, 0, 1};
constexpr int kOffsetB[8] = {0, 1, 1, 1, 0, -1, -1, -1};

template <typename Get>
std::uint8_t code_at(Get get) {
  const std::uint8_t center = get(0, 0);
  unsigned code = 0;
  for (int b = 0; b < 8; ++b) {
    if (get(kOffsetA[b], kOffsetB[b]) >= center) code |= 1u << b;
  }
  return static_cast<std::uint8_t>(code);
}

struct UniformTable {
  std::array<std::uint8_t, 256> bin{};
  UniformTable() {
    std::size_t next = 0;
    for (unsigned c = 0; c < 256; ++c) {
      const auto code = static_cast<std::uint8_t>(c);
      bin[c] = static_cast<std::uint8_t>(is_uniform_pattern(code) ? next++ : kUniformBins - 1);
    }
  }
};

const UniformTable& uniform_table() {
  static const UniformTable table;
  return table;
}

void check_patch_args(const Frame& frame, int stride) {
  if (stride < 1) throw Error(ErrorCode::InvalidArgument, "stride must be at least 1");
  if (frame.width() < kPatchSize || frame.height() < kPatchSize) {
    throw Error(ErrorCode::InvalidArgument, "frame smaller than one 16x16 patch");
  }
}

}  // namespace

std::vector<PatchGradientDescriptor> dense_patch_descriptors(const Frame& frame, int stride) {
  check_patch_args(frame, stride);
  const int w = frame.width();
  const int h = frame.height();
  std::vector<double> gx(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
  std::vector<double> gy(gx.size());
  for (int y = 0; y < h; ++y) {
    const int ym = std::max(y - 1, 0), yp = std::min(y + 1, h - 1);
    for (int x = 0; x < w; ++x) {
      const int xm = std::max(x - 1, 0), xp = std::min(x + 1, w - 1);
      const std::size_t i = static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x);
      gx[i] = 0.5 * (static_cast<double>(frame.at(xp, y)) - frame.at(xm, y));
      gy[i] = 0.5 * (static_cast<double>(frame.at(x, yp)) - frame.at(x, ym));
    }
  }

  constexpr int cell = kPatchSize / kPatchCells;
  std::vector<PatchGradientDescriptor> out;
  for (int py = 0; py + kPatchSize <= h; py += stride) {
    for (int px = 0; px + kPatchSize <= w; px += stride) {
      PatchGradientDescriptor d;
      d.x = px;
      d.y = py;
      for (int cy = 0; cy < kPatchCells; ++cy) {
        for (int cx = 0; cx < kPatchCells; ++cx) {
          double* s = &d.values[static_cast<std::size_t>((cy * kPatchCells + cx) * 4)];
          for (int y = py + cy * cell; y < py + (cy + 1) * cell; ++y) {
            for (int x = px + cx * cell; x < px + (cx + 1) * cell; ++x) {
              const std::size_t i =
                  static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x);
              s[0] += gx[i];
              s[1] += std::abs(gx[i]);
              s[2] += gy[i];
              s[3] += std::abs(gy[i]);
            }
          }
        }
      }
      double norm = 0.0;
      for (double v : d.values) norm += v * v;
      if (norm > 0.0) {
        norm = std::sqrt(norm);
        for (double& v : d.values) v /= norm;
      }
      out.push_back(d);
    }
  }
  return out;
}

std::uint8_t lbp_code(const Frame& frame, int x, int y) {
  if (x < 1 || y < 1 || x > frame.width() - 2 || y > frame.height() - 2) {
    throw Error(ErrorCode::OutOfRange, "LBP needs an interior pixel, got (" + std::to_string(x) + ", " +
                                           std::to_string(y) + ")");
  }
  return code_at([&](int dx, int dy) { return frame.at(x + dx, y + dy); });
}

bool is_uniform_pattern(std::uint8_t code) noexcept {
  const auto rotated = std::rotl(code, 1);
  return std::popcount(static_cast<unsigned>(code ^ rotated)) <= 2;
}

std::size_t uniform_bin(std::uint8_t code) noexcept { return uniform_table().bin[code]; }

double LbpTopHistogram::block_sum(Plane plane) const {
  double s = 0.0;
  for (double v : block(plane)) s += v;
  return s;
}

std::array<std::size_t, 3> lbp_top_site_counts(int width, int height, int depth) noexcept {
  auto inner = [](int e) { return e >= 3 ? static_cast<std::size_t>(e - 2) : std::size_t{0}; };
  const auto w = static_cast<std::size_t>(width), h = static_cast<std::size_t>(height),
             t = static_cast<std::size_t>(depth);
  return {t * inner(width) * inner(height), h * inner(width) * inner(depth), w * inner(height) * inner(depth)};
}

LbpTopHistogram lbp_top(const Volume& v) {
  if (v.width() < 3 || v.height() < 3 || v.depth() < 3) {
    throw Error(ErrorCode::InvalidArgument, "LBP-TOP needs at least 3 samples along every axis");
  }
  const UniformTable& table = uniform_table();
  LbpTopHistogram hist;
  double* xy = hist.bins.data();
  double* xt = xy + kUniformBins;
  double* yt = xt + kUniformBins;
  for (int t = 0; t < v.depth(); ++t) {
    for (int y = 0; y < v.height(); ++y) {
      for (int x = 0; x < v.width(); ++x) {
        const bool ix = x >= 1 && x + 1 < v.width();
        const bool iy = y >= 1 && y + 1 < v.height();
        const bool it = t >= 1 && t + 1 < v.depth();
        if (ix && iy) xy[table.bin[code_at([&](int a, int b) { return v.at(x + a, y + b, t); })]] += 1.0;
        if (ix && it) xt[table.bin[code_at([&](int a, int b) { return v.at(x + a, y, t + b); })]] += 1.0;
        if (iy && it) yt[table.bin[code_at([&](int a, int b) { return v.at(x, y + a, t + b); })]] += 1.0;
      }
    }
  }
  return hist;
}

Matrix PatchGradientExtractor::extract(const Frame& frame) const {
  const auto descs = dense_patch_descriptors(frame, stride_);
  Matrix m(0, kPatchGradientDim);
  for (const auto& d : descs) m.append_row(d.values);
  return m;
}

Matrix PatchLbpExtractor::extract(const Frame& frame) const {
  check_patch_args(frame, stride_);
  const UniformTable& table = uniform_table();
  Matrix m(0, kUniformBins);
  std::array<double, kUniformBins> h{};
  for (int py = 0; py + kPatchSize <= frame.height(); py += stride_) {
    for (int px = 0; px + kPatchSize <= frame.width(); px += stride_) {
      h.fill(0.0);
      double total = 0.0;
      for (int y = std::max(py, 1); y < std::min(py + kPatchSize, frame.height() - 1); ++y) {
        for (int x = std::max(px, 1); x < std::min(px + kPatchSize, frame.width() - 1); ++x) {
          h[table.bin[lbp_code(frame, x, y)]] += 1.0;
          total += 1.0;
        }
      }
      if (total > 0.0) {
        for (double& v : h) v /= total;
      }
      m.append_row(h);
    }
  }
  return m;
}

std::unique_ptr<AppearanceExtractor> make_appearance_extractor(std::string_view name, int stride) {
  if (name == "patch-gradient") return std::make_unique<PatchGradientExtractor>(stride);
  if (name == "lbp") return std::make_unique<PatchLbpExtractor>(stride);
  throw Error(ErrorCode::InvalidArgument, "unknown appearance descriptor '" + std::string(name) + "'");
}

std::vector<double> LbpTopExtractor::extract(const Volume& volume) const {
  const LbpTopHistogram h = lbp_top(volume);
  std::vector<double> out(h.bins.begin(), h.bins.end());
  for (std::size_t b = 0; b < 3; ++b) {
    const double sum = h.block_sum(static_cast<Plane>(b));
    if (sum <= 0.0) continue;
    for (std::size_t i = 0; i < kUniformBins; ++i) out[b * kUniformBins + i] = std::sqrt(out[b * kUniformBins + i] / sum);
  }
  return out;
}

}  // namespace keygest

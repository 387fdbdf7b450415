#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "keygest/frame.hpp"
#include "keygest/matrix.hpp"

namespace keygest {

inline constexpr int kPatchSize = 16;
inline constexpr int kPatchCells = 4;  // per axis; 4 px per cell
inline constexpr std::size_t kPatchGradientDim = 64;
inline constexpr std::size_t kUniformBins = 59;
inline constexpr std::size_t kLbpTopDim = 3 * kUniformBins;

// 4x4 cells of (sum dx, sum |dx|, sum dy, sum |dy|), L2-normalised; zero for a flat patch.
struct PatchGradientDescriptor {
  std::array<double, kPatchGradientDim> values{};
  int x = 0;  // patch origin
  int y = 0;
};

// One descriptor per 16x16 patch on a `stride` grid anchored at (0, 0). Gradients are
// central differences over the whole frame with replicated borders.
std::vector<PatchGradientDescriptor> dense_patch_descriptors(const Frame& frame, int stride = kPatchSize);

// LBP(8,1). Neighbours clockwise from east (E, SE, S, SW, W, NW, N, NE with y pointing
// down); bit b is set when neighbour b >= centre.
std::uint8_t lbp_code(const Frame& frame, int x, int y);

bool is_uniform_pattern(std::uint8_t code) noexcept;

// 58 uniform codes map to bins 0..57 in ascending code order, everything else to 58.
std::size_t uniform_bin(std::uint8_t code) noexcept;

enum class Plane { XY = 0, XT = 1, YT = 2 };

// Raw counts of uniform LBP(8,1) codes over XY, XT and YT planes, concatenated.
struct LbpTopHistogram {
  std::array<double, kLbpTopDim> bins{};

  std::span<const double> block(Plane plane) const {
    return std::span<const double>(bins).subspan(static_cast<std::size_t>(plane) * kUniformBins, kUniformBins);
  }
  double block_sum(Plane plane) const;
};

// Every slice of each plane family is coded at its interior sites:
// XY: t * (w-2)(h-2), XT: h * (w-2)(t-2), YT: w * (h-2)(t-2).
std::array<std::size_t, 3> lbp_top_site_counts(int width, int height, int depth) noexcept;

LbpTopHistogram lbp_top(const Volume& volume);

// Appearance cue: local descriptors of a single frame, one per row.
class AppearanceExtractor {
 public:
  virtual ~AppearanceExtractor() = default;
  virtual std::string_view name() const noexcept = 0;
  virtual std::size_t dim() const noexcept = 0;
  virtual Matrix extract(const Frame& frame) const = 0;
};

class PatchGradientExtractor final : public AppearanceExtractor {
 public:
  explicit PatchGradientExtractor(int stride = kPatchSize) : stride_(stride) {}
  std::string_view name() const noexcept override { return "patch-gradient"; }
  std::size_t dim() const noexcept override { return kPatchGradientDim; }
  Matrix extract(const Frame& frame) const override;

 private:
  int stride_;
};

// Per-patch uniform LBP histograms (L1-normalised, 59-d).
class PatchLbpExtractor final : public AppearanceExtractor {
 public:
  explicit PatchLbpExtractor(int stride = kPatchSize) : stride_(stride) {}
  std::string_view name() const noexcept override { return "lbp"; }
  std::size_t dim() const noexcept override { return kUniformBins; }
  Matrix extract(const Frame& frame) const override;

 private:
  int stride_;
};

std::unique_ptr<AppearanceExtractor> make_appearance_extractor(std::string_view name, int stride);

// Motion cue: one fixed-length vector for the whole (key-frame) volume.
class MotionExtractor {
 public:
  virtual ~MotionExtractor() = default;
  virtual std::string_view name() const noexcept = 0;
  virtual std::size_t dim() const noexcept = 0;
  virtual std::vector<double> extract(const Volume& volume) const = 0;
};

// LBP-TOP with each plane block scaled to sum to one, so the cue does not depend on
// frame size, then square-rooted (Hellinger) like the appearance histograms.
class LbpTopExtractor final : public MotionExtractor {
 public:
  std::string_view name() const noexcept override { return "lbp-top"; }
  std::size_t dim() const noexcept override { return kLbpTopDim; }
  std::vector<double> extract(const Volume& volume) const override;
};

}  // namespace keygest

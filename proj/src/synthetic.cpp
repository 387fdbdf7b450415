#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

#include "keygest/error.hpp"
#include "keygest/pipeline.hpp"
#include "keygest/rng.hpp"

namespace keygest {
namespace {

enum class Motion { Right, Left, CircleCw, Pulse, Down, Up, Diagonal, CircleCcw };
enum class Shape { Disc, Square, Cross };

constexpr std::array<Motion, 8> kMotions = {Motion::Right, Motion::Left, Motion::CircleCw, Motion::Pulse,
                                            Motion::Down,  Motion::Up,   Motion::Diagonal, Motion::CircleCcw};
constexpr std::array<const char*, 8> kMotionNames = {"right", "left", "circle_cw", "pulse",
                                                     "down",  "up",   "diagonal",  "circle_ccw"};
constexpr std::array<const char*, 3> kShapeNames = {"disc", "square", "cross"};

struct Pose {
  double cx, cy, scale;
};

Pose pose_at(Motion m, double tau, double phase) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  switch (m) {
    case Motion::Right: return {0.25 + 0.5 * tau, 0.5, 1.0};
    case Motion::Left: return {0.75 - 0.5 * tau, 0.5, 1.0};
    case Motion::Down: return {0.5, 0.25 + 0.5 * tau, 1.0};
    case Motion::Up: return {0.5, 0.75 - 0.5 * tau, 1.0};
    case Motion::Diagonal: return {0.28 + 0.44 * tau, 0.28 + 0.44 * tau, 1.0};
    case Motion::CircleCw: return {0.5 + 0.22 * std::cos(kTwoPi * tau + phase), 0.5 + 0.22 * std::sin(kTwoPi * tau + phase), 1.0};
    case Motion::CircleCcw: return {0.5 + 0.22 * std::cos(-kTwoPi * tau + phase), 0.5 + 0.22 * std::sin(-kTwoPi * tau + phase), 1.0};
    case Motion::Pulse: return {0.5, 0.5, 0.55 + 0.9 * std::sin(std::numbers::pi * tau)};
  }
  return {0.5, 0.5, 1.0};
}

// Texture value inside the shape at local offset (u, v) in pixels, or -1 outside.
int shape_texel(Shape s, double u, double v, double radius) {
  switch (s) {
    case Shape::Disc: {
      const double r = std::hypot(u, v);
      if (r > radius) return -1;
      return (static_cast<int>(r / 3.0) % 2) ? 225 : 145;
    }
    case Shape::Square: {
      const double half = 0.85 * radius;
      if (std::abs(u) > half || std::abs(v) > half) return -1;
      return (static_cast<int>(std::floor((u + half) / 2.0)) % 2) ? 235 : 55;
    }
    case Shape::Cross: {
      const double arm = 0.38 * radius;
      if (!((std::abs(u) <= radius && std::abs(v) <= arm) || (std::abs(v) <= radius && std::abs(u) <= arm))) return -1;
      const int cu = static_cast<int>(std::floor((u + radius) / 3.0));
      const int cv = static_cast<int>(std::floor((v + radius) / 3.0));
      return ((cu + cv) % 2) ? 205 : 25;
    }
  }
  return -1;
}

std::uint8_t clamp_pixel(double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); }

}  // namespace

LabeledDataset generate_synthetic(const SynthParams& p) {
  if (p.classes < 1 || p.per_class < 1 || p.frames < FrameSequence::kMinFrames) {
    throw Error(ErrorCode::InvalidArgument, "synthetic dataset needs classes, per_class >= 1 and frames >= 3");
  }
  if (!(p.frame_noise >= 0.0)) throw Error(ErrorCode::InvalidArgument, "frame noise must be non-negative");
  if (p.size.width < kPatchSize || p.size.height < kPatchSize) {
    throw Error(ErrorCode::InvalidArgument, "synthetic frames must be at least 16x16");
  }
  const int w = p.size.width;
  const int h = p.size.height;
  const double side = std::min(w, h);

  LabeledDataset ds;
  for (std::size_t k = 0; k < p.classes; ++k) {
    const std::size_t mi = k % kMotions.size();
    const std::size_t si = (k + k / kMotions.size()) % kShapeNames.size();
    char name[64];
    std::snprintf(name, sizeof name, "c%02zu_%s_%s", k, kMotionNames[mi], kShapeNames[si]);
    ds.class_names.push_back(name);
  }

  for (std::size_t k = 0; k < p.classes; ++k) {
    const Motion motion = kMotions[k % kMotions.size()];
    const auto shape = static_cast<Shape>((k + k / kMotions.size()) % kShapeNames.size());
    // beyond the motion x shape grid, later classes move faster
    const double tempo = 1.0 + 0.5 * static_cast<double>(k / 24);
    for (std::size_t j = 0; j < p.per_class; ++j) {
      Rng rng(derive_seed(p.seed, k * 1000003ULL + j));
      const double radius = side * 0.16 * rng.uniform(0.9, 1.1);
      const double ox = rng.uniform(-0.04, 0.04);
      const double oy = rng.uniform(-0.04, 0.04);
      const double start = rng.uniform(0.0, 0.1);
      const double speed = rng.uniform(0.85, 1.0) * tempo;
      const double phase = rng.uniform(-0.3, 0.3);
      const double bg_level = rng.uniform(80.0, 110.0);

      std::vector<double> background(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
      for (double& b : background) b = bg_level + rng.uniform(-25.0, 25.0);

      std::vector<Frame> frames;
      frames.reserve(p.frames);
      for (std::size_t f = 0; f < p.frames; ++f) {
        const double progress = static_cast<double>(f) / static_cast<double>(p.frames - 1);
        const double tau = std::clamp(start + speed * progress, 0.0, 1.0);
        const Pose pose = pose_at(motion, tau, phase);
        const double cx = (pose.cx + ox) * w;
        const double cy = (pose.cy + oy) * h;
        Frame frame(w, h);
        for (int y = 0; y < h; ++y) {
          for (int x = 0; x < w; ++x) {
            const double u = (x + 0.5 - cx) / pose.scale;
            const double v = (y + 0.5 - cy) / pose.scale;
            const int texel = shape_texel(shape, u, v, radius);
            const double base = texel >= 0 ? texel : background[static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x)];
            frame.at(x, y) = clamp_pixel(p.frame_noise > 0.0 ? base + p.frame_noise * rng.normal() : base);
          }
        }
        frames.push_back(std::move(frame));
      }
      char id[64];
      std::snprintf(id, sizeof id, "%s/seq_%04zu", ds.class_names[k].c_str(), j);
      ds.sequences.emplace_back(std::move(frames), id, GestureLabel{static_cast<int>(k), ds.class_names[k]});
    }
  }
  return ds;
}

}  // namespace keygest

#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "keygest/density_peaks.hpp"
#include "keygest/entropy.hpp"
#include "keygest/frame.hpp"

namespace keygest {

struct KeyFrameOptions {
  std::size_t n = 5;
  DensityKernel kernel = DensityKernel::Gaussian;
  std::optional<double> dc;  // overrides the percentile heuristic
};

struct KeyFrameSet {
  std::vector<int> indices;  // 1-based frame numbers, strictly increasing
  std::size_t n_requested = 0;
  bool fallback_used = false;
};

// Extreme points mapped into the unit square: x = (i-1)/(n-1), y = min-max scaled
// entropy over the whole curve (0 for a flat curve).
std::vector<Point2D> normalized_points(const EntropyCurve& curve, const ExtremeSet& extrema);

struct DecisionGraph {
  ExtremeSet extrema;
  std::vector<Point2D> points;
  DensityPeaksResult peaks;  // empty when there are no extrema
};

DecisionGraph decision_graph(const EntropyCurve& curve, const KeyFrameOptions& options);

// Evenly spaced picks over the interior frames [2, n-1], rounded half to even, used to
// top up a short extreme set. Skips anything already in `taken`, then falls back to the
// lowest unused frame numbers. Returns `count` new indices (fewer if frames run out).
std::vector<int> evenly_spaced_fill(std::size_t n_frames, std::size_t count, const std::vector<int>& taken);

KeyFrameSet keyframes_from_curve(const EntropyCurve& curve, const KeyFrameOptions& options);

KeyFrameSet extract_keyframes(const FrameSequence& seq, const KeyFrameOptions& options = {});

// Picks the key frames in temporal order. Label and source id carry over.
FrameSequence subsample(const FrameSequence& seq, const KeyFrameSet& keys);

}  // namespace keygest

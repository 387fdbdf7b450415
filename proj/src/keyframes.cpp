#include "keygest/keyframes.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "keygest/error.hpp"

namespace keygest {
namespace {

double round_half_even(double x) {
  const double r = std::floor(x);
  const double diff = x - r;
  if (diff > 0.5) return r + 1.0;
  if (diff < 0.5) return r;
  return std::fmod(r, 2.0) == 0.0 ? r : r + 1.0;
}

}  // namespace

std::vector<Point2D> normalized_points(const EntropyCurve& curve, const ExtremeSet& extrema) {
  const std::size_t n = curve.size();
  const auto [lo_it, hi_it] = std::minmax_element(curve.bits.begin(), curve.bits.end());
  const double lo = n ? *lo_it : 0.0;
  const double range = n ? *hi_it - lo : 0.0;
  std::vector<Point2D> pts;
  pts.reserve(extrema.size());
  for (const ExtremePoint& e : extrema.points) {
    const double x = n > 1 ? static_cast<double>(e.frame_index - 1) / static_cast<double>(n - 1) : 0.0;
    const double y = range > 0.0 ? (e.entropy - lo) / range : 0.0;
    pts.push_back({x, y});
  }
  return pts;
}

DecisionGraph decision_graph(const EntropyCurve& curve, const KeyFrameOptions& options) {
  if (options.n == 0) throw Error(ErrorCode::InvalidArgument, "number of key frames must be at least 1");
  DecisionGraph g;
  g.extrema = local_extrema(curve);
  g.points = normalized_points(curve, g.extrema);
  if (!g.points.empty()) {
    g.peaks = density_peaks(g.points, std::min(options.n, g.points.size()), options.kernel, options.dc);
  }
  return g;
}

std::vector<int> evenly_spaced_fill(std::size_t n_frames, std::size_t count, const std::vector<int>& taken) {
  std::vector<int> used = taken;
  std::vector<int> picked;
  auto is_used = [&](int i) { return std::find(used.begin(), used.end(), i) != used.end(); };

  if (count > 0 && n_frames >= 1) {
    const double lo = n_frames >= 3 ? 2.0 : 1.0;
    const double hi = n_frames >= 3 ? static_cast<double>(n_frames - 1) : static_cast<double>(n_frames);
    for (std::size_t k = 0; k < count; ++k) {
      const double pos = count == 1 ? 0.5 * (lo + hi)
                                    : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1);
      const int idx = static_cast<int>(round_half_even(pos));
      if (!is_used(idx)) {
        used.push_back(idx);
        picked.push_back(idx);
      }
    }
  }
  for (int i = 1; picked.size() < count && i <= static_cast<int>(n_frames); ++i) {
    if (!is_used(i)) {
      used.push_back(i);
      picked.push_back(i);
    }
  }
  return picked;
}

KeyFrameSet keyframes_from_curve(const EntropyCurve& curve, const KeyFrameOptions& options) {
  if (options.n == 0) throw Error(ErrorCode::InvalidArgument, "number of key frames must be at least 1");
  KeyFrameSet keys;
  keys.n_requested = options.n;
  const ExtremeSet extrema = local_extrema(curve);

  if (extrema.size() >= options.n) {
    const std::vector<Point2D> pts = normalized_points(curve, extrema);
    const DensityPeaksResult peaks = density_peaks(pts, options.n, options.kernel, options.dc);
    for (std::size_t c : peaks.clustering.centers) keys.indices.push_back(extrema.points[c].frame_index);
  } else {
    keys.fallback_used = true;
    keys.indices = extrema.indices();
    const std::size_t target = std::min(options.n, curve.size());
    const std::vector<int> extra = evenly_spaced_fill(curve.size(), target - keys.indices.size(), keys.indices);
    keys.indices.insert(keys.indices.end(), extra.begin(), extra.end());
  }
  std::sort(keys.indices.begin(), keys.indices.end());
  return keys;
}

KeyFrameSet extract_keyframes(const FrameSequence& seq, const KeyFrameOptions& options) {
  return keyframes_from_curve(entropy_curve(seq), options);
}

FrameSequence subsample(const FrameSequence& seq, const KeyFrameSet& keys) {
  if (keys.indices.empty()) throw Error(ErrorCode::InvalidArgument, "empty key frame set");
  std::vector<int> order = keys.indices;
  std::sort(order.begin(), order.end());
  std::vector<Frame> frames;
  frames.reserve(order.size());
  for (int idx : order) {
    if (idx < 1 || static_cast<std::size_t>(idx) > seq.size()) {
      throw Error(ErrorCode::OutOfRange, "key frame index " + std::to_string(idx) + " outside 1.." +
                                             std::to_string(seq.size()));
    }
    frames.push_back(seq[static_cast<std::size_t>(idx - 1)]);
  }
  return FrameSequence(std::move(frames), seq.source_id(), seq.label());
}

}  // namespace keygest

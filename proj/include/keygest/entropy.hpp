#pragma once

#include <vector>

#include "keygest/frame.hpp"

namespace keygest {

// Shannon entropy (bits) of the 256-bin intensity histogram.
double image_entropy(const Frame& frame);

struct EntropyCurve {
  std::vector<double> bits;  // bits[i] is frame i+1

  std::size_t size() const noexcept { return bits.size(); }
  // 1-based access, matching frame numbering.
  double at(int frame_index) const { return bits.at(static_cast<std::size_t>(frame_index - 1)); }
};

EntropyCurve entropy_curve(const FrameSequence& seq);

enum class ExtremumKind { Maximum, Minimum };

struct ExtremePoint {
  int frame_index = 0;  // 1-based, always interior
  double entropy = 0.0;
  ExtremumKind kind = ExtremumKind::Maximum;

  friend bool operator==(const ExtremePoint&, const ExtremePoint&) = default;
};

struct ExtremeSet {
  std::vector<ExtremePoint> points;  // strictly increasing frame_index

  std::size_t size() const noexcept { return points.size(); }
  bool empty() const noexcept { return points.empty(); }
  std::vector<int> indices() const;
  std::vector<int> indices(ExtremumKind kind) const;
};

// Strict local maxima and minima over interior frames. Endpoints and plateaus never
// qualify. Requires at least three values.
ExtremeSet local_extrema(const EntropyCurve& curve);

}  // namespace keygest

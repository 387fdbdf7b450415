#include "keygest/entropy.hpp"

#include <array>
#include <cmath>

#include "keygest/error.hpp"

namespace keygest {

double image_entropy(const Frame& frame) {
  std::array<std::size_t, 256> hist{};
  for (std::uint8_t v : frame.pixels()) ++hist[v];
  const double total = static_cast<double>(frame.pixels().size());
  double h = 0.0;
  for (std::size_t count : hist) {
    if (count == 0) continue;
    const double p = static_cast<double>(count) / total;
    h -= p * std::log2(p);
  }
  // -0.0 for a single-bin histogram
  return h <= 0.0 ? 0.0 : h;
}

EntropyCurve entropy_curve(const FrameSequence& seq) {
  EntropyCurve curve;
  curve.bits.reserve(seq.size());
  for (const Frame& f : seq.frames()) curve.bits.push_back(image_entropy(f));
  return curve;
}

std::vector<int> ExtremeSet::indices() const {
  std::vector<int> out;
  out.reserve(points.size());
  for (const ExtremePoint& p : points) out.push_back(p.frame_index);
  return out;
}

std::vector<int> ExtremeSet::indices(ExtremumKind kind) const {
  std::vector<int> out;
  for (const ExtremePoint& p : points) {
    if (p.kind == kind) out.push_back(p.frame_index);
  }
  return out;
}

ExtremeSet local_extrema(const EntropyCurve& curve) {
  if (curve.size() < 3) {
    throw Error(ErrorCode::SequenceTooShort, "local extrema need at least 3 curve values");
  }
  ExtremeSet set;
  const std::vector<double>& e = curve.bits;
  for (std::size_t i = 1; i + 1 < e.size(); ++i) {
    const int frame_index = static_cast<int>(i) + 1;
    if (e[i] > e[i + 1] && e[i] > e[i - 1]) {
      set.points.push_back({frame_index, e[i], ExtremumKind::Maximum});
    } else if (e[i + 1] > e[i] && e[i - 1] > e[i]) {
      set.points.push_back({frame_index, e[i], ExtremumKind::Minimum});
    }
  }
  return set;
}

}  // namespace keygest

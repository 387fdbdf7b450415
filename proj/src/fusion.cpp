#include "keygest/fusion.hpp"

#include <algorithm>
#include <cmath>

#include "keygest/error.hpp"

namespace keygest {

FusionTerms fusion_terms(std::span<const double> r) {
  if (r.empty()) throw Error(ErrorCode::InvalidArgument, "fusion needs at least one cue accuracy");
  for (double v : r) {
    if (!(v >= 0.0 && v <= 100.0)) throw Error(ErrorCode::OutOfRange, "cue accuracy outside [0, 100]");
  }
  const std::size_t n = r.size();
  FusionTerms out;
  const auto [lo_it, hi_it] = std::minmax_element(r.begin(), r.end());
  const double lo = *lo_it;

  // Equal accuracies (this includes min == 100, where T is 0/0): equal weights.
  if (lo == *hi_it) {
    out.t.assign(n, 0.0);
    out.t1.assign(n, 0.0);
    out.t2.assign(n, 1.0);
    out.weights.values.assign(n, 1);
    out.degenerate = true;
    return out;
  }

  const double scale = (100.0 - lo) / 10.0;
  double max_t = 0.0, max_t1 = 0.0;
  for (double v : r) {
    const double t = (v - lo) / scale;
    out.t.push_back(t);
    out.t1.push_back(std::round(t));
    max_t = std::max(max_t, t);
    max_t1 = std::max(max_t1, out.t1.back());
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double t2 = out.t[i] * (max_t1 - 1.0) / max_t + 1.0;
    out.t2.push_back(t2);
    // std::round is half away from zero; a weight below one would invert the ordering
    out.weights.values.push_back(std::max(1, static_cast<int>(std::round(t2))));
  }
  return out;
}

FusionWeights fusion_weights(std::span<const double> accuracies) { return fusion_terms(accuracies).weights; }

std::vector<double> fuse(std::span<const double> hist1, std::span<const double> hist2, const FusionWeights& w) {
  if (w.values.size() != 2) throw Error(ErrorCode::InvalidArgument, "fusing two cues needs exactly two weights");
  std::vector<double> out;
  out.reserve(hist1.size() + hist2.size());
  for (double v : hist1) out.push_back(w.alpha() * v);
  for (double v : hist2) out.push_back(w.beta() * v);
  return out;
}

}  // namespace keygest

#pragma once

#include <span>
#include <vector>

namespace keygest {

struct FusionWeights {
  std::vector<int> values;  // one per cue; alpha, beta for appearance, motion

  int alpha() const { return values.at(0); }
  int beta() const { return values.at(1); }

  friend bool operator==(const FusionWeights&, const FusionWeights&) = default;
};

// Intermediate terms of the weight computation, exposed for inspection.
struct FusionTerms {
  std::vector<double> t;
  std::vector<double> t1;
  std::vector<double> t2;
  FusionWeights weights;
  bool degenerate = false;  // all-equal accuracies: weights forced to one
};

// Accuracies in percent, each in [0, 100].
FusionTerms fusion_terms(std::span<const double> accuracies);
FusionWeights fusion_weights(std::span<const double> accuracies);

// [alpha * hist1 | beta * hist2]
std::vector<double> fuse(std::span<const double> hist1, std::span<const double> hist2, const FusionWeights& w);

}  // namespace keygest

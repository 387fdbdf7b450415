#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "keygest/frame.hpp"
#include "keygest/matrix.hpp"

namespace keygest {

struct SvmParams {
  double c = 1.0;
  int epochs = 200;
  std::uint64_t seed = 0;
};

// One-vs-rest linear scorer: class k scores w_k . x + b_k.
class LinearModel {
 public:
  LinearModel() = default;
  LinearModel(Matrix weights, std::vector<double> bias, std::vector<std::string> class_names);

  std::size_t num_classes() const noexcept { return bias_.size(); }
  std::size_t dim() const noexcept { return weights_.cols(); }

  const Matrix& weights() const noexcept { return weights_; }
  const std::vector<double>& bias() const noexcept { return bias_; }
  const std::vector<std::string>& class_names() const noexcept { return class_names_; }

  std::vector<double> scores(std::span<const double> x) const;
  // Argmax of the scores; ties go to the lowest class id.
  GestureLabel predict(std::span<const double> x) const;

  friend bool operator==(const LinearModel&, const LinearModel&) = default;

 private:
  Matrix weights_;
  std::vector<double> bias_;
  std::vector<std::string> class_names_;
};

// Per-class primal objective 0.5*|w|^2 + c * sum(hinge), recorded after every epoch.
struct SvmTrace {
  std::vector<std::vector<double>> objective;  // [class][epoch]
};

// Trains one binary hinge-loss classifier per class by stochastic subgradient descent
// (Pegasos step schedule). Labels are dense ids 0..C-1 naming `class_names`.
LinearModel train_svm(const Matrix& features, std::span<const int> labels,
                      std::vector<std::string> class_names, const SvmParams& params,
                      SvmTrace* trace = nullptr);

LinearModel train_svm(const Matrix& features, std::span<const GestureLabel> labels, const SvmParams& params,
                      SvmTrace* trace = nullptr);

double binary_objective(const Matrix& features, std::span<const int> signs, std::span<const double> w, double b,
                        double c);

double accuracy_percent(const LinearModel& model, const Matrix& features, std::span<const int> labels);

}  // namespace keygest

#include "keygest/classifier.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <string>
#include <utility>

#include "keygest/error.hpp"
#include "keygest/rng.hpp"

namespace keygest {

LinearModel::LinearModel(Matrix weights, std::vector<double> bias, std::vector<std::string> class_names)
    : weights_(std::move(weights)), bias_(std::move(bias)), class_names_(std::move(class_names)) {
  if (weights_.rows() != bias_.size() || bias_.size() != class_names_.size()) {
    throw Error(ErrorCode::DimensionMismatch, "linear model needs one weight row, bias and name per class");
  }
}

std::vector<double> LinearModel::scores(std::span<const double> x) const {
  if (x.size() != dim()) {
    throw Error(ErrorCode::DimensionMismatch, "feature length " + std::to_string(x.size()) +
                                                  " does not match model dimension " + std::to_string(dim()));
  }
  std::vector<double> s(num_classes());
  for (std::size_t k = 0; k < s.size(); ++k) s[k] = dot(weights_.row(k), x) + bias_[k];
  return s;
}

GestureLabel LinearModel::predict(std::span<const double> x) const {
  const std::vector<double> s = scores(x);
  std::size_t best = 0;
  for (std::size_t k = 1; k < s.size(); ++k) {
    if (s[k] > s[best]) best = k;
  }
  return {static_cast<int>(best), class_names_[best]};
}

double binary_objective(const Matrix& features, std::span<const int> signs, std::span<const double> w, double b,
                        double c) {
  double hinge = 0.0;
  for (std::size_t i = 0; i < features.rows(); ++i) {
    hinge += std::max(0.0, 1.0 - signs[i] * (dot(w, features.row(i)) + b));
  }
  return 0.5 * (dot(w, w) + b * b) + c * hinge;
}

LinearModel train_svm(const Matrix& features, std::span<const int> labels, std::vector<std::string> class_names,
                      const SvmParams& params, SvmTrace* trace) {
  const std::size_t m = features.rows();
  const std::size_t dim = features.cols();
  const std::size_t n_classes = class_names.size();
  if (n_classes < 2) throw Error(ErrorCode::DegenerateDataset, "classifier needs at least two classes");
  if (labels.size() != m) throw Error(ErrorCode::DimensionMismatch, "one label per feature row required");
  if (!(params.c > 0.0) || params.epochs < 1) throw Error(ErrorCode::InvalidArgument, "SVM needs c > 0, epochs >= 1");
  std::vector<std::size_t> per_class(n_classes, 0);
  for (int l : labels) {
    if (l < 0 || static_cast<std::size_t>(l) >= n_classes) throw Error(ErrorCode::OutOfRange, "label id out of range");
    ++per_class[static_cast<std::size_t>(l)];
  }
  for (std::size_t k = 0; k < n_classes; ++k) {
    if (per_class[k] == 0) {
      throw Error(ErrorCode::DegenerateDataset, "class '" + class_names[k] + "' has no training samples");
    }
  }

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(params.seed);
  rng.shuffle(std::span<std::size_t>(order));

  // Pegasos on lambda/2 |w|^2 + mean hinge with lambda = 1/(c m): the same minimiser as
  // 0.5 |w|^2 + c * sum hinge. The bias rides along as a constant feature. The returned
  // model is the step-weighted average of the iterates (weight t at step t).
  const double lambda = 1.0 / (params.c * static_cast<double>(m));
  Matrix weights(n_classes, dim);
  std::vector<double> bias(n_classes, 0.0);
  if (trace) trace->objective.assign(n_classes, {});

  std::vector<int> signs(m);
  std::vector<double> v(dim);
  for (std::size_t k = 0; k < n_classes; ++k) {
    for (std::size_t i = 0; i < m; ++i) signs[i] = labels[i] == static_cast<int>(k) ? 1 : -1;
    std::fill(v.begin(), v.end(), 0.0);
    double vb = 0.0;
    double scale = 1.0;  // w = scale * v
    std::size_t t = 0;
    std::vector<double> avg(dim, 0.0);
    double avg_b = 0.0;
    for (int epoch = 0; epoch < params.epochs; ++epoch) {
      for (std::size_t i : order) {
        ++t;
        const double eta = 1.0 / (lambda * static_cast<double>(t));
        const auto x = features.row(i);
        const double margin = signs[i] * scale * (dot(v, x) + vb);
        const double shrink = 1.0 - 1.0 / static_cast<double>(t);
        if (shrink == 0.0) {
          std::fill(v.begin(), v.end(), 0.0);
          vb = 0.0;
          scale = 1.0;
        } else {
          scale *= shrink;
        }
        if (margin < 1.0) {
          const double step = eta * signs[i] / scale;
          for (std::size_t j = 0; j < dim; ++j) v[j] += step * x[j];
          vb += step;
        }
        if (scale < 1e-9) {
          for (double& e : v) e *= scale;
          vb *= scale;
          scale = 1.0;
        }
        const double a = 2.0 / static_cast<double>(t + 1);
        for (std::size_t j = 0; j < dim; ++j) avg[j] += a * (scale * v[j] - avg[j]);
        avg_b += a * (scale * vb - avg_b);
      }
      if (trace) trace->objective[k].push_back(binary_objective(features, signs, avg, avg_b, params.c));
    }
    auto row = weights.row(k);
    std::copy(avg.begin(), avg.end(), row.begin());
    bias[k] = avg_b;
  }
  return LinearModel(std::move(weights), std::move(bias), std::move(class_names));
}

LinearModel train_svm(const Matrix& features, std::span<const GestureLabel> labels, const SvmParams& params,
                      SvmTrace* trace) {
  std::vector<std::string> names;
  std::vector<int> ids;
  ids.reserve(labels.size());
  for (const GestureLabel& l : labels) {
    if (l.id < 0) throw Error(ErrorCode::OutOfRange, "negative label id");
    const auto id = static_cast<std::size_t>(l.id);
    if (names.size() <= id) names.resize(id + 1);
    if (names[id].empty()) {
      names[id] = l.name;
    } else if (names[id] != l.name) {
      throw Error(ErrorCode::InvalidArgument, "label id " + std::to_string(l.id) + " has two names");
    }
    ids.push_back(l.id);
  }
  std::set<std::string> unique(names.begin(), names.end());
  if (unique.size() != names.size()) throw Error(ErrorCode::InvalidArgument, "label names must be unique");
  return train_svm(features, ids, std::move(names), params, trace);
}

double accuracy_percent(const LinearModel& model, const Matrix& features, std::span<const int> labels) {
  if (features.rows() == 0) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < features.rows(); ++i) {
    if (model.predict(features.row(i)).id == labels[i]) ++correct;
  }
  return 100.0 * static_cast<double>(correct) / static_cast<double>(features.rows());
}

}  // namespace keygest

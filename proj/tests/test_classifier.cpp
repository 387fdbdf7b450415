#include <cmath>

#include "doctest.h"
#include "keygest/classifier.hpp"
#include "keygest/error.hpp"
#include "keygest/rng.hpp"

using namespace keygest;

namespace {

struct Toy {
  Matrix x;
  std::vector<int> y;
};

Toy separable(Rng& rng, std::size_t per_class) {
  Toy t;
  for (std::size_t i = 0; i < per_class; ++i) {
    t.x.append_row(std::vector<double>{-2.0 + 0.5 * rng.uniform(), rng.uniform(-1, 1)});
    t.y.push_back(0);
    t.x.append_row(std::vector<double>{2.0 - 0.5 * rng.uniform(), rng.uniform(-1, 1)});
    t.y.push_back(1);
  }
  return t;
}

Toy one_hot(std::size_t copies) {
  Toy t;
  for (std::size_t r = 0; r < copies; ++r)
    for (int k = 0; k < 3; ++k) {
      std::vector<double> e(3, 0.0);
      e[static_cast<std::size_t>(k)] = 1.0;
      t.x.append_row(e);
      t.y.push_back(k);
    }
  return t;
}

std::size_t non_increasing_steps(const std::vector<double>& objective) {
  std::size_t ok = 0;
  for (std::size_t e = 1; e < objective.size(); ++e) ok += objective[e] <= objective[e - 1] + 1e-12 ? 1 : 0;
  return ok;
}

}  // namespace

TEST_CASE("separable two-class toy is fit perfectly") {
  Rng rng(1);
  const Toy t = separable(rng, 20);
  const LinearModel m = train_svm(t.x, t.y, {"neg", "pos"}, {});
  CHECK(accuracy_percent(m, t.x, t.y) == 100.0);
  CHECK(m.num_classes() == 2);
  CHECK(m.dim() == 2);
}

TEST_CASE("one-hot three-class toy") {
  const Toy t = one_hot(4);
  const LinearModel m = train_svm(t.x, t.y, {"a", "b", "c"}, {});
  for (int k = 0; k < 3; ++k) {
    std::vector<double> e(3, 0.0);
    e[static_cast<std::size_t>(k)] = 1.0;
    CHECK(m.predict(e).id == k);
  }
  CHECK(m.predict(std::vector<double>{0, 1, 0}).name == "b");
}

TEST_CASE("duplicating every sample keeps the training decisions") {
  Rng rng(2);
  const Toy t = separable(rng, 15);
  Toy twice = t;
  for (std::size_t i = 0; i < t.x.rows(); ++i) {
    twice.x.append_row(t.x.row(i));
    twice.y.push_back(t.y[i]);
  }
  const LinearModel a = train_svm(t.x, t.y, {"n", "p"}, {});
  const LinearModel b = train_svm(twice.x, twice.y, {"n", "p"}, {});
  for (std::size_t i = 0; i < t.x.rows(); ++i) CHECK(a.predict(t.x.row(i)).id == b.predict(t.x.row(i)).id);
}

TEST_CASE("prediction rules") {
  Matrix w(3, 2);
  w(0, 0) = 1;
  w(1, 1) = 1;
  const LinearModel m(w, {0.1, 0.3, 0.2}, {"x", "y", "z"});
  CHECK(m.predict(std::vector<double>{0, 0}).id == 1);  // largest bias
  const LinearModel tie(Matrix(2, 2), {0.5, 0.5}, {"p", "q"});
  CHECK(tie.predict(std::vector<double>{3, 4}).id == 0);
  CHECK_THROWS_AS(m.predict(std::vector<double>{1, 2, 3}), Error);

  // argmax invariant to a shared offset on every class weight and to positive scaling
  Rng rng(3);
  Matrix shifted = w, scaled = w;
  const std::vector<double> offset{rng.uniform(-2, 2), rng.uniform(-2, 2)};
  for (std::size_t k = 0; k < 3; ++k)
    for (std::size_t j = 0; j < 2; ++j) {
      shifted(k, j) += offset[j];
      scaled(k, j) *= 3.5;
    }
  const LinearModel ms(shifted, m.bias(), m.class_names());
  const LinearModel mc(scaled, {0.35, 1.05, 0.7}, m.class_names());
  for (int i = 0; i < 200; ++i) {
    const std::vector<double> x{rng.uniform(-1, 1), rng.uniform(-1, 1)};
    CHECK(ms.predict(x).id == m.predict(x).id);
    CHECK(mc.predict(x).id == m.predict(x).id);
  }
}

TEST_CASE("training is deterministic and the objective trends down") {
  Rng rng(4);
  const Toy t = separable(rng, 30);
  SvmTrace trace;
  const SvmParams p{1.0, 100, 9};
  const LinearModel a = train_svm(t.x, t.y, {"n", "p"}, p, &trace);
  const LinearModel b = train_svm(t.x, t.y, {"n", "p"}, p);
  CHECK(a == b);
  REQUIRE(trace.objective.size() == 2);
  for (const auto& obj : trace.objective) {
    REQUIRE(obj.size() == 100);
    for (double v : obj) CHECK(std::isfinite(v));
    CHECK(non_increasing_steps(obj) >= 90 * (obj.size() - 1) / 100);
  }

  const Toy h = one_hot(5);
  SvmTrace t3;
  train_svm(h.x, h.y, {"a", "b", "c"}, {1.0, 200, 1}, &t3);
  for (const auto& obj : t3.objective) CHECK(non_increasing_steps(obj) >= 90 * (obj.size() - 1) / 100);

  // the reported objective is the one being minimised
  std::vector<int> signs;
  for (int y : t.y) signs.push_back(y == 1 ? 1 : -1);
  const auto w1 = a.weights().row(1);
  CHECK(binary_objective(t.x, signs, w1, a.bias()[1], 1.0) == doctest::Approx(trace.objective[1].back()));
}

TEST_CASE("training errors") {
  const Toy t = one_hot(2);
  CHECK_THROWS_AS(train_svm(t.x, std::vector<int>(6, 0), {"only"}, {}), Error);
  try {
    train_svm(t.x, std::vector<int>{0, 0, 0, 0, 0, 0}, {"a", "b"}, {});
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateDataset);
  }
  CHECK_THROWS_AS(train_svm(t.x, std::vector<int>{0, 1, 5, 0, 1, 2}, {"a", "b", "c"}, {}), Error);
  CHECK_THROWS_AS(train_svm(t.x, std::vector<int>{0, 1}, {"a", "b"}, {}), Error);

  std::vector<GestureLabel> labels;
  for (int y : t.y) labels.push_back({y, "c" + std::to_string(y)});
  const LinearModel m = train_svm(t.x, labels, SvmParams{});
  CHECK(m.class_names() == std::vector<std::string>{"c0", "c1", "c2"});
  labels[0].name = "renamed";
  CHECK_THROWS_AS(train_svm(t.x, labels, SvmParams{}), Error);
}

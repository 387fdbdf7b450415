#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "keygest/error.hpp"
#include "keygest/fusion.hpp"
#include "keygest/rng.hpp"

using namespace keygest;

TEST_CASE("accuracies 92.37 and 60.78 give alpha 8 and beta 1") {
  const std::vector<double> r{92.37, 60.78};
  const FusionTerms t = fusion_terms(r);
  CHECK(t.t[0] == doctest::Approx(8.054).epsilon(1e-4));
  CHECK(t.t[1] == 0.0);
  CHECK(t.t1 == std::vector<double>{8, 0});
  CHECK(t.t2[0] == doctest::Approx(8.0));
  CHECK(t.t2[1] == 1.0);
  CHECK(t.weights.values == std::vector<int>{8, 1});
  CHECK(t.weights.alpha() == 8);
  CHECK(t.weights.beta() == 1);
  CHECK_FALSE(t.degenerate);
}

TEST_CASE("degenerate accuracies") {
  const FusionTerms perfect_gap = fusion_terms(std::vector<double>{100, 0});
  CHECK(perfect_gap.t == std::vector<double>{10, 0});
  CHECK(perfect_gap.t1 == std::vector<double>{10, 0});
  CHECK(perfect_gap.t2 == std::vector<double>{10, 1});
  CHECK(perfect_gap.weights.values == std::vector<int>{10, 1});

  CHECK(fusion_weights(std::vector<double>{50, 50}).values == std::vector<int>{1, 1});
  CHECK(fusion_terms(std::vector<double>{50, 50}).degenerate);
  CHECK(fusion_weights(std::vector<double>{100, 100}).values == std::vector<int>{1, 1});
  // every T rounds to zero: the formula would invert the order, so weights clamp at one
  const FusionTerms small = fusion_terms(std::vector<double>{50, 51.9});
  CHECK(small.t1 == std::vector<double>{0, 0});
  CHECK(small.weights.values == std::vector<int>{1, 1});

  CHECK_THROWS_AS(fusion_weights(std::vector<double>{101, 50}), Error);
  CHECK_THROWS_AS(fusion_weights(std::vector<double>{-0.5, 50}), Error);
  CHECK_THROWS_AS(fusion_weights(std::vector<double>{}), Error);
}

TEST_CASE("weight properties on random accuracies") {
  Rng rng(55);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = 2 + rng.below(3);
    std::vector<double> r(n);
    for (auto& v : r) v = std::round(rng.uniform(0, 100) * 100) / 100;
    const FusionTerms t = fusion_terms(r);
    const auto& w = t.weights.values;
    CHECK(*std::min_element(w.begin(), w.end()) >= 1);
    const auto lo = std::min_element(r.begin(), r.end()) - r.begin();
    CHECK(w[static_cast<std::size_t>(lo)] == 1);
    const double max_t = *std::max_element(t.t.begin(), t.t.end());
    const double max_t1 = *std::max_element(t.t1.begin(), t.t1.end());
    if (max_t > 0 && max_t1 >= 1) {
      CHECK(*std::max_element(t.t2.begin(), t.t2.end()) == doctest::Approx(max_t1));
      CHECK(*std::max_element(w.begin(), w.end()) == static_cast<int>(max_t1));
    }
    // permuting the cues permutes the weights
    std::vector<double> rev(r.rbegin(), r.rend());
    std::vector<int> wrev = fusion_weights(rev).values;
    std::reverse(wrev.begin(), wrev.end());
    CHECK(wrev == w);
  }
}

TEST_CASE("fuse") {
  const std::vector<double> h1{0.5, 0.5}, h2{1, 0};
  CHECK(fuse(h1, h2, FusionWeights{{8, 1}}) == std::vector<double>{4, 4, 1, 0});
  CHECK(fuse(h1, h2, FusionWeights{{1, 1}}) == std::vector<double>{0.5, 0.5, 1, 0});
  CHECK(fuse(std::vector<double>(80, 0.1), std::vector<double>(177, 0.2), FusionWeights{{2, 3}}).size() == 257);
  CHECK_THROWS_AS(fuse(h1, h2, FusionWeights{{1, 2, 3}}), Error);

  // linear in each block
  const std::vector<double> a{1, 2}, b{3, -1}, m{0.25};
  std::vector<double> sum{4, 1};
  const auto fa = fuse(a, m, FusionWeights{{3, 2}});
  const auto fb = fuse(b, m, FusionWeights{{3, 2}});
  const auto fs = fuse(sum, std::vector<double>{0.5}, FusionWeights{{3, 2}});
  for (std::size_t i = 0; i < fs.size(); ++i) CHECK(fs[i] == doctest::Approx(fa[i] + fb[i]));
}

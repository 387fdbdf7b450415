#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "doctest.h"
#include "helpers.hpp"
#include "keygest/bof.hpp"
#include "keygest/error.hpp"
#include "keygest/log.hpp"

using namespace keygest;

namespace {

Matrix rows(std::initializer_list<std::vector<double>> r) {
  Matrix m;
  for (const auto& v : r) m.append_row(v);
  return m;
}

Matrix blobs(Rng& rng, const std::vector<std::pair<double, double>>& centers, std::size_t per, double spread) {
  Matrix m;
  for (auto [cx, cy] : centers)
    for (std::size_t i = 0; i < per; ++i) m.append_row(std::vector<double>{cx + spread * rng.normal(), cy + spread * rng.normal()});
  return m;
}

// Canonical form of a partition: relabel clusters by first appearance.
std::vector<std::size_t> canonical(const std::vector<std::size_t>& labels) {
  std::vector<std::size_t> map(labels.size() + 64, std::numeric_limits<std::size_t>::max());
  std::vector<std::size_t> out;
  std::size_t next = 0;
  for (std::size_t l : labels) {
    if (map[l] == std::numeric_limits<std::size_t>::max()) map[l] = next++;
    out.push_back(map[l]);
  }
  return out;
}

// Exhaustive search over all assignments of points to k nonempty clusters.
std::vector<std::size_t> best_partition(const Matrix& p, std::size_t k) {
  const std::size_t n = p.rows();
  std::vector<std::size_t> labels(n, 0), best;
  double best_sse = std::numeric_limits<double>::infinity();
  while (true) {
    std::vector<double> sx(k, 0), sy(k, 0), cnt(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      sx[labels[i]] += p(i, 0);
      sy[labels[i]] += p(i, 1);
      cnt[labels[i]] += 1;
    }
    if (std::all_of(cnt.begin(), cnt.end(), [](double c) { return c > 0; })) {
      double sse = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t c = labels[i];
        const double dx = p(i, 0) - sx[c] / cnt[c], dy = p(i, 1) - sy[c] / cnt[c];
        sse += dx * dx + dy * dy;
      }
      if (sse < best_sse) {
        best_sse = sse;
        best = labels;
      }
    }
    std::size_t pos = 0;
    while (pos < n && ++labels[pos] == k) labels[pos++] = 0;
    if (pos == n) break;
  }
  return best;
}

}  // namespace

TEST_CASE("k-means recovers the optimal partition of three planted blobs") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    Rng rng(seed * 101);
    const Matrix p = blobs(rng, {{0, 0}, {5, 0}, {0, 5}}, 4, 0.6);
    const KMeansResult r = kmeans(p, 3, seed);
    CHECK(canonical(r.assignment) == canonical(best_partition(p, 3)));
    CHECK(canonical(r.assignment) == std::vector<std::size_t>{0, 0, 0, 0, 1, 1, 1, 1, 2, 2, 2, 2});
    CHECK(r.converged);
  }
}

TEST_CASE("k-means basics") {
  Rng rng(4);
  const Matrix p = blobs(rng, {{0, 0}, {10, 10}}, 20, 0.5);
  const KMeansResult r = kmeans(p, 2, 9);
  CHECK(r.sse_history.back() <= r.sse_history.front());
  for (std::size_t i = 1; i < r.sse_history.size(); ++i) CHECK(r.sse_history[i] <= r.sse_history[i - 1] + 1e-9);
  // one centroid per blob
  const auto c0 = r.codebook.centroids.row(0), c1 = r.codebook.centroids.row(1);
  CHECK(std::abs(std::abs(c0[0] - c1[0]) - 10.0) < 1.0);

  const KMeansResult one = kmeans(p, 1, 0);
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < p.rows(); ++i) {
    mx += p(i, 0);
    my += p(i, 1);
  }
  CHECK(one.codebook.centroids(0, 0) == doctest::Approx(mx / static_cast<double>(p.rows())));
  CHECK(one.codebook.centroids(0, 1) == doctest::Approx(my / static_cast<double>(p.rows())));

  CHECK_THROWS_AS(kmeans(Matrix(0, 2), 2, 0), Error);
  CHECK_THROWS_AS(kmeans(p, 0, 0), Error);
}

TEST_CASE("sse never increases on random data") {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix p;
    for (int i = 0; i < 200; ++i) {
      std::vector<double> v(8);
      for (auto& x : v) x = rng.uniform();
      p.append_row(v);
    }
    const KMeansResult r = kmeans(p, 1 + rng.below(16), rng.next());
    for (std::size_t i = 1; i < r.sse_history.size(); ++i) CHECK(r.sse_history[i] <= r.sse_history[i - 1] + 1e-9);
  }
}

TEST_CASE("too many centroids warns and still returns k rows") {
  std::vector<std::string> warnings;
  const auto previous = set_warning_handler([&](std::string_view m) { warnings.emplace_back(m); });
  const Matrix p = rows({{1, 1}, {1, 1}, {2, 2}});
  const KMeansResult r = kmeans(p, 4, 0);
  set_warning_handler(previous);
  CHECK(r.codebook.size() == 4);
  CHECK(r.duplicate_centroids);
  CHECK(warnings.size() == 1);
}

TEST_CASE("codebook is deterministic for a seed") {
  Rng rng(8);
  const Matrix p = blobs(rng, {{0, 0}, {3, 3}, {6, 0}}, 30, 1.0);
  CHECK(train_codebook(p, 5, 42) == train_codebook(p, 5, 42));
  CHECK(train_codebook(p, 5, 42).seed == 42);
}

TEST_CASE("encode examples") {
  Codebook cb;
  cb.centroids = rows({{0, 0}, {1, 0}, {0, 1}, {5, 5}});
  CHECK(encode(rows({{5, 5}, {5, 5}, {5, 5}}), cb) == std::vector<double>{0, 0, 0, 1});
  CHECK(encode(Matrix(0, 2), cb) == std::vector<double>{0, 0, 0, 0});
  CHECK(encode(rows({{0.1, 0}, {0.9, 0}, {0, 0}, {1, 0.1}}), cb) == std::vector<double>{0.5, 0.5, 0, 0});
  // equidistant from centroids 1 and 2: lowest index wins
  CHECK(encode(rows({{0.5, 0.5}}), cb) == std::vector<double>{1, 0, 0, 0});
  CHECK(nearest_centroid(cb.centroids, std::vector<double>{1, 1}) == 1);
  CHECK_THROWS_AS(encode(rows({{1, 2, 3}}), cb), Error);
}

TEST_CASE("encode is invariant to descriptor order and joint scaling") {
  Rng rng(10);
  Matrix c;
  for (int i = 0; i < 6; ++i) c.append_row(std::vector<double>{rng.uniform(), rng.uniform(), rng.uniform()});
  Codebook cb{c, 0};
  Matrix d;
  for (int i = 0; i < 40; ++i) d.append_row(std::vector<double>{rng.uniform(), rng.uniform(), rng.uniform()});
  const auto h = encode(d, cb);
  double total = 0;
  for (double v : h) total += v;
  CHECK(total == doctest::Approx(1.0));

  std::vector<std::size_t> perm(d.rows());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  rng.shuffle(std::span<std::size_t>(perm));
  Matrix shuffled;
  for (auto i : perm) shuffled.append_row(d.row(i));
  CHECK(encode(shuffled, cb) == h);

  Matrix ds, cs;
  for (std::size_t i = 0; i < d.rows(); ++i) {
    std::vector<double> v(d.row(i).begin(), d.row(i).end());
    for (auto& x : v) x *= 8.0;
    ds.append_row(v);
  }
  for (std::size_t i = 0; i < c.rows(); ++i) {
    std::vector<double> v(c.row(i).begin(), c.row(i).end());
    for (auto& x : v) x *= 8.0;
    cs.append_row(v);
  }
  CHECK(encode(ds, Codebook{cs, 0}) == h);
}

TEST_CASE("appearance histogram blocks follow key-frame order") {
  Rng rng(12);
  const Frame a = testutil::random_frame(rng, 32, 32);
  const Frame b = testutil::random_frame(rng, 32, 32, 4);
  const PatchGradientExtractor ex(16);
  Matrix all = ex.extract(a);
  const Matrix mb = ex.extract(b);
  for (std::size_t i = 0; i < mb.rows(); ++i) all.append_row(mb.row(i));
  const Codebook cb = train_codebook(all, 4, 1);

  const auto h = appearance_histogram(FrameSequence({a, b, a, b, b}), cb, ex);
  REQUIRE(h.size() == 5 * 4);
  CHECK(std::equal(h.begin(), h.begin() + 4, h.begin() + 8));
  const auto rev = appearance_histogram(FrameSequence({b, b, a, b, a}), cb, ex);
  for (std::size_t blk = 0; blk < 5; ++blk)
    CHECK(std::equal(h.begin() + static_cast<long>(4 * blk), h.begin() + static_cast<long>(4 * blk + 4),
                     rev.begin() + static_cast<long>(4 * (4 - blk))));
  CHECK_THROWS_AS(appearance_histogram(FrameSequence({a, b, a}), cb, PatchLbpExtractor(16)), Error);
}

TEST_CASE("hellinger mapping") {
  std::vector<double> h{0.25, 0.0, 0.75, 0.0};
  hellinger(h);
  CHECK(h[0] == 0.5);
  CHECK(h[1] == 0.0);
  CHECK(h[2] == doctest::Approx(std::sqrt(0.75)));
}

#include "keygest/bof.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "keygest/error.hpp"
#include "keygest/log.hpp"
#include "keygest/rng.hpp"

namespace keygest {
namespace {

std::vector<std::size_t> assign_all(const Matrix& points, const Matrix& centroids) {
  std::vector<std::size_t> a(points.rows());
  for (std::size_t i = 0; i < points.rows(); ++i) a[i] = nearest_centroid(centroids, points.row(i));
  return a;
}

Matrix seed_plus_plus(const Matrix& points, std::size_t k, Rng& rng, bool& duplicates) {
  const std::size_t n = points.rows();
  Matrix centroids(0, points.cols());
  std::vector<double> d2(n, 0.0);
  std::size_t first = rng.below(n);
  centroids.append_row(points.row(first));
  for (std::size_t i = 0; i < n; ++i) d2[i] = squared_distance(points.row(i), points.row(first));

  while (centroids.rows() < k) {
    double total = 0.0;
    for (double v : d2) total += v;
    std::size_t pick;
    if (total <= 0.0) {
      duplicates = true;
      pick = rng.below(n);
    } else {
      const double target = rng.uniform() * total;
      double cum = 0.0;
      pick = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (d2[i] <= 0.0) continue;
        cum += d2[i];
        pick = i;
        if (cum > target) break;
      }
    }
    centroids.append_row(points.row(pick));
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], squared_distance(points.row(i), points.row(pick)));
    }
  }
  return centroids;
}

}  // namespace

std::size_t nearest_centroid(const Matrix& centroids, std::span<const double> x) {
  std::size_t best = 0;
  double best_d = 0.0;
  for (std::size_t c = 0; c < centroids.rows(); ++c) {
    const double d = squared_distance(centroids.row(c), x);
    if (c == 0 || d < best_d) {
      best = c;
      best_d = d;
    }
  }
  return best;
}

double within_cluster_sse(const Matrix& points, const Matrix& centroids, std::span<const std::size_t> assignment) {
  double s = 0.0;
  for (std::size_t i = 0; i < points.rows(); ++i) s += squared_distance(points.row(i), centroids.row(assignment[i]));
  return s;
}

KMeansResult kmeans(const Matrix& points, std::size_t k, std::uint64_t seed, int max_iterations) {
  if (points.empty()) throw Error(ErrorCode::InvalidArgument, "k-means needs at least one descriptor");
  if (k == 0) throw Error(ErrorCode::InvalidArgument, "codebook size must be at least 1");
  const std::size_t n = points.rows();
  const std::size_t dim = points.cols();

  KMeansResult r;
  r.codebook.seed = seed;
  Rng rng(seed);
  Matrix centroids = seed_plus_plus(points, k, rng, r.duplicate_centroids);
  if (r.duplicate_centroids) {
    warn("codebook size " + std::to_string(k) + " exceeds the number of distinct descriptors; duplicate centroids");
  }

  r.assignment = assign_all(points, centroids);
  r.sse_history.push_back(within_cluster_sse(points, centroids, r.assignment));

  for (int it = 1; it <= max_iterations; ++it) {
    Matrix sums(k, dim);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      auto row = sums.row(r.assignment[i]);
      auto p = points.row(i);
      for (std::size_t j = 0; j < dim; ++j) row[j] += p[j];
      ++counts[r.assignment[i]];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;
      auto row = centroids.row(c);
      auto s = sums.row(c);
      for (std::size_t j = 0; j < dim; ++j) row[j] = s[j] / static_cast<double>(counts[c]);
    }

    std::vector<bool> taken(n, false);
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] != 0) continue;
      std::size_t far = n;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (taken[i]) continue;
        const double d = squared_distance(points.row(i), centroids.row(r.assignment[i]));
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      if (far == n) break;
      taken[far] = true;
      auto row = centroids.row(c);
      auto p = points.row(far);
      std::copy(p.begin(), p.end(), row.begin());
    }

    std::vector<std::size_t> next = assign_all(points, centroids);
    r.sse_history.push_back(within_cluster_sse(points, centroids, next));
    r.iterations = it;
    if (next == r.assignment) {
      r.converged = true;
      break;
    }
    r.assignment = std::move(next);
  }
  r.codebook.centroids = std::move(centroids);
  return r;
}

Codebook train_codebook(const Matrix& descriptors, std::size_t k, std::uint64_t seed) {
  return kmeans(descriptors, k, seed).codebook;
}

std::vector<double> encode(const Matrix& descriptors, const Codebook& codebook) {
  std::vector<double> h(codebook.size(), 0.0);
  if (descriptors.rows() == 0) return h;
  if (descriptors.cols() != codebook.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "descriptor length " + std::to_string(descriptors.cols()) +
                                                  " does not match codebook dimension " +
                                                  std::to_string(codebook.dim()));
  }
  for (std::size_t i = 0; i < descriptors.rows(); ++i) h[nearest_centroid(codebook.centroids, descriptors.row(i))] += 1.0;
  for (double& v : h) v /= static_cast<double>(descriptors.rows());
  return h;
}

std::vector<double> appearance_histogram(const FrameSequence& keyseq, const Codebook& codebook,
                                         const AppearanceExtractor& extractor) {
  if (extractor.dim() != codebook.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "appearance descriptor does not match codebook dimension");
  }
  std::vector<double> out;
  out.reserve(keyseq.size() * codebook.size());
  for (const Frame& f : keyseq.frames()) {
    std::vector<double> h = encode(extractor.extract(f), codebook);
    hellinger(h);
    out.insert(out.end(), h.begin(), h.end());
  }
  return out;
}

void hellinger(std::span<double> histogram) {
  for (double& v : histogram) v = std::sqrt(std::max(v, 0.0));
}

}  // namespace keygest

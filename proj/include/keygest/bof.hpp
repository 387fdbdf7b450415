#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "keygest/descriptors.hpp"
#include "keygest/frame.hpp"
#include "keygest/matrix.hpp"

namespace keygest {

struct Codebook {
  Matrix centroids;  // one centroid per row
  std::uint64_t seed = 0;

  std::size_t size() const noexcept { return centroids.rows(); }
  std::size_t dim() const noexcept { return centroids.cols(); }

  friend bool operator==(const Codebook&, const Codebook&) = default;
};

struct KMeansResult {
  Codebook codebook;
  std::vector<std::size_t> assignment;
  std::vector<double> sse_history;  // [0] is the seeding, then one entry per Lloyd step
  int iterations = 0;
  bool converged = false;
  bool duplicate_centroids = false;
};

// Index of the nearest row of `centroids`; ties go to the lowest index.
std::size_t nearest_centroid(const Matrix& centroids, std::span<const double> x);

double within_cluster_sse(const Matrix& points, const Matrix& centroids,
                          std::span<const std::size_t> assignment);

// k-means++ seeding, then Lloyd iterations until the assignment stops changing or
// `max_iterations` is reached. An emptied cluster is re-seeded with the point that is
// farthest from its current centroid.
KMeansResult kmeans(const Matrix& points, std::size_t k, std::uint64_t seed, int max_iterations = 100);

Codebook train_codebook(const Matrix& descriptors, std::size_t k, std::uint64_t seed);

// Hard-assignment bag of features, L1-normalised. Empty input gives all zeros.
std::vector<double> encode(const Matrix& descriptors, const Codebook& codebook);

// Elementwise square root of a non-negative histogram (Hellinger mapping).
void hellinger(std::span<double> histogram);

// Per-key-frame BoF histograms, Hellinger-mapped and concatenated in temporal order
// (length frames * D).
std::vector<double> appearance_histogram(const FrameSequence& keyseq, const Codebook& codebook,
                                         const AppearanceExtractor& extractor);

}  // namespace keygest

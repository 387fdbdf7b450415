#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace keygest {

struct Point2D {
  double x = 0.0;
  double y = 0.0;
};

class DistanceTable {
 public:
  explicit DistanceTable(std::size_t n) : n_(n), d_(n * n, 0.0) {}

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return d_[i * n_ + j]; }

  double max() const noexcept;

 private:
  std::size_t n_;
  std::vector<double> d_;
};

DistanceTable pairwise_distances(std::span<const Point2D> points);

enum class DensityKernel { Cutoff, Gaussian };

const char* to_string(DensityKernel kernel) noexcept;
DensityKernel parse_kernel(std::string_view name);

// Cutoff: count of other points strictly closer than dc.
// Gaussian: sum over other points of exp(-(d/dc)^2).
std::vector<double> local_density(const DistanceTable& distances, double dc, DensityKernel kernel);

// dc as the nearest-rank `fraction` percentile of the nonzero pairwise distances
// (each unordered pair counted once), floored at 1e-6.
double cutoff_distance(const DistanceTable& distances, double fraction = 0.02);

inline constexpr std::size_t kNoHigher = std::numeric_limits<std::size_t>::max();

struct DensityProfile {
  std::vector<double> rho;
  std::vector<double> delta;
  std::vector<std::size_t> nearest_higher;  // kNoHigher for the density maximum
  std::vector<std::size_t> order;           // by (rho descending, index ascending)

  std::size_t size() const noexcept { return rho.size(); }
};

// Indices sorted by (rho descending, index ascending). Position in this order is the
// strict "higher density" relation used everywhere else.
std::vector<std::size_t> density_order(std::span<const double> rho);

// delta_k = distance to the closest point ranked above k (ties -> lowest index).
// The top point gets the largest pairwise distance.
DensityProfile separation_delta(const DistanceTable& distances, std::span<const double> rho);

// The n largest delta (ties: higher rank in density order first). Returned in
// selection order; all points when there are fewer than n.
std::vector<std::size_t> select_centers(const DensityProfile& profile, std::size_t n_centers);

struct Clustering {
  std::vector<std::size_t> centers;
  std::vector<std::size_t> assignment;  // point -> index of its center point
};

// Walks the density order: centers label themselves, everything else copies its
// nearest higher-density neighbour. The density maximum must be among `centers`.
Clustering propagate_labels(const DensityProfile& profile, std::span<const std::size_t> centers);

struct DensityPeaksResult {
  double dc = 0.0;
  DensityProfile profile;
  Clustering clustering;
};

// pairwise distances -> dc (unless given) -> rho -> delta -> centers -> labels.
DensityPeaksResult density_peaks(std::span<const Point2D> points, std::size_t n_centers,
                                 DensityKernel kernel, std::optional<double> dc = std::nullopt);

}  // namespace keygest

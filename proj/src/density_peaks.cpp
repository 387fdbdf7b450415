#include "keygest/density_peaks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "keygest/error.hpp"

namespace keygest {

double DistanceTable::max() const noexcept {
  double m = 0.0;
  for (double v : d_) m = std::max(m, v);
  return m;
}

DistanceTable pairwise_distances(std::span<const Point2D> points) {
  DistanceTable table(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      const double d = std::hypot(points[i].x - points[j].x, points[i].y - points[j].y);
      table(i, j) = d;
      table(j, i) = d;
    }
  }
  return table;
}

const char* to_string(DensityKernel kernel) noexcept {
  return kernel == DensityKernel::Cutoff ? "cutoff" : "gaussian";
}

DensityKernel parse_kernel(std::string_view name) {
  if (name == "cutoff") return DensityKernel::Cutoff;
  if (name == "gaussian") return DensityKernel::Gaussian;
  throw Error(ErrorCode::InvalidArgument, "unknown kernel '" + std::string(name) + "' (expected cutoff|gaussian)");
}

std::vector<double> local_density(const DistanceTable& distances, double dc, DensityKernel kernel) {
  if (!(dc > 0.0)) throw Error(ErrorCode::InvalidArgument, "cutoff distance must be positive");
  const std::size_t n = distances.size();
  std::vector<double> rho(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double sum = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
      if (l == k) continue;
      const double d = distances(k, l);
      if (kernel == DensityKernel::Cutoff) {
        if (d < dc) sum += 1.0;
      } else {
        const double r = d / dc;
        sum += std::exp(-r * r);
      }
    }
    rho[k] = sum;
  }
  return rho;
}

double cutoff_distance(const DistanceTable& distances, double fraction) {
  constexpr double kFloor = 1e-6;
  std::vector<double> nonzero;
  for (std::size_t i = 0; i < distances.size(); ++i) {
    for (std::size_t j = i + 1; j < distances.size(); ++j) {
      if (distances(i, j) > 0.0) nonzero.push_back(distances(i, j));
    }
  }
  if (nonzero.empty()) return kFloor;
  std::sort(nonzero.begin(), nonzero.end());
  const double rank = std::ceil(fraction * static_cast<double>(nonzero.size()));
  const std::size_t pos = rank < 1.0 ? 0 : static_cast<std::size_t>(rank) - 1;
  return std::max(nonzero[std::min(pos, nonzero.size() - 1)], kFloor);
}

std::vector<std::size_t> density_order(std::span<const double> rho) {
  std::vector<std::size_t> order(rho.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rho[a] > rho[b]; });
  return order;
}

DensityProfile separation_delta(const DistanceTable& distances, std::span<const double> rho) {
  const std::size_t n = distances.size();
  if (rho.size() != n) throw Error(ErrorCode::DimensionMismatch, "rho length does not match distance table");
  DensityProfile p;
  p.rho.assign(rho.begin(), rho.end());
  p.delta.assign(n, 0.0);
  p.nearest_higher.assign(n, kNoHigher);
  p.order = density_order(rho);
  if (n == 0) return p;

  p.delta[p.order[0]] = distances.max();
  for (std::size_t rank = 1; rank < n; ++rank) {
    const std::size_t k = p.order[rank];
    double best = 0.0;
    std::size_t arg = kNoHigher;
    for (std::size_t above = 0; above < rank; ++above) {
      const std::size_t l = p.order[above];
      const double d = distances(k, l);
      if (arg == kNoHigher || d < best || (d == best && l < arg)) {
        best = d;
        arg = l;
      }
    }
    p.delta[k] = best;
    p.nearest_higher[k] = arg;
  }
  return p;
}

std::vector<std::size_t> select_centers(const DensityProfile& profile, std::size_t n_centers) {
  if (n_centers == 0) throw Error(ErrorCode::InvalidArgument, "need at least one cluster center");
  const std::size_t n = profile.size();
  std::vector<std::size_t> rank_of(n);
  for (std::size_t r = 0; r < n; ++r) rank_of[profile.order[r]] = r;

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (profile.delta[a] != profile.delta[b]) return profile.delta[a] > profile.delta[b];
    return rank_of[a] < rank_of[b];
  });
  idx.resize(std::min(n_centers, n));
  return idx;
}

Clustering propagate_labels(const DensityProfile& profile, std::span<const std::size_t> centers) {
  const std::size_t n = profile.size();
  if (centers.empty()) throw Error(ErrorCode::InvalidArgument, "need at least one cluster center");
  constexpr std::size_t kUnset = kNoHigher;
  Clustering c;
  c.centers.assign(centers.begin(), centers.end());
  c.assignment.assign(n, kUnset);
  for (std::size_t center : centers) {
    if (center >= n) throw Error(ErrorCode::OutOfRange, "center index out of range");
    c.assignment[center] = center;
  }
  for (std::size_t k : profile.order) {
    if (c.assignment[k] != kUnset) continue;
    const std::size_t up = profile.nearest_higher[k];
    if (up == kNoHigher) {
      throw Error(ErrorCode::InvalidArgument, "the density maximum must be a cluster center");
    }
    c.assignment[k] = c.assignment[up];
  }
  return c;
}

DensityPeaksResult density_peaks(std::span<const Point2D> points, std::size_t n_centers, DensityKernel kernel,
                                 std::optional<double> dc) {
  const DistanceTable table = pairwise_distances(points);
  DensityPeaksResult r;
  r.dc = dc ? *dc : cutoff_distance(table);
  const std::vector<double> rho = local_density(table, r.dc, kernel);
  r.profile = separation_delta(table, rho);
  if (points.empty()) return r;
  const std::vector<std::size_t> centers = select_centers(r.profile, n_centers);
  r.clustering = propagate_labels(r.profile, centers);
  return r;
}

}  // namespace keygest

#pragma once

// Average radial profiles, peak search, profile clustering and population comparison
// used to validate generated settlement scenes against real ones.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "settlemorph/raster.hpp"

namespace settlemorph {

/// A point in continuous cell coordinates: cell (col, row) covers [col, col+1) x [row, row+1)
/// and its centre sits at (col + 0.5, row + 0.5).
struct CellPoint {
  double u = 0.0;
  double v = 0.0;
};

enum class CenterMode { Geometric, UrbanCentroid };

struct RadialProfile {
  std::string city_id;
  CellPoint center;
  std::size_t ring_width = 1;
  /// values[d] is the mean occupancy of cells whose centre distance r satisfies
  /// (d - 1) * ring_width < r <= d * ring_width. Ring 0 holds only a cell centred on the centre.
  std::vector<double> values;
  /// Cells per ring; a ring with zero cells reports value 0.
  std::vector<std::size_t> counts;
};

struct PeakSet {
  std::vector<std::size_t> indices;
  std::vector<double> heights;

  std::size_t count() const noexcept { return indices.size(); }
};

struct ProfileClustering {
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<std::vector<double>> centroids;
  std::vector<std::size_t> assignments;
  double inertia = 0.0;
  std::size_t iterations = 0;
  /// Inertia after each assignment step of the reported run.
  std::vector<double> inertia_history;
};

struct ElbowPoint {
  std::size_t k = 0;
  double inertia = 0.0;
  /// inertia(k) / inertia(1); 0 when inertia(1) is 0.
  double inertia_fraction = 0.0;
};

struct DistributionComparison {
  std::map<long long, double> real;
  std::map<long long, double> generated;
  double total_variation = 0.0;
};

CellPoint profile_center(const SettlementRaster& raster, CenterMode mode = CenterMode::Geometric);

/// Ring index of a squared distance, exact on the half-open annulus boundaries.
std::size_t ring_index(double squared_distance, std::size_t ring_width);

RadialProfile radial_profile(const SettlementRaster& raster, CellPoint center,
                             std::size_t ring_width = 1);
RadialProfile radial_profile(const SettlementRaster& raster,
                             CenterMode mode = CenterMode::Geometric, std::size_t ring_width = 1);

/// Pads with trailing zeros or truncates to `length`.
std::vector<double> harmonize(std::span<const double> values, std::size_t length);

/// Number of rings covering half the shorter scene side, plus the centre ring.
std::size_t harmonized_length(const SettlementRaster& raster, std::size_t ring_width);

/// Minimum peak separation in rings: round(distance / (cell_size * ring_width)), at least 1.
std::size_t min_ring_separation(double min_distance_m, double cell_size, std::size_t ring_width);

/// Greedy left-to-right peak search over local maxima (leftmost cell of a plateau).
/// A maximum is accepted if its height is at least height_fraction * max(values) and it
/// lies at least `min_separation` rings after the last accepted peak. A profile whose
/// maximum is not positive has no peaks.
PeakSet find_peaks(std::span<const double> values, double height_fraction,
                   std::size_t min_separation);
PeakSet find_peaks(const RadialProfile& profile, double height_fraction, double min_distance_m,
                   double cell_size);

/// Best-of-restarts Lloyd's algorithm with k-means++ seeding. All rows must share a length.
ProfileClustering kmeans_profiles(const std::vector<std::vector<double>>& data, std::size_t k,
                                  std::uint64_t seed, std::size_t restarts = 10,
                                  std::size_t max_iterations = 300);
/// Pads every profile with zeros to the longest one before clustering.
ProfileClustering kmeans_profiles(const std::vector<RadialProfile>& profiles, std::size_t k,
                                  std::uint64_t seed, std::size_t restarts = 10);

/// Index of the nearest centroid (lowest index on ties).
std::size_t nearest_centroid(const std::vector<std::vector<double>>& centroids,
                             std::span<const double> point);

/// Inertia for k = 1..k_max. Each k also tries the k-1 solution plus one centroid at the
/// worst-fit point, so the curve is non-increasing.
std::vector<ElbowPoint> elbow_curve(const std::vector<std::vector<double>>& data, std::size_t k_max,
                                    std::uint64_t seed, std::size_t restarts = 10);

std::map<long long, double> relative_histogram(std::span<const long long> labels);
double total_variation(const std::map<long long, double>& p, const std::map<long long, double>& q);
DistributionComparison compare_distributions(std::span<const long long> real,
                                             std::span<const long long> generated);

}  // namespace settlemorph

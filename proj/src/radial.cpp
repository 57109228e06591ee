#include "settlemorph/radial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "settlemorph/error.hpp"
#include "settlemorph/rng.hpp"

namespace settlemorph {

CellPoint profile_center(const SettlementRaster& raster, CenterMode mode) {
  const CellPoint geometric{static_cast<double>(raster.width()) / 2.0,
                            static_cast<double>(raster.height()) / 2.0};
  if (mode == CenterMode::Geometric) return geometric;
  double su = 0.0;
  double sv = 0.0;
  std::size_t n = 0;
  for (std::size_t r = 0; r < raster.height(); ++r) {
    for (std::size_t c = 0; c < raster.width(); ++c) {
      if (raster.at(c, r) == 0) continue;
      su += static_cast<double>(c) + 0.5;
      sv += static_cast<double>(r) + 0.5;
      ++n;
    }
  }
  if (n == 0) return geometric;
  return {su / static_cast<double>(n), sv / static_cast<double>(n)};
}

std::size_t ring_index(double squared_distance, std::size_t ring_width) {
  if (ring_width == 0) throw InvalidArgument("ring_width must be >= 1");
  const double w = static_cast<double>(ring_width);
  auto d = static_cast<std::size_t>(std::ceil(std::sqrt(squared_distance) / w));
  const auto outer_sq = [w](std::size_t i) {
    const double radius = static_cast<double>(i) * w;
    return radius * radius;
  };
  while (outer_sq(d) < squared_distance) ++d;
  while (d > 0 && outer_sq(d - 1) >= squared_distance) --d;
  return d;
}

RadialProfile radial_profile(const SettlementRaster& raster, CellPoint center,
                             std::size_t ring_width) {
  if (ring_width == 0) throw InvalidArgument("ring_width must be >= 1");
  if (!(center.u >= 0.0 && center.u <= static_cast<double>(raster.width()) && center.v >= 0.0 &&
        center.v <= static_cast<double>(raster.height()))) {
    throw InvalidArgument("profile center lies outside the raster");
  }
  RadialProfile profile;
  profile.city_id = raster.origin_id();
  profile.center = center;
  profile.ring_width = ring_width;

  std::vector<double> sums;
  for (std::size_t r = 0; r < raster.height(); ++r) {
    const double dv = static_cast<double>(r) + 0.5 - center.v;
    for (std::size_t c = 0; c < raster.width(); ++c) {
      const double du = static_cast<double>(c) + 0.5 - center.u;
      const std::size_t d = ring_index(du * du + dv * dv, ring_width);
      if (d >= sums.size()) {
        sums.resize(d + 1, 0.0);
        profile.counts.resize(d + 1, 0);
      }
      sums[d] += raster.at(c, r);
      ++profile.counts[d];
    }
  }
  profile.values.resize(sums.size(), 0.0);
  for (std::size_t d = 0; d < sums.size(); ++d) {
    if (profile.counts[d] > 0) profile.values[d] = sums[d] / static_cast<double>(profile.counts[d]);
  }
  return profile;
}

RadialProfile radial_profile(const SettlementRaster& raster, CenterMode mode,
                             std::size_t ring_width) {
  return radial_profile(raster, profile_center(raster, mode), ring_width);
}

std::vector<double> harmonize(std::span<const double> values, std::size_t length) {
  std::vector<double> out(length, 0.0);
  std::copy_n(values.begin(), std::min(length, values.size()), out.begin());
  return out;
}

std::size_t harmonized_length(const SettlementRaster& raster, std::size_t ring_width) {
  if (ring_width == 0) throw InvalidArgument("ring_width must be >= 1");
  const double half = static_cast<double>(std::min(raster.width(), raster.height())) / 2.0;
  return static_cast<std::size_t>(std::floor(half / static_cast<double>(ring_width))) + 1;
}

std::size_t min_ring_separation(double min_distance_m, double cell_size, std::size_t ring_width) {
  if (!(min_distance_m > 0.0)) throw InvalidArgument("min_distance_m must be positive");
  if (!(cell_size > 0.0)) throw InvalidArgument("cell_size must be positive");
  if (ring_width == 0) throw InvalidArgument("ring_width must be >= 1");
  const double rings = min_distance_m / (cell_size * static_cast<double>(ring_width));
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(rings)));
}

PeakSet find_peaks(std::span<const double> values, double height_fraction,
                   std::size_t min_separation) {
  if (values.empty()) throw InvalidArgument("find_peaks: empty profile");
  if (!(height_fraction > 0.0 && height_fraction <= 1.0))
    throw InvalidArgument("find_peaks: height_fraction must lie in (0, 1]");
  if (min_separation == 0) throw InvalidArgument("find_peaks: min_separation must be >= 1");

  PeakSet peaks;
  const double top = *std::max_element(values.begin(), values.end());
  if (!(top > 0.0)) return peaks;
  const double threshold = height_fraction * top;

  std::optional<std::size_t> last;
  const std::size_t n = values.size();
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[j + 1] == values[i]) ++j;
    const bool rises_in = i == 0 || values[i - 1] < values[i];
    const bool falls_out = j + 1 == n || values[j + 1] < values[i];
    if (rises_in && falls_out && values[i] >= threshold &&
        (!last || i - *last >= min_separation)) {
      peaks.indices.push_back(i);
      peaks.heights.push_back(values[i]);
      last = i;
    }
    i = j + 1;
  }
  return peaks;
}

PeakSet find_peaks(const RadialProfile& profile, double height_fraction, double min_distance_m,
                   double cell_size) {
  return find_peaks(profile.values, height_fraction,
                    min_ring_separation(min_distance_m, cell_size, profile.ring_width));
}

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

using Rows = std::vector<std::vector<double>>;

void check_rows(const Rows& data, std::size_t k) {
  if (k < 1) throw InvalidArgument("k-means: k must be >= 1");
  if (data.size() < k) {
    throw InvalidArgument("k-means: " + std::to_string(data.size()) + " profiles cannot form " +
                          std::to_string(k) + " clusters");
  }
  for (const auto& row : data) {
    if (row.size() != data.front().size())
      throw InvalidArgument("k-means: profiles must share a length");
  }
}

Rows seed_plus_plus(const Rows& data, std::size_t k, rng::Engine& engine) {
  Rows centroids;
  centroids.push_back(data[rng::uniform_index(engine, data.size())]);
  std::vector<double> best(data.size(), std::numeric_limits<double>::infinity());
  while (centroids.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
      best[i] = std::min(best[i], squared_distance(data[i], centroids.back()));
      total += best[i];
    }
    std::size_t pick = 0;
    if (total > 0.0) {
      const double target = rng::uniform01(engine) * total;
      double acc = 0.0;
      pick = data.size() - 1;
      for (std::size_t i = 0; i < data.size(); ++i) {
        acc += best[i];
        if (acc > target && best[i] > 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = rng::uniform_index(engine, data.size());
    }
    centroids.push_back(data[pick]);
  }
  return centroids;
}

// Lloyd iterations from the given centroids.
ProfileClustering lloyd(const Rows& data, Rows centroids, std::size_t max_iterations) {
  const std::size_t k = centroids.size();
  const std::size_t dim = data.front().size();
  ProfileClustering out;
  out.k = k;
  std::vector<std::size_t> assign(data.size(), k);
  std::vector<double> dist(data.size(), 0.0);

  for (std::size_t iter = 0; iter < max_iterations; ++iter) {
    bool changed = false;
    double inertia = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
      const std::size_t c = nearest_centroid(centroids, data[i]);
      if (c != assign[i]) changed = true;
      assign[i] = c;
      dist[i] = squared_distance(data[i], centroids[c]);
      inertia += dist[i];
    }
    out.inertia_history.push_back(inertia);
    out.iterations = iter + 1;
    if (!changed || iter + 1 == max_iterations) break;

    Rows sums(k, std::vector<double>(dim, 0.0));
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t i = 0; i < data.size(); ++i) {
      ++sizes[assign[i]];
      for (std::size_t j = 0; j < dim; ++j) sums[assign[i]][j] += data[i][j];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (sizes[c] == 0) {
        // Empty cluster: move it onto the worst-fit point.
        const auto worst = static_cast<std::size_t>(
            std::max_element(dist.begin(), dist.end()) - dist.begin());
        centroids[c] = data[worst];
        dist[worst] = 0.0;
        continue;
      }
      for (std::size_t j = 0; j < dim; ++j) sums[c][j] /= static_cast<double>(sizes[c]);
      centroids[c] = std::move(sums[c]);
    }
  }
  out.centroids = std::move(centroids);
  out.assignments = std::move(assign);
  out.inertia = out.inertia_history.back();
  return out;
}

std::uint64_t restart_seed(std::uint64_t seed, std::size_t restart) {
  return seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(restart);
}

}  // namespace

std::size_t nearest_centroid(const Rows& centroids, std::span<const double> point) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    const double d = squared_distance(point, centroids[c]);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

ProfileClustering kmeans_profiles(const Rows& data, std::size_t k, std::uint64_t seed,
                                  std::size_t restarts, std::size_t max_iterations) {
  check_rows(data, k);
  if (restarts == 0) throw InvalidArgument("k-means: restarts must be >= 1");
  std::optional<ProfileClustering> best;
  for (std::size_t r = 0; r < restarts; ++r) {
    rng::Engine engine(restart_seed(seed, r));
    auto run = lloyd(data, seed_plus_plus(data, k, engine), max_iterations);
    if (!best || run.inertia < best->inertia) best = std::move(run);
  }
  best->seed = seed;
  return *best;
}

ProfileClustering kmeans_profiles(const std::vector<RadialProfile>& profiles, std::size_t k,
                                  std::uint64_t seed, std::size_t restarts) {
  std::size_t length = 0;
  for (const auto& p : profiles) length = std::max(length, p.values.size());
  Rows data;
  data.reserve(profiles.size());
  for (const auto& p : profiles) data.push_back(harmonize(p.values, length));
  return kmeans_profiles(data, k, seed, restarts);
}

std::vector<ElbowPoint> elbow_curve(const Rows& data, std::size_t k_max, std::uint64_t seed,
                                    std::size_t restarts) {
  if (k_max < 2) throw InvalidArgument("elbow_curve: k_max must be >= 2");
  check_rows(data, k_max);
  std::vector<ElbowPoint> curve;
  std::optional<ProfileClustering> previous;
  for (std::size_t k = 1; k <= k_max; ++k) {
    ProfileClustering run = kmeans_profiles(data, k, seed, restarts);
    if (previous) {
      // Warm start: previous centroids plus the point farthest from its centroid.
      std::size_t worst = 0;
      double worst_d = -1.0;
      for (std::size_t i = 0; i < data.size(); ++i) {
        const double d = squared_distance(data[i], previous->centroids[previous->assignments[i]]);
        if (d > worst_d) {
          worst_d = d;
          worst = i;
        }
      }
      Rows start = previous->centroids;
      start.push_back(data[worst]);
      ProfileClustering warm = lloyd(data, std::move(start), 300);
      if (warm.inertia < run.inertia) {
        warm.seed = seed;
        run = std::move(warm);
      }
    }
    const double base = curve.empty() ? run.inertia : curve.front().inertia;
    curve.push_back({k, run.inertia, base > 0.0 ? run.inertia / base : 0.0});
    previous = std::move(run);
  }
  return curve;
}

std::map<long long, double> relative_histogram(std::span<const long long> labels) {
  std::map<long long, double> hist;
  if (labels.empty()) return hist;
  for (const long long l : labels) hist[l] += 1.0;
  for (auto& [key, value] : hist) value /= static_cast<double>(labels.size());
  return hist;
}

double total_variation(const std::map<long long, double>& p, const std::map<long long, double>& q) {
  std::set<long long> keys;
  for (const auto& [key, _] : p) keys.insert(key);
  for (const auto& [key, _] : q) keys.insert(key);
  double sum = 0.0;
  for (const long long key : keys) {
    const auto a = p.count(key) ? p.at(key) : 0.0;
    const auto b = q.count(key) ? q.at(key) : 0.0;
    sum += std::abs(a - b);
  }
  return 0.5 * sum;
}

DistributionComparison compare_distributions(std::span<const long long> real,
                                             std::span<const long long> generated) {
  if (real.empty() || generated.empty())
    throw InvalidArgument("compare_distributions: both populations must be nonempty");
  DistributionComparison out;
  out.real = relative_histogram(real);
  out.generated = relative_histogram(generated);
  out.total_variation = total_variation(out.real, out.generated);
  return out;
}

}  // namespace settlemorph

#pragma once

// Generated-by-construction cities for model and pipeline tests.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "settlemorph/landscape.hpp"
#include "settlemorph/pipeline.hpp"
#include "settlemorph/raster.hpp"
#include "settlemorph/rng.hpp"
#include "settlemorph/text.hpp"

namespace synthetic {

using namespace settlemorph;

/// A few disc-shaped settlements plus sparse speckle on a square scene.
inline SettlementRaster city_raster(rng::Engine& eng, std::size_t side, std::string id) {
  std::vector<std::uint8_t> cells(side * side, 0);
  const std::size_t blobs = 1 + rng::uniform_index(eng, 5);
  for (std::size_t b = 0; b < blobs; ++b) {
    const double cx = side * (0.2 + 0.6 * rng::uniform01(eng));
    const double cy = side * (0.2 + 0.6 * rng::uniform01(eng));
    const double rad = 1.5 + rng::uniform01(eng) * side * 0.22;
    for (std::size_t y = 0; y < side; ++y)
      for (std::size_t x = 0; x < side; ++x)
        if (std::hypot(x + 0.5 - cx, y + 0.5 - cy) < rad) cells[y * side + x] = 1;
  }
  const double speckle = 0.08 * rng::uniform01(eng);
  for (auto& c : cells)
    if (rng::uniform01(eng) < speckle) c = 1;
  cells[(side / 2) * side + side / 2] = 1;  // never empty
  return SettlementRaster(side, side, 43.0, std::move(cells), std::move(id));
}

/// Noisy nonlinear response of the settlement indices.
inline double density_of(const HsiVector& h, rng::Engine& eng, double noise_sd) {
  return 4.0 + 9.0 * std::sqrt(h.ca / 20.0) - 3.0 * std::tanh(h.np / 15.0) +
         3.0 * std::pow(h.ai / 100.0, 3) + noise_sd * rng::normal(eng);
}

inline std::vector<CorpusRow> corpus(std::size_t n, std::uint64_t seed, double noise_sd = 0.6,
                                     std::size_t side = 40) {
  rng::Engine eng(seed);
  std::vector<CorpusRow> rows;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string id = "c" + std::to_string(1000 + i);
    const auto raster = city_raster(eng, side, id);
    const auto hsi = compute_hsi(raster);
    const double nd = density_of(hsi, eng, noise_sd);
    rows.push_back({id, hsi, nd * raster.area_km2(), nd});
  }
  return rows;
}

/// Writes rasters, road CSVs and a manifest for `n` cities under `dir`; returns the manifest path.
/// Road length is chosen so that ND follows the same response as `corpus`.
inline std::filesystem::path write_city_fixture(const std::filesystem::path& dir, std::size_t n,
                                                std::uint64_t seed, std::size_t side = 32) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "rasters");
  fs::create_directories(dir / "roads");
  rng::Engine eng(seed);
  std::ofstream manifest(dir / "manifest.csv");
  manifest << "city_id,raster_path,road_path,population,area_km2\n";
  for (std::size_t i = 0; i < n; ++i) {
    const std::string id = "city" + std::to_string(100 + i);
    const auto raster = city_raster(eng, side, id);
    save_raster(raster, dir / "rasters" / (id + ".asc"));
    const double nd = std::max(0.5, density_of(compute_hsi(raster), eng, 0.4));
    // One straight road of the required length, in projected metres, zig-zagging across the scene.
    const double total_m = nd * raster.area_km2() * 1000.0;
    std::ofstream roads(dir / "roads" / (id + ".csv"));
    roads << "line_id,vertex_index,x_m,y_m\n";
    const double leg = 1000.0;
    std::size_t line = 0;
    for (double done = 0.0; done < total_m; done += leg, ++line) {
      const double len = std::min(leg, total_m - done);
      const double y0 = 500000.0 + 10.0 * line;
      roads << line << ",0,300000," << text::format_double(y0) << "\n";
      roads << line << ",1," << text::format_double(300000.0 + len) << "," << text::format_double(y0) << "\n";
    }
    manifest << id << ",rasters/" << id << ".asc,roads/" << id << ".csv,,\n";
  }
  return dir / "manifest.csv";
}

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace synthetic

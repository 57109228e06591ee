#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace settlemorph {

/// Binary settlement occupancy grid (1 = urban, 0 = non-urban), row-major, row 0 at the top.
///
/// Immutable after construction; the constructor enforces every invariant so any
/// instance in hand is valid.
class SettlementRaster {
 public:
  SettlementRaster(std::size_t width, std::size_t height, double cell_size,
                   std::vector<std::uint8_t> cells, std::string origin_id = {},
                   double xll_corner = 0.0, double yll_corner = 0.0);

  /// All-zero raster of the given shape.
  static SettlementRaster zeros(std::size_t width, std::size_t height, double cell_size,
                                std::string origin_id = {});

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t size() const noexcept { return cells_.size(); }
  double cell_size() const noexcept { return cell_size_; }
  const std::string& origin_id() const noexcept { return origin_id_; }
  double xll_corner() const noexcept { return xll_; }
  double yll_corner() const noexcept { return yll_; }

  /// Cell at column `col`, row `row`.
  std::uint8_t at(std::size_t col, std::size_t row) const { return cells_[row * width_ + col]; }
  std::span<const std::uint8_t> cells() const noexcept { return cells_; }

  std::size_t occupied_count() const noexcept;

  /// Extent in square kilometres.
  double area_km2() const noexcept;

  SettlementRaster with_origin_id(std::string id) const;

  friend bool operator==(const SettlementRaster&, const SettlementRaster&) = default;

 private:
  std::size_t width_;
  std::size_t height_;
  double cell_size_;
  std::vector<std::uint8_t> cells_;
  std::string origin_id_;
  double xll_;
  double yll_;
};

/// Reads an ESRI ASCII grid. `cellsize` is mandatory; NODATA cells load as 0.
/// Values must be numerically 0 or 1 (or the declared NODATA value).
SettlementRaster load_raster(const std::filesystem::path& path);
SettlementRaster parse_raster(const std::string& content, const std::string& origin_id,
                              const std::string& source_name = "<memory>");

void save_raster(const SettlementRaster& raster, const std::filesystem::path& path);
std::string format_raster(const SettlementRaster& raster);

struct ManifestEntry {
  std::string city_id;
  std::filesystem::path raster_path;
  std::optional<std::filesystem::path> road_path;
  std::optional<double> population;
  std::optional<double> area_override_km2;
};

struct CityManifest {
  std::vector<ManifestEntry> entries;
};

/// Reads `city_id,raster_path,road_path,population,area_km2`. Relative paths are
/// resolved against the manifest's directory.
CityManifest load_manifest(const std::filesystem::path& path);

/// Sorted list of `*.asc` files in a directory (non-recursive).
std::vector<std::filesystem::path> list_raster_files(const std::filesystem::path& dir);

}  // namespace settlemorph

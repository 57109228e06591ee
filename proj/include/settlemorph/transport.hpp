#pragma once

// Road network ingestion and the network-density transportation index ND = L / A.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace settlemorph {

struct Vertex {
  double x = 0.0;  // projected metres
  double y = 0.0;
};

using Polyline = std::vector<Vertex>;

struct RoadNetwork {
  std::string city_id;
  std::vector<Polyline> polylines;
  /// Per-polyline road class tag; empty string when the source carries none.
  std::vector<std::string> categories;
  /// Non-line features skipped while loading.
  std::size_t skipped_features = 0;
};

struct TransportIndex {
  double road_length_km = 0.0;
  double area_km2 = 0.0;
  double density = 0.0;
};

struct DescriptiveStats {
  std::size_t count = 0;
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  /// Sample standard deviation (n - 1); 0 when there is a single sample.
  double std_dev = 0.0;
  bool single_sample = false;
};

/// Validates vertex counts and finiteness, then applies the projected-coordinate check.
/// Throws ParseError on degree-looking coordinates (every vertex inside [-180,180]x[-90,90]).
void validate_network(const RoadNetwork& network, const std::string& source_name);

/// GeoJSON FeatureCollection (LineString / MultiLineString) or `.csv` polyline table,
/// chosen by file extension.
RoadNetwork load_roads(const std::filesystem::path& path);
RoadNetwork parse_geojson_roads(const std::string& content, const std::string& source_name);
RoadNetwork parse_csv_roads(const std::string& content, const std::string& source_name);

double polyline_length_m(std::span<const Vertex> line);
double total_length_km(const RoadNetwork& network);

/// Throws InvalidArgument for non-positive area, and for zero length unless
/// `allow_empty_network` is set (then ND = 0).
TransportIndex network_density(double length_km, double area_km2, bool allow_empty_network = false);

DescriptiveStats describe(std::span<const double> values);
DescriptiveStats summarize_lengths(std::span<const RoadNetwork> networks);

}  // namespace settlemorph

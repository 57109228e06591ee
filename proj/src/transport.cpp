#include "settlemorph/transport.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <iterator>
#include <json.hpp>
#include <limits>
#include <map>
#include <sstream>

#include "settlemorph/error.hpp"
#include "settlemorph/text.hpp"

namespace settlemorph {

namespace fs = std::filesystem;
using nlohmann::json;

void validate_network(const RoadNetwork& network, const std::string& source_name) {
  bool all_in_degree_box = true;
  std::size_t vertices = 0;
  for (std::size_t i = 0; i < network.polylines.size(); ++i) {
    const auto& line = network.polylines[i];
    if (line.size() < 2)
      throw ParseError(source_name + ": polyline " + std::to_string(i) + " has fewer than 2 vertices");
    for (const auto& v : line) {
      if (!std::isfinite(v.x) || !std::isfinite(v.y))
        throw ParseError(source_name + ": polyline " + std::to_string(i) + " has a non-finite vertex");
      ++vertices;
      if (std::abs(v.x) > 180.0 || std::abs(v.y) > 90.0) all_in_degree_box = false;
    }
  }
  if (vertices > 0 && all_in_degree_box) {
    throw ParseError(source_name +
                     ": coordinates look geographic (degrees); reproject to a projected CRS "
                     "in metres (e.g. WGS84 / UTM) before loading");
  }
}

namespace {

Polyline read_line_coordinates(const json& coords, const std::string& where) {
  if (!coords.is_array()) throw ParseError(where + ": coordinates must be an array");
  Polyline line;
  line.reserve(coords.size());
  for (const auto& pt : coords) {
    if (!pt.is_array() || pt.size() < 2 || !pt[0].is_number() || !pt[1].is_number())
      throw ParseError(where + ": malformed position");
    line.push_back({pt[0].get<double>(), pt[1].get<double>()});
  }
  return line;
}

std::string read_category(const json& feature) {
  const auto props = feature.find("properties");
  if (props == feature.end() || !props->is_object()) return {};
  for (const char* key : {"category", "highway", "class", "fclass"}) {
    const auto it = props->find(key);
    if (it != props->end() && it->is_string()) return it->get<std::string>();
  }
  return {};
}

}  // namespace

RoadNetwork parse_geojson_roads(const std::string& content, const std::string& source_name) {
  json doc;
  try {
    doc = json::parse(content);
  } catch (const json::parse_error& e) {
    throw ParseError(source_name + ": invalid JSON: " + e.what());
  }
  RoadNetwork network;

  std::vector<json> features;
  if (doc.is_object() && doc.value("type", "") == "FeatureCollection") {
    const auto it = doc.find("features");
    if (it == doc.end() || !it->is_array()) throw ParseError(source_name + ": missing features array");
    features.assign(it->begin(), it->end());
  } else if (doc.is_object() && doc.value("type", "") == "Feature") {
    features.push_back(doc);
  } else {
    throw ParseError(source_name + ": expected a GeoJSON FeatureCollection");
  }

  for (std::size_t i = 0; i < features.size(); ++i) {
    const auto& feature = features[i];
    const std::string where = source_name + ": feature " + std::to_string(i);
    const auto geom = feature.find("geometry");
    if (geom == feature.end() || !geom->is_object()) {
      ++network.skipped_features;
      continue;
    }
    const std::string type = geom->value("type", "");
    const auto coords = geom->find("coordinates");
    if (type == "LineString") {
      if (coords == geom->end()) throw ParseError(where + ": missing coordinates");
      network.polylines.push_back(read_line_coordinates(*coords, where));
      network.categories.push_back(read_category(feature));
    } else if (type == "MultiLineString") {
      if (coords == geom->end() || !coords->is_array()) throw ParseError(where + ": missing coordinates");
      const std::string category = read_category(feature);
      for (const auto& part : *coords) {
        network.polylines.push_back(read_line_coordinates(part, where));
        network.categories.push_back(category);
      }
    } else {
      ++network.skipped_features;
    }
  }
  validate_network(network, source_name);
  return network;
}

RoadNetwork parse_csv_roads(const std::string& content, const std::string& source_name) {
  RoadNetwork network;
  std::map<std::string, std::size_t> line_index;
  std::string last_id;
  long long last_vertex = -1;
  std::size_t row = 0;
  bool header_seen = false;
  std::istringstream in(content);
  std::string raw;
  while (std::getline(in, raw)) {
    ++row;
    const auto line = text::trim(raw);
    if (line.empty()) continue;
    auto fields = text::split(line, ',');
    for (auto& f : fields) f = std::string(text::trim(f));
    if (!header_seen) {
      header_seen = true;
      if (fields != std::vector<std::string>{"line_id", "vertex_index", "x_m", "y_m"})
        throw ParseError(source_name + ": row 1: expected header line_id,vertex_index,x_m,y_m");
      continue;
    }
    const std::string where = source_name + ": row " + std::to_string(row);
    if (fields.size() != 4) throw ParseError(where + ": expected 4 fields");
    const auto vi = text::parse_int(fields[1]);
    const auto x = text::parse_double(fields[2]);
    const auto y = text::parse_double(fields[3]);
    if (!vi || !x || !y) throw ParseError(where + ": unparseable number");
    if (fields[0] != last_id) {
      if (line_index.count(fields[0]) != 0)
        throw ParseError(where + ": rows for line " + fields[0] + " are not contiguous");
      line_index[fields[0]] = network.polylines.size();
      network.polylines.emplace_back();
      network.categories.emplace_back();
      last_id = fields[0];
      last_vertex = -1;
    }
    if (*vi <= last_vertex) throw ParseError(where + ": vertex_index not increasing");
    last_vertex = *vi;
    network.polylines.back().push_back({*x, *y});
  }
  if (!header_seen) throw ParseError(source_name + ": empty file");
  validate_network(network, source_name);
  return network;
}

RoadNetwork load_roads(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open road file " + path.string());
  const std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::string ext = text::to_lower(path.extension().string());
  RoadNetwork network = ext == ".csv" ? parse_csv_roads(content, path.string())
                                      : parse_geojson_roads(content, path.string());
  network.city_id = path.stem().string();
  if (network.skipped_features > 0) {
    std::cerr << "warning: " << path.string() << ": skipped " << network.skipped_features
              << " non-line feature(s)\n";
  }
  return network;
}

double polyline_length_m(std::span<const Vertex> line) {
  double total = 0.0;
  for (std::size_t i = 1; i < line.size(); ++i) {
    total += std::hypot(line[i].x - line[i - 1].x, line[i].y - line[i - 1].y);
  }
  return total;
}

double total_length_km(const RoadNetwork& network) {
  double total = 0.0;
  for (const auto& line : network.polylines) total += polyline_length_m(line);
  return total / 1000.0;
}

TransportIndex network_density(double length_km, double area_km2, bool allow_empty_network) {
  if (!(area_km2 > 0.0) || !std::isfinite(area_km2))
    throw InvalidArgument("network density: area must be positive");
  if (!(length_km >= 0.0) || !std::isfinite(length_km))
    throw InvalidArgument("network density: length must be finite and non-negative");
  if (length_km == 0.0 && !allow_empty_network)
    throw InvalidArgument("network density: road network has zero length");
  return {length_km, area_km2, length_km / area_km2};
}

DescriptiveStats describe(std::span<const double> values) {
  if (values.empty()) throw InvalidArgument("descriptive statistics of an empty list");
  DescriptiveStats s;
  s.count = values.size();
  s.min = *std::min_element(values.begin(), values.end());
  s.max = *std::max_element(values.begin(), values.end());
  double sum = 0.0;
  for (const double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() == 1) {
    s.single_sample = true;
    return s;
  }
  double ss = 0.0;
  for (const double v : values) ss += (v - s.mean) * (v - s.mean);
  s.std_dev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  return s;
}

DescriptiveStats summarize_lengths(std::span<const RoadNetwork> networks) {
  std::vector<double> lengths;
  lengths.reserve(networks.size());
  for (const auto& n : networks) lengths.push_back(total_length_km(n));
  return describe(lengths);
}

}  // namespace settlemorph

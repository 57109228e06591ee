#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "settlemorph/error.hpp"
#include "settlemorph/rng.hpp"
#include "settlemorph/transport.hpp"

using namespace settlemorph;
namespace fs = std::filesystem;

namespace {

std::string line_feature(const std::string& coords, const std::string& type = "LineString") {
  return R"({"type":"Feature","properties":{"highway":"primary"},"geometry":{"type":")" + type +
         R"(","coordinates":)" + coords + "}}";
}

std::string collection(const std::vector<std::string>& features) {
  std::string out = R"({"type":"FeatureCollection","features":[)";
  for (std::size_t i = 0; i < features.size(); ++i) out += (i ? "," : "") + features[i];
  return out + "]}";
}

}  // namespace

TEST_CASE("geojson lines are captured and other geometry is counted") {
  const auto one = parse_geojson_roads(collection({line_feature("[[500000,2000000],[501000,2000000]]")}), "a");
  REQUIRE(one.polylines.size() == 1);
  CHECK(total_length_km(one) == 1.0);
  CHECK(one.categories[0] == "primary");

  const std::string point = R"({"type":"Feature","properties":{},"geometry":{"type":"Point","coordinates":[500000,2000000]}})";
  const auto mixed = parse_geojson_roads(
      collection({point, line_feature("[[500000,2000000],[500000,2000300]]"),
                  line_feature("[[[500000,2000000],[500400,2000000]],[[600000,0],[600000,100]]]",
                               "MultiLineString")}),
      "b");
  CHECK(mixed.polylines.size() == 3);
  CHECK(mixed.skipped_features == 1);
  CHECK(total_length_km(mixed) == doctest::Approx(0.8));
}

TEST_CASE("degree coordinates are rejected") {
  CHECK_THROWS_AS(parse_geojson_roads(collection({line_feature("[[77.2,28.6],[77.3,28.7]]")}), "deg"), ParseError);
  CHECK_THROWS_AS(parse_csv_roads("line_id,vertex_index,x_m,y_m\n0,0,77.1,28.5\n0,1,77.2,28.6\n", "deg"),
                  ParseError);
}

TEST_CASE("malformed road files") {
  CHECK_THROWS_AS(parse_geojson_roads("{not json", "x"), ParseError);
  CHECK_THROWS_AS(parse_geojson_roads("[1, 2]", "x"), ParseError);
  CHECK_THROWS_AS(parse_geojson_roads(collection({line_feature("[[500000,2000000]]")}), "x"), ParseError);
  CHECK_THROWS_AS(parse_csv_roads("line_id,vertex_index,x_m,y_m\n0,0,500000,0\n", "x"), ParseError);
  CHECK_THROWS_AS(parse_csv_roads("line_id,vertex_index,x_m,y_m\n0,1,500000,0\n0,0,500100,0\n", "x"),
                  ParseError);
  CHECK_THROWS_AS(parse_csv_roads("a,b\n", "x"), ParseError);
}

TEST_CASE("csv polylines") {
  const auto net = parse_csv_roads(
      "line_id,vertex_index,x_m,y_m\n"
      "a,0,0,0\na,1,3000,4000\n"
      "b,0,1000,0\nb,1,1000,500\nb,2,1500,500\n",
      "c");
  REQUIRE(net.polylines.size() == 2);
  CHECK(total_length_km(net) == 6.0);
}

TEST_CASE("load_roads chooses the reader by extension") {
  const fs::path dir = fs::temp_directory_path() / "settlemorph_transport_tests";
  fs::create_directories(dir);
  std::ofstream(dir / "r.csv") << "line_id,vertex_index,x_m,y_m\n0,0,0,0\n0,1,0,2000\n";
  std::ofstream(dir / "r.geojson") << collection({line_feature("[[0,0],[2000,0]]")});
  CHECK(total_length_km(load_roads(dir / "r.csv")) == 2.0);
  CHECK(total_length_km(load_roads(dir / "r.geojson")) == 2.0);
  CHECK_THROWS_AS(load_roads(dir / "absent.csv"), IoError);
}

TEST_CASE("length oracle, additivity and rigid-motion invariance") {
  rng::Engine eng(2);
  RoadNetwork net;
  double oracle_m = 0.0;
  for (int i = 0; i < 100; ++i) {
    Polyline line;
    const std::size_t n = 2 + rng::uniform_index(eng, 8);
    for (std::size_t v = 0; v < n; ++v) line.push_back({1e5 * rng::uniform01(eng), 1e5 * rng::uniform01(eng)});
    for (std::size_t v = 1; v < n; ++v) {
      const double dx = line[v].x - line[v - 1].x, dy = line[v].y - line[v - 1].y;
      oracle_m += std::sqrt(dx * dx + dy * dy);
    }
    net.polylines.push_back(line);
  }
  CHECK(total_length_km(net) == doctest::Approx(oracle_m / 1000.0).epsilon(1e-9));

  const double theta = 0.7;
  RoadNetwork moved = net;
  for (auto& line : moved.polylines)
    for (auto& v : line) v = {std::cos(theta) * v.x - std::sin(theta) * v.y + 4e5, std::sin(theta) * v.x + std::cos(theta) * v.y - 2e5};
  CHECK(total_length_km(moved) == doctest::Approx(total_length_km(net)).epsilon(1e-12));

  const Polyline a{{0, 0}, {300, 400}};
  const Polyline b{{300, 400}, {300, 1400}};
  const Polyline ab{{0, 0}, {300, 400}, {300, 1400}};
  CHECK(polyline_length_m(ab) == polyline_length_m(a) + polyline_length_m(b));
}

TEST_CASE("network density") {
  const auto delhi = network_density(1898.33, 108.4);
  CHECK(delhi.density == doctest::Approx(17.513).epsilon(0.001 / 17.513));
  CHECK(network_density(108.4, 108.4).density == 1.0);
  CHECK(network_density(2.5, 4.0).density * 4.0 == 2.5);
  CHECK_THROWS_AS(network_density(0.0, 10.0), InvalidArgument);
  CHECK(network_density(0.0, 10.0, true).density == 0.0);
  CHECK_THROWS_AS(network_density(5.0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(network_density(5.0, -1.0), InvalidArgument);
}

TEST_CASE("descriptive statistics") {
  const auto s = describe(std::vector<double>{1, 2, 3});
  CHECK(s.mean == 2.0);
  CHECK(s.min == 1.0);
  CHECK(s.max == 3.0);
  CHECK(s.std_dev == 1.0);
  CHECK_FALSE(s.single_sample);
  const auto one = describe(std::vector<double>{4});
  CHECK(one.std_dev == 0.0);
  CHECK(one.single_sample);
  CHECK_THROWS_AS(describe(std::vector<double>{}), InvalidArgument);

  RoadNetwork a, b;
  a.polylines = {{{0, 0}, {1000, 0}}};
  b.polylines = {{{0, 0}, {3000, 0}}};
  const auto lengths = summarize_lengths(std::vector<RoadNetwork>{a, b});
  CHECK(lengths.mean == 2.0);
  CHECK(lengths.max == 3.0);
}

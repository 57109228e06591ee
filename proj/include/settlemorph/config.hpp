#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "settlemorph/landscape.hpp"
#include "settlemorph/radial.hpp"

namespace settlemorph {

/// Every tunable of a pipeline run. Defaults: 8-connectivity, 1-cell rings, 80 % peak
/// height, 430 m peak spacing, k = 10, 80/20 split, log-spaced lambda/gamma grids, 5 folds.
struct PipelineConfig {
  std::filesystem::path manifest_path;
  std::filesystem::path generated_dir;
  std::filesystem::path output_dir = "out";
  /// Optional pre-joined corpus table (city_id,CA,NP,LPI,CLUMPY,AI,NLSI,RL,ND). When empty,
  /// stages read hsi.csv and transport.csv from output_dir.
  std::filesystem::path table_path;
  /// Model file for `predict`; defaults to output_dir/model.json.
  std::filesystem::path model_path;

  Connectivity connectivity = Connectivity::Eight;
  std::size_t ring_width = 1;
  CenterMode center_mode = CenterMode::Geometric;
  double peak_height_fraction = 0.8;
  double peak_min_distance_m = 430.0;
  std::size_t k = 10;
  std::size_t kmeans_restarts = 10;
  std::size_t elbow_k_max = 15;

  std::uint64_t seed = 42;
  double test_fraction = 0.2;
  std::vector<double> lambda_grid = {1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0};
  std::vector<double> gamma_grid = {1e-3, 1e-2, 1e-1, 1.0, 10.0};
  std::size_t folds = 5;
  std::vector<std::string> features = {"CA", "NP", "LPI", "CLUMPY", "AI", "NLSI"};
  bool allow_empty_network = false;

  /// Throws InvalidArgument when a value lies outside its downstream domain.
  void validate() const;

  std::filesystem::path resolved_model_path() const;

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

/// `key = value` lines; `#` starts a comment; `[section]` headers are ignored.
/// Relative paths are resolved against `base_dir`.
PipelineConfig parse_config(const std::string& content,
                            const std::filesystem::path& base_dir = {});
PipelineConfig load_config(const std::filesystem::path& path);
std::string format_config(const PipelineConfig& config);

/// Hash of the canonical text form.
std::string config_hash(const PipelineConfig& config);

}  // namespace settlemorph

#include "settlemorph/config.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <sstream>

#include "settlemorph/error.hpp"
#include "settlemorph/text.hpp"

namespace settlemorph {

namespace fs = std::filesystem;

void PipelineConfig::validate() const {
  if (ring_width < 1) throw InvalidArgument("config: ring_width must be >= 1");
  if (!(peak_height_fraction > 0.0 && peak_height_fraction <= 1.0))
    throw InvalidArgument("config: peak_height_fraction must lie in (0, 1]");
  if (!(peak_min_distance_m > 0.0)) throw InvalidArgument("config: peak_min_distance_m must be > 0");
  if (k < 1) throw InvalidArgument("config: k must be >= 1");
  if (kmeans_restarts < 1) throw InvalidArgument("config: kmeans_restarts must be >= 1");
  if (elbow_k_max < 2) throw InvalidArgument("config: elbow_k_max must be >= 2");
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw InvalidArgument("config: test_fraction must lie in (0, 1)");
  if (lambda_grid.empty() || gamma_grid.empty()) throw InvalidArgument("config: empty grid");
  for (const double l : lambda_grid)
    if (!(l >= 0.0)) throw InvalidArgument("config: lambda values must be >= 0");
  for (const double g : gamma_grid)
    if (!(g > 0.0)) throw InvalidArgument("config: gamma values must be > 0");
  if (folds < 2) throw InvalidArgument("config: folds must be >= 2");
  if (features.empty()) throw InvalidArgument("config: feature subset is empty");
  const auto& names = HsiVector::column_names();
  for (const auto& f : features) {
    if (std::find(names.begin(), names.end(), f) == names.end())
      throw InvalidArgument("config: unknown feature " + f);
  }
}

fs::path PipelineConfig::resolved_model_path() const {
  return model_path.empty() ? output_dir / "model.json" : model_path;
}

namespace {

std::string join_doubles(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i != 0) out += ',';
    out += text::format_double(v[i]);
  }
  return out;
}

std::string join_strings(const std::vector<std::string>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i != 0) out += ',';
    out += v[i];
  }
  return out;
}

}  // namespace

PipelineConfig parse_config(const std::string& content, const fs::path& base_dir) {
  PipelineConfig cfg;
  std::istringstream in(content);
  std::string line;
  std::size_t line_no = 0;
  const auto resolve = [&](std::string_view v) -> fs::path {
    if (v.empty()) return {};
    fs::path p{std::string(v)};
    return p.is_absolute() || base_dir.empty() ? p : base_dir / p;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto trimmed = text::trim(line);
    if (trimmed.empty() || trimmed.front() == '[') continue;
    const auto eq = trimmed.find('=');
    const std::string where = "config line " + std::to_string(line_no);
    if (eq == std::string_view::npos) throw ParseError(where + ": expected key = value");
    const std::string key = text::to_lower(text::trim(trimmed.substr(0, eq)));
    std::string value(text::trim(trimmed.substr(eq + 1)));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);

    const auto as_double = [&]() {
      const auto v = text::parse_double(value);
      if (!v) throw ParseError(where + ": " + key + " expects a number");
      return *v;
    };
    const auto as_count = [&]() {
      const auto v = text::parse_int(value);
      if (!v || *v < 0) throw ParseError(where + ": " + key + " expects a non-negative integer");
      return static_cast<std::size_t>(*v);
    };
    const auto as_double_list = [&]() {
      std::vector<double> out;
      for (const auto& part : text::split(value, ',')) {
        const auto v = text::parse_double(part);
        if (!v) throw ParseError(where + ": " + key + " expects a comma-separated number list");
        out.push_back(*v);
      }
      return out;
    };

    if (key == "manifest_path") {
      cfg.manifest_path = resolve(value);
    } else if (key == "generated_dir") {
      cfg.generated_dir = resolve(value);
    } else if (key == "output_dir") {
      cfg.output_dir = resolve(value);
    } else if (key == "table_path") {
      cfg.table_path = resolve(value);
    } else if (key == "model_path") {
      cfg.model_path = resolve(value);
    } else if (key == "connectivity") {
      const auto c = as_count();
      if (c != 4 && c != 8) throw ParseError(where + ": connectivity must be 4 or 8");
      cfg.connectivity = c == 4 ? Connectivity::Four : Connectivity::Eight;
    } else if (key == "ring_width") {
      cfg.ring_width = as_count();
    } else if (key == "center") {
      if (value == "geometric") {
        cfg.center_mode = CenterMode::Geometric;
      } else if (value == "centroid") {
        cfg.center_mode = CenterMode::UrbanCentroid;
      } else {
        throw ParseError(where + ": center must be geometric or centroid");
      }
    } else if (key == "peak_height_fraction") {
      cfg.peak_height_fraction = as_double();
    } else if (key == "peak_min_distance_m") {
      cfg.peak_min_distance_m = as_double();
    } else if (key == "k") {
      cfg.k = as_count();
    } else if (key == "kmeans_restarts") {
      cfg.kmeans_restarts = as_count();
    } else if (key == "elbow_k_max") {
      cfg.elbow_k_max = as_count();
    } else if (key == "seed") {
      const auto v = text::parse_int(value);
      if (!v || *v < 0) throw ParseError(where + ": seed expects a non-negative integer");
      cfg.seed = static_cast<std::uint64_t>(*v);
    } else if (key == "test_fraction") {
      cfg.test_fraction = as_double();
    } else if (key == "lambda_grid") {
      cfg.lambda_grid = as_double_list();
    } else if (key == "gamma_grid") {
      cfg.gamma_grid = as_double_list();
    } else if (key == "folds") {
      cfg.folds = as_count();
    } else if (key == "features") {
      cfg.features.clear();
      for (const auto& part : text::split(value, ','))
        cfg.features.emplace_back(text::trim(part));
    } else if (key == "allow_empty_network") {
      if (value != "true" && value != "false")
        throw ParseError(where + ": allow_empty_network must be true or false");
      cfg.allow_empty_network = value == "true";
    } else {
      throw ParseError(where + ": unknown key " + key);
    }
  }
  cfg.validate();
  return cfg;
}

PipelineConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  const std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_config(content, path.parent_path());
}

std::string format_config(const PipelineConfig& c) {
  std::ostringstream out;
  out << "manifest_path = " << c.manifest_path.string() << "\n";
  out << "generated_dir = " << c.generated_dir.string() << "\n";
  out << "output_dir = " << c.output_dir.string() << "\n";
  out << "table_path = " << c.table_path.string() << "\n";
  out << "model_path = " << c.model_path.string() << "\n";
  out << "connectivity = " << static_cast<int>(c.connectivity) << "\n";
  out << "ring_width = " << c.ring_width << "\n";
  out << "center = " << (c.center_mode == CenterMode::Geometric ? "geometric" : "centroid") << "\n";
  out << "peak_height_fraction = " << text::format_double(c.peak_height_fraction) << "\n";
  out << "peak_min_distance_m = " << text::format_double(c.peak_min_distance_m) << "\n";
  out << "k = " << c.k << "\n";
  out << "kmeans_restarts = " << c.kmeans_restarts << "\n";
  out << "elbow_k_max = " << c.elbow_k_max << "\n";
  out << "seed = " << c.seed << "\n";
  out << "test_fraction = " << text::format_double(c.test_fraction) << "\n";
  out << "lambda_grid = " << join_doubles(c.lambda_grid) << "\n";
  out << "gamma_grid = " << join_doubles(c.gamma_grid) << "\n";
  out << "folds = " << c.folds << "\n";
  out << "features = " << join_strings(c.features) << "\n";
  out << "allow_empty_network = " << (c.allow_empty_network ? "true" : "false") << "\n";
  return out.str();
}

std::string config_hash(const PipelineConfig& config) {
  return text::hex64(text::fnv1a(format_config(config)));
}

}  // namespace settlemorph

#include <fstream>
#include <iterator>
#include <json.hpp>

#include "settlemorph/error.hpp"
#include "settlemorph/pipeline.hpp"

namespace settlemorph {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json to_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vector vector_from(const json& j, const char* what) {
  if (!j.is_array()) throw ParseError(std::string("model: ") + what + " must be an array");
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

json standardizer_json(const Standardizer& s) {
  return {{"means", to_json(s.means)}, {"scales", to_json(s.scales)}};
}

Standardizer standardizer_from(const json& j) {
  Standardizer s;
  s.means = vector_from(j.at("means"), "standardizer.means");
  s.scales = vector_from(j.at("scales"), "standardizer.scales");
  if (s.means.size() != s.scales.size()) throw ParseError("model: standardizer size mismatch");
  return s;
}

}  // namespace

double StoredModel::predict(std::span<const double> x) const {
  if (x.size() != feature_names.size())
    throw InvalidArgument("model expects " + std::to_string(feature_names.size()) + " features");
  return std::visit([&](const auto& m) { return m.predict(x); }, model);
}

std::string model_to_json(const StoredModel& stored) {
  json j;
  j["feature_names"] = stored.feature_names;
  j["metadata"] = {{"seed", stored.metadata.seed},
                   {"test_fraction", stored.metadata.test_fraction},
                   {"folds", stored.metadata.folds},
                   {"split_hash", stored.metadata.split_hash},
                   {"model_name", stored.metadata.model_name}};
  if (const auto* krr = std::get_if<KrrModel>(&stored.model)) {
    j["type"] = "krr";
    j["lambda"] = krr->lambda;
    j["gamma"] = krr->gamma;
    j["target_offset"] = krr->target_offset;
    j["standardizer"] = standardizer_json(krr->standardizer);
    json support = json::array();
    for (Eigen::Index i = 0; i < krr->support_inputs.rows(); ++i)
      support.push_back(to_json(krr->support_inputs.row(i).transpose()));
    j["support_inputs"] = support;
    j["dual_coefficients"] = to_json(krr->dual_coefficients);
  } else {
    const auto& lin = std::get<LinearModel>(stored.model);
    j["type"] = "linear";
    j["lambda"] = lin.lambda;
    j["intercept"] = lin.intercept;
    j["coefficients"] = to_json(lin.coefficients);
    j["standardizer"] = standardizer_json(lin.standardizer);
  }
  return j.dump(2) + "\n";
}

StoredModel model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("model: invalid JSON: ") + e.what());
  }
  try {
    StoredModel out;
    out.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    const auto& meta = j.at("metadata");
    out.metadata.seed = meta.at("seed").get<std::uint64_t>();
    out.metadata.test_fraction = meta.at("test_fraction").get<double>();
    out.metadata.folds = meta.at("folds").get<std::size_t>();
    out.metadata.split_hash = meta.at("split_hash").get<std::string>();
    out.metadata.model_name = meta.at("model_name").get<std::string>();
    const auto type = j.at("type").get<std::string>();
    const auto p = static_cast<Eigen::Index>(out.feature_names.size());
    if (type == "krr") {
      KrrModel m;
      m.lambda = j.at("lambda").get<double>();
      m.gamma = j.at("gamma").get<double>();
      m.target_offset = j.at("target_offset").get<double>();
      m.standardizer = standardizer_from(j.at("standardizer"));
      m.dual_coefficients = vector_from(j.at("dual_coefficients"), "dual_coefficients");
      const auto& support = j.at("support_inputs");
      m.support_inputs.resize(static_cast<Eigen::Index>(support.size()), p);
      for (std::size_t i = 0; i < support.size(); ++i) {
        const Vector row = vector_from(support[i], "support_inputs row");
        if (row.size() != p) throw ParseError("model: support input width differs from feature count");
        m.support_inputs.row(static_cast<Eigen::Index>(i)) = row.transpose();
      }
      if (m.dual_coefficients.size() != m.support_inputs.rows())
        throw ParseError("model: dual coefficient count differs from support size");
      if (m.standardizer.means.size() != p) throw ParseError("model: standardizer size mismatch");
      out.model = std::move(m);
    } else if (type == "linear") {
      LinearModel m;
      m.lambda = j.at("lambda").get<double>();
      m.intercept = j.at("intercept").get<double>();
      m.coefficients = vector_from(j.at("coefficients"), "coefficients");
      m.standardizer = standardizer_from(j.at("standardizer"));
      if (m.coefficients.size() != p || m.standardizer.means.size() != p)
        throw ParseError("model: coefficient count differs from feature count");
      out.model = std::move(m);
    } else {
      throw ParseError("model: unknown type " + type);
    }
    return out;
  } catch (const json::exception& e) {
    throw ParseError(std::string("model: ") + e.what());
  }
}

void save_model(const fs::path& path, const StoredModel& model) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << model_to_json(model);
}

StoredModel load_model(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model " + path.string());
  return model_from_json({std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()});
}

}  // namespace settlemorph

#include "settlemorph/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>

#include "settlemorph/error.hpp"
#include "settlemorph/radial.hpp"
#include "settlemorph/raster.hpp"
#include "settlemorph/text.hpp"

namespace settlemorph {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

void write_text(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
}

std::string fmt(double v) { return text::format_double(v); }

/// Collects hashes for run_<stage>.json.
class RunManifest {
 public:
  RunManifest(std::string stage, const PipelineConfig& config) : stage_(std::move(stage)) {
    doc_["stage"] = stage_;
    doc_["config_hash"] = config_hash(config);
    doc_["config"] = format_config(config);
    doc_["seed"] = config.seed;
    doc_["inputs"] = ordered_json::object();
    doc_["outputs"] = ordered_json::object();
  }

  void input(const fs::path& path) { doc_["inputs"][path.string()] = text::hex64(text::hash_file(path.string())); }

  void output(RunOutcome& outcome, const fs::path& path) {
    doc_["outputs"][path.filename().string()] = text::hex64(text::hash_file(path.string()));
    outcome.outputs.push_back(path);
  }

  void finish(RunOutcome& outcome, const PipelineConfig& config) {
    doc_["status"] = outcome.status == RunStatus::Success   ? "success"
                     : outcome.status == RunStatus::Partial ? "partial"
                                                            : "failure";
    doc_["failures"] = outcome.failures;
    const fs::path path = config.output_dir / ("run_" + stage_ + ".json");
    write_text(path, doc_.dump(2) + "\n");
    outcome.outputs.push_back(path);
  }

 private:
  std::string stage_;
  ordered_json doc_;
};

void log_failure(RunOutcome& outcome, const std::string& id, const std::string& reason) {
  outcome.failures.push_back(id + ": " + reason);
  std::cerr << "error: " << id << ": " << reason << "\n";
}

RunStatus status_for(std::size_t succeeded, std::size_t failed) {
  if (succeeded == 0) return RunStatus::Failure;
  return failed == 0 ? RunStatus::Success : RunStatus::Partial;
}

template <typename Row>
void sort_by_id(std::vector<Row>& rows) {
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.city_id < b.city_id; });
}

}  // namespace

// ---------------------------------------------------------------- hsi

RunOutcome run_hsi(const PipelineConfig& config) {
  config.validate();
  RunOutcome outcome;
  RunManifest manifest("hsi", config);
  const CityManifest cities = load_manifest(config.manifest_path);
  manifest.input(config.manifest_path);
  if (cities.entries.empty()) throw InvalidArgument("hsi: manifest lists no cities");

  std::vector<HsiRow> rows;
  for (const auto& entry : cities.entries) {
    try {
      manifest.input(entry.raster_path);
      const auto raster = load_raster(entry.raster_path);
      rows.push_back({entry.city_id, compute_hsi(raster, config.connectivity)});
    } catch (const std::exception& e) {
      log_failure(outcome, entry.city_id, e.what());
    }
  }
  sort_by_id(rows);
  const fs::path out = config.output_dir / "hsi.csv";
  write_hsi_table(out, rows);
  manifest.output(outcome, out);
  outcome.status = status_for(rows.size(), outcome.failures.size());
  manifest.finish(outcome, config);
  return outcome;
}

// ---------------------------------------------------------------- transport

RunOutcome run_transport(const PipelineConfig& config) {
  config.validate();
  RunOutcome outcome;
  RunManifest manifest("transport", config);
  const CityManifest cities = load_manifest(config.manifest_path);
  manifest.input(config.manifest_path);

  std::vector<TransportRow> rows;
  std::vector<RoadNetwork> networks;
  for (const auto& entry : cities.entries) {
    if (!entry.road_path) {
      std::cerr << "notice: " << entry.city_id << ": no road_path, skipped\n";
      continue;
    }
    try {
      manifest.input(*entry.road_path);
      auto network = load_roads(*entry.road_path);
      network.city_id = entry.city_id;
      double area = 0.0;
      if (entry.area_override_km2) {
        area = *entry.area_override_km2;
      } else {
        manifest.input(entry.raster_path);
        area = load_raster(entry.raster_path).area_km2();
      }
      rows.push_back({entry.city_id,
                      network_density(total_length_km(network), area, config.allow_empty_network)});
      networks.push_back(std::move(network));
    } catch (const std::exception& e) {
      log_failure(outcome, entry.city_id, e.what());
    }
  }
  sort_by_id(rows);
  const fs::path out = config.output_dir / "transport.csv";
  write_transport_table(out, rows);
  manifest.output(outcome, out);

  if (!networks.empty()) {
    const auto stats = summarize_lengths(networks);
    const fs::path summary = config.output_dir / "road_length_summary.csv";
    write_text(summary, "metric,Min,Max,Mean,StdDev\nRL," + fmt(stats.min) + "," + fmt(stats.max) +
                            "," + fmt(stats.mean) + "," + fmt(stats.std_dev) + "\n");
    manifest.output(outcome, summary);
  }
  outcome.status = status_for(rows.size(), outcome.failures.size());
  manifest.finish(outcome, config);
  return outcome;
}

// ---------------------------------------------------------------- corpus

std::vector<CorpusRow> load_corpus(const PipelineConfig& config) {
  if (!config.table_path.empty()) return read_corpus_table(config.table_path);
  const auto hsi = read_hsi_table(config.output_dir / "hsi.csv");
  const auto transport = read_transport_table(config.output_dir / "transport.csv");
  std::size_t dropped = 0;
  auto rows = join_tables(hsi, transport, &dropped);
  if (dropped > 0) std::cerr << "notice: join dropped " << dropped << " unmatched row(s)\n";
  return rows;
}

namespace {

void hash_corpus_inputs(RunManifest& manifest, const PipelineConfig& config) {
  if (!config.table_path.empty()) {
    manifest.input(config.table_path);
  } else {
    manifest.input(config.output_dir / "hsi.csv");
    manifest.input(config.output_dir / "transport.csv");
  }
}

std::string matrix_csv(const CorrelationMatrix& m) {
  std::string out = "metric";
  for (const auto& n : m.names) out += "," + n;
  out += "\n";
  for (std::size_t i = 0; i < m.names.size(); ++i) {
    out += m.names[i];
    for (std::size_t j = 0; j < m.names.size(); ++j) {
      out += ",";
      out += m.values[i][j] ? fmt(*m.values[i][j]) : "NA";
    }
    out += "\n";
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------- correlate

RunOutcome run_correlate(const PipelineConfig& config) {
  config.validate();
  RunOutcome outcome;
  RunManifest manifest("correlate", config);
  const auto rows = load_corpus(config);
  hash_corpus_inputs(manifest, config);
  if (rows.size() < 3) throw InvalidArgument("correlate: need at least 3 joined rows");

  std::vector<std::string> names = HsiVector::column_names();
  names.push_back("RL");
  names.push_back("ND");
  std::vector<std::vector<double>> columns(names.size());
  for (const auto& r : rows) {
    const auto v = r.hsi.as_vector();
    for (std::size_t j = 0; j < v.size(); ++j) columns[j].push_back(v[j]);
    columns[6].push_back(r.road_length_km);
    columns[7].push_back(r.density);
  }

  const auto pcc = correlation_matrix(names, columns, CorrelationMethod::Pearson);
  const auto ccc = correlation_matrix(names, columns, CorrelationMethod::Chatterjee, config.seed);
  std::string long_form = "method,row,col,value\n";
  for (const auto* m : {&pcc, &ccc}) {
    const std::string method = m == &pcc ? "PCC" : "CCC";
    for (std::size_t i = 0; i < names.size(); ++i) {
      for (std::size_t j = 0; j < names.size(); ++j) {
        if (!m->values[i][j]) log_failure(outcome, method + "(" + names[i] + "," + names[j] + ")", "undefined");
        long_form += method + "," + names[i] + "," + names[j] + "," +
                     (m->values[i][j] ? fmt(*m->values[i][j]) : "NA") + "\n";
      }
    }
  }
  const fs::path pcc_path = config.output_dir / "pcc.csv";
  const fs::path ccc_path = config.output_dir / "ccc.csv";
  const fs::path long_path = config.output_dir / "correlation_long.csv";
  write_text(pcc_path, matrix_csv(pcc));
  write_text(ccc_path, matrix_csv(ccc));
  write_text(long_path, long_form);
  manifest.output(outcome, pcc_path);
  manifest.output(outcome, ccc_path);
  manifest.output(outcome, long_path);
  outcome.status = outcome.failures.empty() ? RunStatus::Success : RunStatus::Partial;
  manifest.finish(outcome, config);
  return outcome;
}

// ---------------------------------------------------------------- fit

RunOutcome run_fit(const PipelineConfig& config) {
  config.validate();
  RunOutcome outcome;
  RunManifest manifest("fit", config);
  const auto rows = load_corpus(config);
  hash_corpus_inputs(manifest, config);
  const RegressionDataset data = make_dataset(rows, config.features);
  auto [train, test] = train_test_split(data, config.test_fraction, config.seed);
  if (train.rows() < config.folds)
    throw InvalidArgument("fit: " + std::to_string(train.rows()) + " training rows cannot fill " +
                          std::to_string(config.folds) + " folds");

  std::string split_ids;
  for (const auto& id : test.city_ids) split_ids += id + "\n";
  const std::string split_hash = text::hex64(text::fnv1a(split_ids));
  const std::size_t p = config.features.size();
  const std::vector<double> test_targets(test.targets.data(), test.targets.data() + test.targets.size());

  struct Candidate {
    std::string name;
    std::variant<LinearModel, KrrModel> model;
    Vector predictions;
    RegressionMetrics metrics;
  };
  std::vector<Candidate> candidates;
  const auto add = [&](const std::string& name, auto model) {
    Vector pred = model.predict(test.features);
    const std::vector<double> pv(pred.data(), pred.data() + pred.size());
    candidates.push_back({name, std::move(model), pred, evaluate(pv, test_targets, p)});
  };

  try {
    add("LR", fit_linear_min_norm(train.features, train.targets));
  } catch (const SingularSystemError& e) {
    log_failure(outcome, "LR", e.what());
  }

  const auto ridge_cv = grid_search_cv_ridge(train.features, train.targets, config.lambda_grid,
                                             config.folds, config.seed, true);
  add("RR", fit_ridge(train.features, train.targets, ridge_cv.best_lambda, true));

  const auto krr_cv = grid_search_cv(train.features, train.targets, config.lambda_grid,
                                     config.gamma_grid, config.folds, config.seed);
  add("KRR", krr_fit(train.features, train.targets, krr_cv.best_lambda, krr_cv.best_gamma));

  std::string metrics = "model,MSE,MAE,R2,AdjR2\n";
  for (const std::string name : {"LR", "RR", "KRR"}) {
    const auto it = std::find_if(candidates.begin(), candidates.end(),
                                 [&](const Candidate& c) { return c.name == name; });
    if (it == candidates.end()) {
      metrics += name + ",NA,NA,NA,NA\n";
      continue;
    }
    metrics += name + "," + fmt(it->metrics.mse) + "," + fmt(it->metrics.mae) + "," +
               fmt(it->metrics.r2) + "," + fmt(it->metrics.adj_r2) + "\n";
  }

  std::string ridge_table = "lambda,mean_mse\n";
  for (const auto& c : ridge_cv.table) ridge_table += fmt(c.lambda) + "," + fmt(c.mean_mse) + "\n";
  std::string krr_table = "lambda,gamma,mean_mse\n";
  for (const auto& c : krr_cv.table)
    krr_table += fmt(c.lambda) + "," + fmt(c.gamma) + "," + fmt(c.mean_mse) + "\n";

  std::string test_preds = "city_id,ND";
  for (const auto& c : candidates) test_preds += "," + c.name;
  test_preds += "\n";
  for (std::size_t i = 0; i < test.rows(); ++i) {
    test_preds += test.city_ids[i] + "," + fmt(test_targets[i]);
    for (const auto& c : candidates) test_preds += "," + fmt(c.predictions(static_cast<Eigen::Index>(i)));
    test_preds += "\n";
  }

  // Lowest test MSE wins; ties favour the later (more flexible) model.
  const Candidate* best = &candidates.front();
  for (const auto& c : candidates)
    if (c.metrics.mse <= best->metrics.mse) best = &c;

  StoredModel stored;
  stored.feature_names = config.features;
  stored.model = best->model;
  stored.metadata = {config.seed, config.test_fraction, config.folds, split_hash, best->name};

  const fs::path metrics_path = config.output_dir / "metrics.csv";
  const fs::path ridge_path = config.output_dir / "cv_ridge.csv";
  const fs::path krr_path = config.output_dir / "cv_krr.csv";
  const fs::path preds_path = config.output_dir / "test_predictions.csv";
  const fs::path model_path = config.output_dir / "model.json";
  write_text(metrics_path, metrics);
  write_text(ridge_path, ridge_table);
  write_text(krr_path, krr_table);
  write_text(preds_path, test_preds);
  save_model(model_path, stored);
  for (const auto& path : {metrics_path, ridge_path, krr_path, preds_path, model_path})
    manifest.output(outcome, path);
  outcome.status = outcome.failures.empty() ? RunStatus::Success : RunStatus::Partial;
  manifest.finish(outcome, config);
  return outcome;
}

// ---------------------------------------------------------------- predict

RunOutcome run_predict(const PipelineConfig& config) {
  config.validate();
  RunOutcome outcome;
  RunManifest manifest("predict", config);
  const fs::path model_path = config.resolved_model_path();
  const StoredModel model = load_model(model_path);
  manifest.input(model_path);
  const auto& names = HsiVector::column_names();
  for (const auto& f : model.feature_names) {
    if (std::find(names.begin(), names.end(), f) == names.end())
      throw InvalidArgument("predict: model feature " + f + " is not a settlement index");
  }
  const auto files = list_raster_files(config.generated_dir);
  if (files.empty()) throw InvalidArgument("predict: no .asc rasters in " + config.generated_dir.string());

  std::string out = "scene_id,CA,NP,LPI,CLUMPY,AI,NLSI,ND_pred\n";
  std::size_t ok = 0;
  for (const auto& file : files) {
    const std::string id = file.stem().string();
    try {
      manifest.input(file);
      const auto hsi = compute_hsi(load_raster(file), config.connectivity);
      std::vector<double> x;
      for (const auto& f : model.feature_names) x.push_back(hsi_feature(hsi, f));
      const double nd = model.predict(x);
      out += id;
      for (const double v : hsi.as_vector()) out += "," + fmt(v);
      out += "," + fmt(nd) + "\n";
      ++ok;
    } catch (const std::exception& e) {
      log_failure(outcome, id, e.what());
    }
  }
  const fs::path path = config.output_dir / "predictions.csv";
  write_text(path, out);
  manifest.output(outcome, path);
  outcome.status = status_for(ok, outcome.failures.size());
  manifest.finish(outcome, config);
  return outcome;
}

// ---------------------------------------------------------------- validate-gan

namespace {

struct Scene {
  std::string id;
  SettlementRaster raster;
};

ordered_json histogram_json(const std::map<long long, double>& h) {
  ordered_json j = ordered_json::object();
  for (const auto& [k, v] : h) j[std::to_string(k)] = v;
  return j;
}

ordered_json comparison_json(const DistributionComparison& c) {
  return {{"real", histogram_json(c.real)},
          {"generated", histogram_json(c.generated)},
          {"total_variation", c.total_variation}};
}

std::string profiles_csv(const std::vector<std::string>& ids,
                         const std::vector<std::vector<double>>& profiles, std::size_t length) {
  std::string out = "city_id";
  for (std::size_t d = 0; d < length; ++d) out += ",d" + std::to_string(d);
  out += "\n";
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out += ids[i];
    for (const double v : profiles[i]) out += "," + fmt(v);
    out += "\n";
  }
  return out;
}

}  // namespace

RunOutcome run_validate_gan(const PipelineConfig& config) {
  config.validate();
  RunOutcome outcome;
  RunManifest manifest("validate-gan", config);
  const CityManifest cities = load_manifest(config.manifest_path);
  manifest.input(config.manifest_path);

  std::vector<Scene> real;
  for (const auto& entry : cities.entries) {
    try {
      manifest.input(entry.raster_path);
      real.push_back({entry.city_id, load_raster(entry.raster_path)});
    } catch (const std::exception& e) {
      log_failure(outcome, entry.city_id, e.what());
    }
  }
  std::vector<Scene> generated;
  for (const auto& file : list_raster_files(config.generated_dir)) {
    try {
      manifest.input(file);
      generated.push_back({file.stem().string(), load_raster(file)});
    } catch (const std::exception& e) {
      log_failure(outcome, file.stem().string(), e.what());
    }
  }
  if (real.empty() || generated.empty())
    throw InvalidArgument("validate-gan: need at least one real and one generated raster");
  if (real.size() < config.k) {
    throw InvalidArgument("validate-gan: " + std::to_string(real.size()) +
                          " real cities cannot form k = " + std::to_string(config.k) + " clusters");
  }

  std::size_t length = std::numeric_limits<std::size_t>::max();
  for (const auto* group : {&real, &generated})
    for (const auto& s : *group) length = std::min(length, harmonized_length(s.raster, config.ring_width));

  struct Population {
    std::vector<std::string> ids;
    std::vector<std::vector<double>> profiles;
    std::vector<long long> peak_counts;
    std::vector<long long> classes;
  };
  const auto analyse = [&](const std::vector<Scene>& scenes) {
    Population pop;
    for (const auto& s : scenes) {
      const auto profile = radial_profile(s.raster, config.center_mode, config.ring_width);
      auto values = harmonize(profile.values, length);
      const auto sep = min_ring_separation(config.peak_min_distance_m, s.raster.cell_size(), config.ring_width);
      pop.peak_counts.push_back(static_cast<long long>(find_peaks(values, config.peak_height_fraction, sep).count()));
      pop.ids.push_back(s.id);
      pop.profiles.push_back(std::move(values));
    }
    return pop;
  };
  Population real_pop = analyse(real);
  Population gen_pop = analyse(generated);

  const auto clustering = kmeans_profiles(real_pop.profiles, config.k, config.seed, config.kmeans_restarts);
  for (const auto a : clustering.assignments) real_pop.classes.push_back(static_cast<long long>(a));
  for (const auto& p : gen_pop.profiles)
    gen_pop.classes.push_back(static_cast<long long>(nearest_centroid(clustering.centroids, p)));

  std::vector<ElbowPoint> elbow;
  const std::size_t k_max = std::min(config.elbow_k_max, real_pop.profiles.size());
  if (k_max >= 2) elbow = elbow_curve(real_pop.profiles, k_max, config.seed, config.kmeans_restarts);

  const auto peaks_cmp = compare_distributions(real_pop.peak_counts, gen_pop.peak_counts);
  const auto class_cmp = compare_distributions(real_pop.classes, gen_pop.classes);

  ordered_json report;
  report["k"] = config.k;
  report["seed"] = config.seed;
  report["restarts"] = config.kmeans_restarts;
  report["ring_width"] = config.ring_width;
  report["profile_length"] = length;
  report["peak_height_fraction"] = config.peak_height_fraction;
  report["peak_min_distance_m"] = config.peak_min_distance_m;
  report["inertia"] = clustering.inertia;
  report["centroids"] = clustering.centroids;
  const auto population_json = [](const Population& p) {
    return ordered_json{{"ids", p.ids}, {"peak_counts", p.peak_counts}, {"classes", p.classes}};
  };
  report["real"] = population_json(real_pop);
  report["generated"] = population_json(gen_pop);
  ordered_json elbow_json = ordered_json::array();
  for (const auto& e : elbow)
    elbow_json.push_back({{"k", e.k}, {"inertia", e.inertia}, {"inertia_fraction", e.inertia_fraction}});
  report["elbow"] = elbow_json;
  report["peak_count_distribution"] = comparison_json(peaks_cmp);
  report["class_distribution"] = comparison_json(class_cmp);

  std::string elbow_csv = "k,inertia,inertia_fraction\n";
  for (const auto& e : elbow)
    elbow_csv += std::to_string(e.k) + "," + fmt(e.inertia) + "," + fmt(e.inertia_fraction) + "\n";
  std::string hist_csv = "distribution,population,value,fraction\n";
  for (const auto& [name, cmp] : {std::pair{"peaks", &peaks_cmp}, std::pair{"class", &class_cmp}}) {
    for (const auto& [k, v] : cmp->real) hist_csv += std::string(name) + ",real," + std::to_string(k) + "," + fmt(v) + "\n";
    for (const auto& [k, v] : cmp->generated)
      hist_csv += std::string(name) + ",generated," + std::to_string(k) + "," + fmt(v) + "\n";
  }

  const fs::path report_path = config.output_dir / "validation.json";
  const fs::path real_path = config.output_dir / "profiles_real.csv";
  const fs::path gen_path = config.output_dir / "profiles_generated.csv";
  const fs::path elbow_path = config.output_dir / "elbow.csv";
  const fs::path hist_path = config.output_dir / "histograms.csv";
  write_text(report_path, report.dump(2) + "\n");
  write_text(real_path, profiles_csv(real_pop.ids, real_pop.profiles, length));
  write_text(gen_path, profiles_csv(gen_pop.ids, gen_pop.profiles, length));
  write_text(elbow_path, elbow_csv);
  write_text(hist_path, hist_csv);
  for (const auto& path : {report_path, real_path, gen_path, elbow_path, hist_path})
    manifest.output(outcome, path);
  outcome.status = outcome.failures.empty() ? RunStatus::Success : RunStatus::Partial;
  manifest.finish(outcome, config);
  return outcome;
}

}  // namespace settlemorph

#pragma once

// Batch stages: corpus -> HSI table -> transport table -> correlations -> model fit ->
// predictions for generated scenes -> generated-vs-real validation report.
//
// Every stage writes its artifacts under config.output_dir plus a run manifest
// (run_<stage>.json) holding the config hash, seeds and input/output hashes.

#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "settlemorph/config.hpp"
#include "settlemorph/landscape.hpp"
#include "settlemorph/stats.hpp"
#include "settlemorph/transport.hpp"

namespace settlemorph {

// ---------------------------------------------------------------- tables

struct HsiRow {
  std::string city_id;
  HsiVector hsi;
};

struct TransportRow {
  std::string city_id;
  TransportIndex index;
};

/// Joined per-city record; `road_length_km` is RL and `density` is ND.
struct CorpusRow {
  std::string city_id;
  HsiVector hsi;
  double road_length_km = 0.0;
  double density = 0.0;
};

void write_hsi_table(const std::filesystem::path& path, const std::vector<HsiRow>& rows);
std::vector<HsiRow> read_hsi_table(const std::filesystem::path& path);
void write_transport_table(const std::filesystem::path& path, const std::vector<TransportRow>& rows);
std::vector<TransportRow> read_transport_table(const std::filesystem::path& path);

/// Reads `city_id,CA,NP,LPI,CLUMPY,AI,NLSI,RL,ND` (RL may also be named L_km).
std::vector<CorpusRow> read_corpus_table(const std::filesystem::path& path);
void write_corpus_table(const std::filesystem::path& path, const std::vector<CorpusRow>& rows);

/// Inner join on city_id; `dropped` receives the number of unmatched rows on both sides.
std::vector<CorpusRow> join_tables(const std::vector<HsiRow>& hsi,
                                   const std::vector<TransportRow>& transport,
                                   std::size_t* dropped = nullptr);

double hsi_feature(const HsiVector& hsi, const std::string& name);
RegressionDataset make_dataset(const std::vector<CorpusRow>& rows,
                               const std::vector<std::string>& features);

// ---------------------------------------------------------------- model persistence

struct ModelMetadata {
  std::uint64_t seed = 0;
  double test_fraction = 0.0;
  std::size_t folds = 0;
  std::string split_hash;
  std::string model_name;  // LR, RR or KRR
};

struct StoredModel {
  std::vector<std::string> feature_names;
  std::variant<LinearModel, KrrModel> model;
  ModelMetadata metadata;

  double predict(std::span<const double> x) const;
};

std::string model_to_json(const StoredModel& model);
StoredModel model_from_json(const std::string& text);
void save_model(const std::filesystem::path& path, const StoredModel& model);
StoredModel load_model(const std::filesystem::path& path);

// ---------------------------------------------------------------- stages

enum class RunStatus { Success = 0, Partial = 1, Failure = 2 };

struct RunOutcome {
  RunStatus status = RunStatus::Success;
  std::vector<std::string> failures;  // "<id>: <reason>"
  std::vector<std::filesystem::path> outputs;

  int exit_code() const noexcept { return static_cast<int>(status); }
};

RunOutcome run_hsi(const PipelineConfig& config);
RunOutcome run_transport(const PipelineConfig& config);
RunOutcome run_correlate(const PipelineConfig& config);
RunOutcome run_fit(const PipelineConfig& config);
RunOutcome run_predict(const PipelineConfig& config);
RunOutcome run_validate_gan(const PipelineConfig& config);

/// Corpus rows for correlate/fit: table_path when set, else hsi.csv joined with transport.csv.
std::vector<CorpusRow> load_corpus(const PipelineConfig& config);

}  // namespace settlemorph

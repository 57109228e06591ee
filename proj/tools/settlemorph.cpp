// Command-line front end for the batch stages.
//
//   settlemorph <stage> --config run.ini [--seed N] [--k N] [--test-fraction F]
//                       [--connectivity 4|8] [--model path] [--output dir]
//
// Exit codes: 0 success, 1 partial (some cities failed), 2 failure.

#include <CLI11.hpp>
#include <functional>
#include <iostream>
#include <map>

#include "settlemorph/pipeline.hpp"

using namespace settlemorph;

namespace {

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> k;
  std::optional<double> test_fraction;
  std::optional<int> connectivity;
  std::optional<std::string> model;
  std::optional<std::string> output;
  std::optional<std::string> generated;
  std::optional<std::string> table;
};

PipelineConfig resolve(const Overrides& o) {
  PipelineConfig cfg = o.config.empty() ? PipelineConfig{} : load_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  if (o.k) cfg.k = *o.k;
  if (o.test_fraction) cfg.test_fraction = *o.test_fraction;
  if (o.connectivity) cfg.connectivity = *o.connectivity == 4 ? Connectivity::Four : Connectivity::Eight;
  if (o.model) cfg.model_path = *o.model;
  if (o.output) cfg.output_dir = *o.output;
  if (o.generated) cfg.generated_dir = *o.generated;
  if (o.table) cfg.table_path = *o.table;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Settlement morphology and transport analysis"};
  app.require_subcommand(1);
  Overrides o;

  const std::map<std::string, std::function<RunOutcome(const PipelineConfig&)>> stages = {
      {"hsi", run_hsi},
      {"transport", run_transport},
      {"correlate", run_correlate},
      {"fit", run_fit},
      {"predict", run_predict},
      {"validate-gan", run_validate_gan},
  };
  const std::map<std::string, std::string> help = {
      {"hsi", "compute settlement indices for every manifest city"},
      {"transport", "compute road length and network density"},
      {"correlate", "Pearson and Chatterjee correlation matrices"},
      {"fit", "fit LR, ridge and kernel ridge models of network density"},
      {"predict", "predict network density for generated rasters"},
      {"validate-gan", "compare radial profiles of generated and real cities"},
  };

  for (const auto& [name, fn] : stages) {
    auto* sub = app.add_subcommand(name, help.at(name));
    sub->add_option("--config", o.config, "key = value config file")->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "override seed");
    sub->add_option("--k", o.k, "override cluster count");
    sub->add_option("--test-fraction", o.test_fraction, "override held-out fraction");
    sub->add_option("--connectivity", o.connectivity, "patch connectivity")->check(CLI::IsMember({4, 8}));
    sub->add_option("--output", o.output, "override output directory");
    sub->add_option("--generated", o.generated, "override generated raster directory");
    sub->add_option("--table", o.table, "override corpus table");
    if (name == "predict") sub->add_option("--model", o.model, "model JSON written by fit");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const PipelineConfig cfg = resolve(o);
    for (const auto* sub : app.get_subcommands()) {
      const RunOutcome outcome = stages.at(sub->get_name())(cfg);
      for (const auto& path : outcome.outputs) std::cout << path.string() << "\n";
      if (!outcome.failures.empty())
        std::cerr << outcome.failures.size() << " item(s) failed\n";
      return outcome.exit_code();
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

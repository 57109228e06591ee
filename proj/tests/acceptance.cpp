// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "settlemorph/landscape.hpp"
#include "settlemorph/pipeline.hpp"
#include "settlemorph/radial.hpp"
#include "settlemorph/rng.hpp"
#include "settlemorph/stats.hpp"
#include "settlemorph/transport.hpp"
#include "synthetic.hpp"

using namespace settlemorph;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& why) {
    if (!ok && pass) detail = why;
    pass = pass && ok;
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string num(double v) { return text::format_double(v); }

// 1 ------------------------------------------------------------------------
Verdict landscape_oracle() {
  Verdict v;
  const auto t0 = Clock::now();
  std::size_t rasters = 0;
  double worst = 0.0;
  for (std::size_t h = 1; h <= 4 && v.pass; ++h) {
    for (std::size_t w = 1; w <= 4 && v.pass; ++w) {
      const std::size_t cells = w * h;
      for (std::uint32_t mask = 1; mask < (1u << cells) && v.pass; ++mask) {
        std::vector<std::uint8_t> c(cells);
        for (std::size_t i = 0; i < cells; ++i) c[i] = (mask >> i) & 1u;
        const SettlementRaster r(w, h, 30.0, c);
        ++rasters;
        for (const bool eight : {false, true}) {
          const auto conn = eight ? Connectivity::Eight : Connectivity::Four;
          const auto hsi = compute_hsi(r, conn);
          const auto patches = oracle::flood_fill(r, eight);
          v.require(hsi.np == double(patches.count), "NP mismatch mask " + std::to_string(mask));
          v.require(hsi.lpi == double(patches.largest) / double(cells) * 100.0,
                    "LPI mismatch mask " + std::to_string(mask));
          v.require(hsi.ca == double(r.occupied_count()) * 900.0 / 10000.0, "CA mismatch");
          const auto agg = oracle::aggregation(r);
          for (const double d : {hsi.clumpy - agg.clumpy, hsi.ai - agg.ai, hsi.nlsi - agg.nlsi})
            worst = std::max(worst, std::abs(d));
        }
      }
    }
  }
  const double secs = seconds_since(t0);
  v.require(worst <= 1e-9, "aggregation deviation " + num(worst));
  v.require(secs < 60.0, "took " + num(secs) + " s");
  if (v.pass)
    v.detail = std::to_string(rasters) + " rasters x {4,8}, max |dev| " + num(worst) + ", " + num(secs) + " s";
  return v;
}

// 2 ------------------------------------------------------------------------
Verdict density_arithmetic() {
  Verdict v;
  const auto delhi = network_density(1898.33, 108.4);
  const auto belgaum = network_density(1313.71, 108.4);
  v.require(std::abs(delhi.density - 17.513) <= 0.001, "New Delhi ND " + num(delhi.density));
  v.require(std::abs(belgaum.density - 11.084) > 0.3, "Belgaum ND " + num(belgaum.density));
  if (v.pass)
    v.detail = "New Delhi " + num(delhi.density) + ", Belgaum " + num(belgaum.density) + " vs printed 11.084";
  return v;
}

// 3 ------------------------------------------------------------------------
Verdict chatterjee_suite() {
  Verdict v;
  for (const std::size_t n : {2, 5, 10, 100}) {
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = double(i);
      y[i] = std::exp(0.1 * double(i));
    }
    const double xi = chatterjee(x, y, 1);
    v.require(xi == 1.0 - 3.0 / double(n + 1), "monotone n=" + std::to_string(n) + " gave " + num(xi));
  }
  rng::Engine eng(7);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + rng::uniform_index(eng, 49);
    // Distinct values: shuffled integers plus a small offset.
    const auto px = rng::permutation(n, 1000 + trial);
    const auto py = rng::permutation(n, 5000 + trial);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = double(px[i]) + 0.25;
      y[i] = double(py[i]) * 1.5 - 3.0;
    }
    const double got = chatterjee(x, y, trial);
    const double want = oracle::chatterjee(x, y);
    v.require(got == want, "trial " + std::to_string(trial) + ": " + num(got) + " vs " + num(want));
  }
  if (v.pass) v.detail = "closed form for n in {2,5,10,100}; 1000 random vectors exact";
  return v;
}

// 4 ------------------------------------------------------------------------
Verdict krr_suite() {
  Verdict v;
  rng::Engine eng(11);
  double worst_residual = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index n = 5 + static_cast<Eigen::Index>(rng::uniform_index(eng, 20));
    const Eigen::Index p = 2 + static_cast<Eigen::Index>(rng::uniform_index(eng, 5));
    Matrix x(n, p);
    Vector y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < p; ++j) x(i, j) = rng::normal(eng);
      y(i) = rng::normal(eng) * 3.0 + 2.0;
    }
    const auto model = krr_fit(x, y, 0.0, 1.0);
    worst_residual = std::max(worst_residual, (model.predict(x) - y).cwiseAbs().maxCoeff());
  }
  v.require(worst_residual < 1e-6, "interpolation residual " + num(worst_residual));

  std::size_t shrink_violations = 0;
  for (int trial = 0; trial < 50; ++trial) {
    Matrix x(30, 4);
    Vector y(30);
    for (Eigen::Index i = 0; i < 30; ++i) {
      for (Eigen::Index j = 0; j < 4; ++j) x(i, j) = rng::normal(eng);
      y(i) = x.row(i).sum() + rng::normal(eng);
    }
    double prev = INFINITY;
    for (const double lambda : {0.0, 0.01, 0.1, 1.0, 10.0, 100.0, 1000.0}) {
      const double norm = fit_ridge(x, y, lambda).coefficients.norm();
      if (norm > prev * (1 + 1e-12)) ++shrink_violations;
      prev = norm;
    }
  }
  v.require(shrink_violations == 0, std::to_string(shrink_violations) + " shrinkage violations");

  double min_eig = INFINITY;
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng::uniform_index(eng, 40));
    const Eigen::Index p = 1 + static_cast<Eigen::Index>(rng::uniform_index(eng, 6));
    Matrix x(n, p);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < p; ++j) x(i, j) = rng::normal(eng);
    const double gamma = std::pow(10.0, -3.0 + 4.0 * rng::uniform01(eng));
    const Eigen::SelfAdjointEigenSolver<Matrix> es(rbf_gram(x, gamma));
    min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
  }
  v.require(min_eig >= -1e-10, "Gram min eigenvalue " + num(min_eig));
  if (v.pass)
    v.detail = "max residual " + num(worst_residual) + ", ridge norms monotone, Gram min eig " + num(min_eig);
  return v;
}

// 5 ------------------------------------------------------------------------
struct OrderingRun {
  double lr = 0, rr = 0, krr = 0;
  RegressionMetrics krr_metrics;
};

OrderingRun fit_three(const RegressionDataset& data, std::uint64_t seed) {
  const PipelineConfig defaults;
  auto [train, test] = train_test_split(data, defaults.test_fraction, seed);
  const std::vector<double> yt(test.targets.data(), test.targets.data() + test.targets.size());
  const auto score = [&](const Vector& pred) {
    const std::vector<double> pv(pred.data(), pred.data() + pred.size());
    return evaluate(pv, yt, data.cols());
  };
  OrderingRun out;
  out.lr = score(fit_linear_min_norm(train.features, train.targets).predict(test.features)).r2;
  const auto rcv = grid_search_cv_ridge(train.features, train.targets, defaults.lambda_grid,
                                        defaults.folds, seed, true);
  out.rr = score(fit_ridge(train.features, train.targets, rcv.best_lambda, true).predict(test.features)).r2;
  const auto kcv = grid_search_cv(train.features, train.targets, defaults.lambda_grid,
                                  defaults.gamma_grid, defaults.folds, seed);
  out.krr_metrics =
      score(krr_fit(train.features, train.targets, kcv.best_lambda, kcv.best_gamma).predict(test.features));
  out.krr = out.krr_metrics.r2;
  return out;
}

Verdict model_ordering(const fs::path& fixtures) {
  Verdict v;
  const auto t0 = Clock::now();
  const auto rows = synthetic::corpus(250, 2024);
  const auto data = make_dataset(rows, PipelineConfig{}.features);
  std::size_t ordered = 0, krr_rr = 0, krr_lr = 0, rr_lr = 0;
  std::string scores;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto r = fit_three(data, seed);
    krr_rr += r.krr >= r.rr;
    krr_lr += r.krr >= r.lr;
    rr_lr += r.rr >= r.lr;
    if (r.krr >= r.rr && r.rr >= r.lr) ++ordered;
    scores += " [" + num(std::round(r.lr * 1000) / 1000) + "," + num(std::round(r.rr * 1000) / 1000) +
              "," + num(std::round(r.krr * 1000) / 1000) + "]";
  }
  const std::string tally = std::to_string(ordered) + "/10 seeds fully ordered (KRR>=RR " +
                            std::to_string(krr_rr) + ", KRR>=LR " + std::to_string(krr_lr) + ", RR>=LR " +
                            std::to_string(rr_lr) + ")";
  v.require(ordered >= 9, tally + "; LR/RR/KRR test R2:" + scores);

  std::string corpus_note = "no corpus.csv fixture";
  const fs::path corpus = fixtures / "corpus.csv";
  if (fs::exists(corpus)) {
    const auto real = make_dataset(read_corpus_table(corpus), PipelineConfig{}.features);
    const auto r = fit_three(real, PipelineConfig{}.seed);
    v.require(r.krr_metrics.r2 >= 0.65 && r.krr_metrics.mae <= 1.6,
              "corpus KRR R2 " + num(r.krr_metrics.r2) + " MAE " + num(r.krr_metrics.mae));
    corpus_note = "corpus KRR R2 " + num(r.krr_metrics.r2) + " MAE " + num(r.krr_metrics.mae);
  }
  const double secs = seconds_since(t0);
  v.require(secs < 300.0, "took " + num(secs) + " s");
  if (v.pass)
    v.detail = tally + " on 250 cities; " + corpus_note + "; " + num(secs) + " s";
  return v;
}

// 6 ------------------------------------------------------------------------
Verdict radial_suite() {
  Verdict v;
  const SettlementRaster ones(21, 17, 43.0, std::vector<std::uint8_t>(21 * 17, 1));
  for (const double h : radial_profile(ones).values) v.require(h == 1.0, "uniform profile not constant");

  const std::size_t side = 41;
  std::vector<std::uint8_t> disk(side * side, 0);
  for (std::size_t y = 0; y < side; ++y)
    for (std::size_t x = 0; x < side; ++x)
      disk[y * side + x] = std::hypot(x + 0.5 - 20.5, y + 0.5 - 20.5) < 10.0;
  const SettlementRaster disk_raster(side, side, 43.0, disk);
  const auto profile = radial_profile(disk_raster);
  const auto want = oracle::annulus_profile(disk_raster, 20.5, 20.5, profile.values.size());
  v.require(profile.values == want, "disk profile differs from annulus oracle");
  for (std::size_t d = 0; d < profile.values.size(); ++d) {
    if (d <= 9) v.require(profile.values[d] == 1.0, "disk ring " + std::to_string(d) + " not full");
    if (d == 10) v.require(profile.values[d] < 1.0 && profile.values[d] > 0.0, "boundary ring");
    if (d >= 11) v.require(profile.values[d] == 0.0, "disk ring " + std::to_string(d) + " not empty");
  }

  struct PeakCase {
    std::vector<double> values;
    double fraction;
    std::size_t sep;
    std::vector<std::size_t> expected;
  };
  const std::vector<PeakCase> cases = {
      {{1.0, 0.9, 0.2, 0.85, 0.1}, 0.8, 2, {0, 3}},
      {{1.0, 0.8, 0.6, 0.4, 0.2, 0.0}, 0.8, 10, {0}},
      {{0.1, 0.5, 0.5, 0.5, 0.2, 0.9, 0.9, 0.1}, 0.5, 2, {1, 5}},
      {{0.2, 1.0, 0.3, 0.95, 0.1, 0.1, 0.9, 0.0}, 0.8, 3, {1, 6}},
      {{0.0, 0.0, 0.0}, 0.8, 1, {}},
  };
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& c = cases[i];
    const auto got = find_peaks(c.values, c.fraction, c.sep).indices;
    const auto scan = oracle::scan_peaks(c.values, c.fraction, c.sep);
    v.require(got == c.expected && scan == c.expected, "peak fixture " + std::to_string(i + 1));
  }
  const PipelineConfig defaults;
  v.require(defaults.peak_height_fraction == 0.8, "default height fraction");
  v.require(min_ring_separation(defaults.peak_min_distance_m, 43.0, defaults.ring_width) == 10,
            "430 m at 43 m cells is not 10 rings");
  if (v.pass) v.detail = "uniform, disk annulus oracle, 5 peak fixtures, 430 m / 43 m -> 10 rings";
  return v;
}

// 7 ------------------------------------------------------------------------
Verdict kmeans_suite(const fs::path& report) {
  Verdict v;
  rng::Engine eng(3);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<std::vector<double>> data(40, std::vector<double>(12));
    for (auto& row : data)
      for (auto& x : row) x = rng::uniform01(eng);
    const auto curve = elbow_curve(data, 15, 100 + trial);
    for (std::size_t i = 1; i < curve.size(); ++i)
      v.require(curve[i].inertia <= curve[i - 1].inertia, "inertia rose at k=" + std::to_string(curve[i].k));
  }

  std::vector<std::vector<double>> groups;
  std::vector<std::size_t> truth;
  for (std::size_t g = 0; g < 3; ++g) {
    for (int i = 0; i < 20; ++i) {
      std::vector<double> p(15);
      for (std::size_t d = 0; d < p.size(); ++d) {
        const double centre = g == 0 ? std::exp(-0.3 * d) : g == 1 ? 0.5 : (d > 7 ? 0.9 : 0.1);
        p[d] = std::clamp(centre + 0.03 * rng::normal(eng), 0.0, 1.0);
      }
      groups.push_back(p);
      truth.push_back(g);
    }
  }
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto fit = kmeans_profiles(groups, 3, seed);
    bool pure = true;
    for (std::size_t i = 0; i < groups.size(); ++i)
      for (std::size_t j = 0; j < groups.size(); ++j)
        pure = pure && ((truth[i] == truth[j]) == (fit.assignments[i] == fit.assignments[j]));
    v.require(pure, "3-cluster purity below 100% for seed " + std::to_string(seed));
  }

  v.require(PipelineConfig{}.k == 10, "default k is not 10");
  try {
    const auto doc = nlohmann::json::parse(synthetic::slurp(report));
    v.require(doc.at("k").get<int>() == 10, "report k = " + doc.at("k").dump());
  } catch (const std::exception& e) {
    v.require(false, std::string("validate-gan report unreadable: ") + e.what());
  }
  if (v.pass) v.detail = "elbow monotone k=1..15 (5 sets), 3-cluster purity 100% x 10 seeds, report k=10";
  return v;
}

// 8 ------------------------------------------------------------------------
Verdict pipeline_determinism(const fs::path& work, fs::path& report_out) {
  Verdict v;
  fs::remove_all(work);
  const auto manifest = synthetic::write_city_fixture(work / "data", 40, 99);
  PipelineConfig cfg;
  cfg.manifest_path = manifest;
  cfg.generated_dir = work / "data" / "rasters";
  cfg.output_dir = work / "out";

  const auto snapshot = [&]() {
    std::vector<std::string> files;
    for (const char* name : {"metrics.csv", "cv_ridge.csv", "cv_krr.csv", "model.json", "predictions.csv",
                             "run_fit.json", "run_predict.json"})
      files.push_back(synthetic::slurp(cfg.output_dir / name));
    return files;
  };
  std::vector<std::vector<std::string>> runs;
  for (int run = 0; run < 2; ++run) {
    for (const auto& stage : {run_hsi, run_transport, run_fit, run_predict}) {
      const auto outcome = stage(cfg);
      v.require(outcome.status == RunStatus::Success, "stage failed: " +
                                                          (outcome.failures.empty() ? "" : outcome.failures.front()));
    }
    runs.push_back(snapshot());
  }
  v.require(runs[0] == runs[1], "fit/predict outputs differ between runs");

  const auto outcome = run_validate_gan(cfg);
  v.require(outcome.status == RunStatus::Success, "validate-gan failed");
  report_out = cfg.output_dir / "validation.json";
  const auto doc = nlohmann::json::parse(synthetic::slurp(report_out));
  const double tv_peaks = doc["peak_count_distribution"]["total_variation"].get<double>();
  const double tv_class = doc["class_distribution"]["total_variation"].get<double>();
  v.require(tv_peaks == 0.0 && tv_class == 0.0,
            "self-comparison TV " + num(tv_peaks) + " / " + num(tv_class));
  if (v.pass) v.detail = "7 outputs bit-identical over 2 runs; self-comparison TV 0 (peaks, classes)";
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path fixtures = argc > 1 ? fs::path(argv[1]) : fs::path("tests/fixtures");
  const fs::path work = fs::temp_directory_path() / "settlemorph_acceptance";
  fs::path report;
  std::optional<Verdict> pipeline;
  // validate-gan output feeds the k-means criterion, so the pipeline runs once on first use.
  const auto pipeline_verdict = [&]() {
    if (!pipeline) pipeline = pipeline_determinism(work, report);
    return *pipeline;
  };

  struct Criterion {
    const char* name;
    std::function<Verdict()> run;
  };
  const std::vector<Criterion> criteria = {
      {"landscape metrics match flood-fill oracle on all rasters up to 4x4", landscape_oracle},
      {"network density arithmetic", density_arithmetic},
      {"Chatterjee coefficient closed form and rank oracle", chatterjee_suite},
      {"kernel ridge interpolation, ridge shrinkage, Gram PSD", krr_suite},
      {"model ordering KRR >= RR >= LR on synthetic corpus", [&] { return model_ordering(fixtures); }},
      {"radial profile and peak search", radial_suite},
      {"k-means elbow, purity and default k",
       [&] {
         pipeline_verdict();
         return kmeans_suite(report);
       }},
      {"pipeline determinism and self-comparison", pipeline_verdict},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict verdict;
    try {
      verdict = criteria[i].run();
    } catch (const std::exception& e) {
      verdict = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s [%zu] %s: %s\n", verdict.pass ? "PASS" : "FAIL", i + 1, criteria[i].name,
                verdict.detail.c_str());
    std::fflush(stdout);
    if (!verdict.pass) ++failures;
  }
  fs::remove_all(work);
  std::printf("%d/%zu criteria passed\n", int(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}

#include "soilspec/evaluation.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "soilspec/csv.hpp"
#include "soilspec/error.hpp"
#include "soilspec/model_io.hpp"
#include "soilspec/parallel.hpp"
#include "soilspec/rng.hpp"

namespace soilspec {

double r_squared(const std::vector<double>& y_true, const std::vector<double>& y_pred) {
  require(y_true.size() == y_pred.size(), "r_squared: length mismatch");
  require(y_true.size() >= 2, "r_squared: needs at least 2 samples");
  double mean = 0.0;
  for (double y : y_true) mean += y;
  mean /= static_cast<double>(y_true.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    ss_res += (y_true[i] - y_pred[i]) * (y_true[i] - y_pred[i]);
    ss_tot += (y_true[i] - mean) * (y_true[i] - mean);
  }
  require(ss_tot > 0.0, "r_squared: zero-variance truth");
  return 1.0 - ss_res / ss_tot;
}

double rmse(const std::vector<double>& y_true, const std::vector<double>& y_pred) {
  require(y_true.size() == y_pred.size(), "rmse: length mismatch");
  require(!y_true.empty(), "rmse: empty input");
  double ss = 0.0;
  for (std::size_t i = 0; i < y_true.size(); ++i)
    ss += (y_true[i] - y_pred[i]) * (y_true[i] - y_pred[i]);
  return std::sqrt(ss / static_cast<double>(y_true.size()));
}

std::vector<std::vector<std::size_t>> kfold_split(std::size_t n, std::size_t k,
                                                  std::uint64_t seed) {
  require(k >= 2, "kfold_split: k must be >= 2");
  require(n >= k, "kfold_split: fewer samples than folds");
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.uniform_int(i)]);

  std::vector<std::vector<std::size_t>> folds(k);
  const std::size_t base = n / k;
  const std::size_t extra = n % k;
  std::size_t pos = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t len = base + (f < extra ? 1 : 0);
    folds[f].assign(order.begin() + pos, order.begin() + pos + len);
    pos += len;
  }
  return folds;
}

std::size_t GridSpec::point_count() const {
  std::size_t count = 1;
  for (const auto& [name, values] : axes) {
    require(!values.empty(), "grid: empty candidate list for '" + name + "'");
    count *= values.size();
  }
  return count;
}

HyperparameterSet GridSpec::point(std::size_t index) const {
  HyperparameterSet hp = HyperparameterSet::defaults(kind);
  std::size_t rem = index;
  for (std::size_t a = axes.size(); a-- > 0;) {
    const auto& [name, values] = axes[a];
    hp.set(name, values[rem % values.size()]);
    rem /= values.size();
  }
  require(rem == 0, "grid: point index out of range");
  return hp;
}

GridSearchResult grid_search(const Matrix& x, const std::vector<double>& y, const GridSpec& grid,
                             std::size_t k, std::uint64_t seed) {
  require(x.rows() == y.size(), "grid_search: feature/target length mismatch");
  const std::size_t n_points = grid.point_count();
  const auto folds = kfold_split(x.rows(), k, derive_seed(seed, "folds"));

  GridSearchResult result;
  result.fold_sizes.reserve(k);
  for (const auto& fold : folds) result.fold_sizes.push_back(fold.size());

  result.table.assign(n_points, CvRow{});
  for (std::size_t p = 0; p < n_points; ++p) {
    CvRow& row = result.table[p];
    row.point_index = p;
    const HyperparameterSet hp = grid.point(p);
    for (const auto& [name, values] : grid.axes) row.values.emplace_back(name, hp.values().at(name));
    row.fold_r2.assign(k, 0.0);
    row.fold_rmse.assign(k, 0.0);
  }

  // One work unit per (grid point, fold); failures disqualify the point.
  std::vector<std::string> unit_error(n_points * k);
  parallel_for(n_points * k, [&](std::size_t unit) {
    const std::size_t p = unit / k;
    const std::size_t f = unit % k;
    try {
      const HyperparameterSet hp = grid.point(p);
      std::vector<std::size_t> train_idx;
      train_idx.reserve(x.rows() - folds[f].size());
      for (std::size_t g = 0; g < k; ++g) {
        if (g == f) continue;
        train_idx.insert(train_idx.end(), folds[g].begin(), folds[g].end());
      }
      Matrix train_x(train_idx.size(), x.cols());
      std::vector<double> train_y(train_idx.size());
      for (std::size_t i = 0; i < train_idx.size(); ++i) {
        for (std::size_t c = 0; c < x.cols(); ++c) train_x(i, c) = x(train_idx[i], c);
        train_y[i] = y[train_idx[i]];
      }
      Matrix test_x(folds[f].size(), x.cols());
      std::vector<double> test_y(folds[f].size());
      for (std::size_t i = 0; i < folds[f].size(); ++i) {
        for (std::size_t c = 0; c < x.cols(); ++c) test_x(i, c) = x(folds[f][i], c);
        test_y[i] = y[folds[f][i]];
      }

      auto model = make_regressor(grid.kind, hp, derive_seed(seed, "grid", p * k + f));
      model->fit(train_x, train_y);
      const std::vector<double> pred = model->predict(test_x);
      result.table[p].fold_r2[f] = r_squared(test_y, pred);
      result.table[p].fold_rmse[f] = rmse(test_y, pred);
    } catch (const std::exception& e) {
      unit_error[unit] = e.what();
    }
  });

  for (std::size_t p = 0; p < n_points; ++p) {
    CvRow& row = result.table[p];
    for (std::size_t f = 0; f < k; ++f) {
      if (!unit_error[p * k + f].empty()) {
        row.failed = true;
        row.failure = "fold " + std::to_string(f) + ": " + unit_error[p * k + f];
        break;
      }
    }
    if (row.failed) continue;
    for (std::size_t f = 0; f < k; ++f) {
      row.mean_r2 += row.fold_r2[f];
      row.mean_rmse += row.fold_rmse[f];
    }
    row.mean_r2 /= static_cast<double>(k);
    row.mean_rmse /= static_cast<double>(k);
  }

  bool found = false;
  std::size_t best = 0;
  for (std::size_t p = 0; p < n_points; ++p) {
    const CvRow& row = result.table[p];
    if (row.failed) continue;
    if (!found || row.mean_r2 > result.table[best].mean_r2 ||
        (row.mean_r2 == result.table[best].mean_r2 &&
         row.mean_rmse < result.table[best].mean_rmse)) {
      best = p;
      found = true;
    }
  }
  require(found, "grid_search: every grid point failed");
  result.best_index = best;
  result.best = grid.point(best);
  return result;
}

Histogram2d prediction_histogram2d(const std::vector<double>& y_true,
                                   const std::vector<double>& y_pred, std::size_t n_bins) {
  require(y_true.size() == y_pred.size(), "histogram2d: length mismatch");
  require(!y_true.empty(), "histogram2d: empty input");
  require(n_bins >= 1, "histogram2d: n_bins must be >= 1");
  double lo = y_true[0], hi = y_true[0];
  for (double v : y_true) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  for (double v : y_pred) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }

  Histogram2d h;
  h.edges.resize(n_bins + 1);
  for (std::size_t b = 0; b <= n_bins; ++b)
    h.edges[b] = lo + (hi - lo) * static_cast<double>(b) / static_cast<double>(n_bins);
  h.counts.assign(n_bins, std::vector<long>(n_bins, 0));

  auto bin_of = [&](double v) {
    if (hi == lo) return n_bins - 1;
    std::size_t idx = static_cast<std::size_t>((v - lo) / (hi - lo) * static_cast<double>(n_bins));
    return idx >= n_bins ? n_bins - 1 : idx;
  };
  for (std::size_t i = 0; i < y_true.size(); ++i)
    ++h.counts[bin_of(y_true[i])][bin_of(y_pred[i])];
  return h;
}

namespace {

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double pop_std(const std::vector<double>& v, double mean) {
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, const Dataset& data) {
  require(!config.seeds.empty(), "run_experiment: empty seed list");
  require(config.train_count >= 2, "run_experiment: train_count must be >= 2");
  require(config.train_count < data.size(), "run_experiment: train_count exceeds dataset");
  require(config.hp.kind() == config.model_kind, "run_experiment: hyperparameter kind mismatch");

  const std::size_t n_runs = config.seeds.size();
  const std::size_t test_count = data.size() - config.train_count;

  ExperimentResult result;
  result.report.config = config;
  result.report.n_samples = data.size();
  result.report.n_features = kFeatureCount;
  result.report.test_count = test_count;
  result.report.runs.assign(n_runs, SeedRun{});
  result.models.resize(n_runs);
  result.preprocessors.resize(n_runs);

  std::vector<std::vector<double>> importances(n_runs);

  parallel_for(n_runs, [&](std::size_t i) {
    const std::uint64_t run_seed = config.seeds[i];
    const std::uint64_t split_seed =
        derive_seed(config.resplit_per_seed ? run_seed : config.seeds[0], "split");
    try {
      SplitSpec split{config.train_count, test_count, split_seed};
      auto [train, test] = split_train_test(data, split);
      auto [train_x, train_y] = assemble_features(train);
      auto [test_x, test_y] = assemble_features(test);

      PreprocessedData pre = apply_preprocessing(config.mode, train_x, train_y, test_x, test_y,
                                                 config.pca_components);

      auto model = make_regressor(config.model_kind, config.hp, derive_seed(run_seed, "model"));
      model->fit(pre.train_features, pre.train_targets);

      std::vector<double> train_pred = model->predict(pre.train_features);
      std::vector<double> test_pred = model->predict(pre.test_features);

      SeedRun& run = result.report.runs[i];
      run.seed = run_seed;
      if (config.mode == PreprocessMode::scaling) {
        run.test_rmse_scaled = rmse(pre.test_targets, test_pred);
        train_pred = minmax_inverse_targets(*pre.state.scaler, train_pred);
        test_pred = minmax_inverse_targets(*pre.state.scaler, test_pred);
      }
      run.train = {r_squared(train_y, train_pred), rmse(train_y, train_pred), train_y.size()};
      run.test = {r_squared(test_y, test_pred), rmse(test_y, test_pred), test_y.size()};
      run.test_rmse_pct = run.test.rmse;
      run.test_targets = test_y;
      run.test_predictions = test_pred;

      if (model->has_feature_importance()) importances[i] = model->feature_importance();
      result.preprocessors[i] = pre.state;
      result.models[i] = std::move(model);
    } catch (const std::exception& e) {
      throw Error("run " + std::to_string(i) + " (seed " + std::to_string(run_seed) +
                  "): " + e.what());
    }
  });

  std::vector<double> test_r2(n_runs), test_rm(n_runs), train_r2(n_runs), train_rm(n_runs);
  for (std::size_t i = 0; i < n_runs; ++i) {
    test_r2[i] = result.report.runs[i].test.r_squared;
    test_rm[i] = result.report.runs[i].test_rmse_pct;
    train_r2[i] = result.report.runs[i].train.r_squared;
    train_rm[i] = result.report.runs[i].train.rmse;
  }
  RegressionReport& rep = result.report;
  rep.aggregate_test_mean = {mean_of(test_r2), mean_of(test_rm), n_runs};
  rep.aggregate_test_std = {pop_std(test_r2, rep.aggregate_test_mean.r_squared),
                            pop_std(test_rm, rep.aggregate_test_mean.rmse), n_runs};
  rep.aggregate_train_mean = {mean_of(train_r2), mean_of(train_rm), n_runs};
  rep.aggregate_train_std = {pop_std(train_r2, rep.aggregate_train_mean.r_squared),
                             pop_std(train_rm, rep.aggregate_train_mean.rmse), n_runs};

  if (!importances[0].empty()) {
    std::vector<double> mean_imp(importances[0].size(), 0.0);
    for (const auto& imp : importances)
      for (std::size_t j = 0; j < imp.size(); ++j) mean_imp[j] += imp[j];
    for (double& v : mean_imp) v /= static_cast<double>(n_runs);
    rep.importances = std::move(mean_imp);
  }

  std::vector<double> all_true, all_pred;
  for (const SeedRun& run : rep.runs) {
    all_true.insert(all_true.end(), run.test_targets.begin(), run.test_targets.end());
    all_pred.insert(all_pred.end(), run.test_predictions.begin(), run.test_predictions.end());
  }
  rep.hist2d = prediction_histogram2d(all_true, all_pred, config.hist2d_bins);
  return result;
}

nlohmann::json RegressionReport::to_json() const {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["config"] = {{"preprocess", to_string(config.mode)},
                 {"model", config.model_kind},
                 {"hyperparameters", config.hp.to_json()},
                 {"train_count", config.train_count},
                 {"test_count", test_count},
                 {"seeds", config.seeds},
                 {"resplit_per_seed", config.resplit_per_seed},
                 {"pca_components", config.pca_components},
                 {"hist2d_bins", config.hist2d_bins}};
  j["dataset"] = {{"n_samples", n_samples}, {"n_features", n_features}};

  nlohmann::json runs_json = nlohmann::json::array();
  for (const SeedRun& run : runs) {
    nlohmann::json rj = {{"seed", run.seed},
                         {"train", {{"r_squared", run.train.r_squared},
                                    {"rmse", run.train.rmse},
                                    {"n", run.train.n}}},
                         {"test", {{"r_squared", run.test.r_squared},
                                   {"rmse", run.test.rmse},
                                   {"n", run.test.n}}},
                         {"test_rmse_pct", run.test_rmse_pct},
                         {"predictions", run.test_predictions},
                         {"targets", run.test_targets}};
    if (run.test_rmse_scaled) rj["test_rmse_scaled"] = *run.test_rmse_scaled;
    runs_json.push_back(std::move(rj));
  }
  j["runs"] = std::move(runs_json);

  j["aggregate"] = {
      {"test_r_squared_mean", aggregate_test_mean.r_squared},
      {"test_r_squared_std", aggregate_test_std.r_squared},
      {"test_rmse_mean", aggregate_test_mean.rmse},
      {"test_rmse_std", aggregate_test_std.rmse},
      {"train_r_squared_mean", aggregate_train_mean.r_squared},
      {"train_r_squared_std", aggregate_train_std.r_squared},
      {"train_rmse_mean", aggregate_train_mean.rmse},
      {"train_rmse_std", aggregate_train_std.rmse},
  };
  if (importances) j["importances"] = *importances;
  if (hist2d) {
    nlohmann::json h = {{"edges", hist2d->edges}, {"counts", hist2d->counts}};
    j["hist2d"] = std::move(h);
  }
  return j;
}

void write_per_seed_csv(const RegressionReport& report, const std::string& path) {
  CsvWriter out(path);
  out.write_row({"run", "seed", "n_train", "n_test", "train_r2", "train_rmse", "test_r2",
                 "test_rmse", "test_rmse_scaled", "test_rmse_pct"});
  for (std::size_t i = 0; i < report.runs.size(); ++i) {
    const SeedRun& run = report.runs[i];
    out.write_row({std::to_string(i), std::to_string(run.seed), std::to_string(run.train.n),
                   std::to_string(run.test.n), format_double(run.train.r_squared),
                   format_double(run.train.rmse), format_double(run.test.r_squared),
                   format_double(run.test.rmse),
                   run.test_rmse_scaled ? format_double(*run.test_rmse_scaled) : "",
                   format_double(run.test_rmse_pct)});
  }
}

void write_cv_table_csv(const GridSearchResult& result, const std::string& path) {
  CsvWriter out(path);
  std::vector<std::string> header{"point_index"};
  if (!result.table.empty())
    for (const auto& [name, value] : result.table[0].values) header.push_back(name);
  header.insert(header.end(), {"mean_r2", "mean_rmse", "status"});
  out.write_row(header);

  for (const CvRow& row : result.table) {
    std::vector<std::string> cells{std::to_string(row.point_index)};
    for (const auto& [name, value] : row.values) {
      if (std::holds_alternative<double>(value))
        cells.push_back(format_double(std::get<double>(value)));
      else if (std::holds_alternative<std::string>(value))
        cells.push_back(std::get<std::string>(value));
      else
        cells.push_back("<list>");
    }
    if (row.failed) {
      std::string status = "failed: " + row.failure;
      std::replace(status.begin(), status.end(), ',', ';');  // keep the row rectangular
      cells.insert(cells.end(), {"", "", std::move(status)});
    } else {
      cells.insert(cells.end(),
                   {format_double(row.mean_r2), format_double(row.mean_rmse), "ok"});
    }
    out.write_row(cells);
  }
}

void write_hist2d_csv(const Histogram2d& hist, const std::string& path) {
  CsvWriter out(path);
  out.write_row({"true_left", "true_right", "pred_left", "pred_right", "count"});
  const std::size_t n = hist.counts.size();
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c)
      out.write_row({format_double(hist.edges[r]), format_double(hist.edges[r + 1]),
                     format_double(hist.edges[c]), format_double(hist.edges[c + 1]),
                     std::to_string(hist.counts[r][c])});
}

void write_importances_csv(const std::vector<double>& importances, const BandAxis& axis,
                           const std::string& path) {
  require(importances.size() == kFeatureCount, "importances: expected 116 entries");
  CsvWriter out(path);
  out.write_row({"feature_index", "wavelength_nm_or_LWIR", "importance"});
  for (std::size_t j = 0; j < importances.size(); ++j) {
    const std::string label =
        j < kBandCount ? format_double(axis.wavelength(j)) : std::string("LWIR");
    out.write_row({std::to_string(j), label, format_double(importances[j])});
  }
}

void write_importance_spectrum_csv(const std::vector<double>& importances, const BandAxis& axis,
                                   const std::vector<double>& feature_means,
                                   const std::vector<double>& feature_stds,
                                   const std::string& path) {
  require(importances.size() == kFeatureCount && feature_means.size() == kFeatureCount &&
              feature_stds.size() == kFeatureCount,
          "importance spectrum: expected 116 entries per column");
  CsvWriter out(path);
  out.write_row({"wavelength_nm", "mean", "std", "importance"});
  for (std::size_t j = 0; j < importances.size(); ++j) {
    const std::string label =
        j < kBandCount ? format_double(axis.wavelength(j)) : std::string("LWIR");
    out.write_row({label, format_double(feature_means[j]), format_double(feature_stds[j]),
                   format_double(importances[j])});
  }
}

}  // namespace soilspec

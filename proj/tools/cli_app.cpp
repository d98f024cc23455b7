#include "cli_app.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "soilspec/csv.hpp"
#include "soilspec/dataset.hpp"
#include "soilspec/error.hpp"
#include "soilspec/evaluation.hpp"
#include "soilspec/model_io.hpp"
#include "soilspec/parallel.hpp"
#include "soilspec/preprocess.hpp"
#include "soilspec/rng.hpp"

namespace soilspec {

namespace fs = std::filesystem;

namespace {

// Randomness flows from --seed through named child streams: each run i uses
// base seed + i, then "split" and "model" streams (models derive their own
// from there: "tree", "boost", "mlp-init", "mlp-shuffle", "som-input",
// "som-output"); grid search uses "folds" and "grid"; the generator uses
// "synth".

struct CommonOpts {
  std::string config_path;
  int jobs = 0;
};

nlohmann::json load_config(const std::string& path) {
  if (path.empty()) return nlohmann::json::object();
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "cannot open config file '" + path + "'");
  nlohmann::json j = nlohmann::json::parse(in, nullptr, true);
  require(j.is_object(), "config file must hold a JSON object");
  return j;
}

// Config-file merge: command line wins, then config value, then default.
template <typename T>
void merge(const nlohmann::json& cfg, const CLI::Option* opt, const char* key, T& value) {
  if (opt->count() > 0 || !cfg.contains(key)) return;
  try {
    value = cfg.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error("config key '" + std::string(key) + "': " + e.what());
  }
}

std::map<std::string, HpValue> parse_overrides(const std::vector<std::string>& assignments) {
  std::map<std::string, HpValue> overrides;
  for (const std::string& text : assignments) {
    auto [name, value] = parse_hp_assignment(text);
    overrides[name] = value;
  }
  return overrides;
}

std::size_t resolve_train_count(std::size_t requested, std::size_t n) {
  if (requested != 0) {
    require(requested >= 2 && requested < n,
            "train count " + std::to_string(requested) + " must be in [2, " +
                std::to_string(n - 1) + "]");
    return requested;
  }
  // The field campaign's 1332-point layout splits 641/691; otherwise halve.
  if (n == 1332) return 641;
  require(n >= 4, "dataset too small to split");
  return n / 2;
}

std::vector<std::uint64_t> build_seed_list(std::uint64_t base, std::size_t count) {
  require(count >= 1, "--seeds must be >= 1");
  std::vector<std::uint64_t> seeds(count);
  for (std::size_t i = 0; i < count; ++i) seeds[i] = base + i;
  return seeds;
}

void write_json_file(const nlohmann::json& j, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "cannot open '" + path.string() + "' for writing");
  out << j.dump(2) << '\n';
  require(out.good(), "write failed for '" + path.string() + "'");
}

void feature_stats(const Matrix& x, std::vector<double>& means, std::vector<double>& stds) {
  means = column_means(x);
  stds.assign(x.cols(), 0.0);
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) {
      const double d = x(i, j) - means[j];
      stds[j] += d * d;
    }
  for (double& s : stds) s = std::sqrt(s / static_cast<double>(x.rows()));
}

GridSpec default_grid(const std::string& kind) {
  GridSpec grid;
  grid.kind = kind;
  auto axis = [&](const char* name, std::vector<double> values) {
    std::vector<HpValue> v(values.begin(), values.end());
    grid.axes.emplace_back(name, std::move(v));
  };
  if (kind == "pls") axis("n_components", {5, 10, 20});
  if (kind == "knn") axis("n_neighbors", {3, 6, 9, 12});
  if (kind == "svr") {
    axis("C", {1e3, 2.7e4, 1e5});
    axis("gamma", {1e-4, 1.78e-3, 1e-2});
  }
  if (kind == "rf" || kind == "et") axis("n_estimators", {100, 500, 1000});
  if (kind == "adaboost") axis("learning_rate", {0.3, 1.0, 3.0});
  if (kind == "gb") axis("learning_rate", {0.05, 0.1, 0.3});
  if (kind == "mlp") axis("learning_rate", {1e-4, 1e-3, 1e-2});
  if (kind == "som") axis("alpha_start", {0.1, 0.4});
  return grid;  // linear: single empty point
}

GridSpec load_grid_file(const std::string& path, const std::string& kind) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "cannot open grid file '" + path + "'");
  // ordered parse keeps the axis listing order, which breaks ties.
  nlohmann::ordered_json j = nlohmann::ordered_json::parse(in, nullptr, true);
  require(j.is_object() && j.contains("axes") && j.at("axes").is_object(),
          "grid file must hold {\"axes\": {name: [candidates...]}}");
  GridSpec grid;
  grid.kind = kind;
  for (const auto& [name, values] : j.at("axes").items()) {
    require(values.is_array() && !values.empty(),
            "grid axis '" + name + "' must be a non-empty array");
    std::vector<HpValue> candidates;
    for (const auto& v : values) candidates.push_back(hp_value_from_json(v));
    grid.axes.emplace_back(name, std::move(candidates));
  }
  return grid;
}

// ------------------------------------------------------------- subcommands

int cmd_synth(const nlohmann::json& cfg, CLI::App* cmd, std::size_t n, std::uint64_t seed,
              std::string output, SynthConfig gen) {
  merge(cfg, cmd->get_option("--n"), "n", n);
  merge(cfg, cmd->get_option("--seed"), "seed", seed);
  merge(cfg, cmd->get_option("--output"), "output", output);
  merge(cfg, cmd->get_option("--moisture-min"), "moisture_min", gen.moisture_min);
  merge(cfg, cmd->get_option("--moisture-max"), "moisture_max", gen.moisture_max);
  merge(cfg, cmd->get_option("--band-noise"), "band_noise", gen.band_noise);
  merge(cfg, cmd->get_option("--target-noise"), "target_noise", gen.target_noise);
  merge(cfg, cmd->get_option("--lwir-noise"), "lwir_noise", gen.lwir_noise);

  require(!output.empty(), "synth: --output is required");
  require(n >= 1, "synth: --n must be >= 1");
  gen.n_samples = n;
  Dataset data = generate_synthetic(gen, seed);
  save_csv(data, output);
  std::cout << "wrote " << data.size() << " samples to " << output << "\n";
  return 0;
}

struct TrainOpts {
  std::string input;
  std::string output_dir = ".";
  std::string model = "et";
  std::string preprocess = "none";
  std::uint64_t seed = 1;
  std::size_t n_seeds = 7;
  std::size_t train_count = 0;
  bool resplit_per_seed = true;
  std::size_t pca_components = 20;
  std::size_t hist_bins = 20;
  std::vector<std::string> set;
};

int cmd_train(const nlohmann::json& cfg, CLI::App* cmd, TrainOpts opt) {
  merge(cfg, cmd->get_option("--input"), "input", opt.input);
  merge(cfg, cmd->get_option("--output-dir"), "output_dir", opt.output_dir);
  merge(cfg, cmd->get_option("--model"), "model", opt.model);
  merge(cfg, cmd->get_option("--preprocess"), "preprocess", opt.preprocess);
  merge(cfg, cmd->get_option("--seed"), "seed", opt.seed);
  merge(cfg, cmd->get_option("--seeds"), "seeds", opt.n_seeds);
  merge(cfg, cmd->get_option("--train-count"), "train_count", opt.train_count);
  merge(cfg, cmd->get_option("--resplit-per-seed"), "resplit_per_seed", opt.resplit_per_seed);
  merge(cfg, cmd->get_option("--pca-components"), "pca_components", opt.pca_components);
  merge(cfg, cmd->get_option("--hist-bins"), "hist_bins", opt.hist_bins);
  merge(cfg, cmd->get_option("--set"), "set", opt.set);

  require(!opt.input.empty(), "train: --input is required");
  Dataset data = load_csv(opt.input);

  ExperimentConfig config;
  config.mode = preprocess_mode_from_string(opt.preprocess);
  config.model_kind = opt.model;
  config.hp = HyperparameterSet::for_kind(opt.model, parse_overrides(opt.set));
  config.train_count = resolve_train_count(opt.train_count, data.size());
  config.seeds = build_seed_list(opt.seed, opt.n_seeds);
  config.resplit_per_seed = opt.resplit_per_seed;
  config.pca_components = opt.pca_components;
  config.hist2d_bins = opt.hist_bins;

  ExperimentResult result = run_experiment(config, data);

  const fs::path out(opt.output_dir);
  fs::create_directories(out);
  write_json_file(result.report.to_json(), out / "report.json");
  write_per_seed_csv(result.report, (out / "per_seed_metrics.csv").string());
  save_histogram_csv(target_histogram(data, opt.hist_bins),
                     (out / "target_histogram.csv").string());
  if (result.report.hist2d) write_hist2d_csv(*result.report.hist2d, (out / "hist2d.csv").string());
  for (std::size_t i = 0; i < result.models.size(); ++i) {
    save_model(*result.models[i], out / ("model_" + std::to_string(i) + ".json"));
    write_json_file(result.preprocessors[i].to_json(),
                    out / ("preprocessor_" + std::to_string(i) + ".json"));
  }
  if (result.report.importances) {
    write_importances_csv(*result.report.importances, data.band_axis,
                          (out / "importances.csv").string());
    auto [features, targets] = assemble_features(data);
    std::vector<double> means, stds;
    feature_stats(features, means, stds);
    write_importance_spectrum_csv(*result.report.importances, data.band_axis, means, stds,
                                  (out / "importance_spectrum.csv").string());
  }

  const RegressionReport& rep = result.report;
  std::cout << opt.model << " (" << opt.preprocess << "): test R^2 "
            << rep.aggregate_test_mean.r_squared << " +/- " << rep.aggregate_test_std.r_squared
            << ", test RMSE " << rep.aggregate_test_mean.rmse << " +/- "
            << rep.aggregate_test_std.rmse << " over " << rep.runs.size() << " seeds\n";
  return 0;
}

struct GridOpts {
  std::string input;
  std::string output_dir = ".";
  std::string model = "et";
  std::string preprocess = "none";
  std::string grid_file;
  std::uint64_t seed = 1;
  std::size_t folds = 10;
  std::size_t train_count = 0;
  std::size_t pca_components = 20;
};

int cmd_grid_search(const nlohmann::json& cfg, CLI::App* cmd, GridOpts opt) {
  merge(cfg, cmd->get_option("--input"), "input", opt.input);
  merge(cfg, cmd->get_option("--output-dir"), "output_dir", opt.output_dir);
  merge(cfg, cmd->get_option("--model"), "model", opt.model);
  merge(cfg, cmd->get_option("--preprocess"), "preprocess", opt.preprocess);
  merge(cfg, cmd->get_option("--grid"), "grid", opt.grid_file);
  merge(cfg, cmd->get_option("--seed"), "seed", opt.seed);
  merge(cfg, cmd->get_option("--folds"), "folds", opt.folds);
  merge(cfg, cmd->get_option("--train-count"), "train_count", opt.train_count);
  merge(cfg, cmd->get_option("--pca-components"), "pca_components", opt.pca_components);

  require(!opt.input.empty(), "grid-search: --input is required");
  Dataset data = load_csv(opt.input);
  const std::size_t train_count = resolve_train_count(opt.train_count, data.size());

  GridSpec grid = opt.grid_file.empty() ? default_grid(opt.model)
                                        : load_grid_file(opt.grid_file, opt.model);
  grid.point_count();  // validates axes eagerly

  // The held-out test subset never enters the search.
  SplitSpec split{train_count, data.size() - train_count, derive_seed(opt.seed, "split")};
  auto [train, test] = split_train_test(data, split);
  auto [train_x, train_y] = assemble_features(train);
  auto [test_x, test_y] = assemble_features(test);
  PreprocessedData pre = apply_preprocessing(preprocess_mode_from_string(opt.preprocess),
                                             train_x, train_y, test_x, test_y,
                                             opt.pca_components);

  GridSearchResult result =
      grid_search(pre.train_features, pre.train_targets, grid, opt.folds, opt.seed);

  const fs::path out(opt.output_dir);
  fs::create_directories(out);
  write_cv_table_csv(result, (out / "cv_table.csv").string());
  nlohmann::json best = {{"model", opt.model},
                         {"best_index", result.best_index},
                         {"hyperparameters", result.best.to_json()},
                         {"mean_r2", result.table[result.best_index].mean_r2},
                         {"mean_rmse", result.table[result.best_index].mean_rmse},
                         {"fold_sizes", result.fold_sizes}};
  write_json_file(best, out / "best_hyperparameters.json");

  std::cout << "best grid point " << result.best_index << " (mean R^2 "
            << result.table[result.best_index].mean_r2 << ") written to "
            << (out / "best_hyperparameters.json").string() << "\n";
  return 0;
}

int cmd_importance(const nlohmann::json& cfg, CLI::App* cmd, std::string model_file,
                   std::string input, std::string output_dir) {
  merge(cfg, cmd->get_option("--model-file"), "model_file", model_file);
  merge(cfg, cmd->get_option("--input"), "input", input);
  merge(cfg, cmd->get_option("--output-dir"), "output_dir", output_dir);

  require(!model_file.empty(), "importance: --model-file is required");
  require(!input.empty(), "importance: --input is required");
  auto model = load_model(model_file);
  require(model->has_feature_importance(),
          "model kind '" + model->kind() + "' has no importances");

  Dataset data = load_csv(input);
  std::vector<double> importances = model->feature_importance();
  require(importances.size() == kFeatureCount,
          "importance: model was not trained on the full-band feature layout");

  auto [features, targets] = assemble_features(data);
  std::vector<double> means, stds;
  feature_stats(features, means, stds);

  const fs::path out(output_dir);
  fs::create_directories(out);
  write_importances_csv(importances, data.band_axis, (out / "importances.csv").string());
  write_importance_spectrum_csv(importances, data.band_axis, means, stds,
                                (out / "importance_spectrum.csv").string());
  std::cout << "wrote importances for " << model->kind() << " to " << out.string() << "\n";
  return 0;
}

int cmd_evaluate(const nlohmann::json& cfg, CLI::App* cmd, std::string model_file,
                 std::string preprocessor_file, std::string input, std::string output_dir) {
  merge(cfg, cmd->get_option("--model-file"), "model_file", model_file);
  merge(cfg, cmd->get_option("--preprocessor-file"), "preprocessor_file", preprocessor_file);
  merge(cfg, cmd->get_option("--input"), "input", input);
  merge(cfg, cmd->get_option("--output-dir"), "output_dir", output_dir);

  require(!model_file.empty(), "evaluate: --model-file is required");
  require(!preprocessor_file.empty(), "evaluate: --preprocessor-file is required");
  require(!input.empty(), "evaluate: --input is required");

  auto model = load_model(model_file);
  std::ifstream pin(preprocessor_file, std::ios::binary);
  require(pin.good(), "cannot open '" + preprocessor_file + "'");
  PreprocessorState state = PreprocessorState::from_json(nlohmann::json::parse(pin));

  Dataset data = load_csv(input);
  auto [features, targets] = assemble_features(data);
  Matrix model_x = transform_features(state, features);
  std::vector<double> pred = model->predict(model_x);

  nlohmann::json metrics;
  metrics["n"] = targets.size();
  metrics["model"] = model->kind();
  metrics["preprocess"] = to_string(state.mode);
  if (state.mode == PreprocessMode::scaling) {
    const std::vector<double> scaled_targets = transform_targets(state, targets);
    metrics["rmse_scaled"] = rmse(scaled_targets, pred);
    pred = minmax_inverse_targets(*state.scaler, pred);
  }
  metrics["r_squared"] = r_squared(targets, pred);
  metrics["rmse"] = rmse(targets, pred);
  metrics["rmse_pct"] = metrics["rmse"];

  const fs::path out(output_dir);
  fs::create_directories(out);
  write_json_file(metrics, out / "metrics.json");
  std::cout << "R^2 " << metrics["r_squared"].get<double>() << ", RMSE "
            << metrics["rmse"].get<double>() << " on " << targets.size() << " samples\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Soil-moisture regression toolkit for VNIR/LWIR spectra"};
  app.require_subcommand(1);

  CommonOpts common;
  app.add_option("--config", common.config_path, "JSON config file (flags override it)");
  app.add_option("--jobs", common.jobs, "worker thread cap (0 = hardware)")
      ->capture_default_str();

  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset CSV");
  std::size_t synth_n = 1332;
  std::uint64_t synth_seed = 1;
  std::string synth_output;
  SynthConfig gen;
  synth->add_option("--n", synth_n, "sample count")->capture_default_str();
  synth->add_option("--seed", synth_seed, "generator seed")->capture_default_str();
  synth->add_option("--output", synth_output, "output CSV path");
  synth->add_option("--moisture-min", gen.moisture_min, "lowest soil moisture (percent)")
      ->capture_default_str();
  synth->add_option("--moisture-max", gen.moisture_max, "highest soil moisture (percent)")
      ->capture_default_str();
  synth->add_option("--band-noise", gen.band_noise, "reflectance noise sd")
      ->capture_default_str();
  synth->add_option("--target-noise", gen.target_noise, "soil-moisture noise sd (percent)")
      ->capture_default_str();
  synth->add_option("--lwir-noise", gen.lwir_noise, "temperature noise sd (deg C)")
      ->capture_default_str();

  auto* train = app.add_subcommand("train", "run the seeded multi-run training protocol");
  TrainOpts topt;
  train->add_option("--input", topt.input, "dataset CSV");
  train->add_option("--output-dir", topt.output_dir, "output directory")->capture_default_str();
  train->add_option("--model", topt.model, "model kind (linear, pls, rf, et, adaboost, gb, knn, svr, mlp, som)")
      ->capture_default_str();
  train->add_option("--preprocess", topt.preprocess, "none, pca or scaling")
      ->capture_default_str();
  train->add_option("--seed", topt.seed, "base seed; run i uses seed + i")->capture_default_str();
  train->add_option("--seeds", topt.n_seeds, "number of independent runs")->capture_default_str();
  train->add_option("--train-count", topt.train_count,
                    "training rows (0 = 641 on the 1332-point layout, else half)")
      ->capture_default_str();
  train->add_flag("--resplit-per-seed,!--fixed-split", topt.resplit_per_seed,
                  "draw a fresh train/test split per run")
      ->capture_default_str();
  train->add_option("--pca-components", topt.pca_components, "components under --preprocess pca")
      ->capture_default_str();
  train->add_option("--hist-bins", topt.hist_bins, "histogram bin count")->capture_default_str();
  train->add_option("--set", topt.set, "hyperparameter override name=value (repeatable)");

  auto* grid = app.add_subcommand("grid-search", "cross-validated hyperparameter search");
  GridOpts gopt;
  grid->add_option("--input", gopt.input, "dataset CSV");
  grid->add_option("--output-dir", gopt.output_dir, "output directory")->capture_default_str();
  grid->add_option("--model", gopt.model, "model kind")->capture_default_str();
  grid->add_option("--preprocess", gopt.preprocess, "none, pca or scaling")
      ->capture_default_str();
  grid->add_option("--grid", gopt.grid_file, "grid JSON ({\"axes\": {name: [values]}})");
  grid->add_option("--seed", gopt.seed, "search seed")->capture_default_str();
  grid->add_option("--folds", gopt.folds, "cross-validation folds")->capture_default_str();
  grid->add_option("--train-count", gopt.train_count, "training rows (0 = auto)")
      ->capture_default_str();
  grid->add_option("--pca-components", gopt.pca_components, "components under pca")
      ->capture_default_str();

  auto* imp = app.add_subcommand("importance", "export ensemble feature importances");
  std::string imp_model, imp_input, imp_out = ".";
  imp->add_option("--model-file", imp_model, "fitted model JSON");
  imp->add_option("--input", imp_input, "dataset CSV for the spectrum statistics");
  imp->add_option("--output-dir", imp_out, "output directory")->capture_default_str();

  auto* eval = app.add_subcommand("evaluate", "score a fitted model on a CSV");
  std::string ev_model, ev_pre, ev_input, ev_out = ".";
  eval->add_option("--model-file", ev_model, "fitted model JSON");
  eval->add_option("--preprocessor-file", ev_pre, "fitted preprocessor JSON");
  eval->add_option("--input", ev_input, "dataset CSV");
  eval->add_option("--output-dir", ev_out, "output directory")->capture_default_str();

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("soilspec");
  for (const std::string& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());

    nlohmann::json cfg = load_config(common.config_path);
    merge(cfg, app.get_option("--jobs"), "jobs", common.jobs);
    require(common.jobs >= 0, "--jobs must be >= 0");
    set_max_threads(common.jobs);

    if (synth->parsed()) return cmd_synth(cfg, synth, synth_n, synth_seed, synth_output, gen);
    if (train->parsed()) return cmd_train(cfg, train, topt);
    if (grid->parsed()) return cmd_grid_search(cfg, grid, gopt);
    if (imp->parsed()) return cmd_importance(cfg, imp, imp_model, imp_input, imp_out);
    if (eval->parsed()) return cmd_evaluate(cfg, eval, ev_model, ev_pre, ev_input, ev_out);
    throw Error("no command selected");
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace soilspec

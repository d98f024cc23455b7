#include "soilspec/model_io.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "soilspec/boosting.hpp"
#include "soilspec/error.hpp"
#include "soilspec/forest.hpp"
#include "soilspec/knn.hpp"
#include "soilspec/linear.hpp"
#include "soilspec/mlp.hpp"
#include "soilspec/pls.hpp"
#include "soilspec/som.hpp"
#include "soilspec/svr.hpp"

namespace soilspec {

namespace {
constexpr const char* kFormatTag = "soilspec-model";
constexpr int kFormatVersion = 1;
}  // namespace

std::unique_ptr<Regressor> make_regressor(const std::string& kind, const HyperparameterSet& hp,
                                          std::uint64_t seed) {
  require(hp.kind() == kind, "make_regressor: hyperparameter kind mismatch");
  if (kind == "linear") return std::make_unique<LinearRegressor>(hp);
  if (kind == "pls") return std::make_unique<PlsRegressor>(hp);
  if (kind == "knn") return std::make_unique<KnnRegressor>(hp);
  if (kind == "svr") return std::make_unique<SvrRegressor>(hp);
  if (kind == "mlp") return std::make_unique<MlpRegressor>(hp, seed);
  if (kind == "rf" || kind == "et") return std::make_unique<ForestRegressor>(kind, hp, seed);
  if (kind == "adaboost") return std::make_unique<AdaBoostRegressor>(hp, seed);
  if (kind == "gb") return std::make_unique<GradientBoostingRegressor>(hp, seed);
  if (kind == "som") return std::make_unique<SomRegressor>(hp, seed);
  throw Error("make_regressor: unknown model kind '" + kind + "'");
}

nlohmann::json model_to_json(const Regressor& model) {
  return {{"format", kFormatTag},
          {"version", kFormatVersion},
          {"kind", model.kind()},
          {"hyperparameters", model.hyperparameters().to_json()},
          {"params", model.params_to_json()}};
}

std::unique_ptr<Regressor> model_from_json(const nlohmann::json& j, std::uint64_t seed) {
  require(j.is_object(), "model: expected a JSON object");
  require(j.value("format", "") == kFormatTag, "model: missing or wrong format tag");
  require(j.value("version", 0) == kFormatVersion,
          "model: unsupported container version " + std::to_string(j.value("version", 0)));
  const std::string kind = j.at("kind").get<std::string>();
  HyperparameterSet hp = HyperparameterSet::from_json(kind, j.at("hyperparameters"));
  auto model = make_regressor(kind, hp, seed);
  model->params_from_json(j.at("params"));
  return model;
}

void save_model(const Regressor& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "cannot open '" + path.string() + "' for writing");
  out << model_to_json(model).dump(2) << '\n';
  require(out.good(), "write failed for '" + path.string() + "'");
}

std::unique_ptr<Regressor> load_model(const std::filesystem::path& path, std::uint64_t seed) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "cannot open '" + path.string() + "'");
  nlohmann::json j = nlohmann::json::parse(in, nullptr, true);
  return model_from_json(j, seed);
}

}  // namespace soilspec

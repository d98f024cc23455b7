#include "soilspec/hyperparameters.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "soilspec/error.hpp"

namespace soilspec {

namespace {

enum class HpType { number, integer, text, list };

struct ParamSpec {
  const char* name;
  HpType type;
  HpValue def;
  double min = -std::numeric_limits<double>::infinity();
  double max = std::numeric_limits<double>::infinity();
  std::vector<std::string> allowed;  // for text params
};

// Defaults follow the tuned baseline setup: where a published value exists
// it is the default here.
const std::map<std::string, std::vector<ParamSpec>>& schemas() {
  static const std::map<std::string, std::vector<ParamSpec>> s = {
      {"linear", {}},
      {"pls",
       {{"n_components", HpType::integer, 10.0, 1, 10000},
        {"max_iter", HpType::integer, 100.0, 1, 1000000},
        {"tol", HpType::number, 1e-7, 0.0, 1.0}}},
      {"knn",
       {{"n_neighbors", HpType::integer, 6.0, 1, 1000000},
        {"weights", HpType::text, std::string("distance"), 0, 0, {"distance", "uniform"}},
        {"leaf_size", HpType::integer, 1.0, 1, 1000000}}},
      {"svr",
       {{"C", HpType::number, 26827.0, 1e-12, 1e12},
        {"gamma", HpType::number, 0.00178, 1e-12, 1e12},
        {"epsilon", HpType::number, 0.1, 0.0, 1e12},
        {"tol", HpType::number, 1e-3, 1e-12, 1.0},
        {"max_iter", HpType::integer, 10000000.0, 1, 1e12}}},
      {"mlp",
       {{"hidden_layers", HpType::list, std::vector<double>{64, 128, 64, 32}},
        {"epochs", HpType::integer, 70.0, 1, 1000000},
        {"batch_size", HpType::integer, 8.0, 1, 1000000},
        {"learning_rate", HpType::number, 1e-3, 1e-12, 10.0}}},
      {"rf",
       {{"n_estimators", HpType::integer, 1000.0, 1, 1000000},
        {"max_depth", HpType::integer, 0.0, 0, 1000000},  // 0 = unbounded
        {"min_samples_split", HpType::integer, 2.0, 2, 1000000},
        {"max_features", HpType::integer, 0.0, 0, 1000000},  // 0 = ceil(d/3)
        {"bootstrap", HpType::integer, 1.0, 0, 1}}},
      {"et",
       {{"n_estimators", HpType::integer, 1000.0, 1, 1000000},
        {"max_depth", HpType::integer, 0.0, 0, 1000000},
        {"min_samples_split", HpType::integer, 2.0, 2, 1000000},
        {"max_features", HpType::integer, 0.0, 0, 1000000}}},
      {"adaboost",
       {{"n_estimators", HpType::integer, 150.0, 1, 1000000},
        {"learning_rate", HpType::number, 3.0, 1e-12, 100.0},
        {"loss", HpType::text, std::string("linear"), 0, 0, {"linear"}},
        {"max_depth", HpType::integer, 3.0, 1, 1000000}}},
      {"gb",
       {{"n_estimators", HpType::integer, 1000.0, 1, 1000000},
        {"learning_rate", HpType::number, 0.1, 0.0, 100.0},
        {"loss", HpType::text, std::string("huber"), 0, 0, {"huber", "squared_error"}},
        {"max_depth", HpType::integer, 2.0, 1, 1000000},
        {"alpha", HpType::number, 0.9, 0.0, 1.0}}},
      {"som",
       {{"rows", HpType::integer, 30.0, 1, 10000},
        {"cols", HpType::integer, 70.0, 1, 10000},
        {"n_iter_input", HpType::integer, 5000.0, 1, 100000000},
        {"n_iter_output", HpType::integer, 8000.0, 1, 100000000},
        {"alpha_start", HpType::number, 0.4, 1e-12, 10.0},
        {"alpha_end", HpType::number, 0.005, 1e-12, 10.0},
        {"radius_start", HpType::number, 0.0, 0.0, 1e6},  // 0 = max(rows, cols)/2
        {"radius_end", HpType::number, 1.0, 1e-12, 1e6}}},
  };
  return s;
}

const std::vector<ParamSpec>& schema_for(const std::string& kind) {
  auto it = schemas().find(kind);
  require(it != schemas().end(), "unknown model kind '" + kind + "'");
  return it->second;
}

const ParamSpec* find_param(const std::vector<ParamSpec>& schema, const std::string& name) {
  for (const auto& p : schema)
    if (name == p.name) return &p;
  return nullptr;
}

void validate(const std::string& kind, const ParamSpec& spec, const HpValue& value) {
  auto fail = [&](const std::string& why) {
    throw Error("hyperparameter '" + std::string(spec.name) + "' for model '" + kind + "': " + why);
  };
  switch (spec.type) {
    case HpType::number:
    case HpType::integer: {
      if (!std::holds_alternative<double>(value)) fail("expected a number");
      double v = std::get<double>(value);
      if (!std::isfinite(v)) fail("must be finite");
      if (spec.type == HpType::integer && v != std::floor(v)) fail("must be an integer");
      if (v < spec.min || v > spec.max) {
        std::ostringstream msg;
        msg << "value " << v << " outside [" << spec.min << ", " << spec.max << "]";
        fail(msg.str());
      }
      break;
    }
    case HpType::text: {
      if (!std::holds_alternative<std::string>(value)) fail("expected a string");
      const std::string& v = std::get<std::string>(value);
      for (const auto& a : spec.allowed)
        if (v == a) return;
      fail("value '" + v + "' not allowed");
      break;
    }
    case HpType::list: {
      if (!std::holds_alternative<std::vector<double>>(value)) fail("expected a list of numbers");
      if (std::get<std::vector<double>>(value).empty()) fail("list must not be empty");
      for (double v : std::get<std::vector<double>>(value))
        if (!std::isfinite(v) || v < 1 || v != std::floor(v)) fail("list entries must be positive integers");
      break;
    }
  }
}

}  // namespace

HyperparameterSet HyperparameterSet::defaults(const std::string& kind) {
  const auto& schema = schema_for(kind);
  HyperparameterSet hp;
  hp.kind_ = kind;
  for (const auto& p : schema) hp.values_[p.name] = p.def;
  return hp;
}

HyperparameterSet HyperparameterSet::for_kind(const std::string& kind,
                                              const std::map<std::string, HpValue>& overrides) {
  HyperparameterSet hp = defaults(kind);
  for (const auto& [name, value] : overrides) hp.set(name, value);
  return hp;
}

void HyperparameterSet::set(const std::string& name, const HpValue& value) {
  const auto& schema = schema_for(kind_);
  const ParamSpec* spec = find_param(schema, name);
  require(spec != nullptr, "unknown hyperparameter '" + name + "' for model '" + kind_ + "'");
  validate(kind_, *spec, value);
  values_[name] = value;
}

double HyperparameterSet::get_double(const std::string& name) const {
  auto it = values_.find(name);
  require(it != values_.end(), "hyperparameter '" + name + "' not set");
  require(std::holds_alternative<double>(it->second), "hyperparameter '" + name + "' is not numeric");
  return std::get<double>(it->second);
}

long HyperparameterSet::get_int(const std::string& name) const {
  return static_cast<long>(get_double(name));
}

std::string HyperparameterSet::get_string(const std::string& name) const {
  auto it = values_.find(name);
  require(it != values_.end(), "hyperparameter '" + name + "' not set");
  require(std::holds_alternative<std::string>(it->second),
          "hyperparameter '" + name + "' is not a string");
  return std::get<std::string>(it->second);
}

std::vector<double> HyperparameterSet::get_list(const std::string& name) const {
  auto it = values_.find(name);
  require(it != values_.end(), "hyperparameter '" + name + "' not set");
  require(std::holds_alternative<std::vector<double>>(it->second),
          "hyperparameter '" + name + "' is not a list");
  return std::get<std::vector<double>>(it->second);
}

nlohmann::json HyperparameterSet::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [name, value] : values_) j[name] = hp_value_to_json(value);
  return j;
}

HyperparameterSet HyperparameterSet::from_json(const std::string& kind, const nlohmann::json& j) {
  std::map<std::string, HpValue> overrides;
  require(j.is_object(), "hyperparameters: expected a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it)
    overrides[it.key()] = hp_value_from_json(it.value());
  return for_kind(kind, overrides);
}

const std::vector<std::string>& model_kinds() {
  static const std::vector<std::string> kinds = {"linear", "pls",      "rf",  "et",  "adaboost",
                                                 "gb",     "knn",      "svr", "mlp", "som"};
  return kinds;
}

bool is_ensemble_kind(const std::string& kind) {
  return kind == "rf" || kind == "et" || kind == "adaboost" || kind == "gb";
}

HpValue hp_value_from_json(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_boolean()) return j.get<bool>() ? 1.0 : 0.0;
  if (j.is_string()) return j.get<std::string>();
  if (j.is_array()) return j.get<std::vector<double>>();
  throw Error("hyperparameter value must be a number, string or list");
}

nlohmann::json hp_value_to_json(const HpValue& v) {
  if (std::holds_alternative<double>(v)) return std::get<double>(v);
  if (std::holds_alternative<std::string>(v)) return std::get<std::string>(v);
  return std::get<std::vector<double>>(v);
}

std::pair<std::string, HpValue> parse_hp_assignment(const std::string& text) {
  auto eq = text.find('=');
  require(eq != std::string::npos && eq > 0, "expected name=value, got '" + text + "'");
  std::string name = text.substr(0, eq);
  std::string raw = text.substr(eq + 1);
  require(!raw.empty(), "empty value in '" + text + "'");

  if (raw.front() == '[') {
    auto j = nlohmann::json::parse(raw, nullptr, false);
    require(!j.is_discarded() && j.is_array(), "malformed list in '" + text + "'");
    return {name, j.get<std::vector<double>>()};
  }
  double v = 0.0;
  auto res = std::from_chars(raw.data(), raw.data() + raw.size(), v);
  if (res.ec == std::errc() && res.ptr == raw.data() + raw.size()) return {name, v};
  return {name, raw};
}

}  // namespace soilspec

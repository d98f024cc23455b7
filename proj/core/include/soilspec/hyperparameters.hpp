#pragma once

#include <map>
#include <nlohmann/json.hpp>
#include <string>
#include <variant>
#include <vector>

namespace soilspec {

using HpValue = std::variant<double, std::string, std::vector<double>>;

/// Validated hyperparameter map. Unknown keys and out-of-range values are
/// rejected at construction time against the per-model schema.
class HyperparameterSet {
public:
  /// Empty set with no kind; usable only after assignment from a factory.
  HyperparameterSet() = default;

  /// Schema defaults for a model kind (see model_kinds()).
  static HyperparameterSet defaults(const std::string& kind);

  /// Defaults overridden by the given entries, all validated.
  static HyperparameterSet for_kind(const std::string& kind,
                                    const std::map<std::string, HpValue>& overrides);

  const std::string& kind() const { return kind_; }

  bool has(const std::string& name) const { return values_.count(name) != 0; }
  double get_double(const std::string& name) const;
  long get_int(const std::string& name) const;
  std::string get_string(const std::string& name) const;
  std::vector<double> get_list(const std::string& name) const;

  /// Re-validates and replaces one value.
  void set(const std::string& name, const HpValue& value);

  const std::map<std::string, HpValue>& values() const { return values_; }

  nlohmann::json to_json() const;
  static HyperparameterSet from_json(const std::string& kind, const nlohmann::json& j);

private:
  std::string kind_;
  std::map<std::string, HpValue> values_;
};

/// The ten supported model kinds, in reporting order.
const std::vector<std::string>& model_kinds();
bool is_ensemble_kind(const std::string& kind);

HpValue hp_value_from_json(const nlohmann::json& j);
nlohmann::json hp_value_to_json(const HpValue& v);

/// Parses "name=value" (value: number, string, or [a,b,c] list).
std::pair<std::string, HpValue> parse_hp_assignment(const std::string& text);

}  // namespace soilspec

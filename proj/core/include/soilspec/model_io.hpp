#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>

#include <nlohmann/json_fwd.hpp>

#include "soilspec/regressor.hpp"

namespace soilspec {

// Versioned JSON container around any fitted model: kind tag, the full
// hyperparameter set, and the learned parameters.
nlohmann::json model_to_json(const Regressor& model);
std::unique_ptr<Regressor> model_from_json(const nlohmann::json& j, std::uint64_t seed = 0);

void save_model(const Regressor& model, const std::filesystem::path& path);
std::unique_ptr<Regressor> load_model(const std::filesystem::path& path, std::uint64_t seed = 0);

}  // namespace soilspec

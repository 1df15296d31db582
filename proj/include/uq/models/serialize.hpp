#pragma once

#include <string>
#include <variant>

#include "uq/models/ensemble.hpp"
#include "uq/models/mlp.hpp"
#include "uq/models/priornet.hpp"
#include "uq/models/stumps.hpp"

#include "json.hpp"

namespace uq {

using AnyModel = std::variant<MlpModel, EnsembleModel, PriorNetModel, StumpEnsembleModel>;

// Versioned model documents: architecture, flat weight arrays, seeds and a
// config echo ("model-v1").
nlohmann::json model_to_json(const MlpModel& model);
nlohmann::json model_to_json(const EnsembleModel& model);
nlohmann::json model_to_json(const PriorNetModel& model);
nlohmann::json model_to_json(const StumpEnsembleModel& model);
nlohmann::json model_to_json(const AnyModel& model);

AnyModel model_from_json(const nlohmann::json& j);

std::string model_kind(const AnyModel& model);

void save_model(const AnyModel& model, const std::string& path);
AnyModel load_model(const std::string& path);

nlohmann::json mlp_config_to_json(const MlpConfig& config);
MlpConfig mlp_config_from_json(const nlohmann::json& j);
nlohmann::json priornet_config_to_json(const PriorNetConfig& config);
PriorNetConfig priornet_config_from_json(const nlohmann::json& j);

}  // namespace uq

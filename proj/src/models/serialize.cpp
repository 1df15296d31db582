#include "uq/models/serialize.hpp"

#include <fstream>
#include <stdexcept>

namespace uq {

namespace {

nlohmann::json layers_to_json(const detail::FeedForward& net) {
  nlohmann::json layers = nlohmann::json::array();
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    std::vector<double> w(net.W[l].size());
    // row-major flattening
    for (Eigen::Index r = 0; r < net.W[l].rows(); ++r)
      for (Eigen::Index c = 0; c < net.W[l].cols(); ++c)
        w[static_cast<std::size_t>(r * net.W[l].cols() + c)] = net.W[l](r, c);
    layers.push_back({{"rows", net.W[l].rows()},
                      {"cols", net.W[l].cols()},
                      {"w", w},
                      {"b", std::vector<double>(net.b[l].data(), net.b[l].data() + net.b[l].size())}});
  }
  return layers;
}

std::pair<std::vector<Eigen::MatrixXd>, std::vector<Eigen::VectorXd>> layers_from_json(
    const nlohmann::json& layers) {
  std::vector<Eigen::MatrixXd> W;
  std::vector<Eigen::VectorXd> b;
  for (const auto& layer : layers) {
    const auto rows = layer.at("rows").get<Eigen::Index>();
    const auto cols = layer.at("cols").get<Eigen::Index>();
    const auto w = layer.at("w").get<std::vector<double>>();
    const auto bias = layer.at("b").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(w.size()) != rows * cols ||
        static_cast<Eigen::Index>(bias.size()) != rows)
      throw std::invalid_argument("model_from_json: layer size mismatch");
    Eigen::MatrixXd wm(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c)
        wm(r, c) = w[static_cast<std::size_t>(r * cols + c)];
    W.push_back(std::move(wm));
    b.emplace_back(Eigen::Map<const Eigen::VectorXd>(bias.data(),
                                                     static_cast<Eigen::Index>(bias.size())));
  }
  return {std::move(W), std::move(b)};
}

}  // namespace

nlohmann::json mlp_config_to_json(const MlpConfig& config) {
  return {{"layer_sizes", config.layer_sizes},
          {"dropout_rate", config.dropout_rate},
          {"use_skip_connections", config.use_skip_connections},
          {"learning_rate", config.learning_rate},
          {"epochs", config.epochs},
          {"batch_size", config.batch_size},
          {"seed", config.seed}};
}

MlpConfig mlp_config_from_json(const nlohmann::json& j) {
  MlpConfig config;
  if (j.contains("layer_sizes")) config.layer_sizes = j.at("layer_sizes").get<std::vector<int>>();
  config.dropout_rate = j.value("dropout_rate", config.dropout_rate);
  config.use_skip_connections = j.value("use_skip_connections", config.use_skip_connections);
  config.learning_rate = j.value("learning_rate", config.learning_rate);
  config.epochs = j.value("epochs", config.epochs);
  config.batch_size = j.value("batch_size", config.batch_size);
  config.seed = j.value("seed", config.seed);
  config.validate();
  return config;
}

nlohmann::json priornet_config_to_json(const PriorNetConfig& config) {
  return {{"layer_sizes", config.layer_sizes},
          {"alpha_in_target", config.alpha_in_target},
          {"alpha_out_target", config.alpha_out_target},
          {"lambda_weight", config.lambda_weight},
          {"learning_rate", config.learning_rate},
          {"epochs", config.epochs},
          {"seed", config.seed}};
}

PriorNetConfig priornet_config_from_json(const nlohmann::json& j) {
  PriorNetConfig config;
  if (j.contains("layer_sizes")) config.layer_sizes = j.at("layer_sizes").get<std::vector<int>>();
  config.alpha_in_target = j.value("alpha_in_target", config.alpha_in_target);
  config.alpha_out_target = j.value("alpha_out_target", config.alpha_out_target);
  config.lambda_weight = j.value("lambda_weight", config.lambda_weight);
  config.learning_rate = j.value("learning_rate", config.learning_rate);
  config.epochs = j.value("epochs", config.epochs);
  config.seed = j.value("seed", config.seed);
  config.validate();
  return config;
}

nlohmann::json model_to_json(const MlpModel& model) {
  return {{"schema", "model-v1"},
          {"kind", "mlp"},
          {"config", mlp_config_to_json(model.config())},
          {"layers", layers_to_json(model.net())}};
}

nlohmann::json model_to_json(const EnsembleModel& model) {
  nlohmann::json members = nlohmann::json::array();
  for (const MlpModel& member : model.members) members.push_back(model_to_json(member));
  return {{"schema", "model-v1"},
          {"kind", "ensemble"},
          {"member_seeds", model.member_seeds},
          {"members", members}};
}

nlohmann::json model_to_json(const PriorNetModel& model) {
  return {{"schema", "model-v1"},
          {"kind", "priornet"},
          {"config", priornet_config_to_json(model.config())},
          {"layers", layers_to_json(model.net())}};
}

nlohmann::json model_to_json(const StumpEnsembleModel& model) {
  nlohmann::json stumps = nlohmann::json::array();
  for (const Stump& s : model.stumps)
    stumps.push_back({{"feature", s.feature},
                      {"threshold", s.threshold},
                      {"left", s.left_value},
                      {"right", s.right_value}});
  return {{"schema", "model-v1"},
          {"kind", "stumps"},
          {"prior_logit", model.prior_logit},
          {"learning_rate", model.learning_rate},
          {"stumps", stumps}};
}

nlohmann::json model_to_json(const AnyModel& model) {
  return std::visit([](const auto& m) { return model_to_json(m); }, model);
}

AnyModel model_from_json(const nlohmann::json& j) {
  if (j.value("schema", "") != "model-v1")
    throw std::invalid_argument("model_from_json: unsupported schema");
  const std::string kind = j.value("kind", "");
  if (kind == "mlp") {
    auto [W, b] = layers_from_json(j.at("layers"));
    return MlpModel::from_weights(mlp_config_from_json(j.at("config")), std::move(W),
                                  std::move(b));
  }
  if (kind == "priornet") {
    auto [W, b] = layers_from_json(j.at("layers"));
    return PriorNetModel::from_weights(priornet_config_from_json(j.at("config")), std::move(W),
                                       std::move(b));
  }
  if (kind == "ensemble") {
    EnsembleModel ensemble;
    ensemble.member_seeds = j.at("member_seeds").get<std::vector<std::uint64_t>>();
    for (const auto& member : j.at("members")) {
      AnyModel inner = model_from_json(member);
      if (!std::holds_alternative<MlpModel>(inner))
        throw std::invalid_argument("model_from_json: ensemble members must be MLPs");
      ensemble.members.push_back(std::get<MlpModel>(std::move(inner)));
    }
    if (ensemble.members.empty())
      throw std::invalid_argument("model_from_json: empty ensemble");
    return ensemble;
  }
  if (kind == "stumps") {
    StumpEnsembleModel model;
    model.prior_logit = j.at("prior_logit").get<double>();
    model.learning_rate = j.at("learning_rate").get<double>();
    for (const auto& s : j.at("stumps"))
      model.stumps.push_back({s.at("feature").get<int>(), s.at("threshold").get<double>(),
                              s.at("left").get<double>(), s.at("right").get<double>()});
    return model;
  }
  throw std::invalid_argument("model_from_json: unknown kind '" + kind + "'");
}

std::string model_kind(const AnyModel& model) {
  if (std::holds_alternative<MlpModel>(model)) return "mlp";
  if (std::holds_alternative<EnsembleModel>(model)) return "ensemble";
  if (std::holds_alternative<PriorNetModel>(model)) return "priornet";
  return "stumps";
}

void save_model(const AnyModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_model: cannot open " + path);
  out << model_to_json(model).dump(2) << '\n';
  if (!out) throw std::runtime_error("save_model: write failed for " + path);
}

AnyModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_model: cannot open " + path);
  nlohmann::json j;
  in >> j;
  return model_from_json(j);
}

}  // namespace uq

// Command-line front end: dataset generation, model training, calibration,
// experiment runs, experiment matrices, and sweep-curve export.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "uq/calibration.hpp"
#include "uq/dataset.hpp"
#include "uq/harness.hpp"
#include "uq/models/attack.hpp"
#include "uq/models/ensemble.hpp"
#include "uq/models/serialize.hpp"
#include "uq/models/stumps.hpp"

namespace fs = std::filesystem;

namespace {

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  nlohmann::json j;
  in >> j;
  return j;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path);
}

int run_stage(const std::string& stage, const std::function<void()>& body) {
  try {
    body();
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "uqcli " << stage << ": " << e.what() << '\n';
    return 1;
  }
}

uq::AnyModel train_from_cli(const std::string& model_kind, const uq::LabeledDataset& data,
                            const nlohmann::json& config) {
  if (model_kind == "mlp") {
    return uq::train_mlp(data, config.is_null() ? uq::MlpConfig{}
                                                : uq::mlp_config_from_json(config));
  }
  if (model_kind == "ensemble") {
    const uq::MlpConfig member = config.contains("mlp")
                                     ? uq::mlp_config_from_json(config.at("mlp"))
                                     : uq::MlpConfig{};
    const int members = config.is_null() ? 10 : config.value("members", 10);
    const auto base_seed =
        config.is_null() ? std::uint64_t{100} : config.value("base_seed", std::uint64_t{100});
    return uq::train_ensemble(data, member, members, base_seed);
  }
  if (model_kind == "stumps") {
    const int rounds = config.is_null() ? 60 : config.value("rounds", 60);
    const double lr = config.is_null() ? 0.2 : config.value("learning_rate", 0.2);
    return uq::train_stumps(data, rounds, lr);
  }
  if (model_kind == "priornet") {
    const uq::PriorNetConfig pn_config = config.contains("priornet")
                                             ? uq::priornet_config_from_json(config.at("priornet"))
                                             : uq::PriorNetConfig{};
    uq::MlpConfig attack_config = config.contains("mlp")
                                      ? uq::mlp_config_from_json(config.at("mlp"))
                                      : uq::MlpConfig{};
    attack_config.seed = pn_config.seed + 1;
    const uq::MlpModel attack_model = uq::train_mlp(data, attack_config);
    auto [X, y] = uq::detail::training_rows(data);
    const double c = config.is_null() ? 5.0 : config.value("cw_c", 5.0);
    const int steps = config.is_null() ? 40 : config.value("cw_steps", 40);
    const double step_size = config.is_null() ? 0.05 : config.value("cw_step_size", 0.05);
    const int max_points = config.is_null() ? 128 : config.value("cw_max_points", 128);
    const Eigen::MatrixXd ood =
        uq::cw_generate_ood(attack_model, X, c, steps, step_size, max_points, pn_config.seed);
    return uq::train_priornet(data, ood, pn_config);
  }
  throw std::invalid_argument("unknown model kind '" + model_kind + "'");
}

nlohmann::json calibrate_from_cli(const uq::AnyModel& model, const std::string& method,
                                  const uq::LabeledDataset& data, const std::string& data_path) {
  if (method == "isotonic") {
    const auto* stumps = std::get_if<uq::StumpEnsembleModel>(&model);
    if (!stumps)
      throw std::invalid_argument("isotonic calibration applies to the stumps score model");
    return uq::isotonic_to_json(
        uq::fit_isotonic(uq::stump_scores(*stumps, data.features), data.labels), data_path);
  }
  if (method != "temperature") throw std::invalid_argument("unknown method '" + method + "'");

  std::vector<std::array<double, 2>> logits;
  logits.reserve(static_cast<std::size_t>(data.rows()));
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    const Eigen::VectorXd x = data.features.row(i).transpose();
    if (const auto* mlp = std::get_if<uq::MlpModel>(&model))
      logits.push_back(mlp->logits1(x));
    else if (const auto* ensemble = std::get_if<uq::EnsembleModel>(&model))
      logits.push_back(uq::ensemble_mean_logits(*ensemble, x));
    else if (const auto* priornet = std::get_if<uq::PriorNetModel>(&model))
      logits.push_back(priornet->logits1(x));
    else
      throw std::invalid_argument("temperature calibration applies to logit-output models");
  }
  return uq::temperature_to_json(uq::fit_temperature(logits, data.labels), data_path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"uncertainty-aware selective prediction toolkit"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate a synthetic two-class dataset CSV");
  int gen_n = 2000, gen_d = 8;
  double gen_sep = 2.5;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  gen->add_option("--n", gen_n, "number of rows");
  gen->add_option("--d", gen_d, "feature dimension");
  gen->add_option("--sep", gen_sep, "class separation");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--out", gen_out, "output CSV path")->required();

  // train
  auto* train = app.add_subcommand("train", "train a base model on a feature CSV");
  std::string train_model, train_data, train_config, train_out;
  train->add_option("--model", train_model, "mlp|ensemble|priornet|stumps")->required();
  train->add_option("--data", train_data, "training CSV")->required();
  train->add_option("--config", train_config, "JSON config file (optional)");
  train->add_option("--out", train_out, "output model JSON")->required();

  // calibrate
  auto* calibrate = app.add_subcommand("calibrate", "fit a calibration artifact for a model");
  std::string cal_model, cal_method, cal_data, cal_out;
  calibrate->add_option("--model", cal_model, "model JSON")->required();
  calibrate->add_option("--method", cal_method, "isotonic|temperature")->required();
  calibrate->add_option("--data", cal_data, "calibration CSV")->required();
  calibrate->add_option("--out", cal_out, "output artifact JSON")->required();

  // run
  auto* run = app.add_subcommand("run", "run one experiment spec end to end");
  std::string run_spec, run_out;
  run->add_option("--spec", run_spec, "experiment spec JSON")->required();
  run->add_option("--out", run_out, "output report JSON")->required();

  // matrix
  auto* matrix = app.add_subcommand("matrix", "run every spec JSON in a directory");
  std::string matrix_specs, matrix_out;
  matrix->add_option("--specs", matrix_specs, "directory of spec JSON files")->required();
  matrix->add_option("--out", matrix_out, "output directory")->required();

  // sweep
  auto* sweep = app.add_subcommand("sweep", "export a report's sweep curve as CSV");
  std::string sweep_report, sweep_csv;
  sweep->add_option("--report", sweep_report, "report JSON")->required();
  sweep->add_option("--csv", sweep_csv, "output CSV path")->required();

  CLI11_PARSE(app, argc, argv);

  if (gen->parsed()) {
    return run_stage("gen", [&] {
      uq::save_features_csv(uq::generate_synthetic(gen_n, gen_d, gen_sep, gen_seed), gen_out);
    });
  }

  if (train->parsed()) {
    return run_stage("train", [&] {
      const uq::LabeledDataset data = uq::load_features(train_data);
      const nlohmann::json config =
          train_config.empty() ? nlohmann::json() : read_json_file(train_config);
      uq::save_model(train_from_cli(train_model, data, config), train_out);
    });
  }

  if (calibrate->parsed()) {
    return run_stage("calibrate", [&] {
      const uq::AnyModel model = uq::load_model(cal_model);
      const uq::LabeledDataset data = uq::load_features(cal_data);
      write_text(cal_out, calibrate_from_cli(model, cal_method, data, cal_data).dump(2) + "\n");
    });
  }

  if (run->parsed()) {
    return run_stage("run", [&] {
      const uq::ExperimentSpec spec = uq::spec_from_json(read_json_file(run_spec));
      uq::emit_report(uq::run_experiment(spec), uq::ReportFormat::Json, run_out);
    });
  }

  if (matrix->parsed()) {
    return run_stage("matrix", [&] {
      std::vector<std::pair<std::string, uq::ExperimentSpec>> specs;
      std::vector<fs::path> files;
      for (const auto& entry : fs::directory_iterator(matrix_specs))
        if (entry.path().extension() == ".json") files.push_back(entry.path());
      std::sort(files.begin(), files.end());
      for (const fs::path& file : files)
        specs.emplace_back(file.stem().string(), uq::spec_from_json(read_json_file(file.string())));
      if (specs.empty()) throw std::runtime_error("no spec JSON files in " + matrix_specs);

      const uq::MatrixResult result = uq::run_matrix(specs);
      fs::create_directories(matrix_out);
      for (const uq::MatrixEntry& entry : result.entries) {
        if (entry.report) {
          uq::emit_report(*entry.report, uq::ReportFormat::Json,
                          (fs::path(matrix_out) / (entry.name + ".report.json")).string());
        } else {
          std::cerr << "uqcli matrix: spec '" << entry.name << "' failed: " << entry.error
                    << '\n';
        }
      }
      write_text((fs::path(matrix_out) / "comparison.csv").string(), result.comparison_csv);
    });
  }

  if (sweep->parsed()) {
    return run_stage("sweep", [&] {
      const nlohmann::json report = read_json_file(sweep_report);
      std::vector<uq::SweepPoint> curve;
      for (const auto& pt : report.at("sweep"))
        curve.push_back({pt.at("theta").get<double>(), pt.at("ca_pct").get<double>(),
                         pt.at("cr_pct").get<double>(), pt.at("h").get<double>()});
      write_text(sweep_csv, uq::sweep_to_csv(curve));
    });
  }

  return 0;
}

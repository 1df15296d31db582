#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "uq/types.hpp"

namespace uq {

enum class Split : std::uint8_t { Train, Calibration, Test };

/// Train-split feature statistics. Zero-variance features keep std 1 and are
/// listed in zero_variance.
struct Standardization {
  Eigen::VectorXd mean;
  Eigen::VectorXd std;
  std::vector<int> zero_variance;
};

/// Feature matrix (one row per instance), binary labels, optional split tags
/// and standardization statistics.
struct LabeledDataset {
  Eigen::MatrixXd features;
  std::vector<int> labels;
  std::vector<Split> split;  // empty until assign_splits
  std::optional<Standardization> standardization;

  Eigen::Index rows() const { return features.rows(); }
  Eigen::Index dims() const { return features.cols(); }
  bool has_splits() const { return !split.empty(); }

  std::vector<Eigen::Index> indices_of(Split s) const;
  Eigen::MatrixXd features_of(Split s) const;
  std::vector<int> labels_of(Split s) const;
};

/// Covariate-shift transform applied to test rows. strength 0 is the
/// identity for every kind.
struct ShiftSpec {
  enum class Kind { None, AffinePacking, FeatureScramble };
  Kind kind = Kind::None;
  double strength = 0.0;
  std::uint64_t seed = 0;
};

std::string to_string(ShiftSpec::Kind kind);
ShiftSpec::Kind shift_kind_from_string(const std::string& name);

/// Two-class Gaussian mixture with unit covariance and class means class_sep
/// apart along the first axis. Labels are drawn fair-coin, so classes are
/// approximately balanced. Deterministic per seed.
LabeledDataset generate_synthetic(int n, int d, double class_sep, std::uint64_t seed);

/// Applies the shift to the test rows (or to every row when the dataset has
/// no split tags). Labels, row count and dimension are untouched.
LabeledDataset apply_shift(const LabeledDataset& data, const ShiftSpec& spec);

/// Seeded random split assignment. Counts land within one of the exact
/// fractional targets (largest-remainder rounding).
LabeledDataset assign_splits(const LabeledDataset& data, const std::array<double, 3>& fractions,
                             std::uint64_t seed);

/// Standardizes every row using mean/std computed from the train rows only.
LabeledDataset standardize(const LabeledDataset& data);

enum class FeatureFormat { Csv, Jsonl };

/// CSV: header row with a "label" column; remaining columns are features in
/// order. JSONL: {"features":[...], "label":0|1} per line. Parse errors name
/// the offending line.
LabeledDataset load_features(const std::string& path, FeatureFormat format = FeatureFormat::Csv);

void save_features_csv(const LabeledDataset& data, const std::string& path);

/// One externally produced score record: member probabilities (with the mean
/// assembled on load), or raw logits, optionally Dirichlet concentrations.
struct ExternalScoreRecord {
  std::optional<EnsembleOutput> ensemble;
  std::optional<std::array<double, 2>> logits;
  std::optional<DirichletParams> alphas;
  int label = 0;
};

/// Parses the scores-v1 JSONL schema; schema violations name the line.
std::vector<ExternalScoreRecord> load_external_scores(const std::string& path);

}  // namespace uq

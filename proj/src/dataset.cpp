#include "uq/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "uq/detail/format.hpp"

#include "json.hpp"

namespace uq {

std::vector<Eigen::Index> LabeledDataset::indices_of(Split s) const {
  std::vector<Eigen::Index> out;
  if (split.empty()) {
    if (s == Split::Train) {
      out.resize(static_cast<std::size_t>(rows()));
      std::iota(out.begin(), out.end(), 0);
    }
    return out;
  }
  for (Eigen::Index i = 0; i < rows(); ++i)
    if (split[static_cast<std::size_t>(i)] == s) out.push_back(i);
  return out;
}

Eigen::MatrixXd LabeledDataset::features_of(Split s) const {
  const auto idx = indices_of(s);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), dims());
  for (std::size_t r = 0; r < idx.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = features.row(idx[r]);
  return out;
}

std::vector<int> LabeledDataset::labels_of(Split s) const {
  const auto idx = indices_of(s);
  std::vector<int> out(idx.size());
  for (std::size_t r = 0; r < idx.size(); ++r) out[r] = labels[static_cast<std::size_t>(idx[r])];
  return out;
}

std::string to_string(ShiftSpec::Kind kind) {
  switch (kind) {
    case ShiftSpec::Kind::None: return "none";
    case ShiftSpec::Kind::AffinePacking: return "affine_packing";
    case ShiftSpec::Kind::FeatureScramble: return "feature_scramble";
  }
  throw std::logic_error("unreachable shift kind");
}

ShiftSpec::Kind shift_kind_from_string(const std::string& name) {
  if (name == "none") return ShiftSpec::Kind::None;
  if (name == "affine_packing") return ShiftSpec::Kind::AffinePacking;
  if (name == "feature_scramble") return ShiftSpec::Kind::FeatureScramble;
  throw std::invalid_argument("unknown shift kind: " + name);
}

LabeledDataset generate_synthetic(int n, int d, double class_sep, std::uint64_t seed) {
  if (n < 10) throw std::invalid_argument("generate_synthetic: need n >= 10");
  if (d < 2) throw std::invalid_argument("generate_synthetic: need d >= 2");
  if (!(class_sep >= 0.0) || !std::isfinite(class_sep))
    throw std::invalid_argument("generate_synthetic: class_sep must be a nonnegative real");

  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.5);
  std::normal_distribution<double> gauss(0.0, 1.0);

  LabeledDataset ds;
  ds.features.resize(n, d);
  ds.labels.resize(static_cast<std::size_t>(n));
  const double half = 0.5 * class_sep;
  for (int i = 0; i < n; ++i) {
    const int y = coin(rng) ? 1 : 0;
    ds.labels[static_cast<std::size_t>(i)] = y;
    for (int j = 0; j < d; ++j) ds.features(i, j) = gauss(rng);
    ds.features(i, 0) += y == 1 ? half : -half;
  }
  return ds;
}

LabeledDataset apply_shift(const LabeledDataset& data, const ShiftSpec& spec) {
  if (!(spec.strength >= 0.0) || !std::isfinite(spec.strength))
    throw std::invalid_argument("apply_shift: strength must be a nonnegative real");
  LabeledDataset out = data;
  if (spec.kind == ShiftSpec::Kind::None || spec.strength == 0.0) return out;

  const Eigen::Index d = data.dims();
  std::vector<Eigen::Index> rows_to_shift;
  if (data.has_splits()) {
    rows_to_shift = data.indices_of(Split::Test);
  } else {
    rows_to_shift.resize(static_cast<std::size_t>(data.rows()));
    std::iota(rows_to_shift.begin(), rows_to_shift.end(), 0);
  }

  std::mt19937_64 rng(spec.seed);
  if (spec.kind == ShiftSpec::Kind::AffinePacking) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd perturb(d, d);
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));
    for (Eigen::Index r = 0; r < d; ++r)
      for (Eigen::Index c = 0; c < d; ++c) perturb(r, c) = gauss(rng) * scale;
    Eigen::VectorXd offset(d);
    for (Eigen::Index c = 0; c < d; ++c) offset(c) = spec.strength * gauss(rng);
    const Eigen::MatrixXd transform =
        Eigen::MatrixXd::Identity(d, d) + spec.strength * perturb;
    for (Eigen::Index i : rows_to_shift)
      out.features.row(i) = (transform * data.features.row(i).transpose() + offset).transpose();
    return out;
  }

  // FeatureScramble: permute a strength-controlled fraction of the columns,
  // identically for every shifted row.
  const auto n_cols =
      static_cast<Eigen::Index>(std::ceil(std::min(spec.strength, 1.0) * static_cast<double>(d)));
  if (n_cols < 2) return out;
  std::vector<Eigen::Index> cols(static_cast<std::size_t>(d));
  std::iota(cols.begin(), cols.end(), 0);
  std::shuffle(cols.begin(), cols.end(), rng);
  cols.resize(static_cast<std::size_t>(n_cols));
  std::vector<Eigen::Index> rotated(cols.begin(), cols.end());
  std::rotate(rotated.begin(), rotated.begin() + 1, rotated.end());
  for (Eigen::Index i : rows_to_shift)
    for (std::size_t k = 0; k < cols.size(); ++k)
      out.features(i, cols[k]) = data.features(i, rotated[k]);
  return out;
}

LabeledDataset assign_splits(const LabeledDataset& data, const std::array<double, 3>& fractions,
                             std::uint64_t seed) {
  double sum = 0.0;
  for (double f : fractions) {
    if (!(f > 0.0)) throw std::invalid_argument("assign_splits: fractions must be positive");
    sum += f;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("assign_splits: fractions must sum to 1");

  const auto n = static_cast<std::size_t>(data.rows());
  std::array<std::size_t, 3> counts{};
  std::array<double, 3> remainders{};
  std::size_t assigned = 0;
  for (int k = 0; k < 3; ++k) {
    const double target = fractions[static_cast<std::size_t>(k)] * static_cast<double>(n);
    counts[static_cast<std::size_t>(k)] = static_cast<std::size_t>(std::floor(target));
    remainders[static_cast<std::size_t>(k)] = target - std::floor(target);
    assigned += counts[static_cast<std::size_t>(k)];
  }
  // Largest-remainder rounding keeps every count within one of its target.
  while (assigned < n) {
    int best = 0;
    for (int k = 1; k < 3; ++k)
      if (remainders[static_cast<std::size_t>(k)] > remainders[static_cast<std::size_t>(best)])
        best = k;
    counts[static_cast<std::size_t>(best)] += 1;
    remainders[static_cast<std::size_t>(best)] = -1.0;
    ++assigned;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  LabeledDataset out = data;
  out.split.assign(n, Split::Train);
  std::size_t pos = 0;
  for (int k = 0; k < 3; ++k) {
    const Split tag = k == 0 ? Split::Train : k == 1 ? Split::Calibration : Split::Test;
    for (std::size_t c = 0; c < counts[static_cast<std::size_t>(k)]; ++c)
      out.split[order[pos++]] = tag;
  }
  return out;
}

LabeledDataset standardize(const LabeledDataset& data) {
  const auto train_idx = data.indices_of(Split::Train);
  if (train_idx.empty()) throw std::invalid_argument("standardize: empty train split");

  const Eigen::Index d = data.dims();
  const auto n_train = static_cast<double>(train_idx.size());
  Standardization stats;
  stats.mean = Eigen::VectorXd::Zero(d);
  stats.std = Eigen::VectorXd::Ones(d);

  for (Eigen::Index i : train_idx) stats.mean += data.features.row(i).transpose();
  stats.mean /= n_train;

  Eigen::VectorXd var = Eigen::VectorXd::Zero(d);
  for (Eigen::Index i : train_idx) {
    const Eigen::VectorXd centered = data.features.row(i).transpose() - stats.mean;
    var += centered.cwiseProduct(centered);
  }
  var /= n_train;
  for (Eigen::Index j = 0; j < d; ++j) {
    const double sd = std::sqrt(var(j));
    if (sd > 1e-9 * std::max(1.0, std::abs(stats.mean(j)))) {
      stats.std(j) = sd;
    } else {
      // constant feature: std stays 1 and the mean snaps to the observed
      // value so train rows land exactly on zero
      stats.zero_variance.push_back(static_cast<int>(j));
      stats.mean(j) = data.features(train_idx.front(), j);
    }
  }

  LabeledDataset out = data;
  for (Eigen::Index i = 0; i < out.rows(); ++i)
    out.features.row(i) =
        (data.features.row(i).transpose() - stats.mean).cwiseQuotient(stats.std).transpose();
  out.standardization = std::move(stats);
  return out;
}

namespace {

double parse_cell(const std::string& cell, std::size_t line_no, const std::string& what) {
  try {
    std::size_t consumed = 0;
    const double v = std::stod(cell, &consumed);
    if (consumed != cell.size()) throw std::invalid_argument("trailing characters");
    if (!std::isfinite(v))
      throw std::invalid_argument("load_features: non-finite " + what + " on line " +
                                  std::to_string(line_no));
    return v;
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("load_features: cannot parse " + what + " '" + cell +
                                "' on line " + std::to_string(line_no));
  } catch (const std::out_of_range&) {
    throw std::invalid_argument("load_features: value out of range on line " +
                                std::to_string(line_no));
  }
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

LabeledDataset load_features_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_features: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("load_features: empty file " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();

  const std::vector<std::string> header = split_csv_line(line);
  std::ptrdiff_t label_col = -1;
  for (std::size_t c = 0; c < header.size(); ++c)
    if (header[c] == "label") label_col = static_cast<std::ptrdiff_t>(c);
  if (label_col < 0)
    throw std::invalid_argument("load_features: missing 'label' column in " + path);
  const std::size_t d = header.size() - 1;
  if (d == 0) throw std::invalid_argument("load_features: no feature columns in " + path);

  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw std::invalid_argument("load_features: line " + std::to_string(line_no) + " has " +
                                  std::to_string(cells.size()) + " cells, expected " +
                                  std::to_string(header.size()));
    std::vector<double> row;
    row.reserve(d);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (static_cast<std::ptrdiff_t>(c) == label_col) {
        const double y = parse_cell(cells[c], line_no, "label");
        if (y != 0.0 && y != 1.0)
          throw std::invalid_argument("load_features: label must be 0 or 1 on line " +
                                      std::to_string(line_no));
        labels.push_back(static_cast<int>(y));
      } else {
        row.push_back(parse_cell(cells[c], line_no, "feature"));
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::invalid_argument("load_features: no data rows in " + path);

  LabeledDataset ds;
  ds.features.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < d; ++j)
      ds.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  ds.labels = std::move(labels);
  return ds;
}

LabeledDataset load_features_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_features: cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw std::invalid_argument("load_features: JSON parse error on line " +
                                  std::to_string(line_no) + ": " + e.what());
    }
    if (!j.contains("features") || !j.contains("label"))
      throw std::invalid_argument("load_features: line " + std::to_string(line_no) +
                                  " lacks features/label");
    std::vector<double> row = j.at("features").get<std::vector<double>>();
    for (double v : row)
      if (!std::isfinite(v))
        throw std::invalid_argument("load_features: non-finite feature on line " +
                                    std::to_string(line_no));
    const int y = j.at("label").get<int>();
    if (y != 0 && y != 1)
      throw std::invalid_argument("load_features: label must be 0 or 1 on line " +
                                  std::to_string(line_no));
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::invalid_argument("load_features: inconsistent dimension on line " +
                                  std::to_string(line_no));
    rows.push_back(std::move(row));
    labels.push_back(y);
  }
  if (rows.empty()) throw std::invalid_argument("load_features: empty file " + path);

  LabeledDataset ds;
  ds.features.resize(static_cast<Eigen::Index>(rows.size()),
                     static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      ds.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  ds.labels = std::move(labels);
  return ds;
}

}  // namespace

LabeledDataset load_features(const std::string& path, FeatureFormat format) {
  return format == FeatureFormat::Csv ? load_features_csv(path) : load_features_jsonl(path);
}

void save_features_csv(const LabeledDataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_features_csv: cannot open " + path);
  for (Eigen::Index j = 0; j < data.dims(); ++j) out << 'f' << j << ',';
  out << "label\n";
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    for (Eigen::Index j = 0; j < data.dims(); ++j)
      out << detail::format_double(data.features(i, j)) << ',';
    out << data.labels[static_cast<std::size_t>(i)] << '\n';
  }
  if (!out) throw std::runtime_error("save_features_csv: write failed for " + path);
}

std::vector<ExternalScoreRecord> load_external_scores(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_external_scores: cannot open " + path);

  std::vector<ExternalScoreRecord> records;
  std::string line;
  std::size_t line_no = 0;
  const auto fail = [&](const std::string& msg) {
    throw std::invalid_argument("load_external_scores: line " + std::to_string(line_no) + ": " +
                                msg);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      fail(std::string("JSON parse error: ") + e.what());
    }
    if (j.value("schema", "") != "scores-v1") fail("schema must be 'scores-v1'");
    ExternalScoreRecord rec;
    if (!j.contains("label")) fail("missing label");
    rec.label = j.at("label").get<int>();
    if (rec.label != 0 && rec.label != 1) fail("label must be 0 or 1");

    if (j.contains("member_probs")) {
      std::vector<ProbabilityPair> members;
      for (const auto& pair_json : j.at("member_probs")) {
        const auto pr = pair_json.get<std::vector<double>>();
        if (pr.size() != 2) fail("member probability entry must have 2 components");
        if (std::abs(pr[0] + pr[1] - 1.0) > 1e-6) fail("member probabilities do not sum to 1");
        if (pr[0] < 0.0 || pr[1] < 0.0) fail("negative member probability");
        members.push_back(ProbabilityPair{{pr[0], pr[1]}});
      }
      if (members.empty()) fail("member_probs must be nonempty");
      rec.ensemble = make_ensemble_output(std::move(members));
    }
    if (j.contains("logits")) {
      const auto z = j.at("logits").get<std::vector<double>>();
      if (z.size() != 2) fail("logits must have 2 components");
      if (!std::isfinite(z[0]) || !std::isfinite(z[1])) fail("non-finite logit");
      rec.logits = std::array<double, 2>{z[0], z[1]};
    }
    if (j.contains("alphas")) {
      const auto a = j.at("alphas").get<std::vector<double>>();
      if (a.size() != 2) fail("alphas must have 2 components");
      if (!(a[0] > 0.0 && a[1] > 0.0)) fail("alphas must be strictly positive");
      rec.alphas = DirichletParams::make(a[0], a[1]);
    }
    if (!rec.ensemble && !rec.logits && !rec.alphas)
      fail("record carries neither member_probs, logits nor alphas");
    records.push_back(std::move(rec));
  }
  if (records.empty())
    throw std::invalid_argument("load_external_scores: no records in " + path);
  return records;
}

}  // namespace uq

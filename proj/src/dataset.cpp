#include "mamimo/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include "mamimo/power.hpp"

namespace mamimo {

Eigen::VectorXd Normalizer::apply(const Eigen::VectorXd& x) const {
  return (x - mean).cwiseQuotient(std);
}

Eigen::VectorXd Normalizer::invert(const Eigen::VectorXd& z) const {
  return z.cwiseProduct(std) + mean;
}

Eigen::MatrixXd Normalizer::apply_cols(const Eigen::MatrixXd& X) const {
  return (X.colwise() - mean).array().colwise() / std.array();
}

double Normalizer::psi_pooled(const Eigen::MatrixXd& raw_cols) const {
  double grand = raw_cols.mean();
  return std::sqrt((raw_cols.array() - grand).square().mean());
}

Dataset generate_dataset(const NetworkConfig& cfg, int n, DatasetGenStats* stats) {
  cfg.validate();
  if (n < 1) throw std::invalid_argument("generate_dataset: n must be >= 1");
  const int L = cfg.cells, K = cfg.ues_per_cell;
  Dataset d;
  d.cells = L;
  d.samples.reserve(static_cast<size_t>(n) * L);

  int produced = 0;
  for (std::uint64_t idx = 0; produced < n; ++idx) {
    Rng rng = make_rng(cfg.seed, idx);
    UEPlacement placement = place_ues(cfg, rng);
    GainTable gains = estimate_gains(cfg, placement, rng);
    PowerAllocation rho;
    try {
      rho = solve_max_product(gains, cfg.p_max_dl_mw);
    } catch (const SolverError&) {
      if (stats) ++stats->solver_failures;
      continue;
    }
    Eigen::VectorXd x(2 * L * K);
    for (int u = 0; u < L * K; ++u) {
      x(2 * u) = placement.pos(u, 0);
      x(2 * u + 1) = placement.pos(u, 1);
    }
    for (int j = 0; j < L; ++j) {
      Sample s;
      s.x = x;
      s.cell_id = j;
      s.rho_label.resize(K + 1);
      s.rho_label.head(K) = rho.rho.row(j).transpose();
      s.rho_label(K) = cfg.p_max_dl_mw;
      d.samples.push_back(std::move(s));
    }
    ++produced;
  }
  return d;
}

Normalizer fit_normalizer(const Dataset& d, double p_max) {
  if (d.draws() < 2) throw std::invalid_argument("fit_normalizer: need at least 2 draws");
  const int dim = static_cast<int>(d.samples.front().x.size());
  const int n = d.draws();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
  for (int i = 0; i < n; ++i) mean += d.at(i, 0).x;
  mean /= n;
  Eigen::VectorXd var = Eigen::VectorXd::Zero(dim);
  for (int i = 0; i < n; ++i) var += (d.at(i, 0).x - mean).cwiseAbs2();
  var /= n;
  for (int f = 0; f < dim; ++f)
    if (var(f) <= 0.0)
      throw ZeroVarianceFeature("fit_normalizer: zero-variance feature " + std::to_string(f));
  // All coordinates share one centering and one scale psi: the grand mean and
  // the pooled deviation around it. Per-feature scaling would erase the
  // cell-center offsets and make the same perturbation budget mean different
  // physical displacements for different features; the pooled block has mean 0
  // and unit variance instead.
  double grand = mean.sum() / dim;
  double psi_sq = 0.0;
  for (int i = 0; i < n; ++i) psi_sq += (d.at(i, 0).x.array() - grand).square().sum();
  psi_sq /= static_cast<double>(n) * dim;
  Normalizer nz;
  nz.mean = Eigen::VectorXd::Constant(dim, grand);
  nz.std = Eigen::VectorXd::Constant(dim, std::sqrt(psi_sq));
  nz.label_scale = 1.0 / p_max;
  return nz;
}

void split(const Dataset& d, int train_n, int test_n, Rng& rng, Dataset& train, Dataset& test) {
  if (train_n + test_n > d.draws())
    throw std::invalid_argument("split: train_n + test_n exceeds available draws");
  std::vector<int> order(d.draws());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  train = Dataset{{}, d.cells};
  test = Dataset{{}, d.cells};
  for (int i = 0; i < train_n; ++i)
    for (int j = 0; j < d.cells; ++j) train.samples.push_back(d.at(order[i], j));
  for (int i = train_n; i < train_n + test_n; ++i)
    for (int j = 0; j < d.cells; ++j) test.samples.push_back(d.at(order[i], j));
}

void save_csv(const Dataset& d, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for write: " + path);
  const int dim = d.samples.empty() ? 0 : static_cast<int>(d.samples.front().x.size());
  const int lab = d.samples.empty() ? 0 : static_cast<int>(d.samples.front().rho_label.size());
  for (int i = 0; i < dim; ++i) f << "x_" << i << ',';
  for (int i = 0; i < lab; ++i) f << "rho_" << i << ',';
  f << "cell_id\n";
  f.precision(17);
  for (const Sample& s : d.samples) {
    for (int i = 0; i < dim; ++i) f << s.x(i) << ',';
    for (int i = 0; i < lab; ++i) f << s.rho_label(i) << ',';
    f << s.cell_id << '\n';
  }
}

Dataset load_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open for read: " + path);
  std::string line;
  if (!std::getline(f, line)) throw std::runtime_error(path + ": empty file");

  int dim = 0, lab = 0;
  {
    std::stringstream ss(line);
    std::string col;
    bool saw_cell = false;
    while (std::getline(ss, col, ',')) {
      if (col.rfind("x_", 0) == 0)
        ++dim;
      else if (col.rfind("rho_", 0) == 0)
        ++lab;
      else if (col == "cell_id")
        saw_cell = true;
      else
        throw std::runtime_error(path + ": unexpected column '" + col + "'");
    }
    if (dim == 0 || lab == 0 || !saw_cell)
      throw std::runtime_error(path + ": malformed header");
  }

  Dataset d;
  int max_cell = 0;
  int lineno = 1;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string col;
    std::vector<double> vals;
    while (std::getline(ss, col, ',')) vals.push_back(std::stod(col));
    if (static_cast<int>(vals.size()) != dim + lab + 1)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": column count mismatch");
    Sample s;
    s.x = Eigen::Map<Eigen::VectorXd>(vals.data(), dim);
    s.rho_label = Eigen::Map<Eigen::VectorXd>(vals.data() + dim, lab);
    s.cell_id = static_cast<int>(vals[dim + lab]);
    max_cell = std::max(max_cell, s.cell_id);
    d.samples.push_back(std::move(s));
  }
  d.cells = max_cell + 1;
  return d;
}

void save_normalizer(const Normalizer& n, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for write: " + path);
  std::vector<double> mean(n.mean.data(), n.mean.data() + n.mean.size());
  std::vector<double> std_(n.std.data(), n.std.data() + n.std.size());
  f << nlohmann::json{{"mean", mean}, {"std", std_}, {"label_scale", n.label_scale}}.dump();
}

Normalizer load_normalizer(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open for read: " + path);
  nlohmann::json j;
  f >> j;
  auto mean = j.at("mean").get<std::vector<double>>();
  auto std_ = j.at("std").get<std::vector<double>>();
  Normalizer n;
  n.mean = Eigen::Map<Eigen::VectorXd>(mean.data(), mean.size());
  n.std = Eigen::Map<Eigen::VectorXd>(std_.data(), std_.size());
  n.label_scale = j.at("label_scale").get<double>();
  return n;
}

Eigen::MatrixXd feature_matrix(const Dataset& d, int cell) {
  const int n = d.draws();
  Eigen::MatrixXd X(d.samples.front().x.size(), n);
  for (int i = 0; i < n; ++i) X.col(i) = d.at(i, cell).x;
  return X;
}

Eigen::MatrixXd label_matrix(const Dataset& d, int cell) {
  const int n = d.draws();
  Eigen::MatrixXd Y(d.samples.front().rho_label.size(), n);
  for (int i = 0; i < n; ++i) Y.col(i) = d.at(i, cell).rho_label;
  return Y;
}

}  // namespace mamimo

#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "mamimo/config.hpp"
#include "mamimo/rng.hpp"

namespace mamimo {

/// One supervised sample: shared normalized-or-raw position vector x in
/// R^{2KL} and the owning cell's power label in R^{K+1} (mW), whose last
/// element is the power budget.
struct Sample {
  Eigen::VectorXd x;
  Eigen::VectorXd rho_label;
  int cell_id = 0;
};

/// Position draws are grouped: draw i yields L samples (one per cell) that
/// share the same x.
struct Dataset {
  std::vector<Sample> samples;
  int cells = 1;

  int draws() const { return static_cast<int>(samples.size()) / cells; }
  const Sample& at(int draw, int cell) const { return samples[draw * cells + cell]; }
};

struct Normalizer {
  Eigen::VectorXd mean;
  Eigen::VectorXd std;
  double label_scale = 1.0;  // 1 / p_max_dl

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  Eigen::VectorXd invert(const Eigen::VectorXd& z) const;
  Eigen::MatrixXd apply_cols(const Eigen::MatrixXd& X) const;
  /// Pooled standard deviation of the raw coordinates around their grand
  /// mean; the psi that converts normalized perturbations to meters.
  double psi_pooled(const Eigen::MatrixXd& raw_cols) const;
};

struct ZeroVarianceFeature : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DatasetGenStats {
  int solver_failures = 0;
};

/// n i.i.d. position draws; for each: place UEs, estimate gains, solve the
/// max-product program, record per-cell labels. Samples whose solve fails
/// are skipped (and counted) until n successful draws exist. Deterministic
/// given cfg.seed.
Dataset generate_dataset(const NetworkConfig& cfg, int n, DatasetGenStats* stats = nullptr);

/// Per-feature standardization statistics over the given samples' x vectors.
/// Throws ZeroVarianceFeature on degenerate geometry.
Normalizer fit_normalizer(const Dataset& d, double p_max);

/// Disjoint draw-level split: the first train_n shuffled draws and the next
/// test_n. Keeps all L cell samples of a draw on the same side.
void split(const Dataset& d, int train_n, int test_n, Rng& rng, Dataset& train, Dataset& test);

void save_csv(const Dataset& d, const std::string& path);
Dataset load_csv(const std::string& path);

void save_normalizer(const Normalizer& n, const std::string& path);
Normalizer load_normalizer(const std::string& path);

/// Feature matrix (inputs as columns) for one cell's samples, and the
/// matching label matrix (K+1 rows).
Eigen::MatrixXd feature_matrix(const Dataset& d, int cell);
Eigen::MatrixXd label_matrix(const Dataset& d, int cell);

}  // namespace mamimo

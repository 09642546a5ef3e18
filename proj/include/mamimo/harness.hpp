#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "mamimo/attacks.hpp"
#include "mamimo/config.hpp"
#include "mamimo/dataset.hpp"
#include "mamimo/defense.hpp"
#include "mamimo/nn.hpp"

namespace mamimo {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string out_dir = "out";
  std::uint64_t seed = 1;
  NetworkConfig network;
  TrainConfig train;
  int n_train = 20000;
  int n_test = 500;
  double val_fraction = 0.1;
  double dae_alpha = 0.03;
  int dae_q = 10;
  double advtrain_alpha = 0.03;
  int advtrain_q = 10;
  double advtrain_lr_init = 1e-2;  // gentler restart when fine-tuning a trained model
  std::vector<std::string> victims = {"model1", "model2"};
  std::vector<int> cells = {0};
  std::vector<AttackKind> attacks = {AttackKind::FGSM, AttackKind::PGD};
  std::vector<Threat> threats = {Threat::SemiWhiteBox, Threat::BlackBox};
  std::vector<DefenseKind> defenses = {DefenseKind::None, DefenseKind::Dae, DefenseKind::AdvTrain};
  std::vector<double> eps_grid;  // default 0.00 .. 0.12 step 0.01
  int pgd_iters = 10;
  double hist_alpha = 0.05;  // PGD step for the histogram condition
  int histogram_bins = 40;

  ExperimentConfig();
  void validate() const;
};

void to_json(nlohmann::json& j, const ExperimentConfig& c);
void from_json(const nlohmann::json& j, ExperimentConfig& c);
ExperimentConfig load_experiment_config(const std::string& path);

struct EvalRow {
  AttackKind attack;
  Threat threat;
  DefenseKind defense;
  double epsilon = 0.0;
  long successes = 0;
  long n = 0;
  double success_rate = 0.0;
};

struct Histogram {
  std::vector<double> edges;  // bins+1
  std::vector<long> counts;   // bins
  double threshold = 0.0;
  long above_threshold = 0;   // strict
  long n = 0;
};

struct EvalReport {
  std::vector<EvalRow> rows;
  std::map<std::string, Histogram> histograms;  // condition label -> histogram
};

struct SuccessCount {
  long successes = 0;
  long n = 0;
  double rate() const { return n ? static_cast<double>(successes) / n : 0.0; }
};

/// Fraction of samples whose predicted first-K power sum strictly exceeds
/// p_max. Columns of X are normalized inputs.
SuccessCount attack_success_rate(const DefensePipeline& pipeline, const Eigen::MatrixXd& X,
                                 double p_max, int k);

Histogram power_histogram(const DefensePipeline& pipeline, const Eigen::MatrixXd& X, int bins,
                          double p_max, int k);

/// Artifacts the sweep evaluates for one (victim, cell) pairing.
struct CellArtifacts {
  MlpModel victim;
  MlpModel surrogate;
  MlpModel dae;
  MlpModel advtrain;
  MlpModel distill;
  bool has_dae = false, has_advtrain = false, has_distill = false;
  Eigen::MatrixXd x_test;  // normalized test inputs, columns
};

/// Per-(attack, threat, defense, epsilon) success rates, counts aggregated
/// across the given cells. Also fills the histogram conditions at
/// cfg.hist_alpha.
EvalReport sweep(const ExperimentConfig& cfg, const std::vector<CellArtifacts>& cells);

void emit_report(const EvalReport& report, const std::string& dir);
EvalReport load_results_csv(const std::string& path);

enum class StageLimit { Dataset, Train, Defend, All };

/// End-to-end pipeline (generate -> train -> defend -> sweep -> report) with
/// per-stage content-hash caching under cfg.out_dir. Returns 0 on success.
/// `until` stops the pipeline after the named stage.
int run_experiment(const ExperimentConfig& cfg, bool verbose = true,
                   StageLimit until = StageLimit::All);

/// FNV-1a content hash helpers used by the stage cache.
std::uint64_t fnv1a(const std::string& data, std::uint64_t h = 14695981039346656037ULL);
std::uint64_t hash_file(const std::string& path);

}  // namespace mamimo

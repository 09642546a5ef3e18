#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "mamimo/rng.hpp"

namespace mamimo {

enum class Act { ELU, Linear };

std::string to_string(Act a);
Act act_from_string(const std::string& s);

struct Layer {
  Eigen::MatrixXd W;  // out x in
  Eigen::VectorXd b;  // out
  Act act = Act::Linear;
};

struct MlpModel {
  std::vector<Layer> layers;

  int input_dim() const { return layers.empty() ? 0 : static_cast<int>(layers.front().W.cols()); }
  int output_dim() const { return layers.empty() ? 0 : static_cast<int>(layers.back().W.rows()); }
  /// Throws if adjacent layer dimensions do not chain or parameters are not finite.
  void validate() const;
};

/// Glorot-uniform initialized MLP with the given unit counts and per-layer
/// activations (acts.size() == dims.size() - 1).
MlpModel build_mlp(const std::vector<int>& dims, const std::vector<Act>& acts, Rng& rng);

/// Regressor of the paper's Table I: 2KL -> 256,128,64,64,K (ELU) -> K+1 (Linear).
MlpModel build_model1(int ues_per_cell, int cells, Rng& rng);
/// Regressor of the paper's Table II: 2KL -> 512,256,128,128,K (ELU) -> K+1 (Linear).
MlpModel build_model2(int ues_per_cell, int cells, Rng& rng);
/// Denoising autoencoder of Table III: 2KL -> 32 -> 16 -> 32 -> 2KL, all Linear.
MlpModel build_dae(int ues_per_cell, int cells, Rng& rng);

double elu(double t);
double elu_deriv(double t);

Eigen::VectorXd forward(const MlpModel& m, const Eigen::VectorXd& x);
/// Columns of X are independent samples.
Eigen::MatrixXd forward_batch(const MlpModel& m, const Eigen::MatrixXd& X);

enum class LossKind { RelMse, Mse };

/// Mean over elements of ((label - pred) / max(label, floor))^2. For plain
/// MSE the denominator is 1.
double loss_value(LossKind kind, const Eigen::MatrixXd& pred, const Eigen::MatrixXd& label,
                  double rel_floor);

struct ParamGrads {
  std::vector<Eigen::MatrixXd> dW;
  std::vector<Eigen::VectorXd> db;
};

/// Reverse-mode gradient of the batch-mean loss with respect to all
/// parameters.
ParamGrads grad_params(const MlpModel& m, const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                       LossKind kind, double rel_floor);

/// Gradient of head^T forward(x) with respect to x.
Eigen::VectorXd grad_input(const MlpModel& m, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& head);
Eigen::MatrixXd grad_input_batch(const MlpModel& m, const Eigen::MatrixXd& X,
                                 const Eigen::VectorXd& head);

struct TrainConfig {
  double lr_init = 1e-1;
  double lr_floor = 1e-4;
  double lr_decay = 0.1;
  int plateau_patience = 3;
  double plateau_min_delta = 1e-4;  // relative improvement threshold
  int batch_size = 128;
  int max_epochs = 200;
  std::uint64_t seed = 1;
  double rel_floor = 1e-6;  // relative-MSE denominator floor, label scale
  double grad_clip = 1.0;   // global l2-norm cap per minibatch; 0 disables
  double momentum = 0.9;    // heavy-ball coefficient; 0 = plain SGD

  void validate() const;
};

void to_json(nlohmann::json& j, const TrainConfig& c);
void from_json(const nlohmann::json& j, TrainConfig& c);

struct EpochRecord {
  int epoch;
  double train_loss;
  double val_loss;
  double lr;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
};

struct TrainingDiverged : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Minibatch SGD with plateau learning-rate schedule. Columns of X/Y are
/// samples. Stops at max_epochs or when the schedule plateaus at lr_floor.
TrainHistory train(MlpModel& m, const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                   const Eigen::MatrixXd& Xval, const Eigen::MatrixXd& Yval,
                   const TrainConfig& cfg, LossKind kind = LossKind::RelMse);

nlohmann::json model_to_json(const MlpModel& m);
MlpModel model_from_json(const nlohmann::json& j);
void save_model(const MlpModel& m, const std::string& path);
MlpModel load_model(const std::string& path);

void save_history(const TrainHistory& h, const std::string& path);

}  // namespace mamimo

#pragma once

#include <optional>

#include <Eigen/Dense>

#include "mamimo/attacks.hpp"
#include "mamimo/nn.hpp"

namespace mamimo {

enum class DefenseKind { None, Dae, AdvTrain, Distill };

std::string to_string(DefenseKind k);
DefenseKind defense_from_string(const std::string& s);

/// Inference-time composition: an optional DAE prefix and the regressor that
/// produces power predictions. label_scale converts the regressor's scaled
/// outputs back to mW.
struct DefensePipeline {
  DefenseKind kind = DefenseKind::None;
  const MlpModel* dae = nullptr;       // required for kind == Dae
  const MlpModel* regressor = nullptr;
  double label_scale = 1.0;

  void validate() const;
};

/// Training pairs for the DAE: PGD-perturbed inputs mapped to their clean
/// originals, concatenated with identity pairs. Columns are samples; 2N of
/// them for N inputs.
struct DaePairs {
  Eigen::MatrixXd inputs;
  Eigen::MatrixXd targets;
};

DaePairs build_dae_trainset(const MlpModel& regressor, const Eigen::MatrixXd& X, double alpha_l,
                            int q, int k);

/// Trains the all-linear autoencoder on the paired set with plain MSE.
MlpModel train_dae(const DaePairs& pairs, const TrainConfig& cfg, int ues_per_cell, int cells);

/// Predicted power vector in mW for one input (or a batch), routed through
/// the pipeline's defense.
Eigen::VectorXd defended_predict(const DefensePipeline& p, const Eigen::VectorXd& x);
Eigen::MatrixXd defended_predict_batch(const DefensePipeline& p, const Eigen::MatrixXd& X);

/// Retrains the regressor from its current weights on the original set
/// augmented with PGD-perturbed inputs carrying the original labels.
TrainHistory adversarial_training(MlpModel& regressor, const Eigen::MatrixXd& X,
                                  const Eigen::MatrixXd& Y, const Eigen::MatrixXd& Xval,
                                  const Eigen::MatrixXd& Yval, double alpha, int q, int k,
                                  const TrainConfig& cfg);

/// Trains a fresh model of the teacher's architecture on the teacher's own
/// predictions (regression soft labels).
MlpModel defensive_distillation(const MlpModel& teacher, const Eigen::MatrixXd& X,
                                const Eigen::MatrixXd& Xval, const TrainConfig& cfg);

}  // namespace mamimo

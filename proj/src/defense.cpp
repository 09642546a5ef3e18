#include "mamimo/defense.hpp"

namespace mamimo {

std::string to_string(DefenseKind k) {
  switch (k) {
    case DefenseKind::None: return "none";
    case DefenseKind::Dae: return "dae";
    case DefenseKind::AdvTrain: return "advtrain";
    case DefenseKind::Distill: return "distill";
  }
  throw std::logic_error("unreachable");
}

DefenseKind defense_from_string(const std::string& s) {
  if (s == "none") return DefenseKind::None;
  if (s == "dae") return DefenseKind::Dae;
  if (s == "advtrain") return DefenseKind::AdvTrain;
  if (s == "distill") return DefenseKind::Distill;
  throw std::invalid_argument("unknown defense: " + s);
}

void DefensePipeline::validate() const {
  if (!regressor) throw std::invalid_argument("pipeline: regressor missing");
  if (kind == DefenseKind::Dae) {
    if (!dae) throw std::invalid_argument("pipeline: DAE kind without a DAE model");
    if (dae->input_dim() != regressor->input_dim() || dae->output_dim() != dae->input_dim())
      throw std::invalid_argument("pipeline: DAE dimensions do not match the regressor");
  }
}

DaePairs build_dae_trainset(const MlpModel& regressor, const Eigen::MatrixXd& X, double alpha_l,
                            int q, int k) {
  if (alpha_l <= 0.0) throw std::invalid_argument("build_dae_trainset: alpha_l must be > 0");
  ThreatContext ctx{&regressor, Threat::SemiWhiteBox};
  Eigen::MatrixXd Xadv = pgd_perturb(ctx, X, alpha_l, q, k);
  DaePairs pairs;
  const int n = static_cast<int>(X.cols());
  pairs.inputs.resize(X.rows(), 2 * n);
  pairs.targets.resize(X.rows(), 2 * n);
  pairs.inputs << Xadv, X;
  pairs.targets << X, X;
  return pairs;
}

MlpModel train_dae(const DaePairs& pairs, const TrainConfig& cfg, int ues_per_cell, int cells) {
  if (pairs.inputs.cols() == 0) throw std::invalid_argument("train_dae: empty pair set");
  Rng rng = make_rng(cfg.seed);
  MlpModel dae = build_dae(ues_per_cell, cells, rng);
  // Hold out a deterministic tail slice for the plateau schedule.
  int n = static_cast<int>(pairs.inputs.cols());
  int val_n = std::max(1, n / 10);
  int tr_n = n - val_n;
  train(dae, pairs.inputs.leftCols(tr_n), pairs.targets.leftCols(tr_n),
        pairs.inputs.rightCols(val_n), pairs.targets.rightCols(val_n), cfg, LossKind::Mse);
  return dae;
}

Eigen::MatrixXd defended_predict_batch(const DefensePipeline& p, const Eigen::MatrixXd& X) {
  p.validate();
  Eigen::MatrixXd in = (p.kind == DefenseKind::Dae) ? forward_batch(*p.dae, X) : X;
  return forward_batch(*p.regressor, in) / p.label_scale;
}

Eigen::VectorXd defended_predict(const DefensePipeline& p, const Eigen::VectorXd& x) {
  return defended_predict_batch(p, x);
}

TrainHistory adversarial_training(MlpModel& regressor, const Eigen::MatrixXd& X,
                                  const Eigen::MatrixXd& Y, const Eigen::MatrixXd& Xval,
                                  const Eigen::MatrixXd& Yval, double alpha, int q, int k,
                                  const TrainConfig& cfg) {
  ThreatContext ctx{&regressor, Threat::SemiWhiteBox};
  Eigen::MatrixXd Xadv = pgd_perturb(ctx, X, alpha, q, k);
  const int n = static_cast<int>(X.cols());
  Eigen::MatrixXd Xaug(X.rows(), 2 * n), Yaug(Y.rows(), 2 * n);
  Xaug << X, Xadv;
  Yaug << Y, Y;  // perturbed inputs keep their original (correct) labels
  return train(regressor, Xaug, Yaug, Xval, Yval, cfg, LossKind::RelMse);
}

MlpModel defensive_distillation(const MlpModel& teacher, const Eigen::MatrixXd& X,
                                const Eigen::MatrixXd& Xval, const TrainConfig& cfg) {
  Eigen::MatrixXd soft = forward_batch(teacher, X);
  Eigen::MatrixXd soft_val = forward_batch(teacher, Xval);
  // Fresh model of the same architecture.
  std::vector<int> dims;
  std::vector<Act> acts;
  dims.push_back(teacher.input_dim());
  for (const Layer& l : teacher.layers) {
    dims.push_back(static_cast<int>(l.W.rows()));
    acts.push_back(l.act);
  }
  Rng rng = make_rng(cfg.seed);
  MlpModel student = build_mlp(dims, acts, rng);
  train(student, X, soft, Xval, soft_val, cfg, LossKind::RelMse);
  return student;
}

}  // namespace mamimo

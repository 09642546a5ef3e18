#include "mamimo/attacks.hpp"

#include <cmath>

namespace mamimo {

std::string to_string(AttackKind k) { return k == AttackKind::FGSM ? "fgsm" : "pgd"; }
std::string to_string(Threat t) { return t == Threat::SemiWhiteBox ? "swb" : "bb"; }

AttackKind attack_from_string(const std::string& s) {
  if (s == "fgsm") return AttackKind::FGSM;
  if (s == "pgd") return AttackKind::PGD;
  throw std::invalid_argument("unknown attack: " + s);
}

Threat threat_from_string(const std::string& s) {
  if (s == "swb") return Threat::SemiWhiteBox;
  if (s == "bb") return Threat::BlackBox;
  throw std::invalid_argument("unknown threat model: " + s);
}

Eigen::VectorXd adversary_head(int output_dim, int k, bool include_last) {
  if (k > output_dim) throw std::invalid_argument("adversary_head: k exceeds output dim");
  Eigen::VectorXd h = Eigen::VectorXd::Zero(output_dim);
  h.head(k).setOnes();
  if (include_last) h(output_dim - 1) = 1.0;
  return h;
}

double adversary_loss(const MlpModel& model, const Eigen::VectorXd& x, int k) {
  return forward(model, x).head(k).sum();
}

namespace {

// sign with sign(0) = 0
Eigen::MatrixXd sign0(const Eigen::MatrixXd& g) {
  return g.unaryExpr([](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); });
}

}  // namespace

Eigen::MatrixXd fgsm_perturb(const ThreatContext& ctx, const Eigen::MatrixXd& X, double eps,
                             int k) {
  if (eps < 0.0) throw std::invalid_argument("fgsm_perturb: eps must be >= 0");
  const MlpModel& m = *ctx.gradient_model;
  Eigen::VectorXd head = adversary_head(m.output_dim(), k);
  return X + eps * sign0(grad_input_batch(m, X, head));
}

Eigen::MatrixXd pgd_perturb(const ThreatContext& ctx, const Eigen::MatrixXd& X, double alpha,
                            int q, int k) {
  if (alpha < 0.0 || q < 1) throw std::invalid_argument("pgd_perturb: need alpha >= 0, q >= 1");
  const MlpModel& m = *ctx.gradient_model;
  Eigen::VectorXd head = adversary_head(m.output_dim(), k);
  Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(X.rows(), X.cols());
  for (int step = 0; step < q; ++step) {
    delta += alpha * sign0(grad_input_batch(m, X + delta, head));
  }
  return X + delta;
}

double displacement_m(double epsilon_norm, double psi) {
  if (psi <= 0.0) throw std::invalid_argument("displacement_m: psi must be > 0");
  return std::sqrt(2.0) * psi * epsilon_norm;
}

}  // namespace mamimo

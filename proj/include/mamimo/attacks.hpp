#pragma once

#include <Eigen/Dense>

#include "mamimo/nn.hpp"

namespace mamimo {

enum class AttackKind { FGSM, PGD };
enum class Threat { SemiWhiteBox, BlackBox };

std::string to_string(AttackKind k);
std::string to_string(Threat t);
AttackKind attack_from_string(const std::string& s);
Threat threat_from_string(const std::string& s);

/// The adversary only ever sees gradient_model: the BS regressor in the
/// semi-white-box threat model, an independently trained surrogate in the
/// black-box one.
struct ThreatContext {
  const MlpModel* gradient_model = nullptr;
  Threat threat = Threat::SemiWhiteBox;
};

/// Head vector selecting the first k outputs (optionally also the last,
/// budget, output) for the adversary's summed-power loss.
Eigen::VectorXd adversary_head(int output_dim, int k, bool include_last = false);

/// Sum of the first k predicted per-UE powers, label scale.
double adversary_loss(const MlpModel& model, const Eigen::VectorXd& x, int k);

/// x + eps * sign(grad); sign(0) = 0. Columns of X are samples.
Eigen::MatrixXd fgsm_perturb(const ThreatContext& ctx, const Eigen::MatrixXd& X, double eps,
                             int k);

/// Q accumulation steps of step size alpha, gradient recomputed at the
/// current perturbed point each step. Total l_inf budget alpha * q.
Eigen::MatrixXd pgd_perturb(const ThreatContext& ctx, const Eigen::MatrixXd& X, double alpha,
                            int q, int k);

/// Physical UE displacement for a normalized bound: sqrt(2) * psi * eps.
double displacement_m(double epsilon_norm, double psi);

}  // namespace mamimo

#include <doctest.h>

#include <cmath>

#include "mamimo/attacks.hpp"

using namespace mamimo;

namespace {

Eigen::MatrixXd random_mat(int r, int c, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  Eigen::MatrixXd m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = nd(rng);
  return m;
}

MlpModel random_regressor(int in, int k, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  return build_mlp({in, 8, k + 1}, {Act::ELU, Act::Linear}, rng);
}

MlpModel single_linear(const Eigen::MatrixXd& W) {
  MlpModel m;
  Layer l;
  l.W = W;
  l.b = Eigen::VectorXd::Zero(W.rows());
  l.act = Act::Linear;
  m.layers.push_back(l);
  return m;
}

}  // namespace

TEST_CASE("adversary head selects the first k outputs") {
  Eigen::VectorXd h = adversary_head(6, 5);
  CHECK(h.size() == 6);
  CHECK(h.head(5).sum() == 5.0);
  CHECK(h(5) == 0.0);
  Eigen::VectorXd hl = adversary_head(6, 5, true);
  CHECK(hl(5) == 1.0);
}

TEST_CASE("adversary loss is the summed first-k prediction and is linear") {
  Eigen::MatrixXd W = random_mat(6, 4, 50);
  MlpModel m = single_linear(W);
  Eigen::VectorXd x = random_mat(4, 1, 51);
  double loss = adversary_loss(m, x, 5);
  CHECK(loss == doctest::Approx(forward(m, x).head(5).sum()).epsilon(1e-12));
  MlpModel doubled = single_linear(2.0 * W);
  CHECK(adversary_loss(doubled, x, 5) == doctest::Approx(2.0 * loss).epsilon(1e-12));
}

TEST_CASE("FGSM applies the sign rule with sign(0) = 0") {
  // One linear output = w.x with w = (0.3, -0.2, 0): the input gradient.
  Eigen::MatrixXd W(1, 3);
  W << 0.3, -0.2, 0.0;
  MlpModel m = single_linear(W);
  ThreatContext ctx{&m, Threat::SemiWhiteBox};
  Eigen::MatrixXd x = random_mat(3, 1, 52);
  Eigen::MatrixXd xt = fgsm_perturb(ctx, x, 0.05, 1);
  CHECK(xt(0, 0) - x(0, 0) == doctest::Approx(0.05).epsilon(1e-15));
  CHECK(xt(1, 0) - x(1, 0) == doctest::Approx(-0.05).epsilon(1e-15));
  CHECK(xt(2, 0) == x(2, 0));
}

TEST_CASE("epsilon zero leaves the input untouched") {
  MlpModel m = random_regressor(6, 3, 53);
  ThreatContext ctx{&m, Threat::SemiWhiteBox};
  Eigen::MatrixXd x = random_mat(6, 5, 54);
  CHECK(fgsm_perturb(ctx, x, 0.0, 3) == x);
}

TEST_CASE("single-step PGD is bit-identical to FGSM") {
  MlpModel m = random_regressor(8, 4, 55);
  ThreatContext ctx{&m, Threat::SemiWhiteBox};
  Eigen::MatrixXd x = random_mat(8, 100, 56);
  Eigen::MatrixXd f = fgsm_perturb(ctx, x, 0.07, 4);
  Eigen::MatrixXd p = pgd_perturb(ctx, x, 0.07, 1, 4);
  CHECK(f == p);
}

TEST_CASE("perturbations respect their l-infinity budgets") {
  MlpModel m = random_regressor(8, 4, 57);
  ThreatContext ctx{&m, Threat::SemiWhiteBox};
  Eigen::MatrixXd x = random_mat(8, 50, 58);
  Eigen::MatrixXd f = fgsm_perturb(ctx, x, 0.05, 4);
  CHECK((f - x).cwiseAbs().maxCoeff() <= 0.05 + 1e-12);
  Eigen::MatrixXd p = pgd_perturb(ctx, x, 0.01, 10, 4);
  CHECK((p - x).cwiseAbs().maxCoeff() <= 0.1 + 1e-12);
  CHECK(p.rows() == x.rows());
  CHECK(p.cols() == x.cols());
}

TEST_CASE("FGSM ascends the adversary loss for nearly all samples") {
  MlpModel m = random_regressor(10, 5, 59);
  ThreatContext ctx{&m, Threat::SemiWhiteBox};
  Eigen::MatrixXd x = random_mat(10, 200, 60);
  Eigen::MatrixXd xt = fgsm_perturb(ctx, x, 0.01, 5);
  int up = 0;
  for (int c = 0; c < x.cols(); ++c)
    if (adversary_loss(m, xt.col(c), 5) >= adversary_loss(m, x.col(c), 5)) ++up;
  CHECK(up >= 180);  // >= 90%
}

TEST_CASE("black-box crafting only reads the surrogate") {
  MlpModel victim = random_regressor(6, 3, 61);
  MlpModel surrogate = random_regressor(6, 3, 62);
  ThreatContext ctx{&surrogate, Threat::BlackBox};
  Eigen::MatrixXd x = random_mat(6, 4, 63);
  Eigen::MatrixXd via_bb = pgd_perturb(ctx, x, 0.02, 5, 3);
  ThreatContext swb_on_surrogate{&surrogate, Threat::SemiWhiteBox};
  CHECK(via_bb == pgd_perturb(swb_on_surrogate, x, 0.02, 5, 3));
}

TEST_CASE("displacement conversion reproduces the published figures") {
  CHECK(displacement_m(0.0, 145.4) == 0.0);
  CHECK(displacement_m(0.05, 145.4) == doctest::Approx(10.28).epsilon(1e-3));
  CHECK(displacement_m(0.01 * 10, 145.4) == doctest::Approx(20.57).epsilon(1e-3));
}

TEST_CASE("enum string round trips") {
  CHECK(attack_from_string(to_string(AttackKind::FGSM)) == AttackKind::FGSM);
  CHECK(attack_from_string(to_string(AttackKind::PGD)) == AttackKind::PGD);
  CHECK(threat_from_string(to_string(Threat::SemiWhiteBox)) == Threat::SemiWhiteBox);
  CHECK(threat_from_string(to_string(Threat::BlackBox)) == Threat::BlackBox);
  CHECK_THROWS(attack_from_string("cw"));
}

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "mamimo/nn.hpp"

using namespace mamimo;

namespace {

MlpModel random_net(const std::vector<int>& dims, std::uint64_t seed, Act last = Act::Linear) {
  std::vector<Act> acts(dims.size() - 1, Act::ELU);
  acts.back() = last;
  Rng rng = make_rng(seed);
  return build_mlp(dims, acts, rng);
}

Eigen::MatrixXd random_mat(int r, int c, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  Eigen::MatrixXd m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = nd(rng);
  return m;
}

double fd_param_error(MlpModel m, const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                      LossKind kind) {
  const double h = 1e-6, floor = 1e-6;
  ParamGrads g = grad_params(m, X, Y, kind, floor);
  double worst = 0.0;
  for (size_t li = 0; li < m.layers.size(); ++li) {
    auto probe = [&](double* p, double analytic) {
      double orig = *p;
      *p = orig + h;
      double up = loss_value(kind, forward_batch(m, X), Y, floor);
      *p = orig - h;
      double dn = loss_value(kind, forward_batch(m, X), Y, floor);
      *p = orig;
      double fd = (up - dn) / (2.0 * h);
      double denom = std::max({std::abs(fd), std::abs(analytic), 1e-6});
      worst = std::max(worst, std::abs(fd - analytic) / denom);
    };
    // Sample a handful of entries per layer to keep the test quick.
    for (int r = 0; r < m.layers[li].W.rows(); r += std::max<int>(1, m.layers[li].W.rows() / 3))
      for (int c = 0; c < m.layers[li].W.cols(); c += std::max<int>(1, m.layers[li].W.cols() / 3))
        probe(&m.layers[li].W(r, c), g.dW[li](r, c));
    for (int r = 0; r < m.layers[li].b.size(); r += std::max<int>(1, int(m.layers[li].b.size()) / 3))
      probe(&m.layers[li].b(r), g.db[li](r));
  }
  return worst;
}

}  // namespace

TEST_CASE("ELU values and derivative continuity") {
  CHECK(elu(0.0) == 0.0);
  CHECK(elu(2.0) == 2.0);
  CHECK(elu(-1.0) == doctest::Approx(std::exp(-1.0) - 1.0).epsilon(1e-12));
  CHECK(elu_deriv(0.0) == 1.0);
  CHECK(elu_deriv(1e-9) == 1.0);
  CHECK(elu_deriv(-1e-9) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(elu(1e-12) - elu(-1e-12) < 1e-11);  // continuous at 0
}

TEST_CASE("identity linear layer is the identity map") {
  MlpModel m;
  Layer l;
  l.W = Eigen::MatrixXd::Identity(3, 3);
  l.b = Eigen::VectorXd::Zero(3);
  l.act = Act::Linear;
  m.layers.push_back(l);
  Eigen::VectorXd x(3);
  x << 1.5, -2.0, 0.25;
  CHECK((forward(m, x) - x).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("architecture builders match the published layer plans") {
  Rng rng = make_rng(1);
  MlpModel m1 = build_model1(5, 4, rng);
  CHECK(m1.input_dim() == 40);
  CHECK(m1.output_dim() == 6);
  CHECK(m1.layers.size() == 6);
  CHECK(m1.layers[0].W.rows() == 256);
  CHECK(m1.layers[4].W.rows() == 5);
  CHECK(m1.layers.back().act == Act::Linear);
  MlpModel m2 = build_model2(5, 4, rng);
  CHECK(m2.layers[0].W.rows() == 512);
  CHECK(m2.output_dim() == 6);
  MlpModel dae = build_dae(5, 4, rng);
  CHECK(dae.input_dim() == 40);
  CHECK(dae.output_dim() == 40);
  CHECK(dae.layers[1].W.rows() == 16);  // latent width
  for (const Layer& l : dae.layers) CHECK(l.act == Act::Linear);
  m1.validate();
  m2.validate();
  dae.validate();
}

TEST_CASE("relative MSE loss values") {
  Eigen::MatrixXd pred(1, 1), label(1, 1);
  pred << 1.0;
  label << 2.0;
  CHECK(loss_value(LossKind::RelMse, pred, label, 1e-6) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(loss_value(LossKind::RelMse, label, label, 1e-6) == 0.0);

  Eigen::MatrixXd p6 = random_mat(6, 1, 7), l6 = random_mat(6, 1, 8);
  double manual = 0.0;
  for (int i = 0; i < 6; ++i) {
    double d = std::max(std::abs(l6(i, 0)), 1e-6);
    manual += std::pow((l6(i, 0) - p6(i, 0)) / d, 2.0);
  }
  CHECK(loss_value(LossKind::RelMse, p6, l6, 1e-6) == doctest::Approx(manual / 6.0).epsilon(1e-12));
}

TEST_CASE("parameter gradients match central finite differences") {
  for (std::uint64_t s = 0; s < 5; ++s) {
    MlpModel m = random_net({4, 6, 5, 3}, 100 + s);
    Eigen::MatrixXd X = random_mat(4, 3, 200 + s);
    Eigen::MatrixXd Y = random_mat(3, 3, 300 + s).array() + 2.0;  // labels away from 0
    CHECK(fd_param_error(m, X, Y, LossKind::RelMse) < 1e-4);
    CHECK(fd_param_error(m, X, Y, LossKind::Mse) < 1e-4);
  }
}

TEST_CASE("zero residual gives zero MSE gradient") {
  MlpModel m = random_net({3, 4, 2}, 17);
  Eigen::MatrixXd X = random_mat(3, 2, 18);
  Eigen::MatrixXd Y = forward_batch(m, X);
  ParamGrads g = grad_params(m, X, Y, LossKind::Mse, 1e-6);
  for (const auto& dW : g.dW) CHECK(dW.cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("batch gradient is the mean of per-sample gradients") {
  MlpModel m = random_net({3, 5, 2}, 19);
  Eigen::MatrixXd X = random_mat(3, 2, 20);
  Eigen::MatrixXd Y = random_mat(2, 2, 21).array() + 2.0;
  ParamGrads g = grad_params(m, X, Y, LossKind::Mse, 1e-6);
  ParamGrads g0 = grad_params(m, X.col(0), Y.col(0), LossKind::Mse, 1e-6);
  ParamGrads g1 = grad_params(m, X.col(1), Y.col(1), LossKind::Mse, 1e-6);
  for (size_t i = 0; i < g.dW.size(); ++i) {
    Eigen::MatrixXd avg = 0.5 * (g0.dW[i] + g1.dW[i]);
    CHECK((g.dW[i] - avg).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("input gradient of a linear layer is the head-weighted row combination") {
  MlpModel m;
  Layer l;
  l.W = random_mat(4, 3, 22);
  l.b = Eigen::VectorXd::Zero(4);
  l.act = Act::Linear;
  m.layers.push_back(l);
  Eigen::VectorXd head = Eigen::VectorXd::Ones(4);
  Eigen::VectorXd g = grad_input(m, Eigen::VectorXd::Zero(3), head);
  CHECK(g.size() == 3);
  CHECK((g - l.W.colwise().sum().transpose()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("input gradients match central finite differences") {
  MlpModel m = random_net({5, 6, 4}, 23);
  Eigen::VectorXd head(4);
  head << 1, 1, 0, 0;
  Eigen::VectorXd x = random_mat(5, 1, 24);
  Eigen::VectorXd g = grad_input(m, x, head);
  const double h = 1e-6;
  for (int i = 0; i < 5; ++i) {
    Eigen::VectorXd xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    double fd = (head.dot(forward(m, xp)) - head.dot(forward(m, xm))) / (2.0 * h);
    CHECK(g(i) == doctest::Approx(fd).epsilon(1e-4));
  }
}

TEST_CASE("all-linear networks are affine maps") {
  Rng rng = make_rng(25);
  MlpModel dae = build_dae(2, 2, rng);
  Eigen::VectorXd x = random_mat(8, 1, 26), y = random_mat(8, 1, 27);
  Eigen::VectorXd lhs = forward(dae, x + y) - forward(dae, x) - forward(dae, y) +
                        forward(dae, Eigen::VectorXd::Zero(8));
  CHECK(lhs.cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("one-dimensional trainer reaches the least-squares fit") {
  // y = 3x + 2 with a single linear unit.
  const int n = 64;
  Eigen::MatrixXd X(1, n), Y(1, n);
  for (int i = 0; i < n; ++i) {
    X(0, i) = -1.0 + 2.0 * i / (n - 1);
    Y(0, i) = 3.0 * X(0, i) + 2.0;
  }
  MlpModel m = random_net({1, 1}, 30);
  TrainConfig tc;
  tc.max_epochs = 400;
  tc.batch_size = 16;
  tc.seed = 5;
  tc.grad_clip = 0.0;
  tc.momentum = 0.0;  // plain SGD settles exactly on the closed-form optimum
  tc.plateau_min_delta = 1e-10;
  train(m, X, Y, X, Y, tc, LossKind::Mse);
  CHECK(m.layers[0].W(0, 0) == doctest::Approx(3.0).epsilon(1e-3));
  CHECK(m.layers[0].b(0) == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("learning-rate schedule is non-increasing within its bounds") {
  MlpModel m = random_net({2, 8, 1}, 31);
  Eigen::MatrixXd X = random_mat(2, 60, 32);
  Eigen::MatrixXd Y = X.colwise().sum().array().sin().matrix() + Eigen::MatrixXd::Constant(1, 60, 2.0);
  TrainConfig tc;
  tc.max_epochs = 60;
  tc.seed = 3;
  TrainHistory h = train(m, X, Y, X.leftCols(10), Y.leftCols(10), tc, LossKind::Mse);
  for (size_t i = 0; i < h.epochs.size(); ++i) {
    CHECK(h.epochs[i].lr <= 0.1 + 1e-15);
    CHECK(h.epochs[i].lr >= 1e-4 - 1e-15);
    if (i) CHECK(h.epochs[i].lr <= h.epochs[i - 1].lr + 1e-15);
  }
}

TEST_CASE("training is bit-identical for a fixed seed") {
  auto run = [] {
    MlpModel m = random_net({3, 6, 2}, 33);
    Eigen::MatrixXd X = random_mat(3, 40, 34);
    Eigen::MatrixXd Y = random_mat(2, 40, 35).array() + 2.0;
    TrainConfig tc;
    tc.max_epochs = 12;
    tc.seed = 9;
    TrainHistory h = train(m, X, Y, X.leftCols(8), Y.leftCols(8), tc, LossKind::RelMse);
    return std::make_pair(m, h);
  };
  auto [m1, h1] = run();
  auto [m2, h2] = run();
  REQUIRE(h1.epochs.size() == h2.epochs.size());
  for (size_t i = 0; i < h1.epochs.size(); ++i) {
    CHECK(h1.epochs[i].train_loss == h2.epochs[i].train_loss);
    CHECK(h1.epochs[i].val_loss == h2.epochs[i].val_loss);
  }
  for (size_t i = 0; i < m1.layers.size(); ++i) CHECK(m1.layers[i].W == m2.layers[i].W);
}

TEST_CASE("divergent training is reported") {
  MlpModel m = random_net({2, 4, 1}, 36);
  Eigen::MatrixXd X = random_mat(2, 16, 37);
  Eigen::MatrixXd Y = random_mat(1, 16, 38).array() + 2.0;
  TrainConfig tc;
  tc.lr_init = 1e12;
  tc.lr_floor = 1e11;
  tc.grad_clip = 0.0;
  tc.max_epochs = 10;
  CHECK_THROWS_AS(train(m, X, Y, X, Y, tc, LossKind::Mse), TrainingDiverged);
}

TEST_CASE("model json round trip preserves values and outputs") {
  MlpModel m = random_net({4, 7, 3}, 39);
  std::string path = (std::filesystem::temp_directory_path() / "mamimo_model_rt.json").string();
  save_model(m, path);
  MlpModel r = load_model(path);
  REQUIRE(r.layers.size() == m.layers.size());
  for (size_t i = 0; i < m.layers.size(); ++i) {
    CHECK(r.layers[i].W == m.layers[i].W);
    CHECK(r.layers[i].b == m.layers[i].b);
    CHECK(r.layers[i].act == m.layers[i].act);
  }
  Eigen::VectorXd x = random_mat(4, 1, 40);
  CHECK(forward(m, x) == forward(r, x));
  std::filesystem::remove(path);
}

TEST_CASE("corrupted model file is rejected") {
  std::string path = (std::filesystem::temp_directory_path() / "mamimo_model_bad.json").string();
  {
    std::ofstream f(path);
    f << R"({"layers":[{"out":2,"in":3,"activation":"elu","weights":[1,2],"biases":[0,0]}]})";
  }
  CHECK_THROWS(load_model(path));
  std::filesystem::remove(path);
}

#include "mamimo/power.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace mamimo {

namespace {

// Denominators D_r = sum_t b(t,r) rho_t + sigma2 for flattened pair r.
Eigen::VectorXd denominators(const GainTable& g, const Eigen::VectorXd& rho_flat) {
  return (g.b.transpose() * rho_flat).array() + g.sigma2;
}

Eigen::VectorXd flatten(const Eigen::MatrixXd& m) {
  Eigen::VectorXd v(m.size());
  for (int j = 0; j < m.rows(); ++j)
    for (int k = 0; k < m.cols(); ++k) v(j * m.cols() + k) = m(j, k);
  return v;
}

}  // namespace

Eigen::MatrixXd sinr_eval(const GainTable& gains, const PowerAllocation& rho) {
  const int L = static_cast<int>(gains.a.rows());
  const int K = static_cast<int>(gains.a.cols());
  Eigen::VectorXd d = denominators(gains, flatten(rho.rho));
  Eigen::MatrixXd gamma(L, K);
  for (int j = 0; j < L; ++j)
    for (int k = 0; k < K; ++k)
      gamma(j, k) = rho.rho(j, k) * gains.a(j, k) / d(j * K + k);
  return gamma;
}

double log_product_objective(const GainTable& gains, const PowerAllocation& rho) {
  Eigen::MatrixXd gamma = sinr_eval(gains, rho);
  return gamma.array().log().sum();
}

PowerAllocation solve_max_product(const GainTable& gains, double p_max) {
  const int L = static_cast<int>(gains.a.rows());
  const int K = static_cast<int>(gains.a.cols());
  const int n = L * K;
  if ((gains.a.array() <= 0.0).any())
    throw DegenerateGains("solve_max_product: zero channel gain makes the objective unbounded");
  if (p_max <= 0.0) throw SolverError("solve_max_product: p_max must be > 0");

  Eigen::VectorXd lna(n);
  for (int j = 0; j < L; ++j)
    for (int k = 0; k < K; ++k) lna(j * K + k) = std::log(gains.a(j, k));
  const double ln_pmax = std::log(p_max);

  // Negated log objective in y = ln(rho):
  //   f0(y) = sum_r [ log(sum_t b(t,r) e^{y_t} + sigma2) - y_r - lna_r ]
  // with log-barrier -sum_j log(ln_pmax - log sum_k e^{y_jk}).
  auto eval = [&](const Eigen::VectorXd& y, double t, Eigen::VectorXd* grad,
                  Eigen::MatrixXd* hess) -> double {
    Eigen::VectorXd rho = y.array().exp();
    Eigen::VectorXd d = denominators(gains, rho);
    double f0 = d.array().log().sum() - y.sum() - lna.sum();
    double val = t * f0;
    Eigen::VectorXd slack(L), cell_sum(L);
    for (int j = 0; j < L; ++j) {
      double s = rho.segment(j * K, K).sum();
      double c = ln_pmax - std::log(s);  // constraint slack in log scale
      if (c <= 0.0) return std::numeric_limits<double>::infinity();
      val -= std::log(c);
      slack(j) = c;
      cell_sum(j) = s;
    }
    if (grad) {
      Eigen::VectorXd w = d.cwiseInverse();  // 1/D_r
      *grad = t * ((gains.b * w).cwiseProduct(rho) - Eigen::VectorXd::Ones(n));
      for (int j = 0; j < L; ++j)
        for (int k = 0; k < K; ++k)
          (*grad)(j * K + k) += rho(j * K + k) / (slack(j) * cell_sum(j));
      if (hess) {
        // d2 f0 / dy_t dy_u = delta_tu sum_r b(t,r)/D_r e^{y_t}
        //                     - e^{y_t} e^{y_u} sum_r b(t,r) b(u,r) / D_r^2
        Eigen::MatrixXd bw = gains.b * w.asDiagonal();  // b(t,r)/D_r
        Eigen::MatrixXd H = -(bw * gains.b.transpose()).cwiseProduct(rho * rho.transpose());
        H.diagonal() += (gains.b * w).cwiseProduct(rho);
        H *= t;
        // Barrier blocks: within cell j, with softmax weights q = rho/S_j,
        // (1/c^2) q q^T + (1/c) (diag(q) - q q^T).
        for (int j = 0; j < L; ++j) {
          Eigen::VectorXd q = rho.segment(j * K, K) / cell_sum(j);
          double c = slack(j);
          H.block(j * K, j * K, K, K) += (1.0 / (c * c) - 1.0 / c) * (q * q.transpose());
          H.block(j * K, j * K, K, K).diagonal() += q / c;
        }
        *hess = H;
      }
    }
    return val;
  };

  Eigen::VectorXd y = Eigen::VectorXd::Constant(n, std::log(p_max / (2.0 * K)));
  const int max_total_iters = 10000;
  int iters = 0;
  double grad_scale = std::numeric_limits<double>::infinity();
  bool converged = false;

  for (int stage = 0; stage < 5; ++stage) {
    double t = std::pow(10.0, stage);
    double tol = (stage == 4) ? 1e-7 : 1e-5;
    Eigen::VectorXd g;
    Eigen::MatrixXd H;
    double val = eval(y, t, &g, &H);
    while (iters < max_total_iters) {
      grad_scale = g.lpNorm<Eigen::Infinity>() / t;
      if (grad_scale < tol) break;
      ++iters;
      // Damped Newton step; ridge keeps the factorization safe when the
      // barrier curvature is nearly singular.
      Eigen::MatrixXd Hr = H;
      Hr.diagonal().array() += 1e-12 * (1.0 + H.diagonal().cwiseAbs().maxCoeff());
      Eigen::VectorXd dir = Hr.ldlt().solve(-g);
      if (!dir.allFinite() || g.dot(dir) >= 0.0) dir = -g;  // fallback: steepest descent
      double slope = g.dot(dir);
      bool accepted = false;
      double s = 1.0;
      for (int bt = 0; bt < 60; ++bt) {
        Eigen::VectorXd cand = y + s * dir;
        double cand_val = eval(cand, t, nullptr, nullptr);
        if (cand_val <= val + 1e-4 * s * slope) {
          y = cand;
          val = eval(y, t, &g, &H);
          accepted = true;
          break;
        }
        s *= 0.5;
      }
      if (!accepted) break;  // no descent progress at machine scale
    }
    converged = (stage == 4) && (g.lpNorm<Eigen::Infinity>() / t < tol);
  }
  if (!converged && grad_scale > 1e-4)
    throw NonConvergence("solve_max_product: iteration cap reached with KKT residual above tolerance");

  PowerAllocation out;
  out.rho.resize(L, K);
  for (int j = 0; j < L; ++j)
    for (int k = 0; k < K; ++k) out.rho(j, k) = std::exp(y(j * K + k));
  return out;
}

PowerAllocation equal_power(const NetworkConfig& cfg) {
  PowerAllocation p;
  p.rho = Eigen::MatrixXd::Constant(cfg.cells, cfg.ues_per_cell,
                                    cfg.p_max_dl_mw / cfg.ues_per_cell);
  return p;
}

PowerAllocation grid_oracle(const GainTable& gains, double p_max, double resolution) {
  const int L = static_cast<int>(gains.a.rows());
  const int K = static_cast<int>(gains.a.cols());
  const int n = L * K;
  if (n > 4) throw TooLarge("grid_oracle: L*K > 4");
  if (resolution <= 0.0) throw SolverError("grid_oracle: resolution must be > 0");

  const int steps = static_cast<int>(std::floor(p_max / resolution));
  Eigen::VectorXd cur = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd best = Eigen::VectorXd::Constant(n, p_max / (2.0 * K));
  double best_obj = -std::numeric_limits<double>::infinity();

  PowerAllocation tmp;
  tmp.rho.resize(L, K);
  auto evaluate = [&]() {
    for (int j = 0; j < L; ++j)
      for (int k = 0; k < K; ++k) tmp.rho(j, k) = cur(j * K + k);
    double obj = log_product_objective(gains, tmp);
    if (obj > best_obj) {
      best_obj = obj;
      best = cur;
    }
  };

  // Depth-first over flattened pairs; per-cell running sum enforces budgets.
  std::vector<double> cell_sum(L, 0.0);
  std::function<void(int)> recurse = [&](int p) {
    if (p == n) {
      evaluate();
      return;
    }
    int cell = p / K;
    for (int s = 1; s <= steps; ++s) {
      double v = s * resolution;
      if (cell_sum[cell] + v > p_max + 1e-12) break;
      cur(p) = v;
      cell_sum[cell] += v;
      recurse(p + 1);
      cell_sum[cell] -= v;
    }
  };
  recurse(0);

  PowerAllocation out;
  out.rho.resize(L, K);
  for (int j = 0; j < L; ++j)
    for (int k = 0; k < K; ++k) out.rho(j, k) = best(j * K + k);
  return out;
}

}  // namespace mamimo

#pragma once

#include <stdexcept>

#include <Eigen/Dense>

#include "mamimo/config.hpp"
#include "mamimo/scenario.hpp"

namespace mamimo {

/// Per-UE downlink powers in mW, rho(j, k) for UE k of cell j.
struct PowerAllocation {
  Eigen::MatrixXd rho;
};

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonConvergence : SolverError {
  using SolverError::SolverError;
};
struct DegenerateGains : SolverError {
  using SolverError::SolverError;
};
struct TooLarge : SolverError {
  using SolverError::SolverError;
};

/// gamma(j,k) = rho_jk a_jk / (sum_{l,i} rho_li b_{li,jk} + sigma2).
Eigen::MatrixXd sinr_eval(const GainTable& gains, const PowerAllocation& rho);

/// Sum of log SINRs; the max-product objective in log scale. Requires all
/// rho > 0.
double log_product_objective(const GainTable& gains, const PowerAllocation& rho);

/// Max-product power allocation under per-cell budgets, solved as a convex
/// program in y = ln(rho) with a log-barrier on the budget constraints and
/// Armijo-backtracked gradient descent inner iterations.
/// Throws DegenerateGains if any a_jk == 0, NonConvergence on iteration cap.
PowerAllocation solve_max_product(const GainTable& gains, double p_max);

/// rho_jk = p_max / K for all UEs.
PowerAllocation equal_power(const NetworkConfig& cfg);

/// Exhaustive search over the per-cell power simplexes at the given step
/// size (mW). Verification oracle; throws TooLarge when L*K > 4.
PowerAllocation grid_oracle(const GainTable& gains, double p_max, double resolution);

}  // namespace mamimo

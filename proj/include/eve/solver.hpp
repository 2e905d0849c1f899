#pragma once

#include <functional>
#include <utility>

#include <Eigen/Core>

#include "eve/mdp.hpp"
#include "eve/spectral.hpp"
#include "eve/trace.hpp"

namespace eve {

/// Configuration for the posterior-policy-iteration driver.
struct EveConfig {
    std::function<double(int)> beta_schedule = [](int) { return 1.0; };
    int inner_iters = 100;        // N: max potential updates per PPI iteration
    int ppi_iters = 60;           // T
    double fixed_point_tol = 1e-10; // d_H(Tu, u) inner stop
    double ppi_stop_tol = 1e-9;     // d_H between consecutive fixed points
    bool use_log_space = false;

    /// Rejects beta(t) < 1 anywhere on [1, T] and nonpositive loop bounds.
    void validate() const;
};

/// One application of the potential-vector fixed-point operator, without the
/// renormalization. `op` is the column-stochastic state-action chain (or an
/// m-step power of it).
Eigen::VectorXd eve_step_raw(const Eigen::VectorXd& u, const Eigen::MatrixXd& op, double beta);

/// eve_step_raw followed by renormalization to sum(u) = dim (licensed by
/// degree-1 homogeneity of the operator).
Eigen::VectorXd eve_step(const Eigen::VectorXd& u, const Eigen::MatrixXd& op, double beta);

/// Log-space form of the beta = 1 update:
/// q <- 1/2 log(P^T e^q) - 1/2 log(P e^{-q}), with max-subtraction guards.
/// Agrees with log(eve_step_raw(e^q)) up to an additive constant.
Eigen::VectorXd q_step(const Eigen::VectorXd& q, const Eigen::MatrixXd& op);

struct FixedPointDiagnostics {
    std::vector<double> residuals; // d_H(Tu, u) per iteration
    int iterations = 0;
    bool converged = false;
};

/// Iterates eve_step from u0 (all-ones by default) until d_H(Tu, u) <= tol.
/// Throws std::invalid_argument for beta < 1 and std::runtime_error on
/// non-convergence (last residual reported in the message).
Eigen::VectorXd solve_fixed_point(const Eigen::MatrixXd& op, double beta, double tol,
                                  int max_iter, FixedPointDiagnostics* diag = nullptr,
                                  const Eigen::VectorXd* u0 = nullptr,
                                  bool use_log_space = false,
                                  bool require_convergence = true);

/// v_j = ((u^T P)_j / u_j^{beta+1})^{1/beta}, scaled so sum(u .* v) = 1.
/// The eigenvalue in the textbook formula is absorbed by the final scaling.
Eigen::VectorXd recover_right_eigenvector(const Eigen::VectorXd& u, const Eigen::MatrixXd& op,
                                          double beta);

/// r = -log(u .* v), entrywise.
RewardVector reward_from_uv(const Eigen::VectorXd& u, const Eigen::VectorXd& v);

struct LambdaTheta {
    double lambda = 0.0;
    double theta_star = 0.0;
    double ratio_spread = 0.0; // relative spread of the per-component ratios
};

/// lambda from the componentwise ratio (u^T Ptilde)_j / u_j with the
/// self-consistent reward; theta_star = log(lambda) / beta. Throws
/// std::runtime_error if the relative spread exceeds 1e-4 (non-convergence).
LambdaTheta extract_lambda_theta(const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                                 const SAOperator& op, double beta);

/// pi*(a|s) = pi0(a|s) u(s,a) / sum_a pi0(a|s) u(s,a).
Policy extract_policy(const Eigen::VectorXd& u, const Policy& pi0);

/// Posterior policy iteration: for t = 1..T, solve the fixed point for the
/// current prior (warm-started), extract the posterior policy, and replace
/// the prior with it. Stops early once consecutive fixed points are within
/// ppi_stop_tol in the Hilbert metric.
std::pair<Policy, RunTrace> run_ppi(const TabularMDP& mdp, const Policy& pi0_init,
                                    const EveConfig& cfg,
                                    const Eigen::VectorXd* u0 = nullptr);

} // namespace eve

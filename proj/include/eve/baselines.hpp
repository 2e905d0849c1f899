#pragma once

#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "eve/mdp.hpp"
#include "eve/spectral.hpp"
#include "eve/trace.hpp"

namespace eve {

enum class SoftQMode { Discounted, Differential };

struct SoftQConfig {
    SoftQMode mode = SoftQMode::Discounted;
    double gamma = 0.99;          // discounted mode only
    std::function<double(int)> beta_schedule = linear_beta_default;
    int inner_steps = 50;         // backups per outer iteration
    double eta = 0.01;            // reward mixing rate, in (0, 1]; larger
                                  // values oscillate once beta ramps up
    int outer_iters = 100;
    Eigen::VectorXd q_init;       // empty = zeros

    void validate() const;

    /// Linear ramp over beta in {1,...,10} across the outer loop.
    static double linear_beta_default(int t);
};

struct MixturePolicy {
    std::vector<std::pair<Policy, double>> components; // weights on the simplex
};

/// r = -log(max(d, 1e-12)); the floor keeps greedy policies' zero-mass
/// pairs finite.
RewardVector visitation_reward(const Distribution& d);

struct SoftQResult {
    Eigen::VectorXd q;
    Policy policy;
    double rho = 0.0; // differential mode only
};

/// `steps` synchronous backups Q <- r + gamma * beta^{-1} log E_{pi0} e^{beta Q}
/// from q_init; returns Q and the Boltzmann policy pi ~ pi0 e^{beta Q}.
SoftQResult soft_q_discounted(const TabularMDP& mdp, const Policy& pi0, const RewardVector& r,
                              double gamma, double beta, int steps,
                              const Eigen::VectorXd& q_init);

/// RVI-style average-reward backups Q <- r - rho + beta^{-1} log E_{pi0} e^{beta Q},
/// with rho re-anchored each sweep at flat index 0.
SoftQResult soft_q_differential(const TabularMDP& mdp, const Policy& pi0, const RewardVector& r,
                                double beta, int steps, const Eigen::VectorXd& q_init);

/// Outer loop mixing the visitation reward r <- (1-eta) r + eta (-log d) with
/// warm-started inner soft-Q solves. The visitation distribution is computed
/// exactly from the chain, not from rollouts.
std::pair<Policy, RunTrace> reward_mixing_loop(const TabularMDP& mdp, const SoftQConfig& cfg);

/// Frank-Wolfe loop over mixtures of greedy policies with the entropy
/// gradient reward r = -(1 + log d_mix); inner planner is high-beta
/// differential soft-Q. Default step rule is 2/(k+2).
std::pair<MixturePolicy, RunTrace> maxent_mixture(
    const TabularMDP& mdp, int outer_iters,
    std::function<double(int)> step_rule = nullptr, int inner_steps = 50);

} // namespace eve

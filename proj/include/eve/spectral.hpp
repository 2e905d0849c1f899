#pragma once

#include <Eigen/Core>

#include "eve/mdp.hpp"

namespace eve {

using RewardVector = Eigen::VectorXd; // indexed by flat (s,a), nats per step
using Distribution = Eigen::VectorXd; // nonnegative, sums to 1

/// Chain with each source column scaled by exp(beta * r(s,a)).
struct TiltedOperator {
    Eigen::MatrixXd matrix;
    double beta = 1.0;
};

/// Dominant Perron eigenpair. `left` solves u^T P = lambda u^T under the
/// column convention (rows = destination); `right` solves P v = lambda v.
/// Normalization: sum(u .* v) = 1 and sum(u) = dim.
struct EigenPair {
    double eigenvalue = 0.0;
    Eigen::VectorXd left;
    Eigen::VectorXd right;
};

TiltedOperator tilted_operator(const SAOperator& op, const RewardVector& reward, double beta);

/// Simultaneous power iteration on the matrix and its transpose, renormalized
/// each step. Residual contract: ||u^T P - lambda u^T||_inf <= tol * ||u||_inf
/// and likewise for v. Throws on imprimitive support or non-convergence.
EigenPair dominant_eigenpair(const Eigen::MatrixXd& tilted, double tol = 1e-12,
                             int max_iter = 200000);

/// Fixed point of the column-stochastic chain: op * d = d, sum(d) = 1.
Distribution stationary_distribution(const Eigen::MatrixXd& op, double tol = 1e-13,
                                     int max_iter = 500000);

/// Shannon entropy in nats, with 0*log(0) = 0.
double entropy(const Distribution& d);

/// d_H(x, y) = ln(max_i x_i/y_i) - ln(min_i x_i/y_i). Scale-invariant.
/// Throws std::domain_error on any nonpositive entry.
double hilbert_metric(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// Max over column pairs of d_H(M e_i, M e_j). Throws std::domain_error if
/// M has a zero entry (infinite diameter).
double projective_diameter(const Eigen::MatrixXd& m);

/// tanh(projective_diameter(M) / 4), the Birkhoff contraction coefficient.
double birkhoff_coefficient(const Eigen::MatrixXd& m);

} // namespace eve

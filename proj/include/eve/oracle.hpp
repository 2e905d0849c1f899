#pragma once

#include <Eigen/Core>

#include "eve/mdp.hpp"
#include "eve/spectral.hpp"

namespace eve {

/// Full dense eigendecomposition (QR algorithm) of a primitive nonnegative
/// matrix; independent of the power-iteration path it cross-checks.
/// Same normalization as dominant_eigenpair: sum(u.*v) = 1, sum(u) = dim.
EigenPair dense_dominant_eigs(const Eigen::MatrixXd& m);

struct OccupancySolution {
    Distribution d_star;
    double entropy_star = 0.0;
    double constraint_violation = 0.0; // max flow-balance residual
};

/// Direct maximization of H(d) over the occupancy polytope
/// {d >= 0, sum d = 1, outflow(s) = inflow(s) for all s} by exponentiated
/// gradient ascent with multiplicative (Osborne-style) rebalancing onto the
/// flow constraints. Independent of the spectral machinery.
OccupancySolution max_entropy_occupancy(const TabularMDP& mdp, double tol = 1e-9);

} // namespace eve

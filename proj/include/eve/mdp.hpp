#pragma once

#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "eve/grid.hpp"

namespace eve {

/// Thrown when a chain's support is periodic or reducible.
struct ImprimitiveError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Deterministic tabular MDP: each (s,a) has exactly one successor.
struct TabularMDP {
    int n_states = 0;
    int n_actions = 0;
    std::vector<int> next_state; // flat (s*n_actions + a) -> s'
    int initial_state = 0;

    int n_sa() const { return n_states * n_actions; }
    int flat(int s, int a) const { return s * n_actions + a; }
    int next(int s, int a) const { return next_state[flat(s, a)]; }

    void validate() const;
};

/// Row-stochastic matrix pi(a|s), shape |S| x |A|.
struct Policy {
    Eigen::MatrixXd probs;

    int n_states() const { return static_cast<int>(probs.rows()); }
    int n_actions() const { return static_cast<int>(probs.cols()); }

    static Policy uniform(int n_states, int n_actions);
    void validate() const;
};

/// Joint state-action chain P[(s',a'),(s,a)] = p(s'|s,a) pi0(a'|s').
/// Columns indexed by source (s,a), rows by destination; column sums are 1.
struct SAOperator {
    Eigen::MatrixXd matrix;
    int n_states = 0;
    int n_actions = 0;

    int dim() const { return static_cast<int>(matrix.rows()); }
    int flat(int s, int a) const { return s * n_actions + a; }
};

/// Action order: 0=up, 1=down, 2=left, 3=right (y points upward).
inline constexpr int kGridActions = 4;

/// Builds the MDP for a grid spec. Moving into a wall or off-grid stays in
/// place; moving into a cliff cell (or acting from one, when cliff cells are
/// states) transitions to the start. Rejects specs whose state graph is not
/// strongly connected. When `state_cells` is non-null it receives the cell
/// of each state index.
TabularMDP build_gridworld(const GridSpec& spec, std::vector<Cell>* state_cells = nullptr);

SAOperator sa_operator(const TabularMDP& mdp, const Policy& pi0);

/// Smallest m with boolean-support(M^m) all-positive, searched up to the
/// Wielandt bound (n-1)^2 + 1. Throws ImprimitiveError past the bound.
int index_of_primitivity(const Eigen::MatrixXd& m);

/// True iff the zero patterns of the two policies coincide.
bool support_equal(const Policy& a, const Policy& b);

} // namespace eve

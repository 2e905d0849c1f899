#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "eve/grid.hpp"
#include "eve/mdp.hpp"
#include "eve/solver.hpp"
#include "eve/trace.hpp"

namespace eve {

/// One method descriptor from an experiment config: name is one of
/// eve | soft_q_discounted | soft_q_differential | maxent; params carry the
/// method-specific knobs (beta, gamma, eta, iteration counts...).
struct MethodSpec {
    std::string name;
    nlohmann::json params;

    /// Label used in CSV rows; includes distinguishing params (e.g. gamma).
    std::string label() const;
};

struct ExperimentConfig {
    GridSpec env;
    std::vector<MethodSpec> methods;
    std::vector<int> seeds;
    std::string output_dir;

    static ExperimentConfig from_json(const nlohmann::json& j);
    void validate() const;
};

/// Runs one method on one seed; the seed perturbs only the initial potential
/// vector (uniform multiplicative noise in [0.5, 2]) or the baseline's
/// warm-start Q. Deterministic given (method, seed).
std::vector<ResultRow> run_method(const TabularMDP& mdp, const MethodSpec& method, int seed,
                                  RunTrace* trace_out = nullptr);

struct SolveOutput {
    Policy policy;
    RunTrace trace;
    Eigen::VectorXd u;            // fixed point for the final prior
    Eigen::VectorXd distribution; // u .* v
    bool converged = false;
};

/// Full seeded solver run plus the final-eigenvector artifacts the `solve`
/// subcommand writes out.
SolveOutput run_eve_solve(const TabularMDP& mdp, const EveConfig& cfg, int seed);

struct CompareOutcome {
    std::vector<ResultRow> rows;
    int methods_completed = 0;
    int methods_failed = 0;
};

/// Runs every (method, seed) pair and writes results.csv, figure.svg and
/// summary.json into cfg.output_dir.
CompareOutcome run_compare(const ExperimentConfig& cfg);

std::string render_figure_svg(const std::vector<ResultRow>& rows);

} // namespace eve

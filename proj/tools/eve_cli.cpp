#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "eve/baselines.hpp"
#include "eve/grid.hpp"
#include "eve/harness.hpp"
#include "eve/oracle.hpp"
#include "eve/solver.hpp"

namespace {

using nlohmann::json;

json policy_to_json(const eve::Policy& pi) {
    json rows = json::array();
    for (int s = 0; s < pi.n_states(); ++s) {
        json row = json::array();
        for (int a = 0; a < pi.n_actions(); ++a) row.push_back(pi.probs(s, a));
        rows.push_back(row);
    }
    return rows;
}

eve::Policy policy_from_json(const json& j, int n_states, int n_actions) {
    eve::Policy pi;
    pi.probs.resize(n_states, n_actions);
    if (static_cast<int>(j.size()) != n_states)
        throw std::invalid_argument("policy: row count does not match the environment");
    for (int s = 0; s < n_states; ++s) {
        if (static_cast<int>(j[s].size()) != n_actions)
            throw std::invalid_argument("policy: column count does not match the environment");
        for (int a = 0; a < n_actions; ++a) pi.probs(s, a) = j[s][a].get<double>();
    }
    pi.validate();
    return pi;
}

int cmd_solve(const std::string& env_path, const std::string& beta, int inner_iters,
              int ppi_iters, double tol, int seed, const std::string& out_dir) {
    const eve::GridSpec spec = eve::GridSpec::load(env_path);
    const eve::TabularMDP mdp = eve::build_gridworld(spec);
    std::filesystem::create_directories(out_dir);

    eve::EveConfig cfg;
    cfg.inner_iters = inner_iters;
    cfg.ppi_iters = ppi_iters;
    cfg.fixed_point_tol = tol;
    if (beta.rfind("linear:", 0) == 0) {
        double lo = 0.0, hi = 0.0;
        char colon = 0;
        std::istringstream in(beta.substr(7));
        if (!(in >> lo >> colon >> hi) || colon != ':')
            throw std::invalid_argument("beta: expected linear:<start>:<end>");
        const int T = std::max(ppi_iters, 2);
        cfg.beta_schedule = [lo, hi, T](int t) { return lo + (hi - lo) * (t - 1) / (T - 1); };
    } else {
        const double value = std::stod(beta);
        cfg.beta_schedule = [value](int) { return value; };
    }

    const eve::SolveOutput result = eve::run_eve_solve(mdp, cfg, seed);
    eve::write_file_atomic(out_dir + "/trace.csv",
                           eve::rows_to_csv(eve::trace_to_rows(result.trace, "eve", seed)));
    json dist = json::array();
    for (int i = 0; i < result.distribution.size(); ++i) dist.push_back(result.distribution[i]);
    eve::write_file_atomic(out_dir + "/policy.json", policy_to_json(result.policy).dump(2) + "\n");
    eve::write_file_atomic(out_dir + "/distribution.json", dist.dump(2) + "\n");
    return result.converged ? 0 : 2;
}

int cmd_eval(const std::string& env_path, const std::string& policy_path) {
    const eve::GridSpec spec = eve::GridSpec::load(env_path);
    const eve::TabularMDP mdp = eve::build_gridworld(spec);
    std::ifstream in(policy_path);
    if (!in) throw std::invalid_argument("policy: cannot open " + policy_path);
    json j;
    in >> j;
    const eve::Policy pi = policy_from_json(j, mdp.n_states, mdp.n_actions);

    eve::Distribution d;
    try {
        d = eve::stationary_distribution(eve::sa_operator(mdp, pi).matrix);
    } catch (const eve::ImprimitiveError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
    std::printf("entropy_nats %.17g\n", eve::entropy(d));
    json dist = json::array();
    for (int i = 0; i < d.size(); ++i) dist.push_back(d[i]);
    eve::write_file_atomic("stationary.json", dist.dump(2) + "\n");
    return 0;
}

int cmd_compare(const std::string& config_path) {
    std::ifstream in(config_path);
    if (!in) throw std::invalid_argument("config: cannot open " + config_path);
    json j;
    in >> j;
    const eve::ExperimentConfig cfg = eve::ExperimentConfig::from_json(j);
    const eve::CompareOutcome outcome = eve::run_compare(cfg);
    std::printf("completed %d method(s), %d failed; results in %s\n", outcome.methods_completed,
                outcome.methods_failed, cfg.output_dir.c_str());
    return outcome.methods_completed >= 1 ? 0 : 1;
}

int cmd_env(const std::string& preset, const std::string& out_path,
            const std::string& validate_path) {
    if (!validate_path.empty()) {
        const eve::GridSpec spec = eve::GridSpec::load(validate_path);
        const eve::TabularMDP mdp = eve::build_gridworld(spec);
        const auto op = eve::sa_operator(mdp, eve::Policy::uniform(mdp.n_states, mdp.n_actions));
        const int m = eve::index_of_primitivity(op.matrix);
        std::printf("states %d\nactions %d\nindex_of_primitivity %d\n", mdp.n_states,
                    mdp.n_actions, m);
        return 0;
    }
    if (preset != "cliffworld") throw std::invalid_argument("preset: unknown preset " + preset);
    eve::GridSpec::cliffworld().save(out_path);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Maximum-entropy exploration solver for tabular MDPs"};
    app.require_subcommand(1);

    std::string env_path, out = ".", beta = "1", policy_path, config_path;
    std::string preset = "cliffworld", out_file = "env.json", validate_path;
    int inner_iters = 100, ppi_iters = 60, seed = 0;
    double tol = 1e-10;

    auto* solve = app.add_subcommand("solve", "Run the fixed-point solver with PPI");
    solve->add_option("--env", env_path, "Environment JSON file")->required();
    solve->add_option("--beta", beta, "Inverse temperature: number or linear:<a>:<b>");
    solve->add_option("--inner-iters", inner_iters, "Max potential updates per PPI iteration");
    solve->add_option("--ppi-iters", ppi_iters, "Max PPI iterations");
    solve->add_option("--tol", tol, "Fixed-point tolerance (Hilbert metric)");
    solve->add_option("--seed", seed, "Seed for the initial potential perturbation");
    solve->add_option("--out", out, "Output directory");

    auto* eval = app.add_subcommand("eval", "Entropy of a policy's stationary distribution");
    eval->add_option("--env", env_path, "Environment JSON file")->required();
    eval->add_option("--policy", policy_path, "Policy JSON file")->required();

    auto* compare = app.add_subcommand("compare", "Run a multi-method comparison");
    compare->add_option("--config", config_path, "Experiment JSON config")->required();

    auto* env = app.add_subcommand("env", "Write or validate environment specs");
    env->add_option("--preset", preset, "Preset name (cliffworld)");
    env->add_option("--out", out_file, "Output file for the preset");
    env->add_option("--validate", validate_path, "Spec file to validate");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed())
            return cmd_solve(env_path, beta, inner_iters, ppi_iters, tol, seed, out);
        if (eval->parsed()) return cmd_eval(env_path, policy_path);
        if (compare->parsed()) return cmd_compare(config_path);
        if (env->parsed()) return cmd_env(preset, out_file, validate_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

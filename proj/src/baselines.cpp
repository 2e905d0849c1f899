#include "eve/baselines.hpp"

#include <cmath>

namespace eve {

namespace {
constexpr double kVisitationFloor = 1e-12;
constexpr double kMaxEntPlannerBeta = 64.0;
// Uniform smoothing applied to the planner's near-greedy policies so every
// mixture component induces a primitive, well-mixing chain.
constexpr double kMaxEntSmoothing = 1e-3;
} // namespace

double SoftQConfig::linear_beta_default(int t) {
    return std::min(10.0, static_cast<double>(1 + (t - 1) / 10));
}

void SoftQConfig::validate() const {
    if (eta <= 0.0 || eta > 1.0) throw std::invalid_argument("eta: must be in (0, 1]");
    if (mode == SoftQMode::Discounted && (gamma < 0.0 || gamma >= 1.0))
        throw std::invalid_argument("gamma: must be in [0, 1)");
    if (inner_steps <= 0) throw std::invalid_argument("inner_steps: must be positive");
    if (outer_iters <= 0) throw std::invalid_argument("outer_iters: must be positive");
}

RewardVector visitation_reward(const Distribution& d) {
    return (-d.array().max(kVisitationFloor).log()).matrix();
}

namespace {

// Soft state value V(s') = beta^{-1} log sum_a' pi0(a'|s') e^{beta Q(s',a')},
// with max-subtraction per state.
Eigen::VectorXd soft_values(const Policy& pi0, const Eigen::VectorXd& q, double beta) {
    const int S = pi0.n_states(), A = pi0.n_actions();
    Eigen::VectorXd v(S);
    for (int s = 0; s < S; ++s) {
        double m = -std::numeric_limits<double>::infinity();
        for (int a = 0; a < A; ++a)
            if (pi0.probs(s, a) > 0.0) m = std::max(m, q[s * A + a]);
        double acc = 0.0;
        for (int a = 0; a < A; ++a)
            if (pi0.probs(s, a) > 0.0)
                acc += pi0.probs(s, a) * std::exp(beta * (q[s * A + a] - m));
        v[s] = m + std::log(acc) / beta;
    }
    return v;
}

Policy boltzmann_policy(const Policy& pi0, const Eigen::VectorXd& q, double beta) {
    const int S = pi0.n_states(), A = pi0.n_actions();
    Policy pi;
    pi.probs.setZero(S, A);
    for (int s = 0; s < S; ++s) {
        double m = -std::numeric_limits<double>::infinity();
        for (int a = 0; a < A; ++a)
            if (pi0.probs(s, a) > 0.0) m = std::max(m, q[s * A + a]);
        for (int a = 0; a < A; ++a)
            if (pi0.probs(s, a) > 0.0)
                pi.probs(s, a) = pi0.probs(s, a) * std::exp(beta * (q[s * A + a] - m));
        pi.probs.row(s) /= pi.probs.row(s).sum();
    }
    return pi;
}

} // namespace

SoftQResult soft_q_discounted(const TabularMDP& mdp, const Policy& pi0, const RewardVector& r,
                              double gamma, double beta, int steps,
                              const Eigen::VectorXd& q_init) {
    const int n = mdp.n_sa();
    Eigen::VectorXd q = q_init.size() ? q_init : Eigen::VectorXd::Zero(n);
    for (int step = 0; step < steps; ++step) {
        const Eigen::VectorXd v = soft_values(pi0, q, beta);
        Eigen::VectorXd qn(n);
        for (int s = 0; s < mdp.n_states; ++s)
            for (int a = 0; a < mdp.n_actions; ++a) {
                const int i = mdp.flat(s, a);
                qn[i] = r[i] + gamma * v[mdp.next(s, a)];
            }
        q = qn;
    }
    return SoftQResult{q, boltzmann_policy(pi0, q, beta), 0.0};
}

SoftQResult soft_q_differential(const TabularMDP& mdp, const Policy& pi0, const RewardVector& r,
                                double beta, int steps, const Eigen::VectorXd& q_init) {
    const int n = mdp.n_sa();
    Eigen::VectorXd q = q_init.size() ? q_init : Eigen::VectorXd::Zero(n);
    double rho = 0.0;
    for (int step = 0; step < steps; ++step) {
        const Eigen::VectorXd v = soft_values(pi0, q, beta);
        Eigen::VectorXd backup(n);
        for (int s = 0; s < mdp.n_states; ++s)
            for (int a = 0; a < mdp.n_actions; ++a) {
                const int i = mdp.flat(s, a);
                backup[i] = r[i] + v[mdp.next(s, a)];
            }
        rho = backup[0] - q[0]; // RVI anchor at flat index 0
        q = backup.array() - rho;
    }
    return SoftQResult{q, boltzmann_policy(pi0, q, beta), rho};
}

std::pair<Policy, RunTrace> reward_mixing_loop(const TabularMDP& mdp, const SoftQConfig& cfg) {
    cfg.validate();
    const Policy pi0 = Policy::uniform(mdp.n_states, mdp.n_actions);
    Policy pi = pi0;
    Eigen::VectorXd q = cfg.q_init.size() ? cfg.q_init : Eigen::VectorXd::Zero(mdp.n_sa());
    RewardVector r;
    RunTrace trace;
    long updates = 0;

    for (int t = 1; t <= cfg.outer_iters; ++t) {
        const Distribution d = stationary_distribution(sa_operator(mdp, pi).matrix);
        const RewardVector fresh = visitation_reward(d);
        r = (t == 1) ? fresh : ((1.0 - cfg.eta) * r + cfg.eta * fresh).eval();
        const double beta = cfg.beta_schedule(t);

        SoftQResult res = cfg.mode == SoftQMode::Discounted
                              ? soft_q_discounted(mdp, pi0, r, cfg.gamma, beta, cfg.inner_steps, q)
                              : soft_q_differential(mdp, pi0, r, beta, cfg.inner_steps, q);
        q = res.q;
        pi = res.policy;
        updates += cfg.inner_steps;

        TraceRecord rec;
        rec.t = t;
        rec.beta = beta;
        rec.entropy_stationary = entropy(stationary_distribution(sa_operator(mdp, pi).matrix));
        rec.inner_iters_used = cfg.inner_steps;
        rec.cumulative_updates = updates;
        trace.records.push_back(rec);
    }
    return {pi, trace};
}

std::pair<MixturePolicy, RunTrace> maxent_mixture(const TabularMDP& mdp, int outer_iters,
                                                  std::function<double(int)> step_rule,
                                                  int inner_steps) {
    if (outer_iters <= 0) throw std::invalid_argument("outer_iters: must be positive");
    if (!step_rule) step_rule = [](int k) { return 2.0 / (k + 2.0); };
    const Policy pi0 = Policy::uniform(mdp.n_states, mdp.n_actions);

    MixturePolicy mix;
    mix.components.push_back({pi0, 1.0});
    Distribution d_mix = stationary_distribution(sa_operator(mdp, pi0).matrix);
    RunTrace trace;
    long updates = 0;

    for (int k = 1; k <= outer_iters; ++k) {
        // Frank-Wolfe direction: the (smoothed) greedy policy for the
        // entropy-gradient reward at the current mixture.
        const RewardVector r = (-(1.0 + d_mix.array().max(kVisitationFloor).log())).matrix();
        SoftQResult res = soft_q_differential(mdp, pi0, r, kMaxEntPlannerBeta, inner_steps,
                                              Eigen::VectorXd());
        updates += inner_steps;
        Policy component = res.policy;
        component.probs = (1.0 - kMaxEntSmoothing) * component.probs.array() +
                          kMaxEntSmoothing / mdp.n_actions;
        const Distribution d_new = stationary_distribution(sa_operator(mdp, component).matrix);

        // Exact line search on [0, step_rule(k)]: the mixture entropy is
        // concave in the step size, so ternary search finds the maximizer and
        // the trajectory stays nondecreasing.
        auto mixture_entropy = [&](double a) {
            return entropy((1.0 - a) * d_mix + a * d_new);
        };
        double lo = 0.0, hi = step_rule(k);
        for (int i = 0; i < 100; ++i) {
            const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
            if (mixture_entropy(m1) < mixture_entropy(m2))
                lo = m1;
            else
                hi = m2;
        }
        const double alpha = 0.5 * (lo + hi);
        for (auto& [policy, w] : mix.components) w *= 1.0 - alpha;
        mix.components.push_back({component, alpha});
        d_mix = (1.0 - alpha) * d_mix + alpha * d_new;

        TraceRecord rec;
        rec.t = k;
        rec.beta = kMaxEntPlannerBeta;
        rec.entropy_stationary = entropy(d_mix);
        rec.inner_iters_used = inner_steps;
        rec.cumulative_updates = updates;
        trace.records.push_back(rec);
    }
    return {mix, trace};
}

} // namespace eve

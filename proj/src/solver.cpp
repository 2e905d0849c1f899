#include "eve/solver.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace eve {

void EveConfig::validate() const {
    if (inner_iters <= 0) throw std::invalid_argument("inner_iters: must be positive");
    if (ppi_iters <= 0) throw std::invalid_argument("ppi_iters: must be positive");
    if (fixed_point_tol <= 0.0) throw std::invalid_argument("fixed_point_tol: must be positive");
    for (int t = 1; t <= ppi_iters; ++t)
        if (beta_schedule(t) < 1.0)
            throw std::invalid_argument("beta_schedule: beta(t) >= 1 is required");
}

// u_j <- ( (u^T P)_j^{1/beta} / sum_i P_ji u_i^{-1/beta} (u^T P)_i^{(1-beta)/beta} )^{beta/(1+beta)}
// The numerator aggregates flow out of (s,a); the denominator flow into it.
Eigen::VectorXd eve_step_raw(const Eigen::VectorXd& u, const Eigen::MatrixXd& op, double beta) {
    if ((u.array() <= 0.0).any())
        throw std::domain_error("eve_step: potential vector must be strictly positive");
    const Eigen::ArrayXd utp = (op.transpose() * u).array(); // (u^T P)_j
    if ((utp <= 0.0).any())
        throw std::domain_error("eve_step: zero column flow, support is reducible");
    const Eigen::ArrayXd num = utp.pow(1.0 / beta);
    const Eigen::ArrayXd f = u.array().pow(-1.0 / beta) * utp.pow((1.0 - beta) / beta);
    const Eigen::ArrayXd den = (op * f.matrix()).array();
    if ((den <= 0.0).any())
        throw std::domain_error("eve_step: zero row flow, support is reducible");
    return (num / den).pow(beta / (1.0 + beta)).matrix();
}

Eigen::VectorXd eve_step(const Eigen::VectorXd& u, const Eigen::MatrixXd& op, double beta) {
    Eigen::VectorXd t = eve_step_raw(u, op, beta);
    t *= static_cast<double>(t.size()) / t.sum();
    return t;
}

namespace {

// log(M e^x) with max-subtraction, entrywise over the output.
Eigen::ArrayXd log_mat_exp(const Eigen::MatrixXd& m, const Eigen::ArrayXd& x) {
    const double shift = x.maxCoeff();
    const Eigen::ArrayXd y = (m * (x - shift).exp().matrix()).array();
    return y.log() + shift;
}

} // namespace

Eigen::VectorXd q_step(const Eigen::VectorXd& q, const Eigen::MatrixXd& op) {
    const Eigen::ArrayXd fwd = log_mat_exp(op.transpose(), q.array());
    const Eigen::ArrayXd bwd = log_mat_exp(op, -q.array());
    return (0.5 * fwd - 0.5 * bwd).matrix();
}

Eigen::VectorXd solve_fixed_point(const Eigen::MatrixXd& op, double beta, double tol,
                                  int max_iter, FixedPointDiagnostics* diag,
                                  const Eigen::VectorXd* u0, bool use_log_space,
                                  bool require_convergence) {
    if (beta < 1.0)
        throw std::invalid_argument("solve_fixed_point: beta < 1 is outside the contraction regime");
    const int n = static_cast<int>(op.rows());
    Eigen::VectorXd u = u0 ? *u0 : Eigen::VectorXd::Ones(n);
    if (u0) u *= static_cast<double>(n) / u.sum();

    FixedPointDiagnostics local;
    FixedPointDiagnostics& d = diag ? *diag : local;
    d.residuals.clear();
    d.converged = false;

    const bool log_space = use_log_space && beta == 1.0;
    Eigen::VectorXd q;
    if (log_space) q = u.array().log().matrix();

    double res = std::numeric_limits<double>::infinity();
    for (int it = 0; it < max_iter; ++it) {
        if (log_space) {
            const Eigen::VectorXd qn = q_step(q, op);
            // span seminorm of the log difference = d_H of the exponentials
            const Eigen::ArrayXd diff = (qn - q).array();
            res = diff.maxCoeff() - diff.minCoeff();
            q = qn;
        } else {
            const Eigen::VectorXd un = eve_step(u, op, beta);
            res = hilbert_metric(un, u);
            u = un;
        }
        d.residuals.push_back(res);
        d.iterations = it + 1;
        if (res <= tol) {
            d.converged = true;
            break;
        }
    }
    if (log_space) {
        const Eigen::ArrayXd e = (q.array() - q.maxCoeff()).exp();
        u = (e * (n / e.sum())).matrix();
    }
    if (!d.converged && require_convergence) {
        std::ostringstream msg;
        msg << "solve_fixed_point: no convergence after " << max_iter
            << " iterations, last residual " << res;
        throw std::runtime_error(msg.str());
    }
    return u;
}

Eigen::VectorXd recover_right_eigenvector(const Eigen::VectorXd& u, const Eigen::MatrixXd& op,
                                          double beta) {
    const Eigen::ArrayXd utp = (op.transpose() * u).array();
    Eigen::ArrayXd v = (utp / u.array().pow(beta + 1.0)).pow(1.0 / beta);
    if (!(v > 0.0).all() || !v.isFinite().all())
        throw std::domain_error("recover_right_eigenvector: nonpositive entry");
    v /= (u.array() * v).sum();
    return v.matrix();
}

RewardVector reward_from_uv(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
    return (-(u.array() * v.array()).log()).matrix();
}

LambdaTheta extract_lambda_theta(const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                                 const SAOperator& op, double beta) {
    const TiltedOperator tilted = tilted_operator(op, reward_from_uv(u, v), beta);
    const Eigen::ArrayXd ratios = (tilted.matrix.transpose() * u).array() / u.array();
    LambdaTheta out;
    out.lambda = ratios.mean();
    out.ratio_spread = (ratios.maxCoeff() - ratios.minCoeff()) / out.lambda;
    out.theta_star = std::log(out.lambda) / beta;
    if (out.ratio_spread > 1e-4)
        throw std::runtime_error("extract_lambda_theta: eigenvalue ratio spread " +
                                 std::to_string(out.ratio_spread) + " signals non-convergence");
    return out;
}

Policy extract_policy(const Eigen::VectorXd& u, const Policy& pi0) {
    const int S = pi0.n_states(), A = pi0.n_actions();
    Policy pi;
    pi.probs.resize(S, A);
    for (int s = 0; s < S; ++s) {
        for (int a = 0; a < A; ++a) pi.probs(s, a) = pi0.probs(s, a) * u[s * A + a];
        pi.probs.row(s) /= pi.probs.row(s).sum();
    }
    return pi;
}

std::pair<Policy, RunTrace> run_ppi(const TabularMDP& mdp, const Policy& pi0_init,
                                    const EveConfig& cfg, const Eigen::VectorXd* u0) {
    cfg.validate();
    pi0_init.validate();
    const int n = mdp.n_sa();

    Policy pi0 = pi0_init;
    Eigen::VectorXd u = u0 ? Eigen::VectorXd(*u0 * (n / u0->sum()))
                           : Eigen::VectorXd(Eigen::VectorXd::Ones(n));
    index_of_primitivity(sa_operator(mdp, pi0).matrix); // hard error if periodic/reducible

    RunTrace trace;
    long updates = 0;
    Eigen::VectorXd prev_fp;
    Policy pi_star = pi0;

    for (int t = 1; t <= cfg.ppi_iters; ++t) {
        const double beta = cfg.beta_schedule(t);
        const SAOperator op = sa_operator(mdp, pi0);

        FixedPointDiagnostics diag;
        // N may cap the inner loop before tol; the warm start carries the
        // remaining progress into the next PPI round.
        u = solve_fixed_point(op.matrix, beta, cfg.fixed_point_tol, cfg.inner_iters, &diag, &u,
                              cfg.use_log_space, /*require_convergence=*/false);
        updates += diag.iterations;

        const Eigen::VectorXd v = recover_right_eigenvector(u, op.matrix, beta);
        const Eigen::VectorXd uv = (u.array() * v.array()).matrix();
        pi_star = extract_policy(u, pi0);

        const Distribution d_st = stationary_distribution(sa_operator(mdp, pi_star).matrix);
        const RewardVector r = reward_from_uv(u, v);

        TraceRecord rec;
        rec.t = t;
        rec.beta = beta;
        rec.entropy_uv = entropy(uv);
        rec.entropy_stationary = entropy(d_st);
        rec.rho = d_st.dot(r);
        rec.hilbert_residual = diag.residuals.empty() ? 0.0 : diag.residuals.back();
        rec.inner_iters_used = diag.iterations;
        rec.cumulative_updates = updates;
        try {
            const LambdaTheta lt = extract_lambda_theta(u, v, op, beta);
            rec.lambda = lt.lambda;
            rec.theta_star = lt.theta_star;
        } catch (const std::runtime_error&) {
            // not converged enough for a clean spectral read-out this round
        }
        trace.records.push_back(rec);

        const bool settled = prev_fp.size() > 0 && hilbert_metric(u, prev_fp) <= cfg.ppi_stop_tol;
        prev_fp = u;
        pi0 = pi_star;
        if (settled) break;
    }
    return {pi_star, trace};
}

} // namespace eve

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "eve/oracle.hpp"
#include "eve/solver.hpp"
#include "test_util.hpp"

using namespace eve;

namespace {

Eigen::MatrixXd two_cycle() {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 2);
    m(1, 0) = m(0, 1) = 1.0;
    return m;
}

// Second implementation of the fixed-point update, eliminated by hand from
// the paired eigenvector equations: recover v from u (scale-free), push it
// through the backward equation, then invert for the new u. Plain loops, no
// shared code with the implementation under test.
Eigen::VectorXd appendix_step(const Eigen::VectorXd& u, const Eigen::MatrixXd& p, double beta) {
    const int n = static_cast<int>(u.size());
    std::vector<double> utp(n, 0.0);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) utp[j] += u[k] * p(k, j);
    std::vector<double> v0(n), w(n);
    for (int i = 0; i < n; ++i) {
        v0[i] = std::pow(utp[i] / std::pow(u[i], beta + 1.0), 1.0 / beta);
        w[i] = std::pow(u[i], -beta) * std::pow(v0[i], 1.0 - beta);
    }
    Eigen::VectorXd out(n);
    for (int j = 0; j < n; ++j) {
        double vj = 0.0;
        for (int i = 0; i < n; ++i) vj += p(j, i) * w[i];
        out[j] = std::pow(utp[j] / std::pow(vj, beta), 1.0 / (1.0 + beta));
    }
    return out;
}

} // namespace

TEST_CASE("eve_step scalar and permutation cases") {
    SUBCASE("1-state chain is a self-map") {
        const Eigen::MatrixXd p = Eigen::MatrixXd::Ones(1, 1);
        Eigen::VectorXd u(1);
        u << 2.7;
        CHECK(eve_step_raw(u, p, 1.0)[0] == doctest::Approx(2.7));
        CHECK(eve_step(u, p, 1.0)[0] == doctest::Approx(1.0)); // normalized to sum = 1
    }
    SUBCASE("2-cycle swaps the components") {
        Eigen::VectorXd u(2);
        u << 3.0, 5.0;
        const Eigen::VectorXd t = eve_step_raw(u, two_cycle(), 1.0);
        CHECK(t[0] == doctest::Approx(5.0));
        CHECK(t[1] == doctest::Approx(3.0));
    }
}

TEST_CASE("eve_step matches the appendix elimination on random operators") {
    std::mt19937 rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        const TabularMDP mdp = testutil::random_primitive_mdp(rng, 4, 2);
        const auto op = sa_operator(mdp, testutil::random_positive_policy(rng, 4, 2));
        const Eigen::VectorXd u = testutil::random_positive_vector(rng, 8);
        for (double beta : {1.0, 2.0}) {
            const Eigen::VectorXd got = eve_step_raw(u, op.matrix, beta);
            const Eigen::VectorXd want = appendix_step(u, op.matrix, beta);
            CHECK((got - want).lpNorm<Eigen::Infinity>() <= 1e-10 * want.lpNorm<Eigen::Infinity>());
        }
    }
}

TEST_CASE("operator algebra: homogeneity, monotonicity, positivity") {
    std::mt19937 rng(37);
    std::uniform_real_distribution<double> scale(0.1, 10.0);
    for (int trial = 0; trial < 50; ++trial) {
        const TabularMDP mdp = testutil::random_primitive_mdp(rng, 4, 2);
        const auto op = sa_operator(mdp, testutil::random_positive_policy(rng, 4, 2));
        const double beta = 1.0 + 4.0 * scale(rng) / 10.0;
        const Eigen::VectorXd u = testutil::random_positive_vector(rng, 8);

        const Eigen::VectorXd tu = eve_step_raw(u, op.matrix, beta);
        CHECK((tu.array() > 0.0).all());

        const double c = scale(rng);
        const Eigen::VectorXd tcu = eve_step_raw(c * u, op.matrix, beta);
        CHECK((tcu - c * tu).lpNorm<Eigen::Infinity>() <=
              1e-12 * (c * tu).lpNorm<Eigen::Infinity>());

        Eigen::VectorXd bigger = u;
        for (int i = 0; i < 8; ++i) bigger[i] += scale(rng) / 10.0;
        const Eigen::VectorXd tb = eve_step_raw(bigger, op.matrix, beta);
        CHECK(((tb - tu).array() >= -1e-12).all());
    }
}

TEST_CASE("q_step agrees with the multiplicative update up to a shift") {
    std::mt19937 rng(41);
    SUBCASE("1-state: q is preserved up to a constant") {
        const Eigen::MatrixXd p = Eigen::MatrixXd::Ones(1, 1);
        Eigen::VectorXd q(1);
        q << -0.3;
        CHECK(q_step(q, p)[0] == doctest::Approx(-0.3));
    }
    SUBCASE("random operators") {
        for (int trial = 0; trial < 20; ++trial) {
            const TabularMDP mdp = testutil::random_primitive_mdp(rng, 4, 2);
            const auto op = sa_operator(mdp, testutil::random_positive_policy(rng, 4, 2));
            const Eigen::VectorXd u = testutil::random_positive_vector(rng, 8);
            const Eigen::VectorXd lhs = q_step(u.array().log().matrix(), op.matrix);
            const Eigen::VectorXd rhs = eve_step_raw(u, op.matrix, 1.0).array().log().matrix();
            const Eigen::ArrayXd diff = (lhs - rhs).array();
            CHECK(diff.maxCoeff() - diff.minCoeff() <= 1e-10); // span seminorm
        }
    }
}

TEST_CASE("solve_fixed_point") {
    SUBCASE("2-cycle converges immediately from the flat start") {
        FixedPointDiagnostics diag;
        const Eigen::VectorXd u = solve_fixed_point(two_cycle(), 1.0, 1e-12, 100, &diag);
        CHECK(diag.iterations == 1);
        CHECK(diag.residuals.back() == 0.0);
        CHECK(u[0] == doctest::Approx(1.0));
        CHECK(u[1] == doctest::Approx(1.0));
    }
    SUBCASE("beta below one is rejected") {
        CHECK_THROWS_AS(solve_fixed_point(two_cycle(), 0.5, 1e-10, 100), std::invalid_argument);
    }
    SUBCASE("uniqueness across random initializations") {
        std::mt19937 rng(43);
        const TabularMDP mdp = testutil::random_primitive_mdp(rng, 5, 2);
        const auto op = sa_operator(mdp, testutil::random_positive_policy(rng, 5, 2));
        const Eigen::VectorXd ref = solve_fixed_point(op.matrix, 2.0, 1e-12, 20000);
        for (int trial = 0; trial < 10; ++trial) {
            const Eigen::VectorXd u0 = testutil::random_positive_vector(rng, 10, 0.05, 20.0);
            const Eigen::VectorXd u = solve_fixed_point(op.matrix, 2.0, 1e-12, 20000, nullptr,
                                                        &u0);
            CHECK(hilbert_metric(u, ref) <= 1e-8);
        }
    }
    SUBCASE("cliffworld fixed point is self-consistent with the dense eigensolver") {
        const TabularMDP mdp = build_gridworld(GridSpec::cliffworld());
        const auto op = sa_operator(mdp, Policy::uniform(mdp.n_states, mdp.n_actions));
        const Eigen::VectorXd u = solve_fixed_point(op.matrix, 1.0, 1e-13, 50000);
        const Eigen::VectorXd v = recover_right_eigenvector(u, op.matrix, 1.0);
        const auto tilted = tilted_operator(op, reward_from_uv(u, v), 1.0);
        const auto dense = dense_dominant_eigs(tilted.matrix);
        CHECK((u - dense.left).lpNorm<Eigen::Infinity>() <= 1e-8);
        const Eigen::VectorXd uv = (u.array() * v.array()).matrix();
        const Eigen::VectorXd uv_dense = (dense.left.array() * dense.right.array()).matrix();
        CHECK((uv - uv_dense).lpNorm<1>() <= 1e-8);
    }
    SUBCASE("log-space path reaches the same fixed point") {
        std::mt19937 rng(47);
        const TabularMDP mdp = testutil::random_primitive_mdp(rng, 5, 2);
        const auto op = sa_operator(mdp, testutil::random_positive_policy(rng, 5, 2));
        const Eigen::VectorXd a = solve_fixed_point(op.matrix, 1.0, 1e-12, 20000);
        const Eigen::VectorXd b = solve_fixed_point(op.matrix, 1.0, 1e-12, 20000, nullptr,
                                                    nullptr, /*use_log_space=*/true);
        CHECK(hilbert_metric(a, b) <= 1e-9);
    }
}

TEST_CASE("right eigenvector recovery") {
    SUBCASE("scalar chain") {
        const Eigen::MatrixXd p = Eigen::MatrixXd::Ones(1, 1);
        Eigen::VectorXd u(1);
        u << 1.0;
        const Eigen::VectorXd v = recover_right_eigenvector(u, p, 1.0);
        CHECK(u[0] * v[0] == doctest::Approx(1.0));
    }
    SUBCASE("2-cycle gives the uniform product") {
        Eigen::VectorXd u(2);
        u << 1.0, 1.0;
        const Eigen::VectorXd v = recover_right_eigenvector(u, two_cycle(), 1.0);
        CHECK(u[0] * v[0] == doctest::Approx(0.5));
        CHECK(u[1] * v[1] == doctest::Approx(0.5));
    }
}

TEST_CASE("reward from the eigenvector product") {
    Eigen::VectorXd u = Eigen::VectorXd::Constant(4, 2.0);
    Eigen::VectorXd v = Eigen::VectorXd::Constant(4, 0.125);
    const RewardVector r = reward_from_uv(u, v);
    CHECK(r[0] == doctest::Approx(std::log(4.0))); // uniform over 4 atoms
    // expected reward under u o v equals the entropy of u o v
    const Eigen::VectorXd uv = (u.array() * v.array()).matrix();
    CHECK(uv.dot(r) == doctest::Approx(entropy(uv)));
}

TEST_CASE("lambda and theta extraction") {
    SUBCASE("scalar chain: lambda 1, theta 0") {
        SAOperator op;
        op.n_states = 1;
        op.n_actions = 1;
        op.matrix = Eigen::MatrixXd::Ones(1, 1);
        Eigen::VectorXd one = Eigen::VectorXd::Ones(1);
        const auto lt = extract_lambda_theta(one, one, op, 1.0);
        CHECK(lt.lambda == doctest::Approx(1.0));
        CHECK(lt.theta_star == doctest::Approx(0.0));
    }
    SUBCASE("2-cycle self-consistent point: lambda 2, theta log 2") {
        SAOperator op;
        op.n_states = 2;
        op.n_actions = 1;
        op.matrix = two_cycle();
        Eigen::VectorXd u = Eigen::VectorXd::Ones(2);
        Eigen::VectorXd v = Eigen::VectorXd::Constant(2, 0.5);
        const auto lt = extract_lambda_theta(u, v, op, 1.0);
        CHECK(lt.lambda == doctest::Approx(2.0));
        CHECK(lt.theta_star == doctest::Approx(std::log(2.0)));
    }
}

TEST_CASE("policy extraction") {
    std::mt19937 rng(53);
    const Policy pi0 = testutil::random_positive_policy(rng, 3, 4);
    SUBCASE("constant potential returns the prior") {
        const Policy pi = extract_policy(Eigen::VectorXd::Constant(12, 3.0), pi0);
        CHECK((pi.probs - pi0.probs).lpNorm<Eigen::Infinity>() <= 1e-14);
    }
    SUBCASE("support follows the prior") {
        Policy det;
        det.probs.setZero(2, 2);
        det.probs(0, 0) = det.probs(1, 1) = 1.0;
        const Policy pi = extract_policy(testutil::random_positive_vector(rng, 4), det);
        CHECK(support_equal(pi, det));
    }
}

TEST_CASE("posterior policy iteration") {
    SUBCASE("1-state MDP: the only policy, constant trace") {
        TabularMDP mdp;
        mdp.n_states = 1;
        mdp.n_actions = 1;
        mdp.next_state = {0};
        EveConfig cfg;
        cfg.ppi_iters = 5;
        auto [pi, trace] = run_ppi(mdp, Policy::uniform(1, 1), cfg);
        CHECK(pi.probs(0, 0) == doctest::Approx(1.0));
        for (const auto& rec : trace.records)
            CHECK(rec.entropy_stationary == doctest::Approx(0.0));
    }
    SUBCASE("periodic chain is rejected") {
        TabularMDP mdp;
        mdp.n_states = 2;
        mdp.n_actions = 1;
        mdp.next_state = {1, 0};
        EveConfig cfg;
        CHECK_THROWS_AS(run_ppi(mdp, Policy::uniform(2, 1), cfg), ImprimitiveError);
    }
    SUBCASE("stay-or-swap MDP reaches the uniform state-action distribution") {
        TabularMDP mdp;
        mdp.n_states = 2;
        mdp.n_actions = 2;
        mdp.next_state = {0, 1, 1, 0}; // action 0 stays, action 1 swaps
        EveConfig cfg;
        cfg.ppi_iters = 40;
        cfg.inner_iters = 300;
        auto [pi, trace] = run_ppi(mdp, Policy::uniform(2, 2), cfg);
        CHECK(trace.records.back().entropy_stationary ==
              doctest::Approx(std::log(4.0)).epsilon(1e-6));
    }
    SUBCASE("cliffworld: entropy-rate is monotone, product matches the chain") {
        const TabularMDP mdp = build_gridworld(GridSpec::cliffworld());
        EveConfig cfg;
        cfg.ppi_iters = 40;
        cfg.inner_iters = 400;
        auto [pi, trace] = run_ppi(mdp, Policy::uniform(mdp.n_states, mdp.n_actions), cfg);
        for (size_t i = 1; i < trace.records.size(); ++i)
            CHECK(trace.records[i].rho >= trace.records[i - 1].rho - 1e-9);
        // policy near the cliff is visibly non-uniform
        // state 2 sits at (1,1), directly above a cliff cell
        const double row_entropy = entropy(pi.probs.row(2).transpose());
        CHECK(row_entropy < std::log(4.0) - 1e-3);

        // final u o v equals the stationary distribution of the extracted policy
        const auto op = sa_operator(mdp, pi);
        const Eigen::VectorXd u = solve_fixed_point(op.matrix, 1.0, 1e-13, 50000);
        const Eigen::VectorXd v = recover_right_eigenvector(u, op.matrix, 1.0);
        const Eigen::VectorXd uv = (u.array() * v.array()).matrix();
        const Eigen::VectorXd d = stationary_distribution(op.matrix);
        CHECK((uv - d).lpNorm<1>() <= 1e-6);
    }
}

TEST_CASE("config validation") {
    EveConfig cfg;
    cfg.beta_schedule = [](int) { return 0.5; };
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.beta_schedule = [](int) { return 1.0; };
    cfg.inner_iters = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

#include "eve/oracle.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace eve {

EigenPair dense_dominant_eigs(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("dense_dominant_eigs: not square");
    index_of_primitivity(m); // rejects imprimitive input
    const int n = static_cast<int>(m.rows());

    auto dominant_vector = [n](const Eigen::MatrixXd& a, double* lambda) {
        Eigen::EigenSolver<Eigen::MatrixXd> es(a);
        int best = 0;
        for (int i = 1; i < n; ++i)
            if (std::abs(es.eigenvalues()[i]) > std::abs(es.eigenvalues()[best])) best = i;
        *lambda = es.eigenvalues()[best].real();
        Eigen::VectorXd v = es.eigenvectors().col(best).real();
        if (v.sum() < 0.0) v = -v;
        return v;
    };

    double lu = 0.0, lv = 0.0;
    Eigen::VectorXd u = dominant_vector(m.transpose(), &lu);
    Eigen::VectorXd v = dominant_vector(m, &lv);
    u *= static_cast<double>(n) / u.sum();
    v /= u.dot(v);
    return EigenPair{lv, u, v};
}

namespace {

// Strong connectivity of the state graph (forward + reverse reachability from
// state 0). Periodic chains are fine here; only reachability matters for the
// occupancy polytope to have full-support interior points.
bool strongly_connected(const TabularMDP& mdp) {
    auto reach = [&](bool reverse) {
        std::vector<char> seen(mdp.n_states, 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        while (!stack.empty()) {
            const int s = stack.back();
            stack.pop_back();
            for (int t = 0; t < mdp.n_states; ++t) {
                if (seen[t]) continue;
                bool edge = false;
                for (int a = 0; a < mdp.n_actions && !edge; ++a)
                    edge = reverse ? (mdp.next(t, a) == s) : (mdp.next(s, a) == t);
                if (edge) {
                    seen[t] = 1;
                    stack.push_back(t);
                }
            }
        }
        for (char c : seen)
            if (!c) return false;
        return true;
    };
    return reach(false) && reach(true);
}

double max_flow_violation(const TabularMDP& mdp, const Eigen::VectorXd& d) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(mdp.n_states);
    Eigen::VectorXd in = Eigen::VectorXd::Zero(mdp.n_states);
    for (int s = 0; s < mdp.n_states; ++s)
        for (int a = 0; a < mdp.n_actions; ++a) {
            out[s] += d[mdp.flat(s, a)];
            in[mdp.next(s, a)] += d[mdp.flat(s, a)];
        }
    return (out - in).lpNorm<Eigen::Infinity>();
}

// Osborne-style multiplicative rebalancing: sweep states, scaling each
// state's out-edges by sqrt(in/out) and in-edges by the reciprocal. This
// moves d within the exponential family of the flow constraints, so the
// composite with the entropy ascent step is exact mirror descent.
void rebalance(const TabularMDP& mdp, Eigen::VectorXd& d, double tol, int max_sweeps) {
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        if (max_flow_violation(mdp, d) <= tol) break;
        for (int s = 0; s < mdp.n_states; ++s) {
            double out = 0.0, in = 0.0;
            for (int a = 0; a < mdp.n_actions; ++a) out += d[mdp.flat(s, a)];
            for (int t = 0; t < mdp.n_states; ++t)
                for (int a = 0; a < mdp.n_actions; ++a)
                    if (mdp.next(t, a) == s) in += d[mdp.flat(t, a)];
            if (out <= 0.0 || in <= 0.0) continue;
            const double c = std::sqrt(in / out);
            for (int a = 0; a < mdp.n_actions; ++a) d[mdp.flat(s, a)] *= c;
            for (int t = 0; t < mdp.n_states; ++t)
                for (int a = 0; a < mdp.n_actions; ++a)
                    if (mdp.next(t, a) == s) d[mdp.flat(t, a)] /= c;
        }
        d /= d.sum();
    }
}

} // namespace

OccupancySolution max_entropy_occupancy(const TabularMDP& mdp, double tol) {
    mdp.validate();
    if (!strongly_connected(mdp))
        throw std::invalid_argument("max_entropy_occupancy: state graph not strongly connected");

    const int n = mdp.n_sa();
    const double eg_rate = 0.5;
    Eigen::VectorXd d = Eigen::VectorXd::Constant(n, 1.0 / n);
    rebalance(mdp, d, tol * 0.1, 2000);

    double h_prev = entropy(d);
    for (int it = 0; it < 100000; ++it) {
        // Exponentiated-gradient step on H: d <- d^{1 - eta}, renormalized.
        d = d.array().pow(1.0 - eg_rate).matrix();
        d /= d.sum();
        rebalance(mdp, d, tol * 0.1, 2000);
        const double h = entropy(d);
        if (std::abs(h - h_prev) < tol && max_flow_violation(mdp, d) < tol) {
            h_prev = h;
            break;
        }
        h_prev = h;
    }
    return OccupancySolution{d, h_prev, max_flow_violation(mdp, d)};
}

} // namespace eve

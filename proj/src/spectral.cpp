#include "eve/spectral.hpp"

#include <Eigen/LU>

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace eve {

TiltedOperator tilted_operator(const SAOperator& op, const RewardVector& reward, double beta) {
    if (beta <= 0.0) throw std::invalid_argument("tilted_operator: beta must be positive");
    if (reward.size() != op.matrix.cols())
        throw std::invalid_argument("tilted_operator: reward dimension mismatch");
    TiltedOperator t;
    t.beta = beta;
    t.matrix = op.matrix * (beta * reward.array()).exp().matrix().asDiagonal();
    return t;
}

EigenPair dominant_eigenpair(const Eigen::MatrixXd& tilted, double tol, int max_iter) {
    const int n = static_cast<int>(tilted.rows());
    index_of_primitivity(tilted); // throws ImprimitiveError on bad support

    Eigen::VectorXd u = Eigen::VectorXd::Ones(n);
    Eigen::VectorXd v = Eigen::VectorXd::Ones(n);
    double lambda = 0.0;
    bool converged = false;
    for (int it = 0; it < max_iter; ++it) {
        Eigen::VectorXd un = tilted.transpose() * u; // u^T P, as a column
        Eigen::VectorXd vn = tilted * v;
        un /= un.sum();
        vn /= vn.sum();
        u = un;
        v = vn;
        lambda = u.dot(tilted * v) / u.dot(v);
        const double ru = (tilted.transpose() * u - lambda * u).lpNorm<Eigen::Infinity>();
        const double rv = (tilted * v - lambda * v).lpNorm<Eigen::Infinity>();
        if (ru <= tol * u.lpNorm<Eigen::Infinity>() && rv <= tol * v.lpNorm<Eigen::Infinity>()) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw std::runtime_error("dominant_eigenpair: power iteration did not converge");

    // Pin both scales: sum(u) = n, then sum(u .* v) = 1.
    u *= static_cast<double>(n) / u.sum();
    v /= u.dot(v);
    return EigenPair{lambda, u, v};
}

Distribution stationary_distribution(const Eigen::MatrixXd& op, double tol, int max_iter) {
    const int n = static_cast<int>(op.rows());
    index_of_primitivity(op);
    Eigen::VectorXd d = Eigen::VectorXd::Constant(n, 1.0 / n);
    const int power_budget = std::min(max_iter, 20000);
    for (int it = 0; it < power_budget; ++it) {
        Eigen::VectorXd dn = op * d;
        dn /= dn.sum();
        if ((op * dn - dn).lpNorm<Eigen::Infinity>() <= tol) return dn;
        d = dn;
    }
    // Slowly mixing chain: solve (I - P) d = 0, sum d = 1 directly, then
    // polish with a few extra power steps to meet the residual contract.
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - op;
    a.row(n - 1).setOnes();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    b[n - 1] = 1.0;
    d = a.fullPivLu().solve(b);
    d = d.array().max(0.0).matrix();
    d /= d.sum();
    for (int it = 0; it < 100; ++it) {
        if ((op * d - d).lpNorm<Eigen::Infinity>() <= tol) return d;
        d = op * d;
        d /= d.sum();
    }
    throw std::runtime_error("stationary_distribution: did not converge");
}

double entropy(const Distribution& d) {
    double h = 0.0;
    for (int i = 0; i < d.size(); ++i)
        if (d[i] > 0.0) h -= d[i] * std::log(d[i]);
    return h;
}

double hilbert_metric(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    if (x.size() != y.size()) throw std::invalid_argument("hilbert_metric: dimension mismatch");
    if ((x.array() <= 0.0).any() || (y.array() <= 0.0).any())
        throw std::domain_error("hilbert_metric: vectors must be strictly positive");
    const Eigen::ArrayXd r = x.array() / y.array();
    return std::log(r.maxCoeff()) - std::log(r.minCoeff());
}

double projective_diameter(const Eigen::MatrixXd& m) {
    if ((m.array() <= 0.0).any())
        throw std::domain_error("projective_diameter: zero entry, diameter infinite");
    const int n = static_cast<int>(m.cols());
    double diam = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            diam = std::max(diam, hilbert_metric(m.col(i), m.col(j)));
    return diam;
}

double birkhoff_coefficient(const Eigen::MatrixXd& m) {
    return std::tanh(projective_diameter(m) / 4.0);
}

} // namespace eve

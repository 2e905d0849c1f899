#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace eve {

/// One diagnostic record per outer iteration of a method run.
struct TraceRecord {
    int t = 0;                     // outer iteration index (1-based)
    double beta = 0.0;
    double lambda = std::nan("");  // NaN for methods without a spectral read-out
    double theta_star = std::nan("");
    double entropy_uv = std::nan(""); // H(u o v)
    double entropy_stationary = 0.0;  // H(d) of the current policy's chain
    double rho = std::nan("");        // entropy-rate E_d[-log(u o v)]
    double hilbert_residual = 0.0;    // d_H(T u, u) at the inner stop
    int inner_iters_used = 0;
    long cumulative_updates = 0;      // synchronous value/potential updates so far
};

struct RunTrace {
    std::vector<TraceRecord> records;
};

/// Row of the results CSV; column order is fixed:
/// method,seed,iteration,entropy_nats,residual,lambda,theta_star
struct ResultRow {
    std::string method;
    int seed = 0;
    long iteration = 0;
    double entropy_nats = 0.0;
    double residual = 0.0;
    std::optional<double> lambda;
    std::optional<double> theta_star;
};

std::vector<ResultRow> trace_to_rows(const RunTrace& trace, const std::string& method, int seed);

/// Serializes with 17 significant digits; empty cells for missing values.
std::string rows_to_csv(const std::vector<ResultRow>& rows);

/// Writes via a temp file followed by an atomic rename.
void write_file_atomic(const std::string& path, const std::string& content);

} // namespace eve

#include "eve/trace.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace eve {

namespace {

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

} // namespace

std::vector<ResultRow> trace_to_rows(const RunTrace& trace, const std::string& method, int seed) {
    std::vector<ResultRow> rows;
    rows.reserve(trace.records.size());
    for (const TraceRecord& rec : trace.records) {
        ResultRow row;
        row.method = method;
        row.seed = seed;
        row.iteration = rec.cumulative_updates;
        row.entropy_nats = rec.entropy_stationary;
        row.residual = rec.hilbert_residual;
        if (!std::isnan(rec.lambda)) row.lambda = rec.lambda;
        if (!std::isnan(rec.theta_star)) row.theta_star = rec.theta_star;
        rows.push_back(row);
    }
    return rows;
}

std::string rows_to_csv(const std::vector<ResultRow>& rows) {
    std::string out = "method,seed,iteration,entropy_nats,residual,lambda,theta_star\n";
    for (const ResultRow& r : rows) {
        out += r.method;
        out += ',' + std::to_string(r.seed);
        out += ',' + std::to_string(r.iteration);
        out += ',' + fmt17(r.entropy_nats);
        out += ',' + fmt17(r.residual);
        out += ',';
        if (r.lambda) out += fmt17(*r.lambda);
        out += ',';
        if (r.theta_star) out += fmt17(*r.theta_star);
        out += '\n';
    }
    return out;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + tmp);
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

} // namespace eve

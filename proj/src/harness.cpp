#include "eve/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <random>
#include <sstream>

#include "eve/baselines.hpp"
#include "eve/solver.hpp"

namespace eve {

namespace {

// Accepts a constant ("1.5") or a linear ramp ("linear:1:10") over T steps.
std::function<double(int)> parse_beta_schedule(const std::string& text, int total_iters) {
    if (text.rfind("linear:", 0) == 0) {
        double lo = 0.0, hi = 0.0;
        char colon = 0;
        std::istringstream in(text.substr(7));
        if (!(in >> lo >> colon >> hi) || colon != ':')
            throw std::invalid_argument("beta: expected linear:<start>:<end>");
        const int T = std::max(total_iters, 2);
        return [lo, hi, T](int t) { return lo + (hi - lo) * (t - 1) / (T - 1); };
    }
    double value = 0.0;
    try {
        value = std::stod(text);
    } catch (const std::exception&) {
        throw std::invalid_argument("beta: expected a number or linear:<start>:<end>");
    }
    return [value](int) { return value; };
}

Eigen::VectorXd seeded_noise(int n, int seed, double lo, double hi) {
    std::mt19937 rng(static_cast<unsigned>(seed));
    std::uniform_real_distribution<double> dist(lo, hi);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = dist(rng);
    return v;
}

std::string trim_number(double x) {
    std::ostringstream out;
    out << x;
    return out.str();
}

} // namespace

std::string MethodSpec::label() const {
    std::string l = name;
    if (name == "soft_q_discounted" && params.contains("gamma"))
        l += "_g" + trim_number(params.at("gamma").get<double>());
    return l;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    ExperimentConfig cfg;
    if (!j.contains("env")) throw std::invalid_argument("env: missing");
    if (j.at("env").is_string())
        cfg.env = GridSpec::load(j.at("env").get<std::string>());
    else
        cfg.env = GridSpec::from_json(j.at("env"));
    if (!j.contains("methods")) throw std::invalid_argument("methods: missing");
    for (const auto& m : j.at("methods")) {
        MethodSpec spec;
        spec.name = m.at("name").get<std::string>();
        if (m.contains("params")) {
            spec.params = m.at("params");
        } else {
            spec.params = m;
            spec.params.erase("name");
        }
        cfg.methods.push_back(spec);
    }
    if (j.contains("seeds")) cfg.seeds = j.at("seeds").get<std::vector<int>>();
    cfg.output_dir = j.value("output_dir", std::string("."));
    cfg.validate();
    return cfg;
}

void ExperimentConfig::validate() const {
    env.validate();
    if (methods.empty()) throw std::invalid_argument("methods: at least one required");
    if (seeds.empty()) throw std::invalid_argument("seeds: at least one required");
    static const std::vector<std::string> known = {"eve", "soft_q_discounted",
                                                   "soft_q_differential", "maxent"};
    for (const MethodSpec& m : methods)
        if (std::find(known.begin(), known.end(), m.name) == known.end())
            throw std::invalid_argument("methods: unknown method " + m.name);
}

SolveOutput run_eve_solve(const TabularMDP& mdp, const EveConfig& cfg, int seed) {
    cfg.validate();
    const Eigen::VectorXd u0 = seeded_noise(mdp.n_sa(), seed, 0.5, 2.0);
    SolveOutput out;
    auto [policy, trace] = run_ppi(mdp, Policy::uniform(mdp.n_states, mdp.n_actions), cfg, &u0);
    out.policy = policy;
    out.trace = std::move(trace);
    out.converged = !out.trace.records.empty() &&
                    out.trace.records.back().hilbert_residual <= cfg.fixed_point_tol;

    const double beta_final = cfg.beta_schedule(out.trace.records.empty()
                                                    ? 1
                                                    : out.trace.records.back().t);
    const SAOperator op = sa_operator(mdp, policy);
    FixedPointDiagnostics diag;
    out.u = solve_fixed_point(op.matrix, beta_final, cfg.fixed_point_tol,
                              std::max(cfg.inner_iters, 10000), &diag, nullptr,
                              cfg.use_log_space, /*require_convergence=*/false);
    const Eigen::VectorXd v = recover_right_eigenvector(out.u, op.matrix, beta_final);
    out.distribution = (out.u.array() * v.array()).matrix();
    return out;
}

std::vector<ResultRow> run_method(const TabularMDP& mdp, const MethodSpec& method, int seed,
                                  RunTrace* trace_out) {
    const nlohmann::json p =
        method.params.is_object() ? method.params : nlohmann::json::object();
    RunTrace trace;

    if (method.name == "eve") {
        EveConfig cfg;
        cfg.inner_iters = p.value("inner_iters", 100);
        cfg.ppi_iters = p.value("ppi_iters", 60);
        cfg.fixed_point_tol = p.value("tol", 1e-10);
        cfg.use_log_space = p.value("use_log_space", false);
        std::string beta = p.contains("beta") && p.at("beta").is_number()
                               ? trim_number(p.at("beta").get<double>())
                               : p.value("beta", std::string("1"));
        cfg.beta_schedule = parse_beta_schedule(beta, cfg.ppi_iters);
        cfg.validate();

        const Eigen::VectorXd u0 = seeded_noise(mdp.n_sa(), seed, 0.5, 2.0);
        auto [policy, t] = run_ppi(mdp, Policy::uniform(mdp.n_states, mdp.n_actions), cfg, &u0);
        trace = std::move(t);
    } else if (method.name == "soft_q_discounted" || method.name == "soft_q_differential") {
        SoftQConfig cfg;
        cfg.mode = method.name == "soft_q_discounted" ? SoftQMode::Discounted
                                                      : SoftQMode::Differential;
        cfg.gamma = p.value("gamma", 0.99);
        cfg.eta = p.value("eta", 0.01);
        cfg.inner_steps = p.value("inner_steps", 50);
        cfg.outer_iters = p.value("outer_iters", 100);
        if (p.contains("beta")) {
            auto sched = parse_beta_schedule(p.at("beta").is_number()
                                                 ? trim_number(p.at("beta").get<double>())
                                                 : p.at("beta").get<std::string>(),
                                             cfg.outer_iters);
            cfg.beta_schedule = sched;
        }
        cfg.q_init = seeded_noise(mdp.n_sa(), seed, -0.5, 0.5);
        cfg.validate();
        auto [policy, t] = reward_mixing_loop(mdp, cfg);
        trace = std::move(t);
    } else if (method.name == "maxent") {
        auto [mix, t] = maxent_mixture(mdp, p.value("outer_iters", 100), nullptr,
                                       p.value("inner_steps", 50));
        trace = std::move(t);
    } else {
        throw std::invalid_argument("methods: unknown method " + method.name);
    }

    if (trace_out) *trace_out = trace;
    return trace_to_rows(trace, method.label(), seed);
}

namespace {

struct Series {
    std::vector<long> iters;
    std::vector<double> mean;
    std::vector<double> stdev;
};

std::map<std::string, Series> aggregate(const std::vector<ResultRow>& rows) {
    std::map<std::string, std::map<long, std::vector<double>>> buckets;
    for (const ResultRow& r : rows) buckets[r.method][r.iteration].push_back(r.entropy_nats);
    std::map<std::string, Series> out;
    for (auto& [method, by_iter] : buckets) {
        Series s;
        for (auto& [it, vals] : by_iter) {
            double m = 0.0;
            for (double v : vals) m += v;
            m /= vals.size();
            double var = 0.0;
            for (double v : vals) var += (v - m) * (v - m);
            var = vals.size() > 1 ? var / (vals.size() - 1) : 0.0;
            s.iters.push_back(it);
            s.mean.push_back(m);
            s.stdev.push_back(std::sqrt(var));
        }
        out[method] = std::move(s);
    }
    return out;
}

} // namespace

std::string render_figure_svg(const std::vector<ResultRow>& rows) {
    const auto series = aggregate(rows);
    const double W = 760, H = 480, ML = 70, MR = 160, MT = 30, MB = 55;
    const double PW = W - ML - MR, PH = H - MT - MB;

    long xmax = 1;
    double ymin = 1e300, ymax = -1e300;
    for (const auto& [name, s] : series) {
        for (size_t i = 0; i < s.iters.size(); ++i) {
            xmax = std::max(xmax, s.iters[i]);
            ymin = std::min(ymin, s.mean[i] - s.stdev[i]);
            ymax = std::max(ymax, s.mean[i] + s.stdev[i]);
        }
    }
    if (ymin > ymax) { ymin = 0; ymax = 1; }
    const double pad = std::max(1e-6, 0.05 * (ymax - ymin));
    ymin -= pad;
    ymax += pad;

    auto px = [&](double it) { return ML + PW * it / static_cast<double>(xmax); };
    auto py = [&](double h) { return MT + PH * (1.0 - (h - ymin) / (ymax - ymin)); };

    static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                    "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << " " << H << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<g font-family=\"sans-serif\" font-size=\"12\">\n";

    // axes and ticks
    svg << "<line x1=\"" << ML << "\" y1=\"" << MT + PH << "\" x2=\"" << ML + PW << "\" y2=\""
        << MT + PH << "\" stroke=\"black\"/>\n"
        << "<line x1=\"" << ML << "\" y1=\"" << MT << "\" x2=\"" << ML << "\" y2=\"" << MT + PH
        << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double xv = xmax * i / 5.0;
        svg << "<line x1=\"" << px(xv) << "\" y1=\"" << MT + PH << "\" x2=\"" << px(xv)
            << "\" y2=\"" << MT + PH + 5 << "\" stroke=\"black\"/>\n"
            << "<text x=\"" << px(xv) << "\" y=\"" << MT + PH + 20
            << "\" text-anchor=\"middle\">" << static_cast<long>(xv) << "</text>\n";
        const double yv = ymin + (ymax - ymin) * i / 5.0;
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.3g", yv);
        svg << "<line x1=\"" << ML - 5 << "\" y1=\"" << py(yv) << "\" x2=\"" << ML << "\" y2=\""
            << py(yv) << "\" stroke=\"black\"/>\n"
            << "<text x=\"" << ML - 8 << "\" y=\"" << py(yv) + 4
            << "\" text-anchor=\"end\">" << buf << "</text>\n";
    }
    svg << "<text x=\"" << ML + PW / 2 << "\" y=\"" << H - 12
        << "\" text-anchor=\"middle\">iterations</text>\n"
        << "<text x=\"18\" y=\"" << MT + PH / 2
        << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " << MT + PH / 2
        << ")\">entropy (nats)</text>\n";

    int color = 0;
    for (const auto& [name, s] : series) {
        const char* c = palette[color % 8];
        // +/- one standard deviation band
        std::ostringstream band;
        for (size_t i = 0; i < s.iters.size(); ++i)
            band << px(static_cast<double>(s.iters[i])) << "," << py(s.mean[i] + s.stdev[i]) << " ";
        for (size_t i = s.iters.size(); i-- > 0;)
            band << px(static_cast<double>(s.iters[i])) << "," << py(s.mean[i] - s.stdev[i]) << " ";
        svg << "<polygon points=\"" << band.str() << "\" fill=\"" << c
            << "\" fill-opacity=\"0.15\" stroke=\"none\"/>\n";
        std::ostringstream line;
        for (size_t i = 0; i < s.iters.size(); ++i)
            line << px(static_cast<double>(s.iters[i])) << "," << py(s.mean[i]) << " ";
        svg << "<polyline points=\"" << line.str() << "\" fill=\"none\" stroke=\"" << c
            << "\" stroke-width=\"1.5\"/>\n";
        // legend entry
        const double ly = MT + 16 + 18 * color;
        svg << "<rect x=\"" << ML + PW + 12 << "\" y=\"" << ly - 9
            << "\" width=\"12\" height=\"12\" fill=\"" << c << "\"/>\n"
            << "<text x=\"" << ML + PW + 30 << "\" y=\"" << ly + 2 << "\">" << name
            << "</text>\n";
        ++color;
    }
    svg << "</g>\n</svg>\n";
    return svg.str();
}

CompareOutcome run_compare(const ExperimentConfig& cfg) {
    cfg.validate();
    std::filesystem::create_directories(cfg.output_dir);
    const TabularMDP mdp = build_gridworld(cfg.env);

    CompareOutcome outcome;
    nlohmann::json errors = nlohmann::json::array();
    for (const MethodSpec& method : cfg.methods) {
        bool ok = true;
        std::vector<ResultRow> method_rows;
        for (int seed : cfg.seeds) {
            try {
                auto rows = run_method(mdp, method, seed);
                method_rows.insert(method_rows.end(), rows.begin(), rows.end());
            } catch (const std::exception& e) {
                ok = false;
                errors.push_back({{"method", method.label()}, {"seed", seed},
                                  {"error", e.what()}});
            }
        }
        outcome.rows.insert(outcome.rows.end(), method_rows.begin(), method_rows.end());
        if (ok)
            ++outcome.methods_completed;
        else
            ++outcome.methods_failed;
    }

    const std::string dir = cfg.output_dir;
    write_file_atomic(dir + "/results.csv", rows_to_csv(outcome.rows));
    write_file_atomic(dir + "/figure.svg", render_figure_svg(outcome.rows));

    nlohmann::json summary;
    summary["methods"] = nlohmann::json::object();
    const auto series = aggregate(outcome.rows);
    for (const auto& [name, s] : series) {
        if (s.mean.empty()) continue;
        summary["methods"][name] = {{"final_entropy_mean", s.mean.back()},
                                    {"final_entropy_std", s.stdev.back()},
                                    {"final_iteration", s.iters.back()}};
    }
    summary["methods_completed"] = outcome.methods_completed;
    summary["methods_failed"] = outcome.methods_failed;
    summary["errors"] = errors;
    write_file_atomic(dir + "/summary.json", summary.dump(2) + "\n");
    return outcome;
}

} // namespace eve

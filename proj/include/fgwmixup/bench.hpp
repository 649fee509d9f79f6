#pragma once

// Benchmark harness: strict-vs-relaxed solver disagreement over random graph pairs, and
// wall time / outer-iteration comparisons of the two mixup modes.

#include "fgwmixup/augment.hpp"
#include "fgwmixup/barycenter.hpp"
#include "fgwmixup/log.hpp"
#include "fgwmixup/parallel.hpp"
#include "fgwmixup/solver.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace fgw {

/// Values at or below this count as a zero distance and are left out of the MAPE mean.
inline constexpr double kZeroDistance = 1e-9;

struct PairSample {
    std::size_t i = 0;
    std::size_t j = 0;
};

/// `count` index pairs drawn uniformly with replacement; i == j is allowed unless `distinct`.
inline std::vector<PairSample> sample_pairs(std::size_t n_graphs, std::size_t count, std::uint64_t seed,
                                            bool distinct = false) {
    if (n_graphs == 0) throw DataError("cannot sample pairs from an empty dataset");
    if (distinct && n_graphs < 2) throw DataError("need two graphs to sample distinct pairs");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, n_graphs - 1);
    std::vector<PairSample> out;
    out.reserve(count);
    while (out.size() < count) {
        const std::size_t i = pick(rng);
        const std::size_t j = pick(rng);
        if (distinct && i == j) continue;
        out.push_back({i, j});
    }
    return out;
}

struct InfeasibilityRecord {
    std::size_t pair_id = 0;
    std::size_t i = 0;
    std::size_t j = 0;
    Eigen::Index n1 = 0;
    Eigen::Index n2 = 0;
    bool ok = false;
    std::string error;
    double fgw_strict = std::numeric_limits<double>::quiet_NaN();
    double fgw_relaxed = std::numeric_limits<double>::quiet_NaN();
    double abs_err = std::numeric_limits<double>::quiet_NaN();
    double rel_err = std::numeric_limits<double>::quiet_NaN();  // NaN when fgw_strict is ~0
    double t_diff = std::numeric_limits<double>::quiet_NaN();
    int iters_strict = 0;
    int iters_relaxed = 0;
    double time_strict_s = 0.0;
    double time_relaxed_s = 0.0;
    double strict_row_error = 0.0;  // L1 marginal residuals of the two plans
    double strict_col_error = 0.0;
    double relaxed_row_error = 0.0;
    double relaxed_col_error = 0.0;
};

struct InfeasibilityReport {
    double mae = 0.0;
    double mape = 0.0;
    double mean_fgw = 0.0;
    double mean_fgw_star = 0.0;
    double t_diff = 0.0;
    double mae_std = 0.0;
    double mape_std = 0.0;
    double t_diff_std = 0.0;
    std::size_t solved = 0;
    std::size_t failed = 0;
    std::size_t zero_distance_pairs = 0;
    std::vector<InfeasibilityRecord> per_pair;
};

struct TimingRecord {
    std::size_t pair_id = 0;
    std::size_t i = 0;
    std::size_t j = 0;
    Eigen::Index n1 = 0;
    Eigen::Index n2 = 0;
    double lambda = 0.0;
    Eigen::Index size = 0;
    bool ok = false;
    std::string error;
    int outer_strict = 0;
    int outer_accel = 0;
    long inner_strict = 0;
    long inner_accel = 0;
    double time_strict_s = 0.0;
    double time_accel_s = 0.0;
};

struct TimingReport {
    double mean_time_strict_s = 0.0;
    double mean_time_accel_s = 0.0;
    double mean_fgw_time_strict_s = 0.0;  // mixup time per FGW solve (two per outer iteration)
    double mean_fgw_time_accel_s = 0.0;
    double mean_outer_strict = 0.0;
    double mean_outer_accel = 0.0;
    double speedup = 0.0;          // mean_time_strict_s / mean_time_accel_s
    double iteration_ratio = 0.0;  // mean_outer_strict / mean_outer_accel
    std::size_t solved = 0;
    std::size_t failed = 0;
    std::vector<TimingRecord> per_pair;
};

struct BenchOptions {
    std::size_t pairs = 1000;
    std::uint64_t seed = 0;
    int workers = 1;
    bool record_timing = true;
};

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;
};

inline MeanStd mean_std(const std::vector<double>& v) {
    if (v.empty()) return {};
    double sum = 0.0;
    for (double x : v) sum += x;
    const double mean = sum / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / static_cast<double>(v.size()))};
}

inline std::string csv_number(double v) {
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline nlohmann::ordered_json json_number(double v) {
    if (!std::isfinite(v)) return nullptr;
    return v;
}

inline std::ofstream open_report(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    return out;
}

}  // namespace detail

/// Solves every sampled pair with both solvers from the product coupling and compares
/// values and plans.
inline InfeasibilityReport run_infeasibility(const std::vector<Graph>& graphs, const FgwConfig& cfg,
                                             const BenchOptions& opts) {
    cfg.validate();
    const auto pairs = sample_pairs(graphs.size(), opts.pairs, opts.seed);
    InfeasibilityReport report;
    report.per_pair.resize(pairs.size());

    parallel_for(pairs.size(), opts.workers, [&](std::size_t k) {
        InfeasibilityRecord& rec = report.per_pair[k];
        rec.pair_id = k;
        rec.i = pairs[k].i;
        rec.j = pairs[k].j;
        const Graph& g1 = graphs[rec.i];
        const Graph& g2 = graphs[rec.j];
        rec.n1 = g1.size();
        rec.n2 = g2.size();
        try {
            const FgwProblem problem = FgwProblem::from_graphs(g1, g2, cfg.q);
            const Matrix init = product_coupling(g1.mu(), g2.mu());
            auto start = std::chrono::steady_clock::now();
            const FgwSolution strict = solve_fgw(problem, cfg, SolverKind::strict, init);
            const double t_strict = detail::seconds_since(start);
            start = std::chrono::steady_clock::now();
            const FgwSolution relaxed = solve_fgw(problem, cfg, SolverKind::relaxed, init);
            const double t_relaxed = detail::seconds_since(start);

            rec.fgw_strict = strict.value;
            rec.fgw_relaxed = relaxed.value;
            rec.abs_err = std::abs(strict.value - relaxed.value);
            if (strict.value > kZeroDistance) rec.rel_err = rec.abs_err / strict.value;
            rec.t_diff = (strict.coupling.plan - relaxed.coupling.plan).norm() /
                         static_cast<double>(rec.n1 * rec.n2);
            rec.strict_row_error = strict.coupling.row_marginal_error;
            rec.strict_col_error = strict.coupling.col_marginal_error;
            rec.relaxed_row_error = relaxed.coupling.row_marginal_error;
            rec.relaxed_col_error = relaxed.coupling.col_marginal_error;
            rec.iters_strict = strict.trace.iterations_used;
            rec.iters_relaxed = relaxed.trace.iterations_used;
            if (opts.record_timing) {
                rec.time_strict_s = t_strict;
                rec.time_relaxed_s = t_relaxed;
            }
            rec.ok = true;
        } catch (const SolverError& e) {
            rec.error = e.what();
            logger().warn("pair {} ({}, {}) failed: {}", k, rec.i, rec.j, e.what());
        }
    });

    std::vector<double> abs_errs;
    std::vector<double> rel_errs;
    std::vector<double> diffs;
    std::vector<double> strict_vals;
    std::vector<double> relaxed_vals;
    for (const auto& rec : report.per_pair) {
        if (!rec.ok) {
            ++report.failed;
            continue;
        }
        ++report.solved;
        abs_errs.push_back(rec.abs_err);
        diffs.push_back(rec.t_diff);
        strict_vals.push_back(rec.fgw_strict);
        relaxed_vals.push_back(rec.fgw_relaxed);
        if (std::isnan(rec.rel_err)) {
            ++report.zero_distance_pairs;
        } else {
            rel_errs.push_back(rec.rel_err);
        }
    }
    const auto mae = detail::mean_std(abs_errs);
    const auto mape = detail::mean_std(rel_errs);
    const auto td = detail::mean_std(diffs);
    report.mae = mae.mean;
    report.mae_std = mae.std;
    report.mape = mape.mean;
    report.mape_std = mape.std;
    report.t_diff = td.mean;
    report.t_diff_std = td.std;
    report.mean_fgw = detail::mean_std(strict_vals).mean;
    report.mean_fgw_star = detail::mean_std(relaxed_vals).mean;
    return report;
}

/// Runs solve_mixup in both modes on the same pairs, weights and target sizes.
inline TimingReport run_timing(const std::vector<Graph>& graphs, const AugmentConfig& cfg,
                               const BenchOptions& opts) {
    cfg.validate();
    const auto pairs = sample_pairs(graphs.size(), opts.pairs, opts.seed, true);
    const Eigen::Index median = cfg.median_override ? *cfg.median_override : median_size(graphs);
    TimingReport report;
    report.per_pair.resize(pairs.size());

    parallel_for(pairs.size(), opts.workers, [&](std::size_t k) {
        TimingRecord& rec = report.per_pair[k];
        rec.pair_id = k;
        rec.i = pairs[k].i;
        rec.j = pairs[k].j;
        const Graph& g1 = graphs[rec.i];
        const Graph& g2 = graphs[rec.j];
        rec.n1 = g1.size();
        rec.n2 = g2.size();
        auto rng = job_rng(opts.seed, k);
        rec.lambda = sample_lambda(cfg.beta_k, rng);
        rec.size = choose_size(rec.lambda, rec.n1, rec.n2, cfg.size_policy, median);
        const MixupProblem problem{g1, g2, rec.lambda, rec.size, std::nullopt, cfg.solver,
                                   cfg.outer_max_iters, cfg.outer_tol};
        try {
            auto start = std::chrono::steady_clock::now();
            const MixupResult strict = solve_mixup(problem, false);
            const double t_strict = detail::seconds_since(start);
            start = std::chrono::steady_clock::now();
            const MixupResult accel = solve_mixup(problem, true);
            const double t_accel = detail::seconds_since(start);
            rec.outer_strict = strict.outer_iterations;
            rec.outer_accel = accel.outer_iterations;
            rec.inner_strict = strict.inner_iterations;
            rec.inner_accel = accel.inner_iterations;
            if (opts.record_timing) {
                rec.time_strict_s = t_strict;
                rec.time_accel_s = t_accel;
            }
            rec.ok = true;
        } catch (const SolverError& e) {
            rec.error = e.what();
            logger().warn("timing pair {} ({}, {}) failed: {}", k, rec.i, rec.j, e.what());
        }
    });

    double time_s = 0.0, time_a = 0.0, outer_s = 0.0, outer_a = 0.0, fgw_s = 0.0, fgw_a = 0.0;
    for (const auto& rec : report.per_pair) {
        if (!rec.ok) {
            ++report.failed;
            continue;
        }
        ++report.solved;
        time_s += rec.time_strict_s;
        time_a += rec.time_accel_s;
        outer_s += rec.outer_strict;
        outer_a += rec.outer_accel;
        fgw_s += rec.time_strict_s / (2.0 * std::max(1, rec.outer_strict));
        fgw_a += rec.time_accel_s / (2.0 * std::max(1, rec.outer_accel));
    }
    if (report.solved > 0) {
        const auto n = static_cast<double>(report.solved);
        report.mean_time_strict_s = time_s / n;
        report.mean_time_accel_s = time_a / n;
        report.mean_outer_strict = outer_s / n;
        report.mean_outer_accel = outer_a / n;
        report.mean_fgw_time_strict_s = fgw_s / n;
        report.mean_fgw_time_accel_s = fgw_a / n;
        if (report.mean_time_accel_s > 0.0) report.speedup = report.mean_time_strict_s / report.mean_time_accel_s;
        if (report.mean_outer_accel > 0.0) report.iteration_ratio = report.mean_outer_strict / report.mean_outer_accel;
    }
    return report;
}

inline void write_csv(const InfeasibilityReport& r, const std::filesystem::path& path) {
    auto out = detail::open_report(path);
    out << "pair_id,n1,n2,fgw_strict,fgw_relaxed,abs_err,rel_err,t_diff,iters_strict,iters_relaxed,"
           "time_strict_s,time_relaxed_s\n";
    using detail::csv_number;
    for (const auto& p : r.per_pair) {
        out << p.pair_id << ',' << p.n1 << ',' << p.n2 << ',' << csv_number(p.fgw_strict) << ','
            << csv_number(p.fgw_relaxed) << ',' << csv_number(p.abs_err) << ',' << csv_number(p.rel_err) << ','
            << csv_number(p.t_diff) << ',' << p.iters_strict << ',' << p.iters_relaxed << ','
            << csv_number(p.time_strict_s) << ',' << csv_number(p.time_relaxed_s) << '\n';
    }
}

inline nlohmann::ordered_json to_json(const InfeasibilityReport& r) {
    using detail::json_number;
    nlohmann::ordered_json j;
    j["mae"] = json_number(r.mae);
    j["mape"] = json_number(r.mape);
    j["mean_fgw"] = json_number(r.mean_fgw);
    j["mean_fgw_star"] = json_number(r.mean_fgw_star);
    j["t_diff"] = json_number(r.t_diff);
    j["mae_std"] = json_number(r.mae_std);
    j["mape_std"] = json_number(r.mape_std);
    j["t_diff_std"] = json_number(r.t_diff_std);
    j["solved"] = r.solved;
    j["failed"] = r.failed;
    j["zero_distance_pairs"] = r.zero_distance_pairs;
    auto rows = nlohmann::ordered_json::array();
    for (const auto& p : r.per_pair) {
        nlohmann::ordered_json row;
        row["pair_id"] = p.pair_id;
        row["i"] = p.i;
        row["j"] = p.j;
        row["n1"] = p.n1;
        row["n2"] = p.n2;
        row["fgw_strict"] = json_number(p.fgw_strict);
        row["fgw_relaxed"] = json_number(p.fgw_relaxed);
        row["abs_err"] = json_number(p.abs_err);
        row["rel_err"] = json_number(p.rel_err);
        row["t_diff"] = json_number(p.t_diff);
        row["iters_strict"] = p.iters_strict;
        row["iters_relaxed"] = p.iters_relaxed;
        row["time_strict_s"] = json_number(p.time_strict_s);
        row["time_relaxed_s"] = json_number(p.time_relaxed_s);
        row["strict_row_error"] = json_number(p.strict_row_error);
        row["strict_col_error"] = json_number(p.strict_col_error);
        row["relaxed_row_error"] = json_number(p.relaxed_row_error);
        row["relaxed_col_error"] = json_number(p.relaxed_col_error);
        if (!p.ok) row["error"] = p.error;
        rows.push_back(std::move(row));
    }
    j["per_pair"] = std::move(rows);
    return j;
}

inline void write_csv(const TimingReport& r, const std::filesystem::path& path) {
    auto out = detail::open_report(path);
    out << "pair_id,n1,n2,lambda,size,outer_strict,outer_accel,inner_strict,inner_accel,time_strict_s,"
           "time_accel_s\n";
    using detail::csv_number;
    for (const auto& p : r.per_pair) {
        out << p.pair_id << ',' << p.n1 << ',' << p.n2 << ',' << csv_number(p.lambda) << ',' << p.size << ','
            << p.outer_strict << ',' << p.outer_accel << ',' << p.inner_strict << ',' << p.inner_accel << ','
            << csv_number(p.time_strict_s) << ',' << csv_number(p.time_accel_s) << '\n';
    }
}

inline nlohmann::ordered_json to_json(const TimingReport& r) {
    using detail::json_number;
    nlohmann::ordered_json j;
    j["mean_time_strict_s"] = json_number(r.mean_time_strict_s);
    j["mean_time_accel_s"] = json_number(r.mean_time_accel_s);
    j["mean_fgw_time_strict_s"] = json_number(r.mean_fgw_time_strict_s);
    j["mean_fgw_time_accel_s"] = json_number(r.mean_fgw_time_accel_s);
    j["mean_outer_strict"] = json_number(r.mean_outer_strict);
    j["mean_outer_accel"] = json_number(r.mean_outer_accel);
    j["speedup"] = json_number(r.speedup);
    j["iteration_ratio"] = json_number(r.iteration_ratio);
    j["solved"] = r.solved;
    j["failed"] = r.failed;
    auto rows = nlohmann::ordered_json::array();
    for (const auto& p : r.per_pair) {
        nlohmann::ordered_json row;
        row["pair_id"] = p.pair_id;
        row["i"] = p.i;
        row["j"] = p.j;
        row["n1"] = p.n1;
        row["n2"] = p.n2;
        row["lambda"] = json_number(p.lambda);
        row["size"] = p.size;
        row["outer_strict"] = p.outer_strict;
        row["outer_accel"] = p.outer_accel;
        row["inner_strict"] = p.inner_strict;
        row["inner_accel"] = p.inner_accel;
        row["time_strict_s"] = json_number(p.time_strict_s);
        row["time_accel_s"] = json_number(p.time_accel_s);
        if (!p.ok) row["error"] = p.error;
        rows.push_back(std::move(row));
    }
    j["per_pair"] = std::move(rows);
    return j;
}

template <typename Report>
void write_json(const Report& r, const std::filesystem::path& path) {
    auto out = detail::open_report(path);
    out << to_json(r).dump(2) << '\n';
}

}  // namespace fgw

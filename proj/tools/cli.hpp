#pragma once

#include "fgwmixup/fgwmixup.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fgw::cli {

enum ExitCode { ok = 0, usage_error = 1, data_error = 2, solver_error = 3 };

struct DataSource {
    std::string data_dir;
    std::string name;
    std::string features = "auto";
    int max_degree = 64;
    int synthetic = 0;  // > 0: use a seeded SBM corpus of this many graphs instead of files
    std::uint64_t synthetic_seed = 0;
};

struct SolverFlags {
    FgwConfig fgw;
    std::string solver = "accel";
};

inline void add_data_flags(CLI::App& app, DataSource& src) {
    app.add_option("--data", src.data_dir, "directory holding the TUDataset files");
    app.add_option("--name", src.name, "dataset prefix, e.g. PROTEINS");
    app.add_option("--features", src.features, "node features: auto|attributes|node_labels|degree")
        ->check(CLI::IsMember({"auto", "attributes", "node_labels", "degree"}));
    app.add_option("--max-degree", src.max_degree, "width - 1 of degree one-hot features")->check(CLI::NonNegativeNumber);
    app.add_option("--synthetic", src.synthetic, "use a synthetic SBM corpus with this many graphs")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--synthetic-seed", src.synthetic_seed, "seed of the synthetic corpus");
}

inline void add_solver_flags(CLI::App& app, SolverFlags& s) {
    app.add_option("--alpha", s.fgw.alpha, "structure weight alpha")->check(CLI::Range(0.0, 1.0));
    app.add_option("--gamma", s.fgw.gamma, "mirror-descent step size")->check(CLI::PositiveNumber);
    app.add_option("--q", s.fgw.q, "feature distance exponent")->check(CLI::PositiveNumber);
    app.add_option("--inner-tol", s.fgw.inner_tol, "relative objective change that stops the solver")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--max-inner", s.fgw.max_inner_iters, "solver iteration cap")->check(CLI::PositiveNumber);
    app.add_option("--solver", s.solver, "strict|accel")->check(CLI::IsMember({"strict", "accel"}));
}

inline FeatureSource parse_feature_source(const std::string& s) {
    if (s == "attributes") return FeatureSource::attributes;
    if (s == "node_labels") return FeatureSource::node_labels;
    if (s == "degree") return FeatureSource::degree;
    return FeatureSource::automatic;
}

inline Dataset load_source(const DataSource& src) {
    if (src.synthetic > 0) {
        SbmCorpusSpec spec;
        spec.graphs = src.synthetic;
        spec.seed = src.synthetic_seed;
        Dataset ds;
        ds.graphs = sbm_corpus(spec);
        ds.name = "SBM";
        ds.class_count = spec.classes;
        ds.feature_kind = FeatureKind::node_labels_onehot;
        return ds;
    }
    if (src.data_dir.empty() || src.name.empty())
        throw CLI::ValidationError("--data and --name are required unless --synthetic is given");
    LoadOptions opts;
    opts.features = parse_feature_source(src.features);
    opts.max_degree = src.max_degree;
    Dataset ds = load_tudataset(src.data_dir, src.name, opts);
    logger().info("loaded {}: {} graphs, {} classes, features {}, {} dropped", ds.name, ds.graphs.size(),
                  ds.class_count, to_string(ds.feature_kind), ds.dropped_graphs);
    return ds;
}

/// Expands `--config FILE` into `--key value` tokens placed right after the subcommand, skipping
/// keys that also appear as flags, so explicit flags win.
inline std::vector<std::string> expand_config(const std::vector<std::string>& args) {
    std::string path;
    for (std::size_t k = 0; k < args.size(); ++k) {
        if (args[k] == "--config" && k + 1 < args.size()) path = args[k + 1];
        if (args[k].rfind("--config=", 0) == 0) path = args[k].substr(9);
    }
    if (path.empty() || args.size() < 2) return args;
    std::ifstream in(path);
    if (!in) throw CLI::FileError::Missing(path);
    auto given = [&](const std::string& key) {
        for (const auto& a : args)
            if (a == "--" + key || a.rfind("--" + key + "=", 0) == 0) return true;
        return false;
    };
    std::vector<std::string> injected;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto body = std::string(detail::trim(line));
        if (body.empty() || body[0] == '#' || body[0] == ';') continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw CLI::ValidationError(path + ":" + std::to_string(lineno) + ": expected key=value");
        const std::string key(detail::trim(std::string_view(body).substr(0, eq)));
        std::string value(detail::trim(std::string_view(body).substr(eq + 1)));
        if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') && value.back() == value.front())
            value = value.substr(1, value.size() - 2);
        if (key.empty() || key == "config") continue;
        if (given(key)) continue;
        injected.push_back("--" + key + "=" + value);
    }
    std::vector<std::string> out(args.begin(), args.begin() + 2);
    out.insert(out.end(), injected.begin(), injected.end());
    out.insert(out.end(), args.begin() + 2, args.end());
    return out;
}

inline void log_config(const CLI::App& sub) {
    std::string text = sub.config_to_str(true, false);
    while (!text.empty() && text.back() == '\n') text.pop_back();
    logger().info("{} configuration:\n{}", sub.get_name(), text);
}

/// Parses argv, runs the chosen subcommand and maps failures to exit codes:
/// 0 success, 1 usage, 2 data, 3 solver.
inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout) {
    CLI::App app{"FGW distances, graph mixup and dataset augmentation"};
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();
    std::string config_path;

    // augment
    DataSource aug_src;
    SolverFlags aug_solver;
    AugmentConfig aug;
    std::string aug_out;
    std::string aug_out_name;
    std::string aug_policy = "adaptive";
    std::string aug_format = "tud";
    std::optional<int> aug_median;
    auto* augment = app.add_subcommand("augment", "write the training set plus FGW mixup graphs");
    augment->add_option("--config", config_path, "key=value file; flags override it");
    add_data_flags(*augment, aug_src);
    add_solver_flags(*augment, aug_solver);
    augment->add_option("--out", aug_out, "output directory")->required();
    augment->add_option("--out-name", aug_out_name, "output dataset prefix (default: <name>_aug)");
    augment->add_option("--beta-k", aug.beta_k, "lambda ~ Beta(k, k)")->check(CLI::PositiveNumber);
    augment->add_option("--ratio", aug.mixup_ratio, "mixup ratio")->check(CLI::NonNegativeNumber);
    augment->add_option("--size-policy", aug_policy, "adaptive|fixed_median|half_median|double_median")
        ->check(CLI::IsMember({"adaptive", "fixed_median", "half_median", "double_median"}));
    augment->add_option("--median", aug_median, "median graph size for the median-based policies")
        ->check(CLI::PositiveNumber);
    augment->add_option("--seed", aug.seed, "master seed");
    augment->add_option("--format", aug_format, "tud|jsonl")->check(CLI::IsMember({"tud", "jsonl"}));
    augment->add_option("--workers", aug.workers, "worker threads")->check(CLI::PositiveNumber);
    augment->add_option("--max-outer", aug.outer_max_iters, "outer iteration cap")->check(CLI::PositiveNumber);
    augment->add_option("--outer-tol", aug.outer_tol, "outer stopping tolerance")->check(CLI::NonNegativeNumber);
    augment->add_option("--grid", aug.threshold_grid, "threshold grid points")->check(CLI::Range(2, 100000));

    // distance
    DataSource dist_src;
    SolverFlags dist_solver;
    std::size_t dist_i = 0;
    std::size_t dist_j = 0;
    auto* distance = app.add_subcommand("distance", "FGW distance between two graphs of a dataset");
    distance->add_option("--config", config_path, "key=value file; flags override it");
    add_data_flags(*distance, dist_src);
    add_solver_flags(*distance, dist_solver);
    distance->add_option("--i", dist_i, "index of the first graph")->required();
    distance->add_option("--j", dist_j, "index of the second graph")->required();

    // bench-infeasibility
    DataSource inf_src;
    SolverFlags inf_solver;
    BenchOptions inf_opts;
    inf_opts.record_timing = false;
    std::string inf_out = "infeasibility";
    auto* bench_inf = app.add_subcommand("bench-infeasibility", "strict vs relaxed solver on random pairs");
    bench_inf->add_option("--config", config_path, "key=value file; flags override it");
    add_data_flags(*bench_inf, inf_src);
    add_solver_flags(*bench_inf, inf_solver);
    bench_inf->add_option("--pairs", inf_opts.pairs, "number of random pairs")->check(CLI::PositiveNumber);
    bench_inf->add_option("--seed", inf_opts.seed, "pair sampling seed");
    bench_inf->add_option("--workers", inf_opts.workers, "worker threads")->check(CLI::PositiveNumber);
    bench_inf->add_flag("--timing", inf_opts.record_timing, "record per-pair wall times (breaks byte-identical output)");
    bench_inf->add_option("--out", inf_out, "report path prefix; writes <out>.csv and <out>.json");

    // bench-timing
    DataSource tim_src;
    SolverFlags tim_solver;
    AugmentConfig tim_cfg;
    BenchOptions tim_opts;
    tim_opts.pairs = 50;
    std::string tim_out = "timing";
    auto* bench_tim = app.add_subcommand("bench-timing", "wall time and outer iterations of both mixup modes");
    bench_tim->add_option("--config", config_path, "key=value file; flags override it");
    add_data_flags(*bench_tim, tim_src);
    add_solver_flags(*bench_tim, tim_solver);
    bench_tim->add_option("--pairs", tim_opts.pairs, "number of random pairs")->check(CLI::PositiveNumber);
    bench_tim->add_option("--seed", tim_opts.seed, "pair and lambda seed");
    bench_tim->add_option("--workers", tim_opts.workers, "worker threads")->check(CLI::PositiveNumber);
    bench_tim->add_option("--beta-k", tim_cfg.beta_k, "lambda ~ Beta(k, k)")->check(CLI::PositiveNumber);
    bench_tim->add_option("--max-outer", tim_cfg.outer_max_iters, "outer iteration cap")->check(CLI::PositiveNumber);
    bench_tim->add_option("--outer-tol", tim_cfg.outer_tol, "outer stopping tolerance")->check(CLI::NonNegativeNumber);
    bench_tim->add_option("--out", tim_out, "report path prefix; writes <out>.csv and <out>.json");

    // generate
    SbmCorpusSpec gen;
    std::string gen_out;
    std::string gen_name = "SBM";
    auto* generate = app.add_subcommand("generate", "write a synthetic SBM corpus in TUDataset layout");
    generate->add_option("--config", config_path, "key=value file; flags override it");
    generate->add_option("--out", gen_out, "output directory")->required();
    generate->add_option("--name", gen_name, "dataset prefix");
    generate->add_option("--graphs", gen.graphs, "number of graphs")->check(CLI::PositiveNumber);
    generate->add_option("--classes", gen.classes, "number of classes")->check(CLI::PositiveNumber);
    generate->add_option("--median-nodes", gen.median_nodes, "median graph size")->check(CLI::PositiveNumber);
    generate->add_option("--seed", gen.seed, "corpus seed");

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        args.insert(args.begin(), argc > 0 ? argv[0] : "fgwmixup");
        args = expand_config(args);
        std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : usage_error;
    }

    try {
        if (*augment) {
            log_config(*augment);
            aug.size_policy = parse_size_policy(aug_policy);
            if (aug_median && aug.size_policy == SizePolicy::adaptive)
                throw CLI::ValidationError("--median conflicts with --size-policy adaptive");
            aug.median_override = aug_median;
            aug.solver = aug_solver.fgw;
            aug.accelerated = aug_solver.solver == "accel";
            const Dataset ds = load_source(aug_src);
            aug.num_classes = ds.class_count;
            const auto augmented = augment_dataset(ds.graphs, aug);
            const std::string name = aug_out_name.empty() ? ds.name + "_aug" : aug_out_name;
            save_dataset(augmented, aug_out, name, parse_save_format(aug_format));
            out << "wrote " << augmented.size() << " graphs (" << augmented.size() - ds.graphs.size()
                << " mixups) to " << aug_out << "\n";
        } else if (*distance) {
            log_config(*distance);
            const Dataset ds = load_source(dist_src);
            if (dist_i >= ds.graphs.size() || dist_j >= ds.graphs.size())
                throw DataError("graph index out of range (dataset has " + std::to_string(ds.graphs.size()) +
                                " graphs)");
            const Graph& g1 = ds.graphs[dist_i];
            const Graph& g2 = ds.graphs[dist_j];
            std::optional<Matrix> init;
            if (dist_i == dist_j) init = identity_coupling(g1.mu());
            const SolverKind kind = dist_solver.solver == "accel" ? SolverKind::relaxed : SolverKind::strict;
            const FgwSolution sol = solve_fgw(FgwProblem::from_graphs(g1, g2, dist_solver.fgw.q), dist_solver.fgw,
                                              kind, init);
            char line[256];
            std::snprintf(line, sizeof line,
                          "fgw %.10g\nrow_marginal_error %.3e\ncol_marginal_error %.3e\niterations %d\n", sol.value,
                          sol.coupling.row_marginal_error, sol.coupling.col_marginal_error,
                          sol.trace.iterations_used);
            out << line;
        } else if (*bench_inf) {
            log_config(*bench_inf);
            const Dataset ds = load_source(inf_src);
            const auto report = run_infeasibility(ds.graphs, inf_solver.fgw, inf_opts);
            write_csv(report, inf_out + ".csv");
            write_json(report, inf_out + ".json");
            char line[512];
            std::snprintf(line, sizeof line,
                          "pairs %zu solved %zu failed %zu\nMAE %.6g MAPE %.6g mean-FGW %.6g mean-FGW* %.6g "
                          "T-diff %.6g\n",
                          report.per_pair.size(), report.solved, report.failed, report.mae, report.mape,
                          report.mean_fgw, report.mean_fgw_star, report.t_diff);
            out << line;
        } else if (*bench_tim) {
            log_config(*bench_tim);
            tim_cfg.solver = tim_solver.fgw;
            const Dataset ds = load_source(tim_src);
            const auto report = run_timing(ds.graphs, tim_cfg, tim_opts);
            write_csv(report, tim_out + ".csv");
            write_json(report, tim_out + ".json");
            char line[512];
            std::snprintf(line, sizeof line,
                          "pairs %zu solved %zu\nouter iterations strict %.2f accel %.2f (ratio %.2f)\n"
                          "mixup time strict %.4fs accel %.4fs (speedup %.2f)\n",
                          report.per_pair.size(), report.solved, report.mean_outer_strict,
                          report.mean_outer_accel, report.iteration_ratio, report.mean_time_strict_s,
                          report.mean_time_accel_s, report.speedup);
            out << line;
        } else if (*generate) {
            log_config(*generate);
            Dataset ds;
            ds.graphs = sbm_corpus(gen);
            ds.name = gen_name;
            ds.class_count = gen.classes;
            save_dataset(ds, gen_out, SaveFormat::tud);
            out << "wrote " << ds.graphs.size() << " graphs to " << gen_out << "\n";
        }
    } catch (const CLI::ValidationError& e) {
        logger().error("{}", e.what());
        return usage_error;
    } catch (const SolverError& e) {
        logger().error("solver failure: {}", e.what());
        return solver_error;
    } catch (const DataError& e) {
        logger().error("data error: {}", e.what());
        return data_error;
    } catch (const std::filesystem::filesystem_error& e) {
        logger().error("data error: {}", e.what());
        return data_error;
    }
    return ok;
}

}  // namespace fgw::cli

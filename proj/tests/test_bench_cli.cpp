#include "oracles.hpp"

#include "cli.hpp"

#include <gtest/gtest.h>

#include <sstream>

namespace fs = std::filesystem;
using fgw::Graph;

namespace {

int run_cli(std::vector<std::string> args, std::string* output = nullptr) {
    args.insert(args.begin(), "fgwmixup");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out;
    const int code = fgw::cli::cli_main(static_cast<int>(argv.size()), argv.data(), out);
    if (output) *output = out.str();
    return code;
}

std::vector<Graph> corpus(int graphs, std::uint64_t seed) {
    fgw::SbmCorpusSpec spec;
    spec.graphs = graphs;
    spec.median_nodes = 12;
    spec.max_nodes = 20;
    spec.seed = seed;
    return fgw::sbm_corpus(spec);
}

}  // namespace

TEST(Infeasibility, RepeatedPairGivesRepeatedRecords) {
    const auto g = corpus(1, 1);
    fgw::BenchOptions opts;
    opts.pairs = 5;
    const auto r = fgw::run_infeasibility(g, fgw::FgwConfig{}, opts);
    ASSERT_EQ(r.per_pair.size(), 5u);
    EXPECT_EQ(r.solved, 5u);
    for (const auto& p : r.per_pair) {
        EXPECT_EQ(p.i, 0u);
        EXPECT_EQ(p.j, 0u);
        EXPECT_EQ(p.fgw_strict, r.per_pair[0].fgw_strict);
        EXPECT_EQ(p.t_diff, r.per_pair[0].t_diff);
    }
    EXPECT_DOUBLE_EQ(r.mae, r.per_pair[0].abs_err);
    EXPECT_EQ(r.mae_std, 0.0);
}

TEST(Infeasibility, ReportFieldsConsistent) {
    const auto g = corpus(20, 2);
    fgw::BenchOptions opts;
    opts.pairs = 12;
    opts.seed = 3;
    const auto r = fgw::run_infeasibility(g, fgw::FgwConfig{}, opts);
    ASSERT_EQ(r.per_pair.size(), 12u);
    double mae = 0.0;
    for (const auto& p : r.per_pair) {
        ASSERT_TRUE(p.ok);
        EXPECT_DOUBLE_EQ(p.abs_err, std::abs(p.fgw_strict - p.fgw_relaxed));
        EXPECT_GE(p.t_diff, 0.0);
        mae += p.abs_err;
    }
    EXPECT_NEAR(r.mae, mae / 12.0, 1e-15);
    EXPECT_EQ(r.solved + r.failed, 12u);
    EXPECT_EQ(r.zero_distance_pairs + (r.solved - r.zero_distance_pairs), r.solved);
    for (double v : {r.mae, r.mape, r.mean_fgw, r.mean_fgw_star, r.t_diff, r.mae_std, r.mape_std, r.t_diff_std})
        EXPECT_GE(v, 0.0);
}

TEST(Infeasibility, CsvAndJsonAgree) {
    const auto dir = oracle::scratch_dir("bench_formats");
    const auto g = corpus(10, 4);
    fgw::BenchOptions opts;
    opts.pairs = 6;
    const auto r = fgw::run_infeasibility(g, fgw::FgwConfig{}, opts);
    fgw::write_csv(r, dir / "r.csv");
    fgw::write_json(r, dir / "r.json");
    const auto json = nlohmann::json::parse(oracle::read_file(dir / "r.json"));
    std::istringstream csv(oracle::read_file(dir / "r.csv"));
    std::string line;
    std::getline(csv, line);
    EXPECT_EQ(line,
              "pair_id,n1,n2,fgw_strict,fgw_relaxed,abs_err,rel_err,t_diff,iters_strict,iters_relaxed,time_strict_s,"
              "time_relaxed_s");
    std::size_t row = 0;
    while (std::getline(csv, line)) {
        std::istringstream fields(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(fields, cell, ',')) cells.push_back(cell);
        ASSERT_EQ(cells.size(), 12u);
        const auto& j = json["per_pair"][row];
        EXPECT_EQ(std::stod(cells[3]), j["fgw_strict"].get<double>());
        EXPECT_EQ(std::stod(cells[4]), j["fgw_relaxed"].get<double>());
        EXPECT_EQ(std::stod(cells[7]), j["t_diff"].get<double>());
        EXPECT_EQ(std::stoi(cells[8]), j["iters_strict"].get<int>());
        ++row;
    }
    EXPECT_EQ(row, 6u);
}

TEST(Timing, SpeedupMatchesTimes) {
    const auto g = corpus(10, 5);
    fgw::AugmentConfig cfg;
    cfg.outer_max_iters = 30;
    fgw::BenchOptions opts;
    opts.pairs = 3;
    const auto r = fgw::run_timing(g, cfg, opts);
    ASSERT_EQ(r.per_pair.size(), 3u);
    ASSERT_GT(r.mean_time_accel_s, 0.0);
    EXPECT_DOUBLE_EQ(r.speedup, r.mean_time_strict_s / r.mean_time_accel_s);
    EXPECT_GT(r.speedup, 0.0);
    for (const auto& p : r.per_pair) EXPECT_NE(p.i, p.j);
}

TEST(Timing, DuplicateGraphPairsSolve) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(3, 3);
    a(0, 1) = a(1, 0) = a(1, 2) = a(2, 1) = 1.0;
    const Graph g = fgw::make_uniform_graph(Eigen::MatrixXd::Ones(3, 1), a);
    const std::vector<Graph> graphs{g, g};
    fgw::BenchOptions opts;
    opts.pairs = 4;
    const auto r = fgw::run_timing(graphs, fgw::AugmentConfig{}, opts);
    EXPECT_EQ(r.solved, 4u);
    for (const auto& p : r.per_pair) {
        EXPECT_GE(p.outer_strict, 1);
        EXPECT_LT(p.outer_strict, 200);
        EXPECT_GE(p.outer_accel, 1);
        EXPECT_LT(p.outer_accel, 200);
    }
}

TEST(Cli, AugmentFixtureCount) {
    const auto dir = oracle::scratch_dir("cli_augment");
    ASSERT_EQ(run_cli({"generate", "--out", (dir / "data").string(), "--name", "FIX", "--graphs", "100", "--seed", "2"}), 0);
    std::string out;
    ASSERT_EQ(run_cli({"augment", "--data", (dir / "data").string(), "--name", "FIX", "--out", (dir / "aug").string(),
                       "--ratio", "0.25", "--seed", "1", "--max-outer", "20"},
                      &out),
              0);
    const auto ds = fgw::load_tudataset(dir / "aug", "FIX_aug");
    EXPECT_EQ(ds.graphs.size(), 125u);
}

TEST(Cli, SelfDistanceIsZero) {
    std::string out;
    ASSERT_EQ(run_cli({"distance", "--synthetic", "5", "--i", "0", "--j", "0"}, &out), 0);
    std::istringstream in(out);
    std::string key;
    double value = 1.0;
    in >> key >> value;
    EXPECT_EQ(key, "fgw");
    EXPECT_NEAR(value, 0.0, 1e-6);
    EXPECT_NE(out.find("row_marginal_error"), std::string::npos);
    EXPECT_NE(out.find("col_marginal_error"), std::string::npos);
}

TEST(Cli, InfeasibilityDeterministic) {
    const auto dir = oracle::scratch_dir("cli_determinism");
    const auto a = (dir / "a").string();
    const auto b = (dir / "b").string();
    ASSERT_EQ(run_cli({"bench-infeasibility", "--synthetic", "30", "--pairs", "10", "--seed", "7", "--out", a}), 0);
    ASSERT_EQ(run_cli({"bench-infeasibility", "--synthetic", "30", "--pairs", "10", "--seed", "7", "--out", b}), 0);
    EXPECT_EQ(oracle::read_file(a + ".csv"), oracle::read_file(b + ".csv"));
    EXPECT_EQ(oracle::read_file(a + ".json"), oracle::read_file(b + ".json"));
    EXPECT_FALSE(oracle::read_file(a + ".csv").empty());
}

TEST(Cli, ConfigFileAndOverride) {
    const auto dir = oracle::scratch_dir("cli_config");
    oracle::write_text(dir / "run.cfg", "# solver settings\nalpha = 0.0\nsolver=strict\n");
    std::string from_file;
    std::string overridden;
    ASSERT_EQ(run_cli({"distance", "--synthetic", "5", "--i", "0", "--j", "1", "--config", (dir / "run.cfg").string()},
                      &from_file),
              0);
    ASSERT_EQ(run_cli({"distance", "--synthetic", "5", "--i", "0", "--j", "1", "--alpha", "0.0", "--solver", "strict"},
                      &overridden),
              0);
    EXPECT_EQ(from_file, overridden);
    std::string flag_wins;
    ASSERT_EQ(run_cli({"distance", "--synthetic", "5", "--i", "0", "--j", "1", "--alpha", "0.5", "--config",
                       (dir / "run.cfg").string()},
                      &flag_wins),
              0);
    EXPECT_NE(flag_wins, from_file);
}

TEST(Cli, ExitCodes) {
    const auto dir = oracle::scratch_dir("cli_codes");
    EXPECT_EQ(run_cli({}), 1);
    EXPECT_EQ(run_cli({"distance", "--synthetic", "5", "--i", "0", "--j", "1", "--bogus"}), 1);
    EXPECT_EQ(run_cli({"augment", "--synthetic", "10", "--out", dir.string(), "--median", "5"}), 1);
    EXPECT_EQ(run_cli({"augment", "--synthetic", "10", "--out", dir.string(), "--size-policy", "sideways"}), 1);
    EXPECT_EQ(run_cli({"distance", "--data", (dir / "missing").string(), "--name", "X", "--i", "0", "--j", "0"}), 2);
    EXPECT_EQ(run_cli({"distance", "--synthetic", "5", "--i", "0", "--j", "9"}), 2);
    EXPECT_EQ(run_cli({"distance", "--i", "0", "--j", "0"}), 1);
    EXPECT_EQ(run_cli({"--help"}), 0);
}

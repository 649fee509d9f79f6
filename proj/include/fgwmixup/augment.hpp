#pragma once

// Dataset-level mixup: sample cross-class pairs, solve the FGW barycenter, threshold the
// continuous structure into an adjacency matrix, and attach a mixed soft label.

#include "fgwmixup/barycenter.hpp"
#include "fgwmixup/graph.hpp"
#include "fgwmixup/log.hpp"
#include "fgwmixup/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace fgw {

enum class SizePolicy { adaptive, fixed_median, half_median, double_median };

inline SizePolicy parse_size_policy(std::string_view name) {
    if (name == "adaptive") return SizePolicy::adaptive;
    if (name == "fixed_median") return SizePolicy::fixed_median;
    if (name == "half_median") return SizePolicy::half_median;
    if (name == "double_median") return SizePolicy::double_median;
    throw DataError("unknown size policy '" + std::string(name) + "'");
}

inline std::string_view to_string(SizePolicy p) {
    switch (p) {
        case SizePolicy::adaptive: return "adaptive";
        case SizePolicy::fixed_median: return "fixed_median";
        case SizePolicy::half_median: return "half_median";
        case SizePolicy::double_median: return "double_median";
    }
    return "adaptive";
}

struct AugmentConfig {
    double beta_k = 0.2;       // lambda ~ Beta(k, k)
    double mixup_ratio = 0.25;  // new samples / training samples
    SizePolicy size_policy = SizePolicy::adaptive;
    bool accelerated = true;
    std::uint64_t seed = 0;
    int workers = 1;
    int threshold_grid = 101;
    bool weighted_density = true;  // weight the density gap by lambda
    int num_classes = 0;           // 0: infer as max label + 1
    std::optional<int> median_override;
    FgwConfig solver;          // alpha defaults to 0.95
    int outer_max_iters = 200;
    double outer_tol = 5e-4;

    void validate() const {
        if (!(beta_k > 0.0)) throw DataError("beta_k must be positive");
        if (!(mixup_ratio >= 0.0)) throw DataError("mixup ratio must be nonnegative");
        if (threshold_grid < 2) throw DataError("threshold grid needs at least 2 points");
        if (median_override && *median_override < 1) throw DataError("median size must be >= 1");
        solver.validate();
    }
};

/// Per-mixup bookkeeping kept next to the generated graph.
struct MixupProvenance {
    std::size_t source1 = 0;
    std::size_t source2 = 0;
    double lambda = 0.0;
    double threshold = 0.0;
    int outer_iterations = 0;
};

struct SoftLabeledGraph {
    Graph graph;
    Vector label_distribution;
    std::optional<MixupProvenance> provenance;  // empty for original samples
};

/// Beta(k, k) via two Gamma(k, 1) draws.
template <typename Rng>
double sample_lambda(double beta_k, Rng& rng) {
    if (!(beta_k > 0.0)) throw DataError("beta_k must be positive");
    std::gamma_distribution<double> gamma(beta_k, 1.0);
    for (;;) {
        const double x = gamma(rng);
        const double y = gamma(rng);
        if (x + y > 0.0) return std::clamp(x / (x + y), 0.0, 1.0);
    }
}

inline Eigen::Index choose_size(double lambda, Eigen::Index n1, Eigen::Index n2, SizePolicy policy,
                                Eigen::Index median) {
    double size = 0.0;
    switch (policy) {
        case SizePolicy::adaptive:
            size = lambda * static_cast<double>(n1) + (1.0 - lambda) * static_cast<double>(n2);
            break;
        case SizePolicy::fixed_median: size = static_cast<double>(median); break;
        case SizePolicy::half_median: size = 0.5 * static_cast<double>(median); break;
        case SizePolicy::double_median: size = 2.0 * static_cast<double>(median); break;
    }
    return std::max<Eigen::Index>(1, std::llround(size));
}

/// Fraction of off-diagonal entries that are nonzero (or >= theta for the thresholded form).
inline double edge_density(const Matrix& a) {
    const auto n = a.rows();
    if (n < 2) return 0.0;
    Eigen::Index count = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) count += (i != j && a(i, j) != 0.0) ? 1 : 0;
    return static_cast<double>(count) / static_cast<double>(n * (n - 1));
}

inline double thresholded_density(const Matrix& a, double theta) {
    const auto n = a.rows();
    if (n < 2) return 0.0;
    Eigen::Index count = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) count += (i != j && a(i, j) >= theta) ? 1 : 0;
    return static_cast<double>(count) / static_cast<double>(n * (n - 1));
}

inline double density_gap(double density, double dens1, double dens2, double lambda, bool weighted) {
    const double w1 = weighted ? lambda : 1.0;
    const double w2 = weighted ? 1.0 - lambda : 1.0;
    return w1 * std::abs(density - dens1) + w2 * std::abs(density - dens2);
}

struct Discretized {
    Matrix adjacency;  // binary, symmetric, zero diagonal
    double theta = 0.0;
};

/// Linear threshold scan between the smallest and largest off-diagonal entries; keeps the
/// first (smallest) theta that minimizes the density gap to the two sources.
inline Discretized discretize_adjacency(const Matrix& a_cont, double dens1, double dens2, double lambda,
                                        int grid = 101, bool weighted = true) {
    const auto n = a_cont.rows();
    if (a_cont.cols() != n) throw DataError("structure matrix must be square");
    if (!a_cont.allFinite()) throw DataError("structure matrix has non-finite entries");
    if (grid < 2) throw DataError("threshold grid needs at least 2 points");

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (i != j) {
                lo = std::min(lo, a_cont(i, j));
                hi = std::max(hi, a_cont(i, j));
            }

    auto threshold = [&](double theta) {
        Matrix out = Matrix::Zero(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                if (i != j && a_cont(i, j) >= theta) out(i, j) = 1.0;
        return out;
    };

    if (n < 2) return {Matrix::Zero(n, n), 0.0};
    if (lo == hi) {
        // only two outcomes: everything on (theta = lo) or everything off
        const double gap_on = density_gap(1.0, dens1, dens2, lambda, weighted);
        const double gap_off = density_gap(0.0, dens1, dens2, lambda, weighted);
        if (gap_on <= gap_off) return {threshold(lo), lo};
        const double above = std::nextafter(lo, std::numeric_limits<double>::infinity());
        return {threshold(above), above};
    }

    double best_theta = lo;
    double best_gap = std::numeric_limits<double>::infinity();
    for (int k = 0; k < grid; ++k) {
        const double theta = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(grid - 1);
        const double gap = density_gap(thresholded_density(a_cont, theta), dens1, dens2, lambda, weighted);
        if (gap < best_gap) {
            best_gap = gap;
            best_theta = theta;
        }
    }
    return {threshold(best_theta), best_theta};
}

inline Vector mix_labels(int y1, int y2, double lambda, int num_classes) {
    if (num_classes < 1) throw DataError("need at least one class");
    if (y1 < 0 || y1 >= num_classes || y2 < 0 || y2 >= num_classes)
        throw DataError("class index out of range");
    Vector dist = Vector::Zero(num_classes);
    dist(y1) += lambda;
    dist(y2) += 1.0 - lambda;
    return dist;
}

inline Vector one_hot(int y, int num_classes) { return mix_labels(y, y, 1.0, num_classes); }

/// Index of the largest entry; ties go to the lower index.
inline int argmax_label(const Vector& dist) {
    int best = 0;
    for (Eigen::Index c = 1; c < dist.size(); ++c)
        if (dist(c) > dist(best)) best = static_cast<int>(c);
    return best;
}

inline Eigen::Index median_size(const std::vector<Graph>& graphs) {
    std::vector<Eigen::Index> sizes;
    sizes.reserve(graphs.size());
    for (const auto& g : graphs) sizes.push_back(g.size());
    if (sizes.empty()) throw DataError("empty training set");
    std::sort(sizes.begin(), sizes.end());
    const auto mid = sizes.size() / 2;
    if (sizes.size() % 2 == 1) return sizes[mid];
    return std::llround(0.5 * static_cast<double>(sizes[mid - 1] + sizes[mid]));
}

/// ceil(2 beta N / (N_y (N_y - 1))): mixups generated for each unordered class pair.
inline std::size_t mixups_per_class_pair(std::size_t n_graphs, int n_classes, double ratio) {
    if (n_classes < 2) return 0;
    const double raw = 2.0 * ratio * static_cast<double>(n_graphs) /
                       (static_cast<double>(n_classes) * static_cast<double>(n_classes - 1));
    return static_cast<std::size_t>(std::ceil(raw - 1e-9));
}

/// Independent generator for job `job`, derived from the master seed.
inline std::mt19937_64 job_rng(std::uint64_t seed, std::uint64_t job) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(job), static_cast<std::uint32_t>(job >> 32)};
    return std::mt19937_64(seq);
}

/// Returns the training graphs (with one-hot labels) followed by the generated mixups in
/// deterministic job order. Pairs whose solve fails are logged and skipped.
inline std::vector<SoftLabeledGraph> augment_dataset(const std::vector<Graph>& train,
                                                     const AugmentConfig& cfg) {
    cfg.validate();
    if (train.empty()) throw DataError("empty training set");
    int max_label = -1;
    for (const auto& g : train) {
        if (!g.label()) throw DataError("every training graph needs a class label");
        max_label = std::max(max_label, *g.label());
    }
    const int num_classes = cfg.num_classes > 0 ? cfg.num_classes : max_label + 1;
    if (max_label >= num_classes) throw DataError("label exceeds the configured class count");

    std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(num_classes));
    for (std::size_t i = 0; i < train.size(); ++i)
        by_class[static_cast<std::size_t>(*train[i].label())].push_back(i);

    std::vector<SoftLabeledGraph> out;
    out.reserve(train.size());
    for (const auto& g : train) out.push_back({g, one_hot(*g.label(), num_classes), std::nullopt});

    if (cfg.mixup_ratio == 0.0) return out;
    if (num_classes < 2) throw DataError("mixup needs at least two classes");
    for (int c = 0; c < num_classes; ++c)
        if (by_class[static_cast<std::size_t>(c)].empty())
            throw DataError("class " + std::to_string(c) + " has no graphs");
    const std::size_t per_pair = mixups_per_class_pair(train.size(), num_classes, cfg.mixup_ratio);
    if (per_pair == 0) return out;

    struct Job {
        int class1;
        int class2;
    };
    std::vector<Job> jobs;
    for (int a = 0; a < num_classes; ++a)
        for (int b = a + 1; b < num_classes; ++b)
            for (std::size_t k = 0; k < per_pair; ++k) jobs.push_back({a, b});

    const Eigen::Index median = cfg.median_override ? *cfg.median_override : median_size(train);
    std::vector<std::optional<SoftLabeledGraph>> generated(jobs.size());

    parallel_for(jobs.size(), cfg.workers, [&](std::size_t j) {
        auto rng = job_rng(cfg.seed, j);
        const auto& pool1 = by_class[static_cast<std::size_t>(jobs[j].class1)];
        const auto& pool2 = by_class[static_cast<std::size_t>(jobs[j].class2)];
        std::uniform_int_distribution<std::size_t> pick1(0, pool1.size() - 1);
        std::uniform_int_distribution<std::size_t> pick2(0, pool2.size() - 1);
        const std::size_t i1 = pool1[pick1(rng)];
        const std::size_t i2 = pool2[pick2(rng)];
        const double lambda = sample_lambda(cfg.beta_k, rng);
        const Graph& g1 = train[i1];
        const Graph& g2 = train[i2];
        const Eigen::Index size = choose_size(lambda, g1.size(), g2.size(), cfg.size_policy, median);
        try {
            MixupProblem problem{g1, g2, lambda, size, std::nullopt, cfg.solver,
                                 cfg.outer_max_iters, cfg.outer_tol};
            MixupResult mixed = solve_mixup(problem, cfg.accelerated);
            Discretized disc = discretize_adjacency(mixed.graph.structure(), edge_density(g1.structure()),
                                                    edge_density(g2.structure()), lambda,
                                                    cfg.threshold_grid, cfg.weighted_density);
            Vector labels = mix_labels(*g1.label(), *g2.label(), lambda, num_classes);
            Graph graph = make_uniform_graph(mixed.graph.features(), std::move(disc.adjacency),
                                             argmax_label(labels));
            generated[j] = SoftLabeledGraph{std::move(graph), std::move(labels),
                                            MixupProvenance{i1, i2, lambda, disc.theta, mixed.outer_iterations}};
            logger().debug("mixup {}: graphs {} and {}, lambda {:.4f}, size {}, {} outer iterations", j, i1,
                           i2, lambda, size, mixed.outer_iterations);
        } catch (const std::exception& e) {
            logger().warn("mixup {} (graphs {} and {}) failed and is skipped: {}", j, i1, i2, e.what());
        }
    });

    for (auto& g : generated)
        if (g) out.push_back(std::move(*g));
    return out;
}

}  // namespace fgw

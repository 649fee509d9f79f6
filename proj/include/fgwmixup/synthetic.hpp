#pragma once

// Seeded stochastic-block-model graph corpora shaped like small protein/molecule
// benchmarks: sparse (mean degree ~3.5), a few communities, 3-way one-hot node labels.

#include "fgwmixup/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace fgw {

struct SbmCorpusSpec {
    int graphs = 100;
    int classes = 2;
    int median_nodes = 26;
    int min_nodes = 6;
    int max_nodes = 60;
    int feature_dim = 3;
    double mean_degree = 3.5;
    std::uint64_t seed = 0;
};

/// One SBM graph; `cls` shifts the community count and mixing so classes differ.
inline Graph sbm_graph(std::mt19937_64& rng, int n, int cls, int feature_dim, double mean_degree) {
    std::uniform_int_distribution<int> block_count(2 + cls % 2, 3 + cls % 2);
    const int k = block_count(rng);
    std::uniform_int_distribution<int> pick_block(0, k - 1);
    std::vector<int> block(static_cast<std::size_t>(n));
    for (auto& b : block) b = pick_block(rng);

    const double block_size = std::max(1.0, static_cast<double>(n) / k);
    const double p_in = std::min(0.9, 0.8 * mean_degree / block_size);
    const double p_out = std::min(0.5, (0.2 + 0.1 * (cls % 3)) * mean_degree / std::max(1.0, n - block_size));
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    Matrix a = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double p = block[static_cast<std::size_t>(i)] == block[static_cast<std::size_t>(j)] ? p_in : p_out;
            if (unit(rng) < p) a(i, j) = a(j, i) = 1.0;
        }
    }
    // no isolated nodes: attach each to a random partner
    std::uniform_int_distribution<int> any(0, n - 1);
    for (int i = 0; i < n; ++i) {
        if (a.row(i).sum() > 0.0) continue;
        int j = any(rng);
        while (j == i) j = any(rng);
        a(i, j) = a(j, i) = 1.0;
    }

    Matrix x = Matrix::Zero(n, feature_dim);
    std::uniform_int_distribution<int> any_label(0, feature_dim - 1);
    for (int i = 0; i < n; ++i) {
        int lab = (block[static_cast<std::size_t>(i)] + cls) % feature_dim;
        if (unit(rng) < 0.2) lab = any_label(rng);
        x(i, lab) = 1.0;
    }
    return make_uniform_graph(std::move(x), std::move(a), cls);
}

inline std::vector<Graph> sbm_corpus(const SbmCorpusSpec& spec) {
    if (spec.graphs < 1 || spec.classes < 1 || spec.min_nodes < 2 || spec.max_nodes < spec.min_nodes)
        throw DataError("invalid synthetic corpus settings");
    std::mt19937_64 rng(spec.seed);
    std::lognormal_distribution<double> size_dist(std::log(static_cast<double>(spec.median_nodes)), 0.45);
    std::vector<Graph> out;
    out.reserve(static_cast<std::size_t>(spec.graphs));
    for (int g = 0; g < spec.graphs; ++g) {
        const int cls = g % spec.classes;
        const int n = std::clamp(static_cast<int>(std::lround(size_dist(rng))), spec.min_nodes, spec.max_nodes);
        out.push_back(sbm_graph(rng, n, cls, spec.feature_dim, spec.mean_degree));
    }
    return out;
}

}  // namespace fgw

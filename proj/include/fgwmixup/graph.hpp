#pragma once

// Attributed graphs G = (mu, X, A): node measure, node features, symmetric structure.

#include "fgwmixup/types.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fgw {

/// How a graph's node measure was produced. Preprocessing that drops nodes
/// rebuilds the measure with the same policy.
enum class MeasureKind { uniform, degree, custom };

inline constexpr double kMeasureIngestTol = 1e-9;

class Graph {
public:
    /// Validates and renormalizes. Throws DataError on any violated invariant.
    static Graph build(Vector mu, Matrix features, Matrix structure,
                       std::optional<int> label = std::nullopt,
                       MeasureKind kind = MeasureKind::custom) {
        const auto n = mu.size();
        if (n < 1) throw DataError("graph must have at least one node");
        if (features.rows() != n)
            throw DataError("feature rows (" + std::to_string(features.rows()) +
                            ") do not match node count (" + std::to_string(n) + ")");
        if (structure.rows() != n || structure.cols() != n)
            throw DataError("structure matrix must be " + std::to_string(n) + "x" +
                            std::to_string(n));
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = i + 1; j < n; ++j) {
                if (structure(i, j) != structure(j, i))
                    throw DataError("structure matrix is not symmetric at (" + std::to_string(i) +
                                    "," + std::to_string(j) + ")");
            }
        }
        if (!structure.allFinite() || !features.allFinite() || !mu.allFinite())
            throw DataError("graph contains non-finite values");
        if ((mu.array() < 0.0).any()) throw DataError("node measure has a negative entry");
        const double total = mu.sum();
        if (std::abs(total - 1.0) > kMeasureIngestTol)
            throw DataError("node measure sums to " + std::to_string(total) + ", expected 1");
        mu /= total;
        if (label && *label < 0) throw DataError("class label must be non-negative");
        return Graph(std::move(mu), std::move(features), std::move(structure), label, kind);
    }

    [[nodiscard]] const Vector& mu() const { return mu_; }
    [[nodiscard]] const Matrix& features() const { return features_; }
    [[nodiscard]] const Matrix& structure() const { return structure_; }
    [[nodiscard]] std::optional<int> label() const { return label_; }
    [[nodiscard]] MeasureKind measure_kind() const { return kind_; }
    [[nodiscard]] Eigen::Index size() const { return mu_.size(); }
    [[nodiscard]] Eigen::Index feature_dim() const { return features_.cols(); }

    [[nodiscard]] Graph with_label(std::optional<int> label) const {
        Graph g = *this;
        g.label_ = label;
        return g;
    }

private:
    Graph(Vector mu, Matrix features, Matrix structure, std::optional<int> label, MeasureKind kind)
        : mu_(std::move(mu)),
          features_(std::move(features)),
          structure_(std::move(structure)),
          label_(label),
          kind_(kind) {}

    Vector mu_;
    Matrix features_;
    Matrix structure_;
    std::optional<int> label_;
    MeasureKind kind_;
};

inline Graph build_graph(Vector mu, Matrix features, Matrix structure,
                         std::optional<int> label = std::nullopt) {
    return Graph::build(std::move(mu), std::move(features), std::move(structure), label);
}

inline Vector uniform_measure(Eigen::Index n) {
    if (n < 1) throw DataError("uniform measure needs at least one node");
    Vector mu = Vector::Constant(n, 1.0 / static_cast<double>(n));
    return mu / mu.sum();
}

/// Weighted degree, ignoring the diagonal.
inline Vector node_degrees(const Matrix& structure) {
    Vector deg = structure.rowwise().sum();
    deg -= structure.diagonal();
    return deg;
}

inline Vector degree_measure(const Matrix& structure) {
    const Vector deg = node_degrees(structure);
    if ((deg.array() < 0.0).any()) throw DataError("negative node degree");
    const double total = deg.sum();
    if (!(total > 0.0)) throw DataError("degree measure undefined for a graph without edges");
    return deg / total;
}

/// Graph with uniform node measure; the common construction for dataset graphs.
inline Graph make_uniform_graph(Matrix features, Matrix structure,
                                std::optional<int> label = std::nullopt) {
    auto mu = uniform_measure(structure.rows());
    return Graph::build(std::move(mu), std::move(features), std::move(structure), label,
                        MeasureKind::uniform);
}

inline Graph make_degree_graph(Matrix features, Matrix structure,
                               std::optional<int> label = std::nullopt) {
    auto mu = degree_measure(structure);
    return Graph::build(std::move(mu), std::move(features), std::move(structure), label,
                        MeasureKind::degree);
}

/// Entry (i,j) = ||x1_i - x2_j||^q for row-wise feature matrices.
inline Matrix pairwise_feature_cost(const Matrix& x1, const Matrix& x2, double q = 2.0) {
    if (x1.cols() != x2.cols())
        throw DataError("feature dimension mismatch: " + std::to_string(x1.cols()) + " vs " +
                        std::to_string(x2.cols()));
    Matrix dist(x1.rows(), x2.rows());
    for (Eigen::Index i = 0; i < x1.rows(); ++i) {
        for (Eigen::Index j = 0; j < x2.rows(); ++j) {
            const double sq = (x1.row(i) - x2.row(j)).squaredNorm();
            dist(i, j) = (q == 2.0) ? sq : std::pow(std::sqrt(sq), q);
        }
    }
    return dist;
}

inline Matrix feature_distance_matrix(const Graph& g1, const Graph& g2, double q = 2.0) {
    return pairwise_feature_cost(g1.features(), g2.features(), q);
}

/// Drops every node without an incident edge (self-loops do not count).
inline Graph remove_isolated_nodes(const Graph& g) {
    const Matrix& a = g.structure();
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        bool has_edge = false;
        for (Eigen::Index j = 0; j < g.size() && !has_edge; ++j) has_edge = (j != i && a(i, j) != 0.0);
        if (has_edge) keep.push_back(i);
    }
    if (keep.empty()) throw DataError("graph has no edges; removing isolated nodes empties it");
    if (static_cast<Eigen::Index>(keep.size()) == g.size()) return g;

    const auto m = static_cast<Eigen::Index>(keep.size());
    Matrix structure(m, m);
    Matrix features(m, g.feature_dim());
    Vector mu(m);
    for (Eigen::Index r = 0; r < m; ++r) {
        features.row(r) = g.features().row(keep[r]);
        mu(r) = g.mu()(keep[r]);
        for (Eigen::Index c = 0; c < m; ++c) structure(r, c) = a(keep[r], keep[c]);
    }
    switch (g.measure_kind()) {
        case MeasureKind::uniform:
            return make_uniform_graph(std::move(features), std::move(structure), g.label());
        case MeasureKind::degree:
            return make_degree_graph(std::move(features), std::move(structure), g.label());
        case MeasureKind::custom:
            break;
    }
    const double mass = mu.sum();
    if (!(mass > 0.0)) throw DataError("remaining nodes carry zero measure");
    return Graph::build(mu / mass, std::move(features), std::move(structure), g.label(),
                        MeasureKind::custom);
}

/// One-hot degree features of width max_degree + 1; larger degrees land in the last bucket.
inline Graph degree_feature_augmentation(const Graph& g, int max_degree, bool overwrite = false) {
    if (max_degree < 0) throw DataError("max_degree must be non-negative");
    if (g.feature_dim() != 0 && !overwrite)
        throw DataError("graph already has features; pass overwrite=true to replace them");
    Matrix onehot = Matrix::Zero(g.size(), max_degree + 1);
    const Matrix& a = g.structure();
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        int deg = 0;
        for (Eigen::Index j = 0; j < g.size(); ++j) deg += (j != i && a(i, j) != 0.0) ? 1 : 0;
        onehot(i, std::min(deg, max_degree)) = 1.0;
    }
    return Graph::build(g.mu(), std::move(onehot), g.structure(), g.label(), g.measure_kind());
}

}  // namespace fgw

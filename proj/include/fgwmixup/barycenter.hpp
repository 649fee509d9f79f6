#pragma once

// Two-graph FGW barycenter by block coordinate descent: alternate FGW solves for the
// couplings with the closed-form structure/feature updates.

#include "fgwmixup/graph.hpp"
#include "fgwmixup/solver.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fgw {

struct MixupProblem {
    Graph g1;
    Graph g2;
    double lambda = 0.5;
    Eigen::Index target_size = 1;
    std::optional<Vector> target_measure;  // uniform when empty
    FgwConfig cfg;
    int outer_max_iters = 200;
    double outer_tol = 5e-4;
    // Weight of the product coupling in the initial couplings; the rest is a
    // degree-ordered north-west-corner coupling.
    double init_blend = 0.1;

    [[nodiscard]] Vector resolved_measure() const {
        return target_measure ? *target_measure : uniform_measure(target_size);
    }

    void validate() const {
        if (!(lambda >= 0.0 && lambda <= 1.0)) throw DataError("lambda must lie in [0, 1]");
        if (target_size < 1) throw DataError("target size must be at least 1");
        if (target_measure) {
            if (target_measure->size() != target_size)
                throw DataError("target measure length differs from target size");
            if ((target_measure->array() < 0.0).any() ||
                std::abs(target_measure->sum() - 1.0) > kMeasureIngestTol)
                throw DataError("target measure is not a probability vector");
        }
        if (outer_max_iters < 1) throw DataError("outer iteration cap must be at least 1");
        if (!(init_blend > 0.0 && init_blend <= 1.0))
            throw DataError("init_blend must lie in (0, 1]");
        if (g1.feature_dim() != g2.feature_dim())
            throw DataError("source graphs have different feature dimensions");
        cfg.validate();
    }
};

struct MixupResult {
    Graph graph;  // continuous-valued structure
    Coupling pi1;
    Coupling pi2;
    std::vector<double> objective_trace;
    int outer_iterations = 0;
    bool converged = false;
    long inner_iterations = 0;
};

namespace detail {

inline void require_positive(const Vector& mu_t) {
    if ((mu_t.array() <= 0.0).any())
        throw DataError("target measure must be strictly positive for the barycenter update");
}

}  // namespace detail

/// (lambda pi1 A1 pi1^T + (1 - lambda) pi2 A2 pi2^T) ./ (mu_t mu_t^T), symmetrized exactly.
inline Matrix update_structure(const Matrix& pi1, const Matrix& pi2, const Matrix& a1,
                               const Matrix& a2, double lambda, const Vector& mu_t) {
    detail::require_positive(mu_t);
    if (pi1.rows() != mu_t.size() || pi2.rows() != mu_t.size())
        throw DataError("coupling rows must match the target size");
    if (pi1.cols() != a1.rows() || pi2.cols() != a2.rows())
        throw DataError("coupling columns must match the source sizes");
    Matrix mixed = lambda * (pi1 * a1 * pi1.transpose()) +
                   (1.0 - lambda) * (pi2 * a2 * pi2.transpose());
    mixed.array() /= (mu_t * mu_t.transpose()).array();
    return 0.5 * (mixed + mixed.transpose());
}

/// lambda diag(1/mu_t) pi1 X1 + (1 - lambda) diag(1/mu_t) pi2 X2.
inline Matrix update_features(const Matrix& pi1, const Matrix& pi2, const Matrix& x1,
                              const Matrix& x2, double lambda, const Vector& mu_t) {
    detail::require_positive(mu_t);
    if (pi1.rows() != mu_t.size() || pi2.rows() != mu_t.size())
        throw DataError("coupling rows must match the target size");
    if (pi1.cols() != x1.rows() || pi2.cols() != x2.rows() || x1.cols() != x2.cols())
        throw DataError("coupling/feature shapes are inconsistent");
    const Matrix mixed = lambda * (pi1 * x1) + (1.0 - lambda) * (pi2 * x2);
    return mu_t.cwiseInverse().asDiagonal() * mixed;
}

/// North-west-corner coupling between mu_t (in index order) and mu_s, with the source
/// nodes visited by decreasing degree. Feasible, deterministic, sparse.
inline Matrix degree_ordered_nw_coupling(const Vector& mu_t, const Graph& source) {
    const Vector deg = node_degrees(source.structure());
    std::vector<Eigen::Index> order(static_cast<std::size_t>(source.size()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return deg(a) > deg(b); });

    Matrix plan = Matrix::Zero(mu_t.size(), source.size());
    Vector rest_t = mu_t;
    Vector rest_s = source.mu();
    std::size_t k = 0;
    Eigen::Index i = 0;
    while (i < mu_t.size() && k < order.size()) {
        const Eigen::Index j = order[k];
        const double mass = std::min(rest_t(i), rest_s(j));
        plan(i, j) += mass;
        rest_t(i) -= mass;
        rest_s(j) -= mass;
        if (rest_t(i) <= 1e-15 * mu_t(i)) {
            ++i;
        } else {
            ++k;
        }
    }
    return plan;
}

inline Matrix initial_coupling(const Vector& mu_t, const Graph& source, double blend) {
    return (1.0 - blend) * degree_ordered_nw_coupling(mu_t, source) +
           blend * product_coupling(mu_t, source.mu());
}

/// Solves min_G lambda FGW(G, G1) + (1 - lambda) FGW(G, G2) over G with |G| = target_size.
/// `accelerated` selects the relaxed single-loop FGW solver for the coupling blocks.
inline MixupResult solve_mixup(const MixupProblem& problem, bool accelerated) {
    problem.validate();
    const Vector mu_t = problem.resolved_measure();
    const double lambda = problem.lambda;
    const Graph& g1 = problem.g1;
    const Graph& g2 = problem.g2;
    const SolverKind kind = accelerated ? SolverKind::relaxed : SolverKind::strict;

    Matrix pi1 = initial_coupling(mu_t, g1, problem.init_blend);
    Matrix pi2 = initial_coupling(mu_t, g2, problem.init_blend);
    Matrix a_t = update_structure(pi1, pi2, g1.structure(), g2.structure(), lambda, mu_t);
    Matrix x_t = update_features(pi1, pi2, g1.features(), g2.features(), lambda, mu_t);

    std::vector<double> trace;
    long inner = 0;
    bool converged = false;
    int k = 0;
    for (k = 1; k <= problem.outer_max_iters; ++k) {
        FgwProblem p1{pairwise_feature_cost(x_t, g1.features(), problem.cfg.q), a_t,
                      g1.structure(), mu_t, g1.mu()};
        FgwProblem p2{pairwise_feature_cost(x_t, g2.features(), problem.cfg.q), a_t,
                      g2.structure(), mu_t, g2.mu()};
        FgwSolution s1 = solve_fgw(p1, problem.cfg, kind, pi1);
        FgwSolution s2 = solve_fgw(p2, problem.cfg, kind, pi2);
        inner += s1.trace.iterations_used + s2.trace.iterations_used;
        pi1 = std::move(s1.coupling.plan);
        pi2 = std::move(s2.coupling.plan);

        const double objective = lambda * s1.value + (1.0 - lambda) * s2.value;
        trace.push_back(objective);

        a_t = update_structure(pi1, pi2, g1.structure(), g2.structure(), lambda, mu_t);
        x_t = update_features(pi1, pi2, g1.features(), g2.features(), lambda, mu_t);

        if (trace.size() > 1 && relative_change(objective, trace[trace.size() - 2]) <= problem.outer_tol) {
            converged = true;
            break;
        }
    }

    MixupResult result{
        Graph::build(mu_t, std::move(x_t), std::move(a_t), std::nullopt,
                     problem.target_measure ? MeasureKind::custom : MeasureKind::uniform),
        make_coupling(pi1, mu_t, g1.mu()),
        make_coupling(pi2, mu_t, g2.mu()),
        std::move(trace),
        std::min(k, problem.outer_max_iters),
        converged,
        inner};
    return result;
}

}  // namespace fgw

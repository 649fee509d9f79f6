#pragma once

// Mirror-descent FGW solvers.
//
// Both solvers take entropic mirror steps pi <- pi * exp(-gamma grad f(pi)). The strict
// solver follows every step with a full Sinkhorn projection onto Pi(mu1, mu2). The relaxed
// solver alternates a step + row scaling with a step + column scaling, so on exit only the
// column marginal is exact.

#include "fgwmixup/graph.hpp"
#include "fgwmixup/objective.hpp"
#include "fgwmixup/projection.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace fgw {

struct FgwConfig {
    double alpha = 0.95;
    double q = 2.0;
    double gamma = 1.0;
    int max_inner_iters = 300;
    double inner_tol = 5e-4;
    double projection_tol = 1e-9;
    int projection_max_iters = 1000;

    void validate() const {
        if (!(alpha >= 0.0 && alpha <= 1.0)) throw DataError("alpha must lie in [0, 1]");
        if (!(gamma > 0.0)) throw DataError("gamma must be positive");
        if (!(q > 0.0)) throw DataError("q must be positive");
        if (max_inner_iters < 1 || projection_max_iters < 1)
            throw DataError("iteration caps must be at least 1");
        if (!(inner_tol >= 0.0) || !(projection_tol > 0.0))
            throw DataError("tolerances must be nonnegative");
    }
};

struct SolveTrace {
    std::vector<double> objective_per_iter;  // f(pi) after each iteration, constant excluded
    int iterations_used = 0;
    bool converged = false;
};

struct FgwSolution {
    double value = 0.0;  // full FGW value, constant term included
    Coupling coupling;
    SolveTrace trace;
};

enum class SolverKind { strict, relaxed };

/// Everything the solvers need about a graph pair, precomputed once.
struct FgwProblem {
    Matrix dist;  // feature costs d(x1_i, x2_j)^q
    Matrix a1;
    Matrix a2;
    Vector mu1;
    Vector mu2;

    static FgwProblem from_graphs(const Graph& g1, const Graph& g2, double q) {
        return {feature_distance_matrix(g1, g2, q), g1.structure(), g2.structure(), g1.mu(),
                g2.mu()};
    }
};

inline double relative_change(double current, double previous) {
    return std::abs(current - previous) / std::max(std::abs(previous), 1e-12);
}

namespace detail {

/// log(pi) - gamma * grad, in log domain.
inline Matrix mirror_logits(const Matrix& plan, const Matrix& grad, double gamma) {
    return plan.cwiseMax(kPlanFloor).array().log().matrix() - gamma * grad;
}

/// Exact KL projection of exp(logits) onto {pi 1 = mu}: row-wise softmax scaled by mu.
inline Matrix row_softmax(const Matrix& logits, const Vector& mu) {
    Matrix out(logits.rows(), logits.cols());
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
        const double peak = logits.row(i).maxCoeff();
        if (!std::isfinite(peak)) throw SolverError("non-finite mirror step in row " + std::to_string(i));
        out.row(i) = (logits.row(i).array() - peak).exp().matrix();
        out.row(i) *= mu(i) / out.row(i).sum();
    }
    return out;
}

inline Matrix col_softmax(const Matrix& logits, const Vector& mu) {
    Matrix out(logits.rows(), logits.cols());
    for (Eigen::Index j = 0; j < logits.cols(); ++j) {
        const double peak = logits.col(j).maxCoeff();
        if (!std::isfinite(peak)) throw SolverError("non-finite mirror step in column " + std::to_string(j));
        out.col(j) = (logits.col(j).array() - peak).exp().matrix();
        out.col(j) *= mu(j) / out.col(j).sum();
    }
    return out;
}

}  // namespace detail

inline Matrix product_coupling(const Vector& mu1, const Vector& mu2) {
    return mu1 * mu2.transpose();
}

/// Runs the selected solver from `init` (default: mu1 mu2^T).
inline FgwSolution solve_fgw(const FgwProblem& p, const FgwConfig& cfg, SolverKind kind,
                             const std::optional<Matrix>& init = std::nullopt) {
    cfg.validate();
    const auto n1 = p.mu1.size();
    const auto n2 = p.mu2.size();
    if (p.dist.rows() != n1 || p.dist.cols() != n2)
        throw DataError("feature distance matrix does not match the measures");
    Matrix plan = init ? *init : product_coupling(p.mu1, p.mu2);
    if (plan.rows() != n1 || plan.cols() != n2)
        throw DataError("initial plan must be " + std::to_string(n1) + "x" + std::to_string(n2));
    if (!plan.allFinite() || (plan.array() < 0.0).any())
        throw DataError("initial plan must be finite and nonnegative");

    const double alpha = cfg.alpha;
    FgwSolution sol;
    double previous = fgw_objective(plan, p.dist, p.a1, p.a2, alpha);

    for (int it = 1; it <= cfg.max_inner_iters; ++it) {
        if (kind == SolverKind::strict) {
            const Matrix grad = fgw_gradient(plan, p.dist, p.a1, p.a2, alpha);
            Matrix stepped = detail::row_softmax(detail::mirror_logits(plan, grad, cfg.gamma), p.mu1);
            plan = project_to_polytope(std::move(stepped), p.mu1, p.mu2, cfg.projection_tol,
                                       cfg.projection_max_iters)
                       .coupling.plan;
        } else {
            Matrix grad = fgw_gradient(plan, p.dist, p.a1, p.a2, alpha);
            plan = detail::row_softmax(detail::mirror_logits(plan, grad, cfg.gamma), p.mu1);
            grad = fgw_gradient(plan, p.dist, p.a1, p.a2, alpha);
            plan = detail::col_softmax(detail::mirror_logits(plan, grad, cfg.gamma), p.mu2);
        }
        const double current = fgw_objective(plan, p.dist, p.a1, p.a2, alpha);
        sol.trace.objective_per_iter.push_back(current);
        sol.trace.iterations_used = it;
        if (relative_change(current, previous) <= cfg.inner_tol) {
            sol.trace.converged = true;
            break;
        }
        previous = current;
    }

    sol.value = fgw_full_value(plan, p.dist, p.a1, p.a2, p.mu1, p.mu2, alpha);
    sol.coupling = make_coupling(std::move(plan), p.mu1, p.mu2);
    return sol;
}

inline FgwSolution solve_fgw_strict(const Graph& g1, const Graph& g2, const FgwConfig& cfg,
                                    const std::optional<Matrix>& init = std::nullopt) {
    return solve_fgw(FgwProblem::from_graphs(g1, g2, cfg.q), cfg, SolverKind::strict, init);
}

inline FgwSolution solve_fgw_relaxed(const Graph& g1, const Graph& g2, const FgwConfig& cfg,
                                     const std::optional<Matrix>& init = std::nullopt) {
    return solve_fgw(FgwProblem::from_graphs(g1, g2, cfg.q), cfg, SolverKind::relaxed, init);
}

/// Pure feature transport (alpha = 0).
inline double wasserstein_distance(const Graph& g1, const Graph& g2, FgwConfig cfg) {
    cfg.alpha = 0.0;
    return solve_fgw_strict(g1, g2, cfg).value;
}

/// Pure structure transport (alpha = 1); features are ignored.
inline double gw_distance(const Graph& g1, const Graph& g2, FgwConfig cfg,
                          const std::optional<Matrix>& init = std::nullopt) {
    cfg.alpha = 1.0;
    if (g1.feature_dim() != g2.feature_dim()) {
        const FgwProblem p{Matrix::Zero(g1.size(), g2.size()), g1.structure(), g2.structure(),
                           g1.mu(), g2.mu()};
        return solve_fgw(p, cfg, SolverKind::strict, init).value;
    }
    return solve_fgw_strict(g1, g2, cfg, init).value;
}

/// Coupling diag(mu) for two graphs of equal size; the identity alignment.
inline Matrix identity_coupling(const Vector& mu) {
    return mu.asDiagonal();
}

}  // namespace fgw

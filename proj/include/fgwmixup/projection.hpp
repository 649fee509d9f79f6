#pragma once

// KL (Bregman) projections of positive matrices onto marginal constraints.

#include "fgwmixup/types.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fgw {

inline constexpr double kPlanFloor = 1e-300;

/// A transport plan together with its L1 marginal residuals.
struct Coupling {
    Matrix plan;
    double row_marginal_error = 0.0;
    double col_marginal_error = 0.0;
};

inline double row_marginal_error(const Matrix& plan, const Vector& mu1) {
    return (plan.rowwise().sum() - mu1).lpNorm<1>();
}

inline double col_marginal_error(const Matrix& plan, const Vector& mu2) {
    return (plan.colwise().sum().transpose() - mu2).lpNorm<1>();
}

inline Coupling make_coupling(Matrix plan, const Vector& mu1, const Vector& mu2) {
    if (plan.rows() != mu1.size() || plan.cols() != mu2.size())
        throw DataError("plan shape does not match the marginals");
    Coupling c;
    c.row_marginal_error = row_marginal_error(plan, mu1);
    c.col_marginal_error = col_marginal_error(plan, mu2);
    c.plan = std::move(plan);
    return c;
}

/// pi <- diag(mu ./ pi 1) pi
inline void scale_rows(Matrix& plan, const Vector& mu) {
    const Vector sums = plan.rowwise().sum();
    for (Eigen::Index i = 0; i < plan.rows(); ++i) {
        if (!(sums(i) > 0.0) || !std::isfinite(sums(i)))
            throw SolverError("row " + std::to_string(i) + " of the plan cannot be scaled");
        plan.row(i) *= mu(i) / sums(i);
    }
}

/// pi <- pi diag(mu ./ pi^T 1)
inline void scale_cols(Matrix& plan, const Vector& mu) {
    const Vector sums = plan.colwise().sum().transpose();
    for (Eigen::Index j = 0; j < plan.cols(); ++j) {
        if (!(sums(j) > 0.0) || !std::isfinite(sums(j)))
            throw SolverError("column " + std::to_string(j) + " of the plan cannot be scaled");
        plan.col(j) *= mu(j) / sums(j);
    }
}

struct Projection {
    Coupling coupling;
    int sweeps = 0;
    bool converged = false;
    bool rounded = false;  // Sinkhorn hit the cap and the plan was rounded onto the polytope
};

/// Rounds a nonnegative plan onto Pi(mu1, mu2): shrinks rows and columns that carry too much
/// mass, then adds the rank-one correction (mu1 - pi 1)(mu2 - pi^T 1)^T / ||mu2 - pi^T 1||_1.
inline Matrix round_to_polytope(Matrix plan, const Vector& mu1, const Vector& mu2) {
    const Vector rows = plan.rowwise().sum();
    for (Eigen::Index i = 0; i < plan.rows(); ++i)
        if (rows(i) > mu1(i)) plan.row(i) *= mu1(i) / rows(i);
    const Vector cols = plan.colwise().sum().transpose();
    for (Eigen::Index j = 0; j < plan.cols(); ++j)
        if (cols(j) > mu2(j)) plan.col(j) *= mu2(j) / cols(j);
    const Vector row_gap = (mu1 - plan.rowwise().sum()).cwiseMax(0.0);
    const Vector col_gap = (mu2 - plan.colwise().sum().transpose()).cwiseMax(0.0);
    const double mass = col_gap.sum();
    if (mass > 0.0) plan += row_gap * col_gap.transpose() / mass;
    return plan;
}

/// Sinkhorn scaling onto Pi(mu1, mu2) until both L1 residuals are <= tol. If the sweep cap is
/// reached first, the last iterate is rounded onto the polytope.
inline Projection project_to_polytope(Matrix plan, const Vector& mu1, const Vector& mu2,
                                      double tol, int max_iters) {
    if (plan.rows() != mu1.size() || plan.cols() != mu2.size())
        throw DataError("plan shape does not match the marginals");
    if (!plan.allFinite() || (plan.array() < 0.0).any())
        throw SolverError("plan must be finite and nonnegative before projection");

    Projection out;
    if (row_marginal_error(plan, mu1) <= tol && col_marginal_error(plan, mu2) <= tol) {
        out.coupling = make_coupling(std::move(plan), mu1, mu2);
        out.converged = true;
        return out;
    }
    plan = plan.cwiseMax(kPlanFloor);
    for (int it = 1; it <= max_iters; ++it) {
        scale_rows(plan, mu1);
        scale_cols(plan, mu2);
        out.sweeps = it;
        if (row_marginal_error(plan, mu1) <= tol) {
            out.converged = col_marginal_error(plan, mu2) <= tol;
            if (out.converged) break;
        }
    }
    if (!out.converged) {
        plan = round_to_polytope(std::move(plan), mu1, mu2);
        out.rounded = true;
    }
    out.coupling = make_coupling(std::move(plan), mu1, mu2);
    return out;
}

}  // namespace fgw

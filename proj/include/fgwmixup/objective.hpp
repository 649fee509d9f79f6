#pragma once

// FGW objective with squared structure loss, written as the quadratic form
//   f(pi) = (1 - alpha) <D, pi> - 2 alpha tr(pi^T A1 pi A2)
// plus the marginal-dependent constant alpha (mu1^T A1^2 mu1 + mu2^T A2^2 mu2).
// Structure matrices are assumed symmetric.

#include "fgwmixup/types.hpp"

#include <string>

namespace fgw {

namespace detail {

inline void check_shapes(const Matrix& plan, const Matrix& dist, const Matrix& a1,
                         const Matrix& a2) {
    if (dist.rows() != plan.rows() || dist.cols() != plan.cols())
        throw DataError("distance matrix shape does not match the plan");
    if (a1.rows() != plan.rows() || a1.cols() != plan.rows())
        throw DataError("first structure matrix must be " + std::to_string(plan.rows()) +
                        " square");
    if (a2.rows() != plan.cols() || a2.cols() != plan.cols())
        throw DataError("second structure matrix must be " + std::to_string(plan.cols()) +
                        " square");
}

}  // namespace detail

/// Constant-free objective f(pi).
inline double fgw_objective(const Matrix& plan, const Matrix& dist, const Matrix& a1,
                            const Matrix& a2, double alpha) {
    detail::check_shapes(plan, dist, a1, a2);
    const Matrix cross = a1 * plan * a2;
    return (1.0 - alpha) * plan.cwiseProduct(dist).sum() -
           2.0 * alpha * plan.cwiseProduct(cross).sum();
}

/// alpha * (sum_ik A1[i,k]^2 mu1_i mu1_k + sum_jl A2[j,l]^2 mu2_j mu2_l).
inline double structure_constant(const Matrix& a1, const Matrix& a2, const Vector& mu1,
                                 const Vector& mu2, double alpha) {
    if (a1.rows() != mu1.size() || a2.rows() != mu2.size())
        throw DataError("measure length does not match structure matrix");
    const double c1 = mu1.dot(a1.cwiseAbs2() * mu1);
    const double c2 = mu2.dot(a2.cwiseAbs2() * mu2);
    return alpha * (c1 + c2);
}

/// Full FGW value f(pi) + constant; equals the four-index definition for feasible plans.
inline double fgw_full_value(const Matrix& plan, const Matrix& dist, const Matrix& a1,
                             const Matrix& a2, const Vector& mu1, const Vector& mu2,
                             double alpha) {
    return fgw_objective(plan, dist, a1, a2, alpha) + structure_constant(a1, a2, mu1, mu2, alpha);
}

/// grad f(pi) = (1 - alpha) D - 4 alpha A1 pi A2.
inline Matrix fgw_gradient(const Matrix& plan, const Matrix& dist, const Matrix& a1,
                           const Matrix& a2, double alpha) {
    detail::check_shapes(plan, dist, a1, a2);
    return (1.0 - alpha) * dist - (4.0 * alpha) * (a1 * plan * a2);
}

}  // namespace fgw

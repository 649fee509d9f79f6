#pragma once

// Independent reference computations used by the unit and acceptance tests. Everything here
// is written with plain loops and no library helpers beyond storage.

#include "fgwmixup/fgwmixup.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

namespace oracle {

using fgw::Matrix;
using fgw::Vector;

/// sum_{i,j,k,l} [(1 - a) D_ik + a (A1_ij - A2_kl)^2] pi_ik pi_jl.
inline double four_index_fgw(const Matrix& plan, const Matrix& dist, const Matrix& a1, const Matrix& a2,
                             double alpha) {
    const auto n1 = plan.rows();
    const auto n2 = plan.cols();
    double total = 0.0;
    for (Eigen::Index i = 0; i < n1; ++i)
        for (Eigen::Index j = 0; j < n1; ++j)
            for (Eigen::Index k = 0; k < n2; ++k)
                for (Eigen::Index l = 0; l < n2; ++l) {
                    const double diff = a1(i, j) - a2(k, l);
                    total += ((1.0 - alpha) * dist(i, k) + alpha * diff * diff) * plan(i, k) * plan(j, l);
                }
    return total;
}

inline Matrix brute_feature_cost(const Matrix& x1, const Matrix& x2, double q) {
    Matrix out(x1.rows(), x2.rows());
    for (Eigen::Index i = 0; i < x1.rows(); ++i)
        for (Eigen::Index j = 0; j < x2.rows(); ++j) {
            double sq = 0.0;
            for (Eigen::Index c = 0; c < x1.cols(); ++c) sq += (x1(i, c) - x2(j, c)) * (x1(i, c) - x2(j, c));
            out(i, j) = std::pow(std::sqrt(sq), q);
        }
    return out;
}

/// Central differences of fgw_objective, one entry at a time.
inline Matrix finite_difference_gradient(const Matrix& plan, const Matrix& dist, const Matrix& a1,
                                         const Matrix& a2, double alpha, double h) {
    Matrix grad(plan.rows(), plan.cols());
    for (Eigen::Index i = 0; i < plan.rows(); ++i)
        for (Eigen::Index k = 0; k < plan.cols(); ++k) {
            Matrix up = plan;
            Matrix down = plan;
            up(i, k) += h;
            down(i, k) -= h;
            grad(i, k) = (fgw::fgw_objective(up, dist, a1, a2, alpha) - fgw::fgw_objective(down, dist, a1, a2, alpha)) /
                         (2.0 * h);
        }
    return grad;
}

/// Minimum of the full objective over the n! couplings P / n.
// Minimizing permutation coupling P/n over all n! permutations.
inline Matrix best_permutation_plan(const Matrix& dist, const Matrix& a1, const Matrix& a2, double alpha) {
    const auto n = a1.rows();
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    Matrix best_plan;
    do {
        Matrix plan = Matrix::Zero(n, n);
        for (Eigen::Index i = 0; i < n; ++i) plan(i, perm[static_cast<std::size_t>(i)]) = 1.0 / static_cast<double>(n);
        const double value = four_index_fgw(plan, dist, a1, a2, alpha);
        if (value < best) {
            best = value;
            best_plan = plan;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best_plan;
}

inline double best_permutation_value(const Matrix& dist, const Matrix& a1, const Matrix& a2, double alpha) {
    return four_index_fgw(best_permutation_plan(dist, a1, a2, alpha), dist, a1, a2, alpha);
}

inline Matrix naive_structure_update(const Matrix& pi1, const Matrix& pi2, const Matrix& a1, const Matrix& a2,
                                     double lambda, const Vector& mu) {
    const auto n = mu.size();
    Matrix out = Matrix::Zero(n, n);
    for (Eigen::Index p = 0; p < n; ++p)
        for (Eigen::Index r = 0; r < n; ++r) {
            double s1 = 0.0;
            for (Eigen::Index i = 0; i < a1.rows(); ++i)
                for (Eigen::Index j = 0; j < a1.cols(); ++j) s1 += pi1(p, i) * a1(i, j) * pi1(r, j);
            double s2 = 0.0;
            for (Eigen::Index i = 0; i < a2.rows(); ++i)
                for (Eigen::Index j = 0; j < a2.cols(); ++j) s2 += pi2(p, i) * a2(i, j) * pi2(r, j);
            out(p, r) = (lambda * s1 + (1.0 - lambda) * s2) / (mu(p) * mu(r));
        }
    return out;
}

inline Matrix naive_feature_update(const Matrix& pi1, const Matrix& pi2, const Matrix& x1, const Matrix& x2,
                                   double lambda, const Vector& mu) {
    Matrix out = Matrix::Zero(mu.size(), x1.cols());
    for (Eigen::Index p = 0; p < mu.size(); ++p)
        for (Eigen::Index c = 0; c < x1.cols(); ++c) {
            double s = 0.0;
            for (Eigen::Index i = 0; i < x1.rows(); ++i) s += lambda * pi1(p, i) * x1(i, c);
            for (Eigen::Index i = 0; i < x2.rows(); ++i) s += (1.0 - lambda) * pi2(p, i) * x2(i, c);
            out(p, c) = s / mu(p);
        }
    return out;
}

inline double off_diagonal_density(const Matrix& a, double theta) {
    const auto n = a.rows();
    if (n < 2) return 0.0;
    long on = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (i != j && a(i, j) >= theta) ++on;
    return static_cast<double>(on) / static_cast<double>(n * (n - 1));
}

/// Smallest weighted density gap over `grid` equally spaced thresholds between the extreme
/// off-diagonal entries.
inline double best_grid_gap(const Matrix& a, double d1, double d2, double lambda, int grid) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            if (i != j) {
                lo = std::min(lo, a(i, j));
                hi = std::max(hi, a(i, j));
            }
    double best = std::numeric_limits<double>::infinity();
    for (int g = 0; g < grid; ++g) {
        const double theta = lo + (hi - lo) * static_cast<double>(g) / static_cast<double>(grid - 1);
        const double d = off_diagonal_density(a, theta);
        best = std::min(best, lambda * std::abs(d - d1) + (1.0 - lambda) * std::abs(d - d2));
    }
    return best;
}

inline Matrix random_symmetric(std::mt19937_64& rng, Eigen::Index n, bool binary, bool zero_diagonal = true) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Matrix a = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i; j < n; ++j) {
            if (i == j && zero_diagonal) continue;
            const double v = binary ? (unit(rng) < 0.4 ? 1.0 : 0.0) : unit(rng);
            a(i, j) = a(j, i) = v;
        }
    return a;
}

inline Vector random_measure(std::mt19937_64& rng, Eigen::Index n) {
    std::uniform_real_distribution<double> unit(0.1, 1.0);
    Vector mu(n);
    for (Eigen::Index i = 0; i < n; ++i) mu(i) = unit(rng);
    return mu / mu.sum();
}

inline Matrix random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c, double lo = -1.0,
                            double hi = 1.0) {
    std::uniform_real_distribution<double> unit(lo, hi);
    Matrix m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j) m(i, j) = unit(rng);
    return m;
}

/// Random strictly positive plan with marginals mu1, mu2 (Sinkhorn-balanced random matrix).
inline Matrix random_plan(std::mt19937_64& rng, const Vector& mu1, const Vector& mu2) {
    Matrix plan = random_matrix(rng, mu1.size(), mu2.size(), 0.05, 1.0);
    for (int sweep = 0; sweep < 2000; ++sweep) {
        for (Eigen::Index i = 0; i < plan.rows(); ++i) plan.row(i) *= mu1(i) / plan.row(i).sum();
        for (Eigen::Index j = 0; j < plan.cols(); ++j) plan.col(j) *= mu2(j) / plan.col(j).sum();
    }
    return plan;
}

/// Connected random graph with one-hot features.
inline fgw::Graph random_graph(std::mt19937_64& rng, Eigen::Index n, Eigen::Index d, int label = 0) {
    Matrix a = random_symmetric(rng, n, true);
    for (Eigen::Index i = 0; i + 1 < n; ++i) a(i, i + 1) = a(i + 1, i) = 1.0;
    Matrix x = Matrix::Zero(n, d);
    std::uniform_int_distribution<Eigen::Index> pick(0, d - 1);
    for (Eigen::Index i = 0; i < n; ++i) x(i, pick(rng)) = 1.0;
    return fgw::make_uniform_graph(std::move(x), std::move(a), label);
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& tag) {
    auto dir = std::filesystem::temp_directory_path() / ("fgwmixup_test_" + tag);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

}  // namespace oracle

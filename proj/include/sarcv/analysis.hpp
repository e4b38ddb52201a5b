#pragma once

// Evaluation metrics, explained-variance dimension, FPCA bases, reference
// Mercer kernels and log-log rate regression.

#include <cmath>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "sarcv/errors.hpp"
#include "sarcv/gridcore.hpp"

namespace sarcv {

/// ||estimate - truth||_F / ||truth||_F.
inline double rel_err(const CovMatrix& estimate, const CovMatrix& truth)
{
    detail::require(estimate.n() == truth.n(), "rel_err: dimension mismatch");
    const double scale = frobenius_norm(truth);
    detail::require(scale > 0.0, "rel_err: truth must be nonzero");
    return frobenius_distance(estimate, truth) / scale;
}

/// Frobenius distance of the discretized kernels divided by n, i.e. the
/// Hilbert-Schmidt distance of the corresponding integral operators.
inline double hs_error(const CovMatrix& estimate, const CovMatrix& truth)
{
    return frobenius_distance(estimate, truth) / truth.n();
}

/// Smallest d whose leading eigenvalues reach `target` of the total mass.
/// Negative eigenvalues count as zero. The total defaults to the sum of the
/// given values; pass `total_trace` to measure against a known trace (e.g.
/// an analytic operator trace when only the leading part of the spectrum is
/// listed).
inline int d_explained(const Vector& descending, double target, std::optional<double> total_trace = std::nullopt)
{
    detail::require(target > 0.0 && target < 1.0, "d_explained: target must lie in (0, 1)");
    const Vector clipped = descending.cwiseMax(0.0);
    const double total = total_trace.value_or(clipped.sum());
    detail::require(total > 0.0, "d_explained: spectrum has no positive mass");

    double running = 0.0;
    for (Eigen::Index k = 0; k < clipped.size(); ++k) {
        running += clipped(k);
        if (running >= target * total) {
            return static_cast<int>(k + 1);
        }
    }
    throw InvalidArgument("d_explained: listed eigenvalues never reach the target fraction");
}

inline int d_explained(const EigenPairs& eig, double target) { return d_explained(eig.values, target); }

inline int d_explained(const CovMatrix& m, double target) { return d_explained(sym_eigenvalues(m), target); }

// ---------------------------------------------------------------------------

enum class MercerKind { OneMinusMax, BridgeMinusProduct };

struct MercerReference {
    CovMatrix kernel;
    /// k-th eigenvalue of the integral operator on L^2(0,1), descending.
    std::vector<double> eigenvalues;
};

inline double mercer_eigenvalue(MercerKind kind, int k, double eta = 1.0)
{
    const double pi2 = std::numbers::pi * std::numbers::pi;
    if (kind == MercerKind::OneMinusMax) {
        const double shifted = k - 0.5;
        return 1.0 / (shifted * shifted * pi2);
    }
    return eta / (static_cast<double>(k) * k * pi2);
}

inline double mercer_eigenfunction(MercerKind kind, int k, double x)
{
    if (kind == MercerKind::OneMinusMax) {
        return std::numbers::sqrt2 * std::sin(std::numbers::pi * (k - 0.5) * (1.0 - x));
    }
    return std::numbers::sqrt2 * std::sin(std::numbers::pi * k * x);
}

inline Kernel mercer_kernel(MercerKind kind, double eta)
{
    return kind == MercerKind::OneMinusMax ? Kernel::one_minus_max() : Kernel::bridge(eta);
}

/// Closed-form kernel on the grid points in (0, 1] plus the first `terms`
/// analytic eigenvalues.
inline MercerReference mercer_reference(MercerKind kind, const SpatialGrid& grid, int terms, double eta = 1.0)
{
    detail::require(terms >= 1, "mercer_reference: terms must be positive");
    detail::require(eta > 0.0, "mercer_reference: eta must be positive");
    MercerReference ref{kernel_matrix(mercer_kernel(kind, eta), grid, 1.0, grid.n()), {}};
    ref.eigenvalues.reserve(static_cast<std::size_t>(terms));
    for (int k = 1; k <= terms; ++k) {
        ref.eigenvalues.push_back(mercer_eigenvalue(kind, k, eta));
    }
    return ref;
}

/// Truncated eigenfunction series sum_{k<=terms} lambda_k e_k(x) e_k(y) on
/// the same points as mercer_reference.
inline Matrix mercer_partial_sum(MercerKind kind, const SpatialGrid& grid, int terms, double eta = 1.0)
{
    detail::require(terms >= 1, "mercer_partial_sum: terms must be positive");
    const int n = grid.n();
    Matrix features(n, terms);
    for (int j = 0; j < n; ++j) {
        for (int k = 1; k <= terms; ++k) {
            features(j, k - 1) = std::sqrt(mercer_eigenvalue(kind, k, eta)) * mercer_eigenfunction(kind, k, grid.x(j));
        }
    }
    return features * features.transpose();
}

/// Midpoint-rule Nystrom discretization: entries k(x_j, x_j') / n at the cell
/// centres (j - 1/2)/n. Its eigenvalues approximate the operator's with
/// O(1/n^2) error.
inline CovMatrix cell_centred_operator(const Kernel& kernel, int n)
{
    detail::require(n >= 1, "cell_centred_operator: n must be positive");
    Matrix m(n, n);
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k <= j; ++k) {
            const double v = kernel((j + 0.5) / n, (k + 0.5) / n) / n;
            m(j, k) = v;
            m(k, j) = v;
        }
    }
    return CovMatrix(std::move(m));
}

// ---------------------------------------------------------------------------

struct FpcaBasis {
    Matrix basis;
    double captured_fraction = 0.0;
    /// Mass of the discarded eigenvalues: the mean-squared projection error
    /// per unit time of the driver.
    double tail_trace = 0.0;
    double total_trace = 0.0;
};

inline FpcaBasis fpca_basis(const CovMatrix& cov, int d)
{
    detail::require(d >= 1 && d <= cov.n(), "fpca_basis: d must lie in [1, n]");
    const EigenPairs eig = sym_eigen(cov);
    const Vector clipped = eig.values.cwiseMax(0.0);
    const double total = clipped.sum();
    detail::require(total > 0.0, "fpca_basis: spectrum has no positive mass");

    FpcaBasis out;
    out.basis = eig.vectors.leftCols(d);
    out.total_trace = total;
    out.tail_trace = clipped.tail(cov.n() - d).sum();
    out.captured_fraction = clipped.head(d).sum() / total;
    return out;
}

// ---------------------------------------------------------------------------

struct RateFit {
    std::vector<int> grid_sizes;
    std::vector<double> median_errors;
    /// Exponent p in error ~ C * (1/n)^p.
    double slope = 0.0;
    double intercept = 0.0;
};

/// Least-squares line through (log(1/n), log(error)).
inline RateFit fit_rate(std::vector<int> grid_sizes, std::vector<double> errors)
{
    detail::require(grid_sizes.size() == errors.size(), "fit_rate: lists must have equal length");
    detail::require(grid_sizes.size() >= 3, "fit_rate: at least three grid sizes required");
    const auto m = static_cast<double>(grid_sizes.size());
    double sx = 0.0;
    double sy = 0.0;
    for (std::size_t k = 0; k < grid_sizes.size(); ++k) {
        detail::require(grid_sizes[k] >= 1, "fit_rate: grid sizes must be positive");
        detail::require(k == 0 || grid_sizes[k] > grid_sizes[k - 1], "fit_rate: grid sizes must ascend");
        detail::require(errors[k] > 0.0, "fit_rate: errors must be positive");
        sx += std::log(1.0 / grid_sizes[k]);
        sy += std::log(errors[k]);
    }
    const double mx = sx / m;
    const double my = sy / m;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t k = 0; k < grid_sizes.size(); ++k) {
        const double dx = std::log(1.0 / grid_sizes[k]) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(errors[k]) - my);
    }
    RateFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.grid_sizes = std::move(grid_sizes);
    fit.median_errors = std::move(errors);
    return fit;
}

} // namespace sarcv

#pragma once

// Jump classification of increments: a plain norm threshold and the
// data-driven Mahalanobis-type rule built on a robust preliminary
// covariation.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <variant>
#include <vector>

#include "sarcv/errors.hpp"
#include "sarcv/gridcore.hpp"
#include "sarcv/increments.hpp"

namespace sarcv {

struct NoTruncation {};

/// Flag an increment when its Euclidean norm exceeds c * delta^w.
struct NormThreshold {
    double c = 1.0;
    double w = 0.49;
};

struct MahalanobisRule {
    double discard_fraction = 0.25;
    double evr_target = 0.90;
    double multiplier = 3.0;
    double exponent = 0.49;
};

using TruncationRule = std::variant<NoTruncation, NormThreshold, MahalanobisRule>;

inline void validate(const TruncationRule& rule)
{
    if (const auto* norm = std::get_if<NormThreshold>(&rule)) {
        detail::require(norm->c > 0.0, "NormThreshold: c must be positive");
        detail::require(norm->w > 0.0 && norm->w < 0.5, "NormThreshold: w must lie in (0, 1/2)");
    } else if (const auto* m = std::get_if<MahalanobisRule>(&rule)) {
        detail::require(m->discard_fraction > 0.0 && m->discard_fraction < 1.0,
                        "MahalanobisRule: discard_fraction must lie in (0, 1)");
        detail::require(m->evr_target > 0.0 && m->evr_target < 1.0,
                        "MahalanobisRule: evr_target must lie in (0, 1)");
        detail::require(m->multiplier > 0.0, "MahalanobisRule: multiplier must be positive");
        detail::require(std::isfinite(m->exponent), "MahalanobisRule: exponent must be finite");
    }
}

struct TruncationReport {
    std::vector<bool> flags;
    int d = 1;
    EigenPairs prelim_eigen;
    double threshold = std::numeric_limits<double>::infinity();

    [[nodiscard]] int flagged() const
    {
        return static_cast<int>(std::count(flags.begin(), flags.end(), true));
    }
};

namespace detail {

struct ScoreWeights {
    Vector head_inverse; // 1/lambda_i for i <= d
    double tail_inverse = 0.0; // 1 / sum_{i>d} lambda_i, 0 if the tail is negligible
};

inline ScoreWeights score_weights(const EigenPairs& eig, int d)
{
    const int n = eig.size();
    require(d >= 1 && d <= n, "mahalanobis_distance: d must lie in [1, n]");
    if (!(eig.values(d - 1) > 0.0)) {
        throw DegenerateSpectrum("mahalanobis_distance: lambda_d is not positive");
    }
    ScoreWeights weights;
    weights.head_inverse = eig.values.head(d).cwiseInverse();
    if (d < n) {
        const double tail = eig.values.tail(n - d).cwiseMax(0.0).sum();
        if (tail > 1.0e-14 * eig.values(0)) {
            weights.tail_inverse = 1.0 / tail;
        }
    }
    return weights;
}

inline double score_from_projection(const Eigen::Ref<const Vector>& projection, const ScoreWeights& weights)
{
    const Eigen::Index d = weights.head_inverse.size();
    const double head = projection.head(d).array().square().matrix().dot(weights.head_inverse);
    const double tail = projection.tail(projection.size() - d).squaredNorm() * weights.tail_inverse;
    return std::sqrt(head + tail);
}

inline int explained_dimension(const Vector& descending, double target)
{
    const Vector clipped = descending.cwiseMax(0.0);
    const double total = clipped.sum();
    if (!(total > 0.0)) {
        throw DegenerateSpectrum("explained dimension: spectrum has no positive mass");
    }
    double running = 0.0;
    for (Eigen::Index k = 0; k < clipped.size(); ++k) {
        running += clipped(k);
        if (running >= target * total) {
            return static_cast<int>(k + 1);
        }
    }
    return static_cast<int>(clipped.size());
}

} // namespace detail

/// g(f) with the leading d eigenpairs scored individually and the remaining
/// directions pooled against their summed eigenvalues.
inline double mahalanobis_distance(const Eigen::Ref<const Vector>& increment, const EigenPairs& eig, int d)
{
    detail::require(increment.size() == eig.size(), "mahalanobis_distance: dimension mismatch");
    const detail::ScoreWeights weights = detail::score_weights(eig, d);
    const Vector projection = eig.vectors.transpose() * increment;
    return detail::score_from_projection(projection, weights);
}

/// Row indices ordered by Euclidean norm, largest first, ties by index.
inline std::vector<int> rows_by_norm_descending(const Matrix& rows)
{
    const Vector norms = rows.rowwise().norm();
    std::vector<int> order(static_cast<std::size_t>(rows.rows()));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return norms(a) > norms(b); });
    return order;
}

inline TruncationReport select_flags(const IncrementSet& increments, const TruncationRule& rule, double delta)
{
    validate(rule);
    detail::require(delta > 0.0, "select_flags: delta must be positive");
    const int rows = increments.count();

    TruncationReport report;
    report.flags.assign(static_cast<std::size_t>(rows), false);

    if (std::holds_alternative<NoTruncation>(rule)) {
        return report;
    }

    if (const auto* norm = std::get_if<NormThreshold>(&rule)) {
        report.threshold = norm->c * std::pow(delta, norm->w);
        const Vector norms = increments.rows.rowwise().norm();
        for (int i = 0; i < rows; ++i) {
            report.flags[static_cast<std::size_t>(i)] = norms(i) > report.threshold;
        }
        return report;
    }

    const auto& m = std::get<MahalanobisRule>(rule);
    detail::require(rows >= 8, "select_flags: at least 8 increments are needed for the preliminary estimate");

    // 1. Set aside the largest increments.
    const int excluded = static_cast<int>(std::ceil(m.discard_fraction * rows));
    detail::require(excluded < rows, "select_flags: discard fraction leaves no increments");
    std::vector<bool> kept(static_cast<std::size_t>(rows), true);
    const std::vector<int> order = rows_by_norm_descending(increments.rows);
    for (int k = 0; k < excluded; ++k) {
        kept[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = false;
    }

    // 2. Preliminary covariation from the rest, rescaled to the full sample.
    const int n = increments.n;
    std::vector<Eigen::Index> summed;
    for (int i = kDefaultStartIndex - 1; i < rows; ++i) {
        if (kept[static_cast<std::size_t>(i)]) {
            summed.push_back(i);
        }
    }
    const Matrix chosen = increments.rows(summed, Eigen::all);
    Matrix prelim = Matrix::Zero(n, n);
    prelim.selfadjointView<Eigen::Lower>().rankUpdate(chosen.transpose());
    prelim = prelim.selfadjointView<Eigen::Lower>();
    prelim *= static_cast<double>(rows) / static_cast<double>(rows - excluded);

    // 3. Eigenstructure and the number of leading components.
    report.prelim_eigen = sym_eigen(prelim);
    report.d = detail::explained_dimension(report.prelim_eigen.values, m.evr_target);
    const detail::ScoreWeights weights = detail::score_weights(report.prelim_eigen, report.d);

    // 4. Score every increment, including the ones set aside in step 1.
    report.threshold = m.multiplier * std::pow(delta, m.exponent) * std::sqrt(report.d + 1.0);
    const Matrix projections = increments.rows * report.prelim_eigen.vectors;
    for (int i = 0; i < rows; ++i) {
        const double g = detail::score_from_projection(projections.row(i).transpose(), weights);
        report.flags[static_cast<std::size_t>(i)] = g > report.threshold;
    }
    return report;
}

} // namespace sarcv

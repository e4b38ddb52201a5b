#pragma once

// Discretized function-space primitives: uniform grids, sampled fields,
// covariance kernels and the dense linear algebra the estimators rely on.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sarcv/errors.hpp"

namespace sarcv {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Uniform grid x_j = j/n, j = 1..width.
class SpatialGrid {
public:
    explicit SpatialGrid(int n) : SpatialGrid(n, n + 1) {}

    SpatialGrid(int n, int width) : n_(n), width_(width)
    {
        detail::require(n >= 1, "SpatialGrid: n must be positive");
        detail::require(width >= n + 1, "SpatialGrid: width must be at least n+1");
    }

    [[nodiscard]] int n() const noexcept { return n_; }
    [[nodiscard]] int width() const noexcept { return width_; }
    [[nodiscard]] double spacing() const noexcept { return 1.0 / n_; }

    /// Coordinate of the zero-based point `index`, i.e. (index+1)/n.
    [[nodiscard]] double x(int index) const noexcept { return static_cast<double>(index + 1) / n_; }

    [[nodiscard]] std::vector<double> x_values() const
    {
        std::vector<double> xs(static_cast<std::size_t>(width_));
        for (int j = 0; j < width_; ++j) {
            xs[static_cast<std::size_t>(j)] = x(j);
        }
        return xs;
    }

private:
    int n_;
    int width_;
};

/// Function values on every point of a grid.
class GridField {
public:
    GridField(SpatialGrid grid, Vector values) : grid_(grid), values_(std::move(values))
    {
        detail::require(values_.size() == grid_.width(), "GridField: one value per grid point required");
    }

    [[nodiscard]] const SpatialGrid& grid() const noexcept { return grid_; }
    [[nodiscard]] const Vector& values() const noexcept { return values_; }

private:
    SpatialGrid grid_;
    Vector values_;
};

/// Space-time samples, entry (i, j) = f_{i/n}(j/n). Row 0 is the initial
/// time; columns cover the n+1 grid points 1/n .. (n+1)/n. Unit-time
/// samples are (n+1)x(n+1); long-span samples have T*n+1 rows.
class SampleMatrix {
public:
    SampleMatrix(int n, Matrix values) : n_(n), values_(std::move(values))
    {
        detail::require(n >= 1, "SampleMatrix: n must be positive");
        detail::require(values_.cols() == n + 1, "SampleMatrix: expected n+1 columns");
        detail::require(values_.rows() >= 1, "SampleMatrix: at least one time row required");
        detail::require(values_.allFinite(), "SampleMatrix: missing or non-finite entries");
    }

    [[nodiscard]] int n() const noexcept { return n_; }
    [[nodiscard]] int time_steps() const noexcept { return static_cast<int>(values_.rows()) - 1; }
    [[nodiscard]] const Matrix& values() const noexcept { return values_; }

private:
    int n_;
    Matrix values_;
};

namespace detail {

inline double symmetry_defect(const Matrix& m)
{
    const double scale = std::max(m.cwiseAbs().maxCoeff(), 1.0e-300);
    return (m - m.transpose()).cwiseAbs().maxCoeff() / scale;
}

inline constexpr double kSymmetryTolerance = 1.0e-12;
inline constexpr double kPsdTolerance = 1.0e-10;

} // namespace detail

/// Symmetric n x n matrix representing a discretized covariation kernel.
class CovMatrix {
public:
    CovMatrix() = default;

    explicit CovMatrix(Matrix entries) : entries_(std::move(entries))
    {
        detail::require(entries_.rows() == entries_.cols(), "CovMatrix: matrix must be square");
        if (entries_.size() > 0) {
            detail::require(detail::symmetry_defect(entries_) <= detail::kSymmetryTolerance,
                            "CovMatrix: matrix is not symmetric");
        }
    }

    static CovMatrix zero(int n) { return CovMatrix(Matrix::Zero(n, n)); }

    [[nodiscard]] int n() const noexcept { return static_cast<int>(entries_.rows()); }
    [[nodiscard]] const Matrix& entries() const noexcept { return entries_; }
    [[nodiscard]] double operator()(int i, int j) const { return entries_(i, j); }

private:
    Matrix entries_;
};

/// Eigenvalues in descending order with matching orthonormal columns.
struct EigenPairs {
    Vector values;
    Matrix vectors;

    [[nodiscard]] int size() const noexcept { return static_cast<int>(values.size()); }

    [[nodiscard]] Matrix reconstruct() const
    {
        return vectors * values.asDiagonal() * vectors.transpose();
    }
};

/// Covariance kernels used by the simulation study and the reference
/// Mercer examples.
struct Kernel {
    enum class Kind { Laplace, Gauss, BridgeMinusProduct, OneMinusMax };

    Kind kind = Kind::Gauss;
    double eta = 1.0;

    static Kernel laplace() { return {Kind::Laplace, 1.0}; }
    static Kernel gauss() { return {Kind::Gauss, 1.0}; }
    static Kernel bridge(double eta) { return {Kind::BridgeMinusProduct, eta}; }
    static Kernel one_minus_max() { return {Kind::OneMinusMax, 1.0}; }

    [[nodiscard]] double operator()(double x, double y) const
    {
        switch (kind) {
        case Kind::Laplace:
            return std::exp(-std::abs(x - y));
        case Kind::Gauss:
            return std::exp(-(x - y) * (x - y));
        case Kind::BridgeMinusProduct:
            return eta * (std::min(x, y) - x * y);
        case Kind::OneMinusMax:
            return 1.0 - std::max(x, y);
        }
        return std::nan("");
    }

    [[nodiscard]] std::string name() const
    {
        switch (kind) {
        case Kind::Laplace:
            return "laplace";
        case Kind::Gauss:
            return "gauss";
        case Kind::BridgeMinusProduct:
            return "bridge";
        case Kind::OneMinusMax:
            return "one_minus_max";
        }
        return "unknown";
    }

    /// Formula as printed in report tables.
    [[nodiscard]] std::string formula() const
    {
        switch (kind) {
        case Kind::Laplace:
            return "exp(-|x-y|)";
        case Kind::Gauss:
            return "exp(-(x-y)^2)";
        case Kind::BridgeMinusProduct: {
            std::ostringstream out;
            out << eta << "*(min(x,y)-xy)";
            return out.str();
        }
        case Kind::OneMinusMax:
            return "1-max(x,y)";
        }
        return "unknown";
    }

    friend bool operator==(const Kernel&, const Kernel&) = default;
};

/// Entries scale * k(x_j, x_j') over the leading `points` grid points.
inline CovMatrix kernel_matrix(const Kernel& kernel, const SpatialGrid& grid, double scale, int points)
{
    detail::require(scale > 0.0, "kernel_matrix: scale must be positive");
    detail::require(points >= 1 && points <= grid.width(), "kernel_matrix: point count outside the grid");
    if (kernel.kind == Kernel::Kind::BridgeMinusProduct) {
        detail::require(kernel.eta > 0.0, "kernel_matrix: eta must be positive");
    }

    Matrix m(points, points);
    for (int j = 0; j < points; ++j) {
        for (int k = 0; k <= j; ++k) {
            const double value = scale * kernel(grid.x(j), grid.x(k));
            if (std::isnan(value)) {
                throw NumericError("kernel_matrix: kernel formula produced NaN");
            }
            m(j, k) = value;
            m(k, j) = value;
        }
    }
    return CovMatrix(std::move(m));
}

inline CovMatrix kernel_matrix(const Kernel& kernel, const SpatialGrid& grid, double scale)
{
    return kernel_matrix(kernel, grid, scale, grid.width());
}

namespace detail {

inline void canonicalize_signs(Matrix& vectors)
{
    for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
        Eigen::Index arg = 0;
        vectors.col(c).cwiseAbs().maxCoeff(&arg);
        if (vectors(arg, c) < 0.0) {
            vectors.col(c) *= -1.0;
        }
    }
}

inline void clip_small_negatives(Vector& descending)
{
    if (descending.size() == 0) {
        return;
    }
    const double floor = -kPsdTolerance * std::max(descending(0), 0.0);
    for (double& v : descending) {
        if (v < 0.0 && v >= floor) {
            v = 0.0;
        }
    }
}

inline void require_symmetric(const Matrix& m, const char* who)
{
    require(m.rows() == m.cols(), std::string(who) + ": matrix must be square");
    if (m.size() > 0) {
        require(symmetry_defect(m) <= kSymmetryTolerance, std::string(who) + ": matrix is not symmetric");
    }
}

} // namespace detail

/// Full symmetric eigendecomposition, eigenvalues descending, eigenvector
/// signs fixed so that each column's largest-magnitude entry is positive.
inline EigenPairs sym_eigen(const Matrix& m)
{
    detail::require_symmetric(m, "sym_eigen");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) {
        throw NumericError("sym_eigen: eigensolver did not converge");
    }
    EigenPairs pairs;
    pairs.values = solver.eigenvalues().reverse();
    pairs.vectors = solver.eigenvectors().rowwise().reverse();
    detail::clip_small_negatives(pairs.values);
    detail::canonicalize_signs(pairs.vectors);
    return pairs;
}

inline EigenPairs sym_eigen(const CovMatrix& m) { return sym_eigen(m.entries()); }

/// Eigenvalues only, descending, with the same clipping as sym_eigen.
inline Vector sym_eigenvalues(const CovMatrix& m)
{
    Eigen::SelfAdjointEigenSolver<Matrix> solver(m.entries(), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw NumericError("sym_eigenvalues: eigensolver did not converge");
    }
    Vector values = solver.eigenvalues().reverse();
    detail::clip_small_negatives(values);
    return values;
}

struct CholeskyFactor {
    Matrix lower;
    /// Diagonal shift actually applied, L * L^T = m + jitter * I.
    double jitter = 0.0;
};

/// Lower Cholesky factor of a PSD matrix. If plain factorization fails the
/// diagonal shift escalates through {1e-14, 1e-12, 1e-10, 1e-8} * trace/dim.
inline CholeskyFactor cholesky_psd(const CovMatrix& m, double jitter)
{
    detail::require(jitter >= 0.0, "cholesky_psd: jitter must be non-negative");
    const int dim = m.n();
    detail::require(dim >= 1, "cholesky_psd: empty matrix");

    const double mean_diagonal = m.entries().trace() / dim;
    constexpr std::array<double, 5> ladder{0.0, 1.0e-14, 1.0e-12, 1.0e-10, 1.0e-8};

    double attempted = jitter;
    for (double step : ladder) {
        attempted = jitter + step * std::max(mean_diagonal, 0.0);
        Matrix shifted = m.entries();
        shifted.diagonal().array() += attempted;
        Eigen::LLT<Matrix> llt(shifted);
        if (llt.info() == Eigen::Success) {
            Matrix lower = llt.matrixL();
            if (lower.allFinite()) {
                return {std::move(lower), attempted};
            }
        }
    }
    std::ostringstream message;
    message << "cholesky_psd: factorization failed with jitter up to " << attempted;
    throw NumericError(message.str());
}

inline double frobenius_distance(const CovMatrix& a, const CovMatrix& b)
{
    detail::require(a.n() == b.n(), "frobenius_distance: dimension mismatch");
    return (a.entries() - b.entries()).norm();
}

inline double frobenius_norm(const CovMatrix& a) { return a.entries().norm(); }

} // namespace sarcv

#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "sarcv/errors.hpp"
#include "sarcv/gridcore.hpp"

namespace sarcv {

/// Grid action of S(1/n).
///  - ShiftExtended: (S f)(j/n) = f((j+1)/n), the right neighbour always exists.
///  - ShiftNilpotent: same shift on L^2(0,1); values beyond x = 1 are zero.
///  - Identity: S f = f.
enum class SemigroupKind { ShiftExtended, ShiftNilpotent, Identity };

enum class IncrementKind { Adjusted, Plain };

/// Realized sums run over steps i = 2..n by default (one-based), i.e. the
/// first increment row is kept in the set but left out of the sum.
inline constexpr int kDefaultStartIndex = 2;

/// One spatial increment vector per time step. Row i (zero-based) holds the
/// increment over ((i)/n, (i+1)/n] at grid points j = 1..n.
struct IncrementSet {
    int n = 0;
    Matrix rows;
    IncrementKind kind = IncrementKind::Adjusted;
    std::optional<std::vector<bool>> flags;

    [[nodiscard]] int count() const noexcept { return static_cast<int>(rows.rows()); }
};

namespace detail {

inline void require_increment_input(const SampleMatrix& samples)
{
    require(samples.values().rows() >= 2 && samples.values().cols() >= 2,
            "increments: samples must be at least 2x2");
}

} // namespace detail

/// The row f_{i/n} mapped one step forward by the semigroup, restricted to
/// grid points 1..n.
inline Vector semigroup_step(const SampleMatrix& samples, int row, SemigroupKind kind)
{
    const int n = samples.n();
    const auto source = samples.values().row(row);
    switch (kind) {
    case SemigroupKind::ShiftExtended:
        return source.segment(1, n).transpose();
    case SemigroupKind::ShiftNilpotent: {
        // Grid point n is x = 1; its right neighbour lies outside the domain.
        Vector shifted = Vector::Zero(n);
        shifted.head(n - 1) = source.segment(1, n - 1).transpose();
        return shifted;
    }
    case SemigroupKind::Identity:
        break;
    }
    return source.head(n).transpose();
}

/// f_{(i+1)/n}(j/n) - (S(1/n) f_{i/n})(j/n) for every step i and j = 1..n.
inline IncrementSet adjusted_increments(const SampleMatrix& samples,
                                        SemigroupKind kind = SemigroupKind::ShiftExtended)
{
    detail::require_increment_input(samples);
    const int n = samples.n();
    const int steps = samples.time_steps();
    const Matrix& f = samples.values();

    IncrementSet out;
    out.n = n;
    out.kind = IncrementKind::Adjusted;
    if (kind == SemigroupKind::ShiftExtended) {
        out.rows = f.block(1, 0, steps, n) - f.block(0, 1, steps, n);
        return out;
    }
    out.rows.resize(steps, n);
    for (int i = 0; i < steps; ++i) {
        out.rows.row(i) = f.row(i + 1).head(n) - semigroup_step(samples, i, kind).transpose();
    }
    return out;
}

/// f_{(i+1)/n}(j/n) - f_{i/n}(j/n), no semigroup adjustment.
inline IncrementSet plain_increments(const SampleMatrix& samples)
{
    detail::require_increment_input(samples);
    const int n = samples.n();
    const int steps = samples.time_steps();
    const Matrix& f = samples.values();

    IncrementSet out;
    out.n = n;
    out.kind = IncrementKind::Plain;
    out.rows = f.block(1, 0, steps, n) - f.block(0, 0, steps, n);
    return out;
}

inline IncrementSet increments_of(const SampleMatrix& samples, IncrementKind kind)
{
    return kind == IncrementKind::Adjusted ? adjusted_increments(samples) : plain_increments(samples);
}

} // namespace sarcv

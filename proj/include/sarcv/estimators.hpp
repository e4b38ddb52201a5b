#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sarcv/errors.hpp"
#include "sarcv/gridcore.hpp"
#include "sarcv/increments.hpp"
#include "sarcv/truncation.hpp"

namespace sarcv {

/// Which increments enter the sum: all of them, only unflagged ones
/// (downward truncation) or only flagged ones (upward truncation).
enum class TruncationSide { All, KeepSmall, KeepLarge };

struct EstimatorSpec {
    IncrementKind increment_kind = IncrementKind::Adjusted;
    TruncationSide truncation = TruncationSide::All;
    int start_index = kDefaultStartIndex;

    /// sarcv, rcv, sarcv_, rcv_, sarcv+, rcv+ (suffix "_" = keep small,
    /// "+" = keep large). Start index 1 appends "@1".
    [[nodiscard]] std::string name() const
    {
        std::string out = increment_kind == IncrementKind::Adjusted ? "sarcv" : "rcv";
        if (truncation == TruncationSide::KeepSmall) {
            out += "_";
        } else if (truncation == TruncationSide::KeepLarge) {
            out += "+";
        }
        if (start_index != kDefaultStartIndex) {
            out += "@" + std::to_string(start_index);
        }
        return out;
    }

    static EstimatorSpec parse(const std::string& name)
    {
        EstimatorSpec spec;
        std::string base = name;
        if (const auto at = base.find('@'); at != std::string::npos) {
            const std::string start = base.substr(at + 1);
            detail::require(start == "1" || start == "2", "EstimatorSpec: start index must be 1 or 2");
            spec.start_index = start == "1" ? 1 : 2;
            base = base.substr(0, at);
        }
        if (!base.empty() && (base.back() == '_' || base.back() == '+')) {
            spec.truncation = base.back() == '_' ? TruncationSide::KeepSmall : TruncationSide::KeepLarge;
            base.pop_back();
        }
        if (base == "sarcv") {
            spec.increment_kind = IncrementKind::Adjusted;
        } else if (base == "rcv") {
            spec.increment_kind = IncrementKind::Plain;
        } else {
            throw InvalidArgument("EstimatorSpec: unknown estimator '" + name + "'");
        }
        return spec;
    }

    friend bool operator==(const EstimatorSpec&, const EstimatorSpec&) = default;
};

/// Sum of outer products of the selected increment rows, i = start..count.
inline CovMatrix realized_covariation(const IncrementSet& increments, const EstimatorSpec& spec,
                                      const std::vector<bool>* flags = nullptr)
{
    detail::require(spec.start_index == 1 || spec.start_index == 2, "realized_covariation: start index must be 1 or 2");
    detail::require(spec.increment_kind == increments.kind, "realized_covariation: increment kind mismatch");
    if (flags == nullptr && increments.flags) {
        flags = &*increments.flags;
    }
    if (spec.truncation != TruncationSide::All) {
        detail::require(flags != nullptr, "realized_covariation: truncated estimator requires flags");
    }
    if (flags != nullptr) {
        detail::require(static_cast<int>(flags->size()) == increments.count(),
                        "realized_covariation: flags length mismatch");
    }

    std::vector<Eigen::Index> selected;
    selected.reserve(static_cast<std::size_t>(increments.count()));
    for (int i = spec.start_index - 1; i < increments.count(); ++i) {
        if (spec.truncation != TruncationSide::All) {
            const bool flagged = (*flags)[static_cast<std::size_t>(i)];
            if (flagged != (spec.truncation == TruncationSide::KeepLarge)) {
                continue;
            }
        }
        selected.push_back(i);
    }

    const int n = increments.n;
    Matrix sum = Matrix::Zero(n, n);
    if (!selected.empty()) {
        const Matrix chosen = increments.rows(selected, Eigen::all);
        sum.selfadjointView<Eigen::Lower>().rankUpdate(chosen.transpose());
        sum = sum.selfadjointView<Eigen::Lower>();
    }
    return CovMatrix(std::move(sum));
}

inline CovMatrix realized_covariation(const IncrementSet& increments, const EstimatorSpec& spec,
                                      const std::vector<bool>& flags)
{
    return realized_covariation(increments, spec, &flags);
}

/// prefactor * SARCV_T(u, -) over a long sample; 1/T targets the mean
/// instantaneous covariance, 2/T the inverse mean-reversion operator in the
/// stochastic volatility model.
inline CovMatrix long_span_estimate(const SampleMatrix& sample, const TruncationRule& rule, double prefactor)
{
    detail::require(prefactor > 0.0, "long_span_estimate: prefactor must be positive");
    const IncrementSet increments = adjusted_increments(sample);
    const TruncationReport report = select_flags(increments, rule, 1.0 / sample.n());
    const EstimatorSpec spec{IncrementKind::Adjusted, TruncationSide::KeepSmall, kDefaultStartIndex};
    CovMatrix sum = realized_covariation(increments, spec, report.flags);
    return CovMatrix(prefactor * sum.entries());
}

} // namespace sarcv

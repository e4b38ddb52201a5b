#pragma once

// Summaries of Monte Carlo records and their CSV renderings.

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sarcv/harness/config.hpp"
#include "sarcv/harness/montecarlo.hpp"
#include "sarcv/random.hpp"

namespace sarcv {

inline constexpr const char* kQuantileConvention = "linear interpolation between order statistics (type 7)";

/// Type-7 quantile: h = (m-1) p, interpolate between x_floor(h) and x_ceil(h).
inline double quantile(std::vector<double> values, double p)
{
    detail::require(!values.empty(), "quantile: empty sample");
    detail::require(p >= 0.0 && p <= 1.0, "quantile: probability outside [0, 1]");
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

enum class Metric { RelErr, D95 };

inline const char* metric_name(Metric m) { return m == Metric::RelErr ? "rel_err" : "d95"; }

struct SummaryRow {
    std::string scenario;
    std::string estimator;
    Metric metric = Metric::RelErr;
    double median = 0.0;
    double q25 = 0.0;
    double q75 = 0.0;
    int runs = 0;
};

struct ScenarioSummary {
    std::string scenario;
    std::string kernel_label;
    int failed_runs = 0;
    std::vector<SummaryRow> rows;
};

/// Median and quartiles of rel_err and d95 per estimator over the runs that
/// did not fail.
inline ScenarioSummary summarize(const ScenarioConfig& cfg, const MonteCarloResult& mc)
{
    ScenarioSummary summary{cfg.name, cfg.kernel_label(), mc.failed_runs, {}};
    for (const EstimatorSpec& spec : cfg.estimators) {
        const std::string name = spec.name();
        std::vector<double> errors;
        std::vector<double> dims;
        for (const RunRecord& r : mc.records) {
            if (r.failed) {
                continue;
            }
            for (const EstimatorResult& e : r.results) {
                if (e.estimator != name) {
                    continue;
                }
                errors.push_back(e.rel_err);
                if (e.d95) {
                    dims.push_back(*e.d95);
                }
            }
        }
        for (const auto& [metric, values] : {std::pair{Metric::RelErr, &errors}, std::pair{Metric::D95, &dims}}) {
            if (values->empty()) {
                continue;
            }
            summary.rows.push_back({cfg.name, name, metric, quantile(*values, 0.5), quantile(*values, 0.25),
                                    quantile(*values, 0.75), static_cast<int>(values->size())});
        }
    }
    return summary;
}

enum class TableLayout { Table1, Long };

namespace detail {

inline std::string csv_quote(const std::string& field)
{
    if (field.find_first_of(",\"\n") == std::string::npos) {
        return field;
    }
    std::string out = "\"";
    for (char c : field) {
        out += c;
        if (c == '"') {
            out += '"';
        }
    }
    return out + "\"";
}

inline std::string format_number(double value)
{
    std::ostringstream out;
    out << std::setprecision(10) << value;
    return out.str();
}

inline std::string format_cell(const SummaryRow& row)
{
    std::ostringstream out;
    if (row.metric == Metric::RelErr) {
        out << std::fixed << std::setprecision(2) << row.median << " (" << row.q25 << "," << row.q75 << ")";
    } else {
        out << std::llround(row.median) << " (" << std::llround(row.q25) << "," << std::llround(row.q75) << ")";
    }
    return out.str();
}

} // namespace detail

/// table1: one line per (kernel, metric), columns sarcv, rcv, sarcv_, rcv_,
/// cells "median (q25,q75)". If several scenarios supply the same cell the
/// first one wins.
/// long: the summary rows verbatim.
inline std::string emit_table(const std::vector<ScenarioSummary>& summaries, TableLayout layout)
{
    std::ostringstream out;
    if (layout == TableLayout::Long) {
        out << "scenario,estimator,metric,median,q25,q75,runs\n";
        for (const ScenarioSummary& s : summaries) {
            for (const SummaryRow& r : s.rows) {
                out << detail::csv_quote(r.scenario) << ',' << detail::csv_quote(r.estimator) << ','
                    << metric_name(r.metric) << ',' << detail::format_number(r.median) << ','
                    << detail::format_number(r.q25) << ',' << detail::format_number(r.q75) << ',' << r.runs << '\n';
            }
        }
        return out.str();
    }

    static constexpr std::array<const char*, 4> columns{"sarcv", "rcv", "sarcv_", "rcv_"};
    std::vector<std::string> kernels;
    for (const ScenarioSummary& s : summaries) {
        if (std::find(kernels.begin(), kernels.end(), s.kernel_label) == kernels.end()) {
            kernels.push_back(s.kernel_label);
        }
    }
    out << "kernel,metric,sarcv,rcv,sarcv_,rcv_\n";
    for (const std::string& kernel : kernels) {
        for (const Metric metric : {Metric::RelErr, Metric::D95}) {
            out << detail::csv_quote(kernel) << ',' << metric_name(metric);
            for (const char* column : columns) {
                std::string cell;
                for (const ScenarioSummary& s : summaries) {
                    if (s.kernel_label != kernel || !cell.empty()) {
                        continue;
                    }
                    for (const SummaryRow& r : s.rows) {
                        if (r.estimator == column && r.metric == metric) {
                            cell = detail::format_cell(r);
                            break;
                        }
                    }
                }
                out << ',' << detail::csv_quote(cell);
            }
            out << '\n';
        }
    }
    return out.str();
}

/// One line per run with every estimator's metrics.
inline std::string emit_runs(const ScenarioConfig& cfg, const MonteCarloResult& mc)
{
    std::ostringstream out;
    out << "run_index,seed,status,jumps,increments,flagged_adjusted,flagged_plain";
    for (const EstimatorSpec& spec : cfg.estimators) {
        out << ',' << spec.name() << "_rel_err," << spec.name() << "_hs_err," << spec.name() << "_d95";
    }
    out << ",error\n";
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (const RunRecord& r : mc.records) {
        out << r.run_index << ',' << r.seed << ',' << (r.failed ? "failed" : "ok") << ',' << r.jumps << ','
            << r.increments << ',';
        if (r.flagged_adjusted) {
            out << *r.flagged_adjusted;
        }
        out << ',';
        if (r.flagged_plain) {
            out << *r.flagged_plain;
        }
        for (std::size_t k = 0; k < cfg.estimators.size(); ++k) {
            if (k < r.results.size()) {
                const EstimatorResult& e = r.results[k];
                out << ',' << e.rel_err << ',' << e.hs_err << ',';
                if (e.d95) {
                    out << *e.d95;
                }
            } else {
                out << ",,,";
            }
        }
        out << ',' << detail::csv_quote(r.error) << '\n';
    }
    return out.str();
}

inline nlohmann::json run_metadata(const std::vector<ScenarioConfig>& scenarios,
                                   const std::vector<ScenarioSummary>& summaries)
{
    nlohmann::json meta;
    meta["generator"] = kGeneratorName;
    meta["seed_derivation"] = kSeedDerivation;
    meta["quantile_convention"] = kQuantileConvention;
    meta["scenarios"] = nlohmann::json::array();
    for (std::size_t k = 0; k < scenarios.size(); ++k) {
        nlohmann::json entry = scenario_to_json(scenarios[k]);
        if (k < summaries.size()) {
            entry["failed_runs"] = summaries[k].failed_runs;
        }
        meta["scenarios"].push_back(entry);
    }
    return meta;
}

} // namespace sarcv

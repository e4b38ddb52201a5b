#pragma once

#include <string>
#include <vector>

#include "sarcv/analysis.hpp"
#include "sarcv/harness/config.hpp"
#include "sarcv/harness/montecarlo.hpp"
#include "sarcv/harness/report.hpp"

namespace sarcv {

/// Median Hilbert-Schmidt error of the downward-truncated SARCV for each
/// grid size, and the least-squares slope of log(error) against log(1/n).
/// The template's grid size and run count are overridden per sweep point.
inline RateFit rate_slope(const ScenarioConfig& scenario, std::vector<int> grid_sizes, int runs_per_size)
{
    detail::require(grid_sizes.size() >= 3, "rate_slope: at least three grid sizes required");
    detail::require(runs_per_size >= 1, "rate_slope: runs must be positive");

    std::vector<double> medians;
    for (const int n : grid_sizes) {
        ScenarioConfig cfg = scenario;
        cfg.name = scenario.name + "_n" + std::to_string(n);
        cfg.set_grid_n(n);
        cfg.runs = runs_per_size;
        cfg.estimators = {EstimatorSpec::parse("sarcv_")};

        const MonteCarloResult mc = run_monte_carlo(cfg);
        std::vector<double> errors;
        for (const RunRecord& r : mc.records) {
            if (!r.failed) {
                errors.push_back(r.results.front().hs_err);
            }
        }
        medians.push_back(quantile(std::move(errors), 0.5));
    }
    return fit_rate(std::move(grid_sizes), std::move(medians));
}

} // namespace sarcv

#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "sarcv/analysis.hpp"
#include "sarcv/estimators.hpp"
#include "sarcv/harness/config.hpp"
#include "sarcv/increments.hpp"
#include "sarcv/random.hpp"
#include "sarcv/simulator.hpp"
#include "sarcv/truncation.hpp"

namespace sarcv {

/// More than 1% of the runs of a scenario failed (CLI exit code 3).
class FailureThresholdExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct EstimatorResult {
    std::string estimator;
    double rel_err = 0.0;
    /// ||estimate - truth||_F / n.
    double hs_err = 0.0;
    /// Unset when the estimate has no positive spectral mass.
    std::optional<int> d95;
};

struct RunRecord {
    int run_index = 0;
    std::uint64_t seed = 0;
    bool failed = false;
    std::string error;
    int jumps = 0;
    int increments = 0;
    std::optional<int> flagged_adjusted;
    std::optional<int> flagged_plain;
    std::vector<EstimatorResult> results;
};

struct MonteCarloResult {
    std::vector<RunRecord> records;
    int failed_runs = 0;
};

/// Immutable per-scenario state shared by all runs.
class ScenarioContext {
public:
    explicit ScenarioContext(const ScenarioConfig& cfg) : cfg_(cfg)
    {
        cfg_.validate();
        if (const auto* s = std::get_if<SimConfig>(&cfg_.sim)) {
            simulator_.emplace(*s);
            truth_ = kernel_matrix(s->kernel, SpatialGrid(s->n), 1.0, s->n);
        } else {
            const auto& h = std::get<HeidihConfig>(cfg_.sim);
            truth_ = kernel_matrix(Kernel::bridge(h.eta), SpatialGrid(h.n), 1.0, h.n);
        }
    }

    [[nodiscard]] const ScenarioConfig& config() const noexcept { return cfg_; }
    [[nodiscard]] const CovMatrix& truth() const noexcept { return truth_; }

    [[nodiscard]] RunRecord run(int run_index) const
    {
        RunRecord record;
        record.run_index = run_index;
        record.seed = derive_seed(cfg_.master_seed, static_cast<std::uint64_t>(run_index));
        try {
            evaluate(record);
        } catch (const std::exception& e) {
            record.failed = true;
            record.error = e.what();
            record.results.clear();
        }
        return record;
    }

private:
    void evaluate(RunRecord& record) const
    {
        std::optional<SampleMatrix> samples;
        double prefactor = 1.0;
        if (simulator_) {
            SimulationResult sim = simulator_->simulate(record.seed);
            record.jumps = static_cast<int>(sim.jumps.size());
            samples.emplace(std::move(sim.samples));
        } else {
            HeidihConfig h = std::get<HeidihConfig>(cfg_.sim);
            h.seed = record.seed;
            samples.emplace(simulate_heidih_field(h));
            prefactor = 2.0 / h.horizon;
        }
        const double delta = 1.0 / samples->n();

        struct Prepared {
            IncrementSet increments;
            std::optional<TruncationReport> report;
        };
        std::map<IncrementKind, Prepared> prepared;
        for (const EstimatorSpec& spec : cfg_.estimators) {
            auto [it, inserted] = prepared.try_emplace(spec.increment_kind);
            if (inserted) {
                it->second.increments = increments_of(*samples, spec.increment_kind);
                record.increments = it->second.increments.count();
            }
            if (spec.truncation != TruncationSide::All && !it->second.report) {
                it->second.report = select_flags(it->second.increments, cfg_.truncation, delta);
                const int flagged = it->second.report->flagged();
                (spec.increment_kind == IncrementKind::Adjusted ? record.flagged_adjusted : record.flagged_plain) = flagged;
            }
        }

        for (const EstimatorSpec& spec : cfg_.estimators) {
            const Prepared& p = prepared.at(spec.increment_kind);
            const std::vector<bool>* flags = p.report ? &p.report->flags : nullptr;
            CovMatrix estimate = realized_covariation(p.increments, spec, flags);
            if (prefactor != 1.0) {
                estimate = CovMatrix(prefactor * estimate.entries());
            }
            EstimatorResult result;
            result.estimator = spec.name();
            result.rel_err = rel_err(estimate, truth_);
            result.hs_err = hs_error(estimate, truth_);
            const Vector spectrum = sym_eigenvalues(estimate);
            if (spectrum.size() > 0 && spectrum(0) > 0.0) {
                result.d95 = d_explained(spectrum, 0.95);
            }
            record.results.push_back(std::move(result));
        }
    }

    ScenarioConfig cfg_;
    std::optional<TransportSimulator> simulator_;
    CovMatrix truth_;
};

/// Runs every replication of a scenario. Run i uses derive_seed(master, i);
/// records come back in run-index order, so results do not depend on the
/// worker count.
inline MonteCarloResult run_monte_carlo(const ScenarioConfig& cfg)
{
    const ScenarioContext context(cfg);
    MonteCarloResult out;
    out.records.resize(static_cast<std::size_t>(cfg.runs));

    std::atomic<int> next{0};
    auto work = [&] {
        for (int i = next.fetch_add(1); i < cfg.runs; i = next.fetch_add(1)) {
            out.records[static_cast<std::size_t>(i)] = context.run(i);
        }
    };

    const int workers = std::min(cfg.workers, cfg.runs);
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back(work);
        }
    }

    for (const RunRecord& r : out.records) {
        out.failed_runs += r.failed ? 1 : 0;
    }
    if (static_cast<double>(out.failed_runs) > 0.01 * cfg.runs) {
        std::string message = "scenario '" + cfg.name + "': " + std::to_string(out.failed_runs) + " of " +
                              std::to_string(cfg.runs) + " runs failed";
        for (const RunRecord& r : out.records) {
            if (r.failed) {
                message += " (first error: " + r.error + ")";
                break;
            }
        }
        throw FailureThresholdExceeded(message);
    }
    return out;
}

} // namespace sarcv

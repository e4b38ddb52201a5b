// Command line front end: simulation, estimation and Monte Carlo reports.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sarcv/harness/config.hpp"
#include "sarcv/harness/csv.hpp"
#include "sarcv/harness/montecarlo.hpp"
#include "sarcv/harness/rate.hpp"
#include "sarcv/harness/report.hpp"
#include "sarcv/sarcv.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct CommonOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<int> runs;
    std::optional<int> workers;
    std::string out = ".";
};

void add_common(CLI::App* cmd, CommonOptions& opts)
{
    cmd->add_option("--config", opts.config, "Scenario configuration (JSON)");
    cmd->add_option("--seed", opts.seed, "Master seed");
    cmd->add_option("--runs", opts.runs, "Monte Carlo replications")->check(CLI::PositiveNumber);
    cmd->add_option("--workers", opts.workers, "Worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--out", opts.out, "Output directory");
}

void write_file(const fs::path& path, const std::string& text)
{
    fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw sarcv::ConfigError("cannot write '" + path.string() + "'");
    }
    out << text;
}

template <typename Writer>
void write_with(const fs::path& path, Writer&& writer)
{
    std::ostringstream text;
    writer(text);
    write_file(path, text.str());
}

sarcv::ScenarioConfig scenario_with_overrides(const CommonOptions& opts, sarcv::ScenarioConfig cfg)
{
    if (!opts.config.empty()) {
        cfg = sarcv::load_scenario(opts.config);
    }
    if (opts.seed) {
        cfg.master_seed = *opts.seed;
    }
    if (opts.runs) {
        cfg.runs = *opts.runs;
    }
    if (opts.workers) {
        cfg.workers = *opts.workers;
    }
    cfg.validate();
    return cfg;
}

std::vector<int> parse_int_list(const std::string& text)
{
    std::vector<int> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            out.push_back(std::stoi(item));
        } catch (const std::exception&) {
            throw sarcv::ConfigError("bad integer list '" + text + "'");
        }
    }
    return out;
}

void write_mc_outputs(const fs::path& dir, const std::string& stem, const std::vector<sarcv::ScenarioConfig>& scenarios,
                      const std::vector<sarcv::MonteCarloResult>& results)
{
    std::vector<sarcv::ScenarioSummary> summaries;
    for (std::size_t k = 0; k < scenarios.size(); ++k) {
        summaries.push_back(sarcv::summarize(scenarios[k], results[k]));
        write_file(dir / (scenarios[k].name + "_runs.csv"), sarcv::emit_runs(scenarios[k], results[k]));
    }
    const std::string table = sarcv::emit_table(summaries, sarcv::TableLayout::Table1);
    write_file(dir / (stem + "_long.csv"), sarcv::emit_table(summaries, sarcv::TableLayout::Long));
    write_file(dir / (stem + "_table1.csv"), table);
    write_file(dir / (stem + "_meta.json"), sarcv::run_metadata(scenarios, summaries).dump(2) + "\n");
    std::cout << table;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Semigroup-adjusted realized covariation laboratory"};
    app.require_subcommand(1);

    CommonOptions opts;

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Simulate one transport field and write it as CSV");
    add_common(simulate, opts);
    int sim_n = 100;
    std::string sim_kernel = "gauss";
    double sim_lambda = 2.0;
    double sim_jump_variance = 0.1;
    simulate->add_option("--n", sim_n, "Grid points per unit length");
    simulate->add_option("--kernel", sim_kernel, "gauss | laplace");
    simulate->add_option("--jump-intensity", sim_lambda, "Poisson jump intensity");
    simulate->add_option("--jump-variance", sim_jump_variance, "Variance of jump sizes");

    // estimate
    auto* estimate = app.add_subcommand("estimate", "Estimate covariations from a sample CSV");
    add_common(estimate, opts);
    std::string input;
    estimate->add_option("--input", input, "Sample matrix CSV")->required();

    // mc
    auto* mc = app.add_subcommand("mc", "Run a Monte Carlo scenario");
    add_common(mc, opts);

    // table1
    auto* table1 = app.add_subcommand("table1", "Run the four simulation-study scenarios");
    add_common(table1, opts);

    // rate
    auto* rate = app.add_subcommand("rate", "Convergence-rate sweep over grid sizes");
    add_common(rate, opts);
    std::string rate_sizes = "50,100,200,400";
    std::string rate_kernel = "gauss";
    double rate_lambda = 0.0;
    rate->add_option("--sizes", rate_sizes, "Comma-separated grid sizes");
    rate->add_option("--kernel", rate_kernel, "gauss | laplace (ignored with --config)");
    rate->add_option("--jump-intensity", rate_lambda, "Jump intensity (ignored with --config)");

    // heidih
    auto* heidih = app.add_subcommand("heidih", "Long-span estimation in the stochastic volatility model");
    add_common(heidih, opts);
    std::string horizons = "25,50,200";
    sarcv::HeidihConfig heidih_cfg;
    heidih->add_option("--horizons", horizons, "Comma-separated horizons T");
    heidih->add_option("--n", heidih_cfg.n, "Grid points per unit length");
    heidih->add_option("--eta", heidih_cfg.eta, "Kernel scale eta");
    heidih->add_option("--modes", heidih_cfg.modes, "Volatility modes K");
    heidih->add_option("--substeps", heidih_cfg.substeps, "Euler substeps per observation");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        const fs::path out_dir(opts.out);

        if (simulate->parsed()) {
            sarcv::SimConfig sim;
            if (!opts.config.empty()) {
                const auto cfg = sarcv::load_scenario(opts.config);
                if (cfg.is_heidih()) {
                    throw sarcv::ConfigError("simulate expects a transport scenario");
                }
                sim = std::get<sarcv::SimConfig>(cfg.sim);
                sim.seed = cfg.master_seed;
            } else {
                sim.n = sim_n;
                sim.kernel = sarcv::parse_kernel(sim_kernel);
                sim.jump_intensity = sim_lambda;
                sim.jump_variance = sim_jump_variance;
            }
            if (opts.seed) {
                sim.seed = *opts.seed;
            }
            try {
                sim.validate();
            } catch (const sarcv::InvalidArgument& e) {
                throw sarcv::ConfigError(e.what());
            }
            const sarcv::SimulationResult result = sarcv::simulate_field(sim);
            write_with(out_dir / "samples.csv", [&](std::ostream& o) { sarcv::write_sample_matrix(o, result.samples); });
            write_with(out_dir / "jumps.csv", [&](std::ostream& o) {
                o << "time,size,covered_step\n" << std::setprecision(std::numeric_limits<double>::max_digits10);
                for (const auto& j : result.jumps) {
                    o << j.time << ',' << j.size << ',' << j.covered_step << '\n';
                }
            });
            std::cout << "wrote " << (out_dir / "samples.csv").string() << " (" << result.jumps.size() << " jumps)\n";
            return 0;
        }

        if (estimate->parsed()) {
            const auto cfg = scenario_with_overrides(opts, sarcv::ScenarioConfig{});
            std::ifstream in(input);
            if (!in) {
                throw sarcv::ConfigError("cannot open '" + input + "'");
            }
            const sarcv::SampleMatrix samples = sarcv::read_sample_matrix(in);
            const double delta = 1.0 / samples.n();
            std::vector<std::pair<std::string, std::vector<bool>>> flag_columns;
            for (const auto kind : {sarcv::IncrementKind::Adjusted, sarcv::IncrementKind::Plain}) {
                const auto increments = sarcv::increments_of(samples, kind);
                std::optional<sarcv::TruncationReport> report;
                for (const auto& spec : cfg.estimators) {
                    if (spec.increment_kind != kind) {
                        continue;
                    }
                    if (spec.truncation != sarcv::TruncationSide::All && !report) {
                        report = sarcv::select_flags(increments, cfg.truncation, delta);
                        flag_columns.emplace_back(kind == sarcv::IncrementKind::Adjusted ? "adjusted" : "plain",
                                                  report->flags);
                        std::cout << (kind == sarcv::IncrementKind::Adjusted ? "adjusted" : "plain")
                                  << ": flagged " << report->flagged() << " of " << increments.count()
                                  << " increments (d=" << report->d << ", threshold=" << report->threshold << ")\n";
                    }
                    const auto est = sarcv::realized_covariation(increments, spec, report ? &report->flags : nullptr);
                    write_with(out_dir / (spec.name() + ".csv"), [&](std::ostream& o) { sarcv::write_cov_matrix(o, est); });
                }
            }
            write_with(out_dir / "flags.csv", [&](std::ostream& o) { sarcv::write_flags(o, flag_columns); });
            return 0;
        }

        if (mc->parsed()) {
            if (opts.config.empty()) {
                throw sarcv::ConfigError("mc requires --config");
            }
            const auto cfg = scenario_with_overrides(opts, sarcv::ScenarioConfig{});
            const auto result = sarcv::run_monte_carlo(cfg);
            write_mc_outputs(out_dir, cfg.name, {cfg}, {result});
            return 0;
        }

        if (table1->parsed()) {
            if (!opts.config.empty()) {
                throw sarcv::ConfigError("table1 uses the built-in scenarios; --config is not accepted");
            }
            const auto scenarios =
                sarcv::table1_scenarios(opts.runs.value_or(10000), opts.seed.value_or(20240101), opts.workers.value_or(1));
            std::vector<sarcv::MonteCarloResult> results;
            for (const auto& cfg : scenarios) {
                results.push_back(sarcv::run_monte_carlo(cfg));
            }
            write_mc_outputs(out_dir, "table1", scenarios, results);
            return 0;
        }

        if (rate->parsed()) {
            sarcv::ScenarioConfig templ;
            templ.name = "rate";
            sarcv::SimConfig sim;
            sim.kernel = sarcv::parse_kernel(rate_kernel);
            sim.jump_intensity = rate_lambda;
            templ.sim = sim;
            templ.runs = 500;
            templ = scenario_with_overrides(opts, templ);
            const auto fit = sarcv::rate_slope(templ, parse_int_list(rate_sizes), templ.runs);
            std::ostringstream csv;
            csv << "n,delta,median_hs_err\n" << std::setprecision(10);
            for (std::size_t k = 0; k < fit.grid_sizes.size(); ++k) {
                csv << fit.grid_sizes[k] << ',' << 1.0 / fit.grid_sizes[k] << ',' << fit.median_errors[k] << '\n';
            }
            write_file(out_dir / "rate.csv", csv.str());
            std::cout << csv.str() << "slope," << fit.slope << "\nintercept," << fit.intercept << '\n';
            return 0;
        }

        if (heidih->parsed()) {
            std::vector<sarcv::ScenarioConfig> scenarios;
            std::vector<sarcv::MonteCarloResult> results;
            std::ostringstream csv;
            csv << "horizon,median_rel_err,q25,q75,runs\n" << std::setprecision(10);
            for (const int horizon : parse_int_list(horizons)) {
                sarcv::ScenarioConfig cfg;
                sarcv::HeidihConfig h = heidih_cfg;
                h.horizon = horizon;
                cfg.name = "heidih_T" + std::to_string(horizon);
                cfg.sim = h;
                cfg.estimators = {sarcv::EstimatorSpec::parse("sarcv_")};
                cfg.truncation = sarcv::NoTruncation{};
                cfg.runs = 50;
                cfg = scenario_with_overrides(CommonOptions{"", opts.seed, opts.runs, opts.workers, opts.out}, cfg);
                auto result = sarcv::run_monte_carlo(cfg);
                const auto summary = sarcv::summarize(cfg, result);
                const auto& row = summary.rows.front();
                csv << horizon << ',' << row.median << ',' << row.q25 << ',' << row.q75 << ',' << row.runs << '\n';
                scenarios.push_back(cfg);
                results.push_back(std::move(result));
            }
            write_mc_outputs(out_dir, "heidih", scenarios, results);
            write_file(out_dir / "heidih.csv", csv.str());
            std::cout << csv.str();
            return 0;
        }
    } catch (const sarcv::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const sarcv::InvalidArgument& e) {
        std::cerr << "invalid argument: " << e.what() << '\n';
        return kExitConfig;
    } catch (const sarcv::FailureThresholdExceeded& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const sarcv::NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

#pragma once

// Scenario configuration and its JSON form.
//
//   {
//     "schema_version": 1,
//     "name": "rough_jumps",
//     "model": "transport",             // or "heidih"
//     "simulation": { "n": 100, "kernel": "laplace",
//                     "jump_intensity": 2.0, "jump_variance": 0.1 },
//     "estimators": ["sarcv", "rcv", "sarcv_", "rcv_"],
//     "truncation": { "rule": "mahalanobis", "discard_fraction": 0.25,
//                     "evr_target": 0.9, "multiplier": 3.0, "exponent": 0.49 },
//     "runs": 1000, "master_seed": 20240101, "workers": 1
//   }
//
// Optional transport key "kernel_scale" overrides the 1/n Gaussian scale
// (0 switches the continuous part off).
// Heidih simulation keys: n, horizon, eta, modes, substeps.

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "sarcv/estimators.hpp"
#include "sarcv/simulator.hpp"
#include "sarcv/truncation.hpp"

namespace sarcv {

/// Malformed or inconsistent configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kSchemaVersion = 1;

using ScenarioModel = std::variant<SimConfig, HeidihConfig>;

struct ScenarioConfig {
    std::string name = "scenario";
    ScenarioModel sim = SimConfig{};
    std::vector<EstimatorSpec> estimators = {
        EstimatorSpec::parse("sarcv"), EstimatorSpec::parse("rcv"),
        EstimatorSpec::parse("sarcv_"), EstimatorSpec::parse("rcv_")};
    TruncationRule truncation = MahalanobisRule{};
    int runs = 1000;
    std::uint64_t master_seed = 0;
    int workers = 1;

    [[nodiscard]] bool is_heidih() const noexcept { return std::holds_alternative<HeidihConfig>(sim); }

    [[nodiscard]] int grid_n() const
    {
        return std::visit([](const auto& s) { return s.n; }, sim);
    }

    void set_grid_n(int n)
    {
        std::visit([n](auto& s) { s.n = n; }, sim);
    }

    /// Kernel label used in table rows.
    [[nodiscard]] std::string kernel_label() const
    {
        if (const auto* s = std::get_if<SimConfig>(&sim)) {
            return s->kernel.formula();
        }
        return Kernel::bridge(std::get<HeidihConfig>(sim).eta).formula();
    }

    void validate() const;
};

inline bool is_filesystem_safe(const std::string& name)
{
    if (name.empty() || name == "." || name == "..") {
        return false;
    }
    for (char c : name) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
                        c == '-' || c == '.';
        if (!ok) {
            return false;
        }
    }
    return true;
}

inline void ScenarioConfig::validate() const
{
    try {
        if (!is_filesystem_safe(name)) {
            throw ConfigError("scenario name must be nonempty and use only [A-Za-z0-9._-]");
        }
        if (runs < 1) {
            throw ConfigError("runs must be at least 1");
        }
        if (workers < 1) {
            throw ConfigError("workers must be at least 1");
        }
        if (estimators.empty()) {
            throw ConfigError("at least one estimator is required");
        }
        std::visit([](const auto& s) { s.validate(); }, sim);
        sarcv::validate(truncation);
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
}

inline Kernel parse_kernel(const std::string& name)
{
    if (name == "gauss" || name == "smooth") {
        return Kernel::gauss();
    }
    if (name == "laplace" || name == "rough") {
        return Kernel::laplace();
    }
    if (name == "one_minus_max") {
        return Kernel::one_minus_max();
    }
    if (name.rfind("bridge", 0) == 0) {
        double eta = 1.0;
        if (const auto colon = name.find(':'); colon != std::string::npos) {
            try {
                eta = std::stod(name.substr(colon + 1));
            } catch (const std::exception&) {
                throw ConfigError("bad bridge kernel parameter in '" + name + "'");
            }
        }
        return Kernel::bridge(eta);
    }
    throw ConfigError("unknown kernel '" + name + "'");
}

inline std::string kernel_key(const Kernel& kernel)
{
    if (kernel.kind == Kernel::Kind::BridgeMinusProduct) {
        std::ostringstream out;
        out << "bridge:" << kernel.eta;
        return out.str();
    }
    return kernel.name();
}

namespace detail {

template <typename T>
T value_or(const nlohmann::json& object, const char* key, T fallback)
{
    if (!object.contains(key)) {
        return fallback;
    }
    try {
        return object.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
    }
}

inline TruncationRule parse_truncation(const nlohmann::json& j)
{
    const auto rule = value_or<std::string>(j, "rule", "mahalanobis");
    if (rule == "none") {
        return NoTruncation{};
    }
    if (rule == "norm") {
        NormThreshold r;
        r.c = value_or(j, "c", r.c);
        r.w = value_or(j, "w", r.w);
        return r;
    }
    if (rule == "mahalanobis") {
        MahalanobisRule r;
        r.discard_fraction = value_or(j, "discard_fraction", r.discard_fraction);
        r.evr_target = value_or(j, "evr_target", r.evr_target);
        r.multiplier = value_or(j, "multiplier", r.multiplier);
        r.exponent = value_or(j, "exponent", r.exponent);
        return r;
    }
    throw ConfigError("unknown truncation rule '" + rule + "'");
}

inline nlohmann::json truncation_to_json(const TruncationRule& rule)
{
    if (std::holds_alternative<NoTruncation>(rule)) {
        return {{"rule", "none"}};
    }
    if (const auto* r = std::get_if<NormThreshold>(&rule)) {
        return {{"rule", "norm"}, {"c", r->c}, {"w", r->w}};
    }
    const auto& r = std::get<MahalanobisRule>(rule);
    return {{"rule", "mahalanobis"},
            {"discard_fraction", r.discard_fraction},
            {"evr_target", r.evr_target},
            {"multiplier", r.multiplier},
            {"exponent", r.exponent}};
}

} // namespace detail

inline ScenarioConfig scenario_from_json(const nlohmann::json& j)
{
    if (!j.is_object()) {
        throw ConfigError("configuration must be a JSON object");
    }
    const int version = detail::value_or(j, "schema_version", kSchemaVersion);
    if (version != kSchemaVersion) {
        throw ConfigError("unsupported schema_version " + std::to_string(version));
    }

    ScenarioConfig cfg;
    cfg.name = detail::value_or<std::string>(j, "name", cfg.name);
    const auto model = detail::value_or<std::string>(j, "model", "transport");
    const nlohmann::json sim = j.contains("simulation") ? j.at("simulation") : nlohmann::json::object();

    if (model == "transport") {
        SimConfig s;
        s.n = detail::value_or(sim, "n", s.n);
        s.kernel = parse_kernel(detail::value_or<std::string>(sim, "kernel", "gauss"));
        s.jump_intensity = detail::value_or(sim, "jump_intensity", s.jump_intensity);
        s.jump_variance = detail::value_or(sim, "jump_variance", s.jump_variance);
        if (sim.contains("kernel_scale")) {
            s.kernel_scale = detail::value_or(sim, "kernel_scale", 0.0);
        }
        cfg.sim = s;
    } else if (model == "heidih") {
        HeidihConfig h;
        h.n = detail::value_or(sim, "n", h.n);
        h.horizon = detail::value_or(sim, "horizon", h.horizon);
        h.eta = detail::value_or(sim, "eta", h.eta);
        h.modes = detail::value_or(sim, "modes", h.modes);
        h.substeps = detail::value_or(sim, "substeps", h.substeps);
        cfg.sim = h;
        cfg.estimators = {EstimatorSpec::parse("sarcv_")};
        cfg.truncation = NoTruncation{};
    } else {
        throw ConfigError("unknown model '" + model + "'");
    }

    if (j.contains("estimators")) {
        cfg.estimators.clear();
        for (const auto& name : detail::value_or<std::vector<std::string>>(j, "estimators", {})) {
            try {
                cfg.estimators.push_back(EstimatorSpec::parse(name));
            } catch (const InvalidArgument& e) {
                throw ConfigError(e.what());
            }
        }
    }
    if (j.contains("truncation")) {
        cfg.truncation = detail::parse_truncation(j.at("truncation"));
    }
    cfg.runs = detail::value_or(j, "runs", cfg.runs);
    cfg.master_seed = detail::value_or(j, "master_seed", cfg.master_seed);
    cfg.workers = detail::value_or(j, "workers", cfg.workers);
    cfg.validate();
    return cfg;
}

/// JSON echo of a scenario. Worker count is left out so that reports do not
/// depend on it.
inline nlohmann::json scenario_to_json(const ScenarioConfig& cfg)
{
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["name"] = cfg.name;
    if (const auto* s = std::get_if<SimConfig>(&cfg.sim)) {
        j["model"] = "transport";
        j["simulation"] = {{"n", s->n},
                           {"kernel", kernel_key(s->kernel)},
                           {"jump_intensity", s->jump_intensity},
                           {"jump_variance", s->jump_variance}};
        if (s->kernel_scale) {
            j["simulation"]["kernel_scale"] = *s->kernel_scale;
        }
    } else {
        const auto& h = std::get<HeidihConfig>(cfg.sim);
        j["model"] = "heidih";
        j["simulation"] = {{"n", h.n}, {"horizon", h.horizon}, {"eta", h.eta}, {"modes", h.modes}, {"substeps", h.substeps}};
    }
    std::vector<std::string> names;
    for (const auto& e : cfg.estimators) {
        names.push_back(e.name());
    }
    j["estimators"] = names;
    j["truncation"] = detail::truncation_to_json(cfg.truncation);
    j["runs"] = cfg.runs;
    j["master_seed"] = cfg.master_seed;
    return j;
}

inline ScenarioConfig load_scenario(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open configuration file '" + path + "'");
    }
    try {
        return scenario_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid JSON in '") + path + "': " + e.what());
    }
}

/// The four simulation-study scenarios with default parameters.
inline std::vector<ScenarioConfig> table1_scenarios(int runs, std::uint64_t master_seed, int workers)
{
    std::vector<ScenarioConfig> out;
    for (const auto& [label, kernel] : {std::pair{"smooth", Kernel::gauss()}, std::pair{"rough", Kernel::laplace()}}) {
        for (const bool jumps : {false, true}) {
            ScenarioConfig cfg;
            cfg.name = std::string(label) + (jumps ? "_jumps" : "_nojumps");
            SimConfig s;
            s.n = 100;
            s.kernel = kernel;
            s.jump_intensity = jumps ? 2.0 : 0.0;
            cfg.sim = s;
            cfg.estimators = jumps ? std::vector{EstimatorSpec::parse("sarcv_"), EstimatorSpec::parse("rcv_")}
                                   : std::vector{EstimatorSpec::parse("sarcv"), EstimatorSpec::parse("rcv")};
            cfg.truncation = MahalanobisRule{};
            cfg.runs = runs;
            cfg.master_seed = master_seed + out.size();
            cfg.workers = workers;
            out.push_back(cfg);
        }
    }
    return out;
}

} // namespace sarcv

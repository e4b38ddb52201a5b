#pragma once

// Exact simulation of df = d/dx f dt + dX on a shrinking extended grid, with
// X a Q-Wiener process plus compound Poisson level shifts, and an Euler
// scheme for the rank-one stochastic volatility (HEIDIH-type) field.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

#include "sarcv/errors.hpp"
#include "sarcv/gridcore.hpp"
#include "sarcv/random.hpp"

namespace sarcv {

struct SimConfig {
    int n = 100;
    Kernel kernel = Kernel::gauss();
    double jump_intensity = 2.0;
    double jump_variance = 0.1;
    std::uint64_t seed = 0;
    /// Scale of the per-step Gaussian covariance; 1/n when unset. Zero
    /// disables the continuous part.
    std::optional<double> kernel_scale;

    [[nodiscard]] double effective_kernel_scale() const { return kernel_scale.value_or(1.0 / n); }

    void validate() const
    {
        detail::require(n >= 2, "SimConfig: n must be at least 2");
        detail::require(jump_intensity >= 0.0, "SimConfig: jump intensity must be non-negative");
        detail::require(jump_variance >= 0.0, "SimConfig: jump variance must be non-negative");
        detail::require(effective_kernel_scale() >= 0.0, "SimConfig: kernel scale must be non-negative");
    }
};

struct JumpRecord {
    double time = 0.0;
    double size = 0.0;
    /// i with time in ((i-1)/n, i/n]; the jump shows up in increment i.
    int covered_step = 0;
};

struct SimulationResult {
    SampleMatrix samples;
    std::vector<JumpRecord> jumps;
    /// Gaussian innovations w[i] at grid points 1..n, one row per step.
    Matrix innovations;
};

/// Reusable sampler for one (n, kernel, scale) combination. The Cholesky
/// factor of the extended (2n+2)-point covariance is computed once; its
/// leading blocks factor every shrunken active window.
class TransportSimulator {
public:
    explicit TransportSimulator(const SimConfig& cfg) : cfg_(cfg)
    {
        cfg_.validate();
        const double scale = cfg_.effective_kernel_scale();
        if (scale > 0.0) {
            const SpatialGrid extended(cfg_.n, extended_width());
            factor_ = cholesky_psd(kernel_matrix(cfg_.kernel, extended, scale), 0.0);
        }
    }

    [[nodiscard]] int extended_width() const noexcept { return 2 * cfg_.n + 2; }
    [[nodiscard]] const SimConfig& config() const noexcept { return cfg_; }
    [[nodiscard]] const std::optional<CholeskyFactor>& factor() const noexcept { return factor_; }

    [[nodiscard]] SimulationResult simulate(std::uint64_t seed) const
    {
        const int n = cfg_.n;
        const int width = extended_width();
        Rng rng(seed);
        std::normal_distribution<double> normal(0.0, 1.0);

        Matrix f = Matrix::Zero(n + 1, width);
        Matrix innovations = Matrix::Zero(n, n);
        Vector z(width);
        Vector w = Vector::Zero(width);

        for (int step = 0; step < n; ++step) {
            for (int j = 0; j < width; ++j) {
                z(j) = normal(rng);
            }
            // The window loses its rightmost point at every step.
            const int active = width - step - 1;
            if (factor_) {
                w.head(active).noalias() =
                    factor_->lower.topLeftCorner(active, active).triangularView<Eigen::Lower>() * z.head(active);
            }
            f.row(step + 1).head(active) = f.row(step).segment(1, active) + w.head(active).transpose();
            innovations.row(step) = w.head(n).transpose();
        }

        std::vector<JumpRecord> jumps = draw_jumps(rng);
        for (const JumpRecord& jump : jumps) {
            f.bottomRows(n + 1 - jump.covered_step).array() += jump.size;
        }

        return {SampleMatrix(n, f.leftCols(n + 1)), std::move(jumps), std::move(innovations)};
    }

private:
    std::vector<JumpRecord> draw_jumps(Rng& rng) const
    {
        std::vector<JumpRecord> jumps;
        if (cfg_.jump_intensity <= 0.0) {
            return jumps;
        }
        const int n = cfg_.n;
        std::poisson_distribution<int> count_dist(cfg_.jump_intensity);
        std::uniform_real_distribution<double> uniform(0.0, 1.0);
        std::normal_distribution<double> size_dist(0.0, std::sqrt(cfg_.jump_variance));

        const int count = count_dist(rng);
        jumps.reserve(static_cast<std::size_t>(count));
        for (int k = 0; k < count; ++k) {
            JumpRecord jump;
            jump.time = 1.0 - uniform(rng); // (0, 1]
            jump.size = size_dist(rng);
            jump.covered_step = std::clamp(static_cast<int>(std::ceil(jump.time * n)), 1, n);
            jumps.push_back(jump);
        }
        std::sort(jumps.begin(), jumps.end(), [](const JumpRecord& a, const JumpRecord& b) { return a.time < b.time; });
        return jumps;
    }

    SimConfig cfg_;
    std::optional<CholeskyFactor> factor_;
};

inline SimulationResult simulate_field(const SimConfig& cfg)
{
    return TransportSimulator(cfg).simulate(cfg.seed);
}

// ---------------------------------------------------------------------------

struct HeidihConfig {
    int n = 50;
    int horizon = 50;
    double eta = 1.0;
    int modes = 100;
    int substeps = 10;
    std::uint64_t seed = 0;
    /// Multiplies the scalar Brownian driver; 0 freezes the field.
    double driver_scale = 1.0;

    void validate() const
    {
        detail::require(n >= 2, "HeidihConfig: n must be at least 2");
        detail::require(horizon >= 1, "HeidihConfig: horizon must be positive");
        detail::require(eta > 0.0, "HeidihConfig: eta must be positive");
        detail::require(modes >= 1, "HeidihConfig: modes must be positive");
        detail::require(modes <= 4 * n, "HeidihConfig: modes must not exceed 4n");
        detail::require(substeps >= 1, "HeidihConfig: substeps must be positive");
    }
};

/// Spectral coefficients y_k of the volatility Y = sum_k y_k sqrt(2) sin(k pi x),
/// each an Ornstein-Uhlenbeck process with mean reversion k^2 pi^2 / eta.
class OuModes {
public:
    OuModes(double eta, int modes) : rates_(modes), state_(Vector::Zero(modes))
    {
        detail::require(eta > 0.0 && modes >= 1, "OuModes: eta and modes must be positive");
        for (int k = 0; k < modes; ++k) {
            const double kk = k + 1.0;
            rates_(k) = kk * kk * std::numbers::pi * std::numbers::pi / eta;
        }
    }

    [[nodiscard]] const Vector& rates() const noexcept { return rates_; }
    [[nodiscard]] const Vector& state() const noexcept { return state_; }
    [[nodiscard]] double stationary_variance(int k) const { return 0.5 / rates_(k); }

    void draw_stationary(Rng& rng)
    {
        std::normal_distribution<double> normal(0.0, 1.0);
        for (Eigen::Index k = 0; k < state_.size(); ++k) {
            state_(k) = std::sqrt(0.5 / rates_(k)) * normal(rng);
        }
    }

    /// Exact OU transition over `dt` for every mode.
    void advance(double dt, Rng& rng)
    {
        if (dt != cached_dt_) {
            decay_ = (-rates_ * dt).array().exp();
            noise_sd_ = ((1.0 - decay_.array().square()) / (2.0 * rates_.array())).sqrt();
            cached_dt_ = dt;
        }
        std::normal_distribution<double> normal(0.0, 1.0);
        for (Eigen::Index k = 0; k < state_.size(); ++k) {
            state_(k) = decay_(k) * state_(k) + noise_sd_(k) * normal(rng);
        }
    }

private:
    Vector rates_;
    Vector state_;
    Vector decay_;
    Vector noise_sd_;
    double cached_dt_ = -1.0;
};

/// sqrt(2) sin(k pi x_j) at grid points j = 1..n+1; rows beyond x = 1 are zero.
inline Matrix sine_basis(int n, int modes)
{
    Matrix basis = Matrix::Zero(n + 1, modes);
    for (int j = 0; j < n; ++j) {
        const double x = (j + 1.0) / n;
        for (int k = 0; k < modes; ++k) {
            basis(j, k) = std::numbers::sqrt2 * std::sin((k + 1.0) * std::numbers::pi * x);
        }
    }
    return basis;
}

/// Field on (0,1] under the nilpotent left shift, driven by Y_t dbeta_t with
/// volatility frozen over each of the m substeps per observation interval.
/// Output has horizon*n + 1 rows; the last column (x > 1) is identically 0.
inline SampleMatrix simulate_heidih_field(const HeidihConfig& cfg)
{
    cfg.validate();
    const int n = cfg.n;
    const int steps = cfg.horizon * n;
    const double dt = 1.0 / (static_cast<double>(n) * cfg.substeps);
    const double sqrt_dt = std::sqrt(dt);

    Rng rng(cfg.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    OuModes volatility(cfg.eta, cfg.modes);
    volatility.draw_stationary(rng);
    const Matrix basis = sine_basis(n, cfg.modes);

    Matrix f = Matrix::Zero(steps + 1, n + 1);
    Vector loading(cfg.modes);
    for (int step = 0; step < steps; ++step) {
        loading.setZero();
        for (int s = 0; s < cfg.substeps; ++s) {
            const double dbeta = cfg.driver_scale * sqrt_dt * normal(rng);
            loading += dbeta * volatility.state();
            volatility.advance(dt, rng);
        }
        f.row(step + 1).head(n) = f.row(step).segment(1, n) + (basis.topRows(n) * loading).transpose();
    }
    return SampleMatrix(n, std::move(f));
}

} // namespace sarcv

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "sarcv/increments.hpp"
#include "sarcv/simulator.hpp"

using namespace sarcv;

namespace {

SimConfig gauss_config(int n, double intensity, std::uint64_t seed)
{
    SimConfig cfg;
    cfg.n = n;
    cfg.kernel = Kernel::gauss();
    cfg.jump_intensity = intensity;
    cfg.seed = seed;
    return cfg;
}

} // namespace

TEST(SimConfig, Validation)
{
    SimConfig cfg;
    cfg.n = 1;
    EXPECT_THROW(cfg.validate(), InvalidArgument);
    cfg.n = 10;
    cfg.jump_intensity = -1.0;
    EXPECT_THROW(cfg.validate(), InvalidArgument);
    cfg.jump_intensity = 0.0;
    cfg.jump_variance = -0.1;
    EXPECT_THROW(cfg.validate(), InvalidArgument);
}

TEST(SimulateField, ZeroScaleHookGivesZeroField)
{
    SimConfig cfg = gauss_config(10, 0.0, 1);
    cfg.kernel_scale = 0.0;
    const auto result = simulate_field(cfg);
    EXPECT_EQ(result.samples.values().rows(), 11);
    EXPECT_EQ(result.samples.values().cols(), 11);
    EXPECT_EQ(result.samples.values().cwiseAbs().maxCoeff(), 0.0);
    EXPECT_TRUE(result.jumps.empty());
}

TEST(SimulateField, SeedDeterminism)
{
    const SimConfig cfg = gauss_config(30, 2.0, 99);
    const auto a = simulate_field(cfg);
    const auto b = simulate_field(cfg);
    EXPECT_EQ(a.samples.values(), b.samples.values());
    ASSERT_EQ(a.jumps.size(), b.jumps.size());
    for (std::size_t k = 0; k < a.jumps.size(); ++k) {
        EXPECT_EQ(a.jumps[k].time, b.jumps[k].time);
        EXPECT_EQ(a.jumps[k].size, b.jumps[k].size);
    }
    EXPECT_NE(a.samples.values(), simulate_field(gauss_config(30, 2.0, 100)).samples.values());
}

TEST(SimulateField, PoissonMeanJumpCount)
{
    SimConfig cfg = gauss_config(4, 2.0, 0);
    const TransportSimulator sim(cfg);
    const int seeds = 10000;
    double total = 0.0;
    for (int s = 0; s < seeds; ++s) {
        total += static_cast<double>(sim.simulate(derive_seed(7, static_cast<std::uint64_t>(s))).jumps.size());
    }
    EXPECT_NEAR(total / seeds, 2.0, 0.05);
}

TEST(SimulateField, JumpRecordsAreConsistent)
{
    const TransportSimulator sim(gauss_config(40, 5.0, 0));
    for (std::uint64_t s = 0; s < 200; ++s) {
        for (const JumpRecord& j : sim.simulate(s).jumps) {
            ASSERT_GT(j.time, 0.0);
            ASSERT_LE(j.time, 1.0);
            ASSERT_GE(j.covered_step, 1);
            ASSERT_LE(j.covered_step, 40);
            ASSERT_GT(j.time, (j.covered_step - 1) / 40.0);
            ASSERT_LE(j.time, j.covered_step / 40.0);
        }
    }
}

TEST(SimulateField, AdjustedIncrementsAreTheDrawnInnovations)
{
    const int n = 25;
    const auto result = simulate_field(gauss_config(n, 0.0, 3));
    const auto inc = adjusted_increments(result.samples);
    EXPECT_LT((inc.rows - result.innovations).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(SimulateField, JumpShowsUpAsConstantShiftInItsIncrement)
{
    const int n = 20;
    SimConfig with = gauss_config(n, 3.0, 0);
    const TransportSimulator sim(with);
    int checked = 0;
    for (std::uint64_t seed = 0; seed < 50 && checked < 20; ++seed) {
        const auto result = sim.simulate(seed);
        if (result.jumps.empty()) {
            continue;
        }
        const Matrix diff = adjusted_increments(result.samples).rows - result.innovations;
        Vector expected = Vector::Zero(n);
        for (const JumpRecord& j : result.jumps) {
            expected(j.covered_step - 1) += j.size;
        }
        for (int i = 0; i < n; ++i) {
            for (int c = 0; c < n; ++c) {
                ASSERT_NEAR(diff(i, c), expected(i), 1e-12);
            }
        }
        ++checked;
    }
    EXPECT_GT(checked, 0);
}

TEST(SimulateField, GaussIncrementCovarianceMatchesKernel)
{
    const int n = 100;
    const TransportSimulator sim(gauss_config(n, 0.0, 0));
    const int seeds = 2000;
    Matrix acc = Matrix::Zero(n, n);
    long rows = 0;
    for (int s = 0; s < seeds; ++s) {
        const auto inc = adjusted_increments(sim.simulate(derive_seed(11, static_cast<std::uint64_t>(s))).samples);
        const Matrix used = inc.rows.bottomRows(n - 1);
        acc.selfadjointView<Eigen::Lower>().rankUpdate(used.transpose());
        rows += n - 1;
    }
    Matrix cov = acc.selfadjointView<Eigen::Lower>();
    cov *= static_cast<double>(n) / static_cast<double>(rows);
    const auto truth = kernel_matrix(Kernel::gauss(), SpatialGrid(n), 1.0, n);
    EXPECT_LT((cov - truth.entries()).cwiseAbs().maxCoeff(), 0.05);
}

TEST(SimulateField, FactorCoversExtendedGrid)
{
    const TransportSimulator sim(gauss_config(10, 0.0, 0));
    ASSERT_TRUE(sim.factor().has_value());
    EXPECT_EQ(sim.extended_width(), 22);
    EXPECT_EQ(sim.factor()->lower.rows(), 22);
}

TEST(HeidihConfig, TooManyModes)
{
    HeidihConfig cfg;
    cfg.n = 10;
    cfg.modes = 41;
    EXPECT_THROW(simulate_heidih_field(cfg), InvalidArgument);
    cfg.modes = 40;
    cfg.horizon = 1;
    EXPECT_NO_THROW(simulate_heidih_field(cfg));
}

TEST(HeidihField, ZeroDriverKeepsFieldAtZero)
{
    HeidihConfig cfg;
    cfg.n = 10;
    cfg.horizon = 3;
    cfg.modes = 1;
    cfg.driver_scale = 0.0;
    const auto f = simulate_heidih_field(cfg);
    EXPECT_EQ(f.values().rows(), 31);
    EXPECT_EQ(f.values().cwiseAbs().maxCoeff(), 0.0);
}

TEST(HeidihField, ShapeDeterminismAndEmptyLastColumn)
{
    HeidihConfig cfg;
    cfg.n = 12;
    cfg.horizon = 4;
    cfg.modes = 20;
    cfg.substeps = 3;
    cfg.seed = 5;
    const auto a = simulate_heidih_field(cfg);
    const auto b = simulate_heidih_field(cfg);
    EXPECT_EQ(a.values(), b.values());
    EXPECT_EQ(a.values().rows(), 4 * 12 + 1);
    EXPECT_EQ(a.values().col(12).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_GT(a.values().cwiseAbs().maxCoeff(), 0.0);
}

TEST(OuModes, StationaryVarianceOfFirstMode)
{
    OuModes modes(1.0, 1);
    Rng rng(123);
    modes.draw_stationary(rng);
    const int steps = 10000;
    // Substep length 1/(n m) with n = 50, m = 10, as in the long-span setup,
    // sampled every 100 substeps to thin the autocorrelation.
    const double dt = 1.0 / 500.0;
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int s = 0; s < steps; ++s) {
        for (int k = 0; k < 100; ++k) {
            modes.advance(dt, rng);
        }
        const double y = modes.state()(0);
        sum += y;
        sum_sq += y * y;
    }
    const double mean = sum / steps;
    const double variance = sum_sq / steps - mean * mean;
    const double target = 1.0 / (2.0 * std::numbers::pi * std::numbers::pi);
    EXPECT_DOUBLE_EQ(modes.stationary_variance(0), target);
    EXPECT_NEAR(variance, target, 0.05 * target);
}

TEST(OuModes, VolatilityCovarianceAtMidpoint)
{
    // E[Y(0.5)^2] = (min - xy)/2 = 0.125 for eta = 1.
    const int modes = 100;
    const Matrix basis = sine_basis(2, modes);
    const Eigen::RowVectorXd at_half = basis.row(0);
    ASSERT_NEAR(basis(0, 0), std::numbers::sqrt2, 1e-14);
    OuModes ou(1.0, modes);
    Rng rng(9);
    const int samples = 5000;
    double sum_sq = 0.0;
    for (int s = 0; s < samples; ++s) {
        ou.draw_stationary(rng);
        const double y = at_half.dot(ou.state());
        sum_sq += y * y;
    }
    EXPECT_NEAR(sum_sq / samples, 0.125, 0.05 * 0.125);
}

TEST(SineBasis, RowsBeyondUnitIntervalAreZero)
{
    const Matrix b = sine_basis(8, 5);
    EXPECT_EQ(b.rows(), 9);
    EXPECT_EQ(b.row(8).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_NEAR(b.row(7).cwiseAbs().maxCoeff(), 0.0, 1e-14);
}

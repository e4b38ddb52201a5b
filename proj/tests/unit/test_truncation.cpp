#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "sarcv/simulator.hpp"
#include "sarcv/truncation.hpp"

using namespace sarcv;

namespace {

EigenPairs identity_pairs(int n)
{
    return {Vector::Ones(n), Matrix::Identity(n, n)};
}

IncrementSet gaussian_increments(int n, std::uint64_t seed)
{
    SimConfig cfg;
    cfg.n = n;
    cfg.jump_intensity = 0.0;
    cfg.seed = seed;
    return adjusted_increments(simulate_field(cfg).samples);
}

IncrementSet random_increments(std::mt19937_64& rng, int n, int rows)
{
    std::normal_distribution<double> normal;
    IncrementSet inc;
    inc.n = n;
    inc.kind = IncrementKind::Adjusted;
    inc.rows.resize(rows, n);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < n; ++j) {
            inc.rows(i, j) = normal(rng) * (1.0 + 0.3 * j);
        }
    }
    return inc;
}

} // namespace

TEST(MahalanobisDistance, SingleModeNormalization)
{
    Vector values(3);
    values << 4.0, 1.0, 0.5;
    const EigenPairs eig{values, Matrix::Identity(3, 3)};
    Vector f = Vector::Zero(3);
    f(0) = 2.0;
    EXPECT_DOUBLE_EQ(mahalanobis_distance(f, eig, 1), 1.0);
    EXPECT_EQ(mahalanobis_distance(Vector::Zero(3), eig, 2), 0.0);
}

TEST(MahalanobisDistance, PooledTail)
{
    EXPECT_DOUBLE_EQ(mahalanobis_distance(Vector::Ones(4), identity_pairs(4), 2), std::sqrt(3.0));
}

TEST(MahalanobisDistance, FullDimensionHasNoTail)
{
    EXPECT_DOUBLE_EQ(mahalanobis_distance(Vector::Ones(4), identity_pairs(4), 4), 2.0);
}

TEST(MahalanobisDistance, Errors)
{
    Vector values(2);
    values << 1.0, 0.0;
    const EigenPairs eig{values, Matrix::Identity(2, 2)};
    EXPECT_THROW(mahalanobis_distance(Vector::Ones(2), eig, 2), DegenerateSpectrum);
    EXPECT_THROW(mahalanobis_distance(Vector::Ones(2), eig, 0), InvalidArgument);
    EXPECT_THROW(mahalanobis_distance(Vector::Ones(3), eig, 1), InvalidArgument);
}

TEST(MahalanobisDistance, NegligibleTailIsIgnored)
{
    Vector values(3);
    values << 1.0, 1e-20, 0.0;
    const EigenPairs eig{values, Matrix::Identity(3, 3)};
    EXPECT_DOUBLE_EQ(mahalanobis_distance(Vector::Ones(3), eig, 1), 1.0);
}

TEST(MahalanobisDistance, ScaleCovarianceWithFixedSpectrum)
{
    std::mt19937_64 rng(4);
    const auto inc = random_increments(rng, 6, 40);
    const Matrix cov = inc.rows.transpose() * inc.rows;
    const EigenPairs eig = sym_eigen(Matrix(0.5 * (cov + cov.transpose())));
    for (int i = 0; i < 40; ++i) {
        const Vector f = inc.rows.row(i).transpose();
        for (const double c : {0.1, 2.0, 17.0}) {
            EXPECT_NEAR(mahalanobis_distance(c * f, eig, 3), c * mahalanobis_distance(f, eig, 3), 1e-12 * c);
        }
    }
}

TEST(RowsByNorm, StableTies)
{
    Matrix rows(4, 2);
    rows << 1, 0, 0, 2, 0, 1, 2, 0;
    EXPECT_EQ(rows_by_norm_descending(rows), (std::vector<int>{1, 3, 0, 2}));
}

TEST(SelectFlags, NoTruncation)
{
    std::mt19937_64 rng(1);
    const auto report = select_flags(random_increments(rng, 5, 20), NoTruncation{}, 0.1);
    EXPECT_EQ(report.flagged(), 0);
    EXPECT_EQ(report.flags.size(), 20u);
    EXPECT_EQ(report.d, 1);
    EXPECT_TRUE(std::isinf(report.threshold));
}

TEST(SelectFlags, NormThresholdLimits)
{
    std::mt19937_64 rng(2);
    auto inc = random_increments(rng, 5, 30);
    inc.rows.row(7).setZero();
    const auto none = select_flags(inc, NormThreshold{1e12, 0.49}, 0.01);
    EXPECT_EQ(none.flagged(), 0);
    const auto all = select_flags(inc, NormThreshold{1e-12, 0.49}, 0.01);
    EXPECT_EQ(all.flagged(), 29);
    EXPECT_FALSE(all.flags[7]);
}

TEST(SelectFlags, NormThresholdDefinition)
{
    IncrementSet inc;
    inc.n = 2;
    inc.rows.resize(2, 2);
    inc.rows << 0.5, 0.0, 0.3, 0.39;
    const auto report = select_flags(inc, NormThreshold{0.5, 0.25}, 1.0);
    EXPECT_DOUBLE_EQ(report.threshold, 0.5);
    EXPECT_FALSE(report.flags[0]); // norm exactly 0.5
    EXPECT_FALSE(report.flags[1]);
    const auto lower = select_flags(inc, NormThreshold{0.49, 0.25}, 1.0);
    EXPECT_TRUE(lower.flags[0]);
    EXPECT_TRUE(lower.flags[1]);
}

TEST(SelectFlags, RuleValidation)
{
    std::mt19937_64 rng(3);
    const auto inc = random_increments(rng, 4, 20);
    EXPECT_THROW(select_flags(inc, NormThreshold{-1.0, 0.3}, 0.1), InvalidArgument);
    EXPECT_THROW(select_flags(inc, NormThreshold{1.0, 0.5}, 0.1), InvalidArgument);
    EXPECT_THROW(select_flags(inc, MahalanobisRule{1.0, 0.9, 3.0, 0.49}, 0.1), InvalidArgument);
    EXPECT_THROW(select_flags(inc, MahalanobisRule{}, 0.0), InvalidArgument);
    EXPECT_THROW(select_flags(random_increments(rng, 4, 7), MahalanobisRule{}, 0.1), InvalidArgument);
}

TEST(SelectFlags, MahalanobisReportContents)
{
    const int n = 50;
    const auto inc = gaussian_increments(n, 17);
    const auto report = select_flags(inc, MahalanobisRule{}, 1.0 / n);
    EXPECT_EQ(report.flags.size(), static_cast<std::size_t>(n));
    EXPECT_GE(report.d, 1);
    EXPECT_LE(report.d, n);
    EXPECT_EQ(report.prelim_eigen.size(), n);
    EXPECT_DOUBLE_EQ(report.threshold, 3.0 * std::pow(1.0 / n, 0.49) * std::sqrt(report.d + 1.0));
}

TEST(SelectFlags, PreliminaryUsesKeptRowsFromSecondOn)
{
    std::mt19937_64 rng(8);
    const auto inc = random_increments(rng, 3, 12);
    const auto report = select_flags(inc, MahalanobisRule{}, 0.1);
    // Oracle: exclude ceil(0.25 * 12) = 3 largest rows, sum outer products of
    // the remaining rows with index >= 1, rescale by 12/9.
    const auto order = rows_by_norm_descending(inc.rows);
    std::vector<bool> kept(12, true);
    for (int k = 0; k < 3; ++k) {
        kept[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = false;
    }
    Matrix prelim = Matrix::Zero(3, 3);
    for (int i = 1; i < 12; ++i) {
        if (kept[static_cast<std::size_t>(i)]) {
            prelim += inc.rows.row(i).transpose() * inc.rows.row(i);
        }
    }
    prelim *= 12.0 / 9.0;
    EXPECT_LT((report.prelim_eigen.reconstruct() - prelim).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SelectFlags, ConstantShiftRowIsFlagged)
{
    const int n = 100;
    const double delta = 1.0 / n;
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        auto inc = gaussian_increments(n, seed);
        inc.rows.row(40).setConstant(10.0 * std::pow(delta, 0.49));
        const auto report = select_flags(inc, MahalanobisRule{}, delta);
        const double g = mahalanobis_distance(inc.rows.row(40).transpose(), report.prelim_eigen, report.d);
        EXPECT_GT(g, report.threshold);
        EXPECT_TRUE(report.flags[40]);
    }
}

TEST(SelectFlags, GaussianFalsePositivesAreRare)
{
    const int n = 100;
    long flagged = 0;
    long total = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto report = select_flags(gaussian_increments(n, derive_seed(21, seed)), MahalanobisRule{}, 1.0 / n);
        flagged += report.flagged();
        total += n;
    }
    EXPECT_LT(static_cast<double>(flagged) / static_cast<double>(total), 0.005);
}

TEST(SelectFlags, RaisingMultiplierShrinksFlaggedSet)
{
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 30; ++trial) {
        auto inc = random_increments(rng, 8, 40);
        for (int i = 0; i < 40; i += 7) {
            inc.rows.row(i) *= 4.0;
        }
        std::vector<bool> previous(40, true);
        for (const double multiplier : {0.5, 1.0, 2.0, 3.0, 5.0}) {
            MahalanobisRule rule;
            rule.multiplier = multiplier;
            const auto report = select_flags(inc, rule, 0.5);
            for (int i = 0; i < 40; ++i) {
                ASSERT_TRUE(!report.flags[static_cast<std::size_t>(i)] || previous[static_cast<std::size_t>(i)]);
            }
            previous = report.flags;
        }
    }
}

TEST(SelectFlags, PermutationEquivariance)
{
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        auto inc = random_increments(rng, 6, 30);
        inc.rows.row(3) *= 6.0;
        // Leave row 0 in place: the preliminary sum skips it.
        std::vector<int> perm(30);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin() + 1, perm.end(), rng);
        IncrementSet permuted = inc;
        for (int i = 0; i < 30; ++i) {
            permuted.rows.row(i) = inc.rows.row(perm[static_cast<std::size_t>(i)]);
        }
        const auto a = select_flags(inc, MahalanobisRule{}, 0.2);
        const auto b = select_flags(permuted, MahalanobisRule{}, 0.2);
        EXPECT_EQ(a.d, b.d);
        for (int i = 0; i < 30; ++i) {
            EXPECT_EQ(b.flags[static_cast<std::size_t>(i)], a.flags[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])]);
        }
    }
}

TEST(SelectFlags, DegeneratePreliminary)
{
    IncrementSet inc;
    inc.n = 3;
    inc.rows = Matrix::Zero(10, 3);
    EXPECT_THROW(select_flags(inc, MahalanobisRule{}, 0.1), DegenerateSpectrum);
}

#include "support.hpp"

#include <gtest/gtest.h>

#include <array>
#include <set>

using namespace abnet;

TEST(Rng, SameSeedAndStreamReproduce) {
    RngStream a(42, 3), b(42, 3);
    for (int i = 0; i < 1000; ++i) ASSERT_EQ(a(), b());
}

TEST(Rng, DistinctStreamsDiverge) {
    RngStream base(42);
    auto s0 = base.split(0), s1 = base.split(1);
    int equal = 0;
    for (int i = 0; i < 1000; ++i) equal += s0() == s1();
    EXPECT_EQ(equal, 0);
    EXPECT_NE(RngStream(1)(), RngStream(2)());
}

TEST(Rng, SplitIsAPureFunctionOfSeedAndPath) {
    RngStream base(7);
    base();  // consuming draws must not change children
    auto a = base.split(5).split(2);
    auto b = RngStream(7).split(5).split(2);
    for (int i = 0; i < 100; ++i) ASSERT_EQ(a(), b());
}

TEST(Rng, UniformStaysInUnitInterval) {
    RngStream r(1);
    double lo = 1.0, hi = 0.0, sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = r.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
        sum += u;
    }
    // mean of U(0,1) has sd 1/sqrt(12 n)
    EXPECT_NEAR(sum / n, 0.5, 5.0 / std::sqrt(12.0 * n));
    EXPECT_LT(lo, 1e-3);
    EXPECT_GT(hi, 1.0 - 1e-3);
}

TEST(Rng, BelowIsUniformByChiSquare) {
    RngStream r(11);
    constexpr int k = 7;
    std::array<int, k> counts{};
    const int n = 70000;
    for (int i = 0; i < n; ++i) {
        const auto x = r.below(k);
        ASSERT_LT(x, static_cast<std::uint64_t>(k));
        ++counts[x];
    }
    double chi2 = 0.0;
    const double e = static_cast<double>(n) / k;
    for (int c : counts) chi2 += (c - e) * (c - e) / e;
    EXPECT_LT(chi2, 22.46);  // 0.999 quantile, 6 dof
    EXPECT_EQ(r.below(1), 0u);
    EXPECT_EQ(r.below(0), 0u);
}

TEST(Rng, CategoricalMatchesWeights) {
    RngStream r(5);
    const std::vector<double> probs{0.2, 0.0, 0.5, 0.3};
    std::array<int, 4> counts{};
    const int n = 100000;
    for (int i = 0; i < n; ++i) ++counts[r.categorical(probs)];
    EXPECT_EQ(counts[1], 0);
    for (std::size_t i = 0; i < probs.size(); ++i) {
        const double se = std::sqrt(probs[i] * (1 - probs[i]) / n);
        EXPECT_NEAR(counts[i] / static_cast<double>(n), probs[i], 4 * se + 1e-12);
    }
}

TEST(Rng, CategoricalRoundingGoesToLastPositiveIndex) {
    RngStream r(9);
    const std::vector<double> short_mass{0.3, 0.3, 0.0};
    std::set<std::size_t> seen;
    for (int i = 0; i < 1000; ++i) seen.insert(r.categorical(short_mass));
    EXPECT_EQ(seen, (std::set<std::size_t>{0, 1}));
}

TEST(Stats, MeanAccumulatorMatchesDirectFormulas) {
    MeanAccumulator acc;
    const std::vector<double> xs{1, 4, 4, 7, 9};
    for (double x : xs) acc.add(x);
    EXPECT_DOUBLE_EQ(acc.mean(), 5.0);
    // unbiased variance: sum (x-5)^2 / 4 = (16+1+1+4+16)/4
    EXPECT_DOUBLE_EQ(acc.variance(), 9.5);
    EXPECT_DOUBLE_EQ(acc.standard_error(), std::sqrt(9.5 / 5));
}

TEST(Stats, MergeEqualsSequentialAccumulation) {
    MeanAccumulator all, left, right;
    RngStream r(3);
    for (int i = 0; i < 1000; ++i) {
        const double x = r.uniform() * 10;
        all.add(x);
        (i < 400 ? left : right).add(x);
    }
    left.merge(right);
    EXPECT_EQ(left.n, all.n);
    EXPECT_NEAR(left.mean(), all.mean(), 1e-12);
    EXPECT_NEAR(left.variance(), all.variance(), 1e-10);
}

TEST(Stats, WilsonIntervalKnownValues) {
    // 0 of 1000: upper = z^2/n / (1 + z^2/n)
    const double z = 1.959963984540054;
    const double z2 = z * z;
    const auto zero = wilson_interval(0, 1000);
    EXPECT_DOUBLE_EQ(zero.lower, 0.0);
    EXPECT_NEAR(zero.upper, (z2 / 1000) / (1 + z2 / 1000), 1e-12);

    const auto half = wilson_interval(50, 100);
    EXPECT_NEAR(half.lower + half.upper, 1.0, 1e-12);  // symmetric about 1/2
    EXPECT_NEAR(half.lower, 0.4038315303659956, 1e-12);  // statsmodels proportion_confint, method="wilson"

    const auto all = wilson_interval(1000, 1000);
    EXPECT_LT(all.lower, 1.0);
    EXPECT_NEAR(all.lower, 0.996173241514445, 1e-12);
    EXPECT_DOUBLE_EQ(all.upper, 1.0);
}

TEST(Parallel, ResultsIndependentOfJobCount) {
    auto run = [](std::size_t jobs) {
        std::vector<std::uint64_t> out(257);
        const RngStream base(99);
        parallel_for(out.size(), jobs, [&](std::size_t i) {
            auto r = base.split(i);
            std::uint64_t acc = 0;
            for (int k = 0; k < 100; ++k) acc ^= r();
            out[i] = acc;
        });
        return out;
    };
    const auto one = run(1);
    EXPECT_EQ(one, run(2));
    EXPECT_EQ(one, run(8));
}

TEST(Parallel, ExceptionsPropagate) {
    EXPECT_THROW(parallel_for(100, 4,
                              [](std::size_t i) {
                                  if (i == 37) throw DomainError("boom");
                              }),
                 DomainError);
}

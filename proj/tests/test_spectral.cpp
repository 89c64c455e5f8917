#include "support.hpp"

#include <gtest/gtest.h>

using namespace abnet;
using abnet::testing::ex1;
using abnet::testing::ex2;
using abnet::testing::ex3;
using abnet::testing::ex4;
using abnet::testing::top_eigenvalue_2x2;

namespace {

Matrix make(std::initializer_list<std::initializer_list<double>> rows) {
    Matrix m(rows.size(), rows.begin()->size());
    std::size_t i = 0;
    for (const auto& row : rows) {
        std::size_t j = 0;
        for (double x : row) m(i, j++) = x;
        ++i;
    }
    return m;
}

double det3(const Matrix& m, double lambda) {
    auto e = [&](std::size_t i, std::size_t j) { return (i == j ? lambda : 0.0) - m(i, j); };
    return e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1)) - e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0)) +
           e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0));
}

// Largest real root of det(λI − A) for 3×3 nonnegative A: scan down from the
// max row sum until the sign flips, then bisect.
double top_root_3x3(const Matrix& m) {
    double hi = 0.0;
    for (std::size_t i = 0; i < 3; ++i) hi = std::max(hi, m(i, 0) + m(i, 1) + m(i, 2));
    hi += 1e-9;
    double lo = hi;
    while (det3(m, lo) > 0.0) lo -= 1e-3;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (det3(m, mid) > 0.0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST(Primitive, WielandtBound) {
    EXPECT_EQ(wielandt_bound(1), 1u);
    EXPECT_EQ(wielandt_bound(2), 2u);
    EXPECT_EQ(wielandt_bound(4), 10u);
}

TEST(Primitive, PositiveMatrixHasExponentOne) {
    const auto r = check_primitive(make({{1, 0.5}, {1, 1}}));
    ASSERT_TRUE(r.ok());
    EXPECT_EQ(*r.exponent, 1u);
}

TEST(Primitive, PermutationIsNotPrimitive) {
    const auto r = check_primitive(make({{0, 1}, {1, 0}}));
    EXPECT_FALSE(r.ok());
    EXPECT_TRUE(r.strongly_connected);
    EXPECT_TRUE(r.witness.has_value());
}

TEST(Primitive, ReducibleIsNotPrimitive) {
    const auto r = check_primitive(make({{1, 1}, {0, 1}}));
    EXPECT_FALSE(r.ok());
    EXPECT_FALSE(r.strongly_connected);
}

TEST(Primitive, WielandtMatrixAttainsTheBound) {
    // cycle 0->1->2->3->0 plus chord 3->1: exponent (n-1)^2 + 1 = 10
    Matrix w(4, 4, 0.0);
    w(0, 1) = w(1, 2) = w(2, 3) = w(3, 0) = w(3, 1) = 1.0;
    const auto r = check_primitive(w);
    ASSERT_TRUE(r.ok());
    EXPECT_EQ(*r.exponent, 10u);
}

TEST(Stationary, TwoStateClosedForm) {
    // P = [[1-a, a], [b, 1-b]] has π = (b, a) / (a + b)
    for (auto [a, b] : {std::pair{0.3, 0.6}, std::pair{0.01, 0.9}, std::pair{0.5, 0.5}}) {
        const auto pi = stationary_distribution(make({{1 - a, a}, {b, 1 - b}}));
        EXPECT_NEAR(pi[0], b / (a + b), 1e-12);
        EXPECT_NEAR(pi[1], a / (a + b), 1e-12);
    }
}

TEST(Stationary, RejectsReducibleAndPeriodic) {
    EXPECT_THROW(stationary_distribution(make({{1, 0}, {0.5, 0.5}})), ReducibleChain);
    EXPECT_THROW(stationary_distribution(make({{0, 1}, {1, 0}})), PeriodicChain);
    EXPECT_EQ(stationary_distribution(make({{1}})), std::vector<double>{1.0});
}

TEST(Perron, TwoByTwoClosedFormOracle) {
    RngStream rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        const double a = rng.uniform() * 3, b = 0.05 + rng.uniform() * 3;
        const double c = 0.05 + rng.uniform() * 3, d = rng.uniform() * 3;
        const auto pair = perron_eigenpair(make({{a, b}, {c, d}}));
        const double r = top_eigenvalue_2x2(a, b, c, d);
        ASSERT_NEAR(pair.r, r, 1e-9 * std::max(1.0, r));
        // right: (b, r − a) scaled to max 1; left: (c, r − a) scaled to sum 1
        const double rx = std::max(b, r - a);
        EXPECT_NEAR(pair.right[0], b / rx, 1e-8);
        EXPECT_NEAR(pair.right[1], (r - a) / rx, 1e-8);
        const double ly = c + (r - a);
        EXPECT_NEAR(pair.left[0], c / ly, 1e-8);
        EXPECT_NEAR(pair.left[1], (r - a) / ly, 1e-8);
    }
}

TEST(Perron, ThreeByThreeAgainstCharacteristicPolynomial) {
    RngStream rng(77);
    for (int trial = 0; trial < 50; ++trial) {
        Matrix m(3, 3);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) m(i, j) = rng.uniform() < 0.3 ? 0.0 : rng.uniform() * 2;
        m(0, 1) = 0.5 + m(0, 1);
        m(1, 2) = 0.5 + m(1, 2);
        m(2, 0) = 0.5 + m(2, 0);
        m(0, 0) = 0.25 + m(0, 0);
        const auto pair = perron_eigenpair(m);
        EXPECT_NEAR(pair.r, top_root_3x3(m), 1e-8);
        double sum = 0.0, mx = 0.0;
        for (double x : pair.left) sum += x;
        for (double x : pair.right) mx = std::max(mx, x);
        EXPECT_NEAR(sum, 1.0, 1e-12);
        EXPECT_DOUBLE_EQ(mx, 1.0);
        const auto ax = m.apply(pair.right);
        const auto ya = m.apply_left(pair.left);
        for (std::size_t i = 0; i < 3; ++i) {
            EXPECT_NEAR(ax[i], pair.r * pair.right[i], 1e-9 * pair.r);
            EXPECT_NEAR(ya[i], pair.r * pair.left[i], 1e-9 * pair.r);
        }
    }
}

TEST(Perron, RejectsNegativeAndImprimitive) {
    EXPECT_THROW(perron_eigenpair(make({{1, -0.1}, {1, 1}})), DomainError);
    EXPECT_THROW(perron_eigenpair(make({{0, 1}, {1, 0}})), DomainError);
}

TEST(Criticality, ExampleRhoValues) {
    const auto r2 = criticality(ex2());
    EXPECT_NEAR(r2.rho, 0.0, 1e-10);
    EXPECT_NEAR(r2.r, 2.0, 1e-10);
    EXPECT_NEAR(r2.a[0], 1.0, 1e-10);
    EXPECT_NEAR(r2.a[1], 1.0, 1e-10);
    EXPECT_NEAR(r2.p[0], 0.5, 1e-10);

    const auto r4 = criticality(ex4());
    EXPECT_NEAR(r4.rho, 1.0, 1e-10);
    EXPECT_NEAR(r4.r, 3.0, 1e-10);

    const auto r1 = criticality(ex1());
    EXPECT_NEAR(r1.rho, 0.0, 1e-12);
    EXPECT_EQ(r1.p, RealVector{1.0});
}

TEST(Criticality, TwoStateExampleAgainstClosedForm) {
    const auto rep = criticality(ex3());
    // M + 2I = [[1, 1/2], [1, 1]]
    const double r = top_eigenvalue_2x2(1.0, 0.5, 1.0, 1.0);
    EXPECT_NEAR(r, 1.0 + std::sqrt(0.5), 1e-15);
    EXPECT_NEAR(rep.rho, std::sqrt(0.5) - 1.0, 1e-9);
    EXPECT_EQ(rep.alpha(), 2.0);
    EXPECT_EQ(rep.primitivity_exponent, 1u);
    // right vector (1/2, r − 1) scaled to max 1 is (√½, 1)
    EXPECT_NEAR(rep.a[0], std::sqrt(0.5), 1e-9);
    EXPECT_NEAR(rep.a[1], 1.0, 1e-12);
    // left vector (1, r − 1) scaled to sum 1
    EXPECT_NEAR(rep.p[0], 1.0 / (1.0 + std::sqrt(0.5)), 1e-9);
}

TEST(Criticality, ShiftInvariance) {
    // ρ does not depend on α: compare against r(M + 7I) − 7 directly
    const auto rep = criticality(ex3());
    Matrix shifted = rep.matrix.entries;
    for (std::size_t i = 0; i < 2; ++i) shifted(i, i) += 7.0;
    EXPECT_NEAR(perron_eigenpair(shifted).r - 7.0, rep.rho, 1e-9);
}

TEST(Classify, RegimesOfExamples) {
    const auto r3 = criticality(ex3());
    EXPECT_EQ(classify(r3, std::nullopt).tag, RegimeTag::Subcritical);
    const auto r4 = criticality(ex4());
    EXPECT_EQ(classify(r4, std::nullopt).tag, RegimeTag::Supercritical);

    const auto s2 = ex2();
    const auto r2 = criticality(s2);
    EXPECT_EQ(classify(r2, detect(s2, r2)).tag, RegimeTag::CriticalConserved);
    const auto s1 = ex1();
    const auto r1 = criticality(s1);
    EXPECT_EQ(classify(r1, detect(s1, r1)).tag, RegimeTag::CriticalStabilizing);
    EXPECT_THROW(classify(r1, std::nullopt), MissingDetection);
    EXPECT_EQ(regime_name(RegimeTag::CriticalConserved), "critical_conserved");
}

TEST(Classify, EpsilonBandIsInclusive) {
    auto rep = criticality(ex3());
    rep.rho = 1e-9;
    const auto s2 = ex2();
    const auto r2 = criticality(s2);
    EXPECT_NE(classify(rep, detect(s2, r2)).tag, RegimeTag::Supercritical);
    rep.rho = 1.0001e-9;
    EXPECT_EQ(classify(rep, std::nullopt).tag, RegimeTag::Supercritical);
}

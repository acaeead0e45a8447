#include <gtest/gtest.h>

#include <cmath>

#include "aslb/covering.hpp"
#include "support.hpp"

using namespace aslb;
using aslb::testing::Gen;

TEST(ColumnCover, DiagonalLine) {
    const SampledFunction f = sample_function(identity_generator(), 0, 1, 1025);
    const Square q{0.5, 0.5, 0.5};
    // closed cells: every column of the diagonal touches two rows
    for (int k : {2, 3, 4, 5, 6}) {
        const double r = std::ldexp(1.0, -k);
        const CoverReport rep = column_cover_count(f, q, r);
        EXPECT_EQ(rep.count, 2LL << k) << r;
        EXPECT_EQ(rep.per_column_counts.size(), static_cast<std::size_t>(1) << k);
    }
}

TEST(ColumnCover, ConstantFunctionOnePerColumn) {
    const SampledFunction f = sample_function(constant_generator(0.3), 0, 1, 513);
    const CoverReport rep = column_cover_count(f, {0.5, 0.5, 0.5}, 0.125);
    EXPECT_EQ(rep.count, 8);
    for (long long c : rep.per_column_counts) EXPECT_EQ(c, 1);
}

TEST(ColumnCover, Errors) {
    const SampledFunction f = sample_function(constant_generator(0.3), 0, 1, 65);
    EXPECT_THROW(column_cover_count(f, {0.5, 0.5, 0.5}, 0.01), Error);  // below 4 grid steps
    EXPECT_THROW(column_cover_count(f, {0.5, 0.5, 0.5}, 2), Error);     // r > 2R
    try {
        column_cover_count(f, {0.5, 5, 0.5}, 0.25);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::disjoint);
    }
}

TEST(ColumnCover, BoundsProperty) {
    // every column meeting the graph needs at least one cell and at most
    // (span / r) + 2 cells
    Gen g(31);
    for (int trial = 0; trial < 60; ++trial) {
        const SampledFunction f = g.function(4097, g.real(0.01, 2));
        const Square q{g.real(0.2, 0.8), g.real(-0.5, 0.5), g.real(0.05, 0.5)};
        const double r = 2 * q.half_side / static_cast<double>(g.integer(1, 50));
        if (r < 4 * f.step()) continue;
        CoverReport rep;
        try {
            rep = column_cover_count(f, q, r);
        } catch (const Error& e) {
            ASSERT_EQ(e.kind(), ErrorKind::disjoint);
            continue;
        }
        long long sum = 0;
        for (long long c : rep.per_column_counts) {
            EXPECT_GE(c, 0);
            EXPECT_LE(c, static_cast<long long>(std::floor(2 * q.half_side / r)) + 2);
            sum += c;
        }
        EXPECT_EQ(sum, rep.count);
    }
}

TEST(GeometricLadder, EndpointsAndRatio) {
    const auto l = geometric_ladder(0.5, 0.5 / 1024, 11);
    ASSERT_EQ(l.size(), 11u);
    EXPECT_EQ(l.front(), 0.5);
    EXPECT_EQ(l.back(), 0.5 / 1024);
    for (std::size_t i = 1; i < l.size(); ++i) EXPECT_NEAR(l[i] / l[i - 1], 0.5, 1e-12);
    EXPECT_THROW(geometric_ladder(1, 0.1, 0), Error);
}

TEST(BoxDimension, SmoothCurvesHaveDimensionOne) {
    const SampledFunction f = sample_function(tent_generator(), 0, 1, 1 << 16);
    const auto ladder = geometric_ladder(1.0 / 16, 1.0 / 1024, 5);
    const BoxDimensionResult res = box_dimension(f, ladder);
    EXPECT_NEAR(res.estimate, 1.0, 0.02);
    const double bad[] = {0.1, 0.05, 0.02, 0.0001};
    EXPECT_THROW(box_dimension(f, bad), Error);
}

TEST(Regularity, Bounds) {
    const Regularity h = Regularity::holder(0.5);
    EXPECT_DOUBLE_EQ(h.bound(0.25), 5.0 / 3);
    EXPECT_EQ(h.bound(0.5), 2.0);
    EXPECT_EQ(h.theta_max(), 0.5);
    const Regularity s = Regularity::sobolev(2);
    EXPECT_DOUBLE_EQ(s.bound(0.5), 1.5);
    EXPECT_DOUBLE_EQ(s.theta_max(), 2.0 / 3);
    EXPECT_EQ(Regularity::sobolev(INFINITY).bound(0.3), 1.0);
    EXPECT_THROW(Regularity::holder(1.0).validate(), Error);
    EXPECT_THROW(Regularity::sobolev(0.5).validate(), Error);
}

TEST(Spectrum, LineHasExponentOne) {
    const SampledFunction f = sample_function(identity_generator(), 0, 1, 1 << 16);
    const double centers[] = {0.3, 0.5, 0.7};
    const double R[] = {0.04, 0.02, 0.01};
    const SpectrumPoint pt = spectrum_at_theta(f, 0.5, R, centers);
    EXPECT_NEAR(pt.exponent, 1.0, 0.05);
    EXPECT_LE(pt.max_exponent, 2.0);
    EXPECT_THROW(spectrum_at_theta(f, 1.5, R, centers), Error);
}

TEST(Spectrum, ParallelMatchesSerial) {
    TakagiSpec t;
    t.a = std::sqrt(0.5);
    const SampledFunction f = sample_function(takagi_generator(t), 0, 1, 1 << 16);
    const double centers[] = {0.1, 0.4, 0.45, 0.8};
    const auto ladder = default_R_ladders(f, 0.3, 1, 4).front();
    const SpectrumPoint a = spectrum_at_theta(f, 0.3, ladder, centers, 1);
    const SpectrumPoint b = spectrum_at_theta(f, 0.3, ladder, centers, 3);
    EXPECT_EQ(a.exponent, b.exponent);
    EXPECT_EQ(a.evidence.count, b.evidence.count);
}

TEST(Audit, LipschitzPassesHolderBound) {
    const SampledFunction f = sample_function(tent_generator(), 0, 1, 1 << 16);
    const double thetas[] = {0.2, 0.4};
    AuditOptions opt;
    opt.n_centers = 5;
    opt.n_ladders = 2;
    opt.scales_per_ladder = 3;
    const UpperBoundAudit a = audit_upper_bound(f, Regularity::holder(0.9), thetas, opt);
    EXPECT_TRUE(a.pass);
    EXPECT_EQ(a.rows.size(), 2u);
    const double outside[] = {0.95};
    EXPECT_THROW(audit_upper_bound(f, Regularity::holder(0.9), outside, opt), Error);
}

TEST(Rotation, StaircasesHaveSlopeAtMostOneProperty) {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const SampledFunction f = random_staircase(2049, 40, seed, seed % 2 == 1);
        const RotationCheck c = rotate_monotone_check(f);
        EXPECT_TRUE(c.pass) << seed;
        EXPECT_LE(c.max_abs_slope, 1 + 1e-9);
    }
    EXPECT_THROW(rotate_monotone_check(random_walk(100, 1, 1)), Error);
}

TEST(GraphSum, SubadditivityProperty) {
    Gen g(4);
    for (int trial = 0; trial < 30; ++trial) {
        const auto n = static_cast<std::size_t>(g.integer(2, 3000));
        const SampledFunction a = random_walk(n, g.real(0.01, 5), g.bits());
        const SampledFunction b = random_walk(n, g.real(0.01, 5), g.bits());
        EXPECT_TRUE(graph_sum_osc_check(a, b, 200, g.bits()));
    }
}

TEST(UnitUniform, Range) {
    EXPECT_EQ(unit_uniform(0), 0.0);
    EXPECT_LT(unit_uniform(~std::uint64_t{0}), 1.0);
}

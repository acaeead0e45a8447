#include <gtest/gtest.h>

#include <cmath>

#include "aslb/folding.hpp"
#include "support.hpp"

using namespace aslb;
using aslb::testing::Gen;

TEST(AccordionFold, KnownValues) {
    EXPECT_EQ(accordion_fold(0.5, 0.0, 1.0), std::make_pair(0.5, 0));
    EXPECT_EQ(accordion_fold(1.25, 0.0, 1.0), std::make_pair(0.75, 1));
    EXPECT_EQ(accordion_fold(-0.25, 0.0, 1.0), std::make_pair(0.25, 1));
    EXPECT_EQ(accordion_fold(2.5, 0.0, 1.0), std::make_pair(0.5, 2));
    EXPECT_EQ(accordion_fold(1.0, 0.0, 1.0).second, 0);
}

TEST(AccordionFold, LandsInBandAndIsPeriodicProperty) {
    Gen g(12);
    for (int i = 0; i < 5000; ++i) {
        const double lo = g.real(-2, 2), h = std::ldexp(1.0, static_cast<int>(g.integer(-4, 2)));
        const double y = g.real(-20, 20);
        const auto [v, n] = accordion_fold(y, lo, lo + h);
        ASSERT_GE(v, lo);
        ASSERT_LE(v, lo + h);
        // the fold is a triangle wave of period 2h
        const double u = std::fmod(std::abs(y - lo), 2 * h);
        EXPECT_NEAR(v, lo + (u <= h ? u : 2 * h - u), 1e-9);
        EXPECT_LE(n, static_cast<int>(std::abs(y - lo) / h) + 2);
    }
}

TEST(FoldRectangle, MatchesSequentialArcReflectionProperty) {
    Gen g(99);
    for (int trial = 0; trial < 200; ++trial) {
        const auto n = static_cast<std::size_t>(g.integer(1, 500));
        const double lo = g.real(-1, 1), hi = lo + g.real(0.01, 1);
        const auto seg = g.reals(n, lo - 5, hi + 5);
        const FoldResult r = fold_rectangle(seg, {lo, hi});
        int passes = 0;
        const auto oracle = aslb::testing::sequential_arc_reflection(seg, lo, hi, passes);
        ASSERT_EQ(r.values, oracle);
    }
    EXPECT_THROW(fold_rectangle(std::vector<double>{1.0}, {1.0, 1.0}), Error);
}

TEST(LocalMaxima, TentPeak) {
    const SampledFunction f = sample_function(tent_generator(), 0, 1, 101);
    const auto m = find_local_maxima(f, 2);
    ASSERT_EQ(m.size(), 1u);
    EXPECT_NEAR(m[0], 0.5, 1e-12);
    const Generator g = tent_generator();
    const auto refined = find_local_maxima(sample_function(g, 0, 1, 100), 1, &g);
    ASSERT_EQ(refined.size(), 1u);
    EXPECT_NEAR(refined[0], 0.5, 1e-9);
}

TEST(DeltaRadius, NearestHigherSampleOrEdge) {
    const SampledFunction f(0, 1, 1.0 / 6, {0, 1, 0, 0.5, 0, 2, 0});
    const DeltaRadius d = delta_radius(f, 1.0 / 6);
    EXPECT_NEAR(d.delta, 1.0 / 6, 1e-15);  // domain edge on the left
    const DeltaRadius e = delta_radius(f, 0.5);
    EXPECT_NEAR(e.delta, 1.0 / 3, 1e-15);  // the sample of height 1 two steps left
    EXPECT_THROW(delta_radius(f, 2.0 / 6), Error);
}

TEST(Ulp, StandardAndExtended) {
    EXPECT_EQ(ulp_at(1.0L, Precision::standard), std::ldexp(1.0L, -52));
    EXPECT_EQ(ulp_at(1.0L, Precision::extended), std::ldexp(1.0L, -63));
    EXPECT_EQ(parse_precision("double"), Precision::standard);
    EXPECT_THROW(parse_precision("quad"), Error);
}

TEST(FunctionSource, InterpolatesWithoutGenerator) {
    const FunctionSource src(SampledFunction(0, 1, 0.5, {0, 1, 0}));
    EXPECT_EQ(src.eval(0.25L, Precision::standard), 0.5L);
    EXPECT_EQ(src.eval(1.0L, Precision::standard), 0.0L);
    EXPECT_THROW(src.eval(1.5L, Precision::standard), Error);
    EXPECT_EQ(src.argument_quantum(0.3L, Precision::standard), 0.5L);
}

namespace {

struct TakagiFold {
    TakagiSpec spec;
    FunctionSource source;
    HolderWitness witness;

    static TakagiFold make() {
        TakagiSpec t;
        t.a = std::sqrt(0.5);
        const Generator g = takagi_generator(t);
        FunctionSource src(sample_function(g, 0, 1, 4097), g);
        WitnessEstimateOptions wo;
        wo.pairs_per_scale = 64;
        wo.intervals_per_scale = 32;
        const HolderWitness w = estimate_witness(src, t.alpha(), 0.1, wo);
        return {t, std::move(src), w};
    }
};

}  // namespace

TEST(Folding, PlanIsNestedAndInvariantsHold) {
    const TakagiFold tf = TakagiFold::make();
    FoldOptions opt;
    opt.witness_trials = 200;
    const FoldedFunction ff = run_folding(tf.source, tf.witness, 0.3, 2, opt);
    const auto& sq = ff.plan().squares;
    ASSERT_EQ(sq.size(), 2u);
    EXPECT_LT(sq[1].delta, sq[0].delta);
    EXPECT_GE(sq[1].f_m - sq[1].delta, sq[0].f_m - sq[0].delta);
    EXPECT_LE(sq[1].f_m + sq[1].delta, sq[0].f_m + sq[0].delta);
    const FoldInvariants inv = check_invariants(ff, tf.witness);
    EXPECT_TRUE(inv.all());
    for (const auto& f : inv.failures) ADD_FAILURE() << f;

    // outside every span the folded function is the original one
    const SampledFunction folded = ff.to_sampled();
    for (std::size_t i = 0; i < folded.size(); ++i) {
        if (ff.square_at(folded.t(i)) < 0) {
            ASSERT_EQ(folded.value(i), ff.base().value(i));
        } else {
            const Band b = sq[static_cast<std::size_t>(ff.square_at(folded.t(i)))].band();
            ASSERT_TRUE(b.contains(folded.value(i)) || std::abs(folded.value(i) - b.hi) < 1e-15 ||
                        std::abs(folded.value(i) - b.lo) < 1e-15);
        }
    }
}

TEST(Folding, Rejections) {
    const TakagiFold tf = TakagiFold::make();
    EXPECT_THROW(plan_squares(tf.source, tf.witness, 0.3, 0), Error);
    EXPECT_THROW(plan_squares(tf.source, tf.witness, 0.6, 1), Error);
    try {
        plan_squares(tf.source, tf.witness, 0.3, depth_cap(Precision::standard) + 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::depth_exceeded);
    }
}

TEST(Folding, VerificationOnSmallInstance) {
    const TakagiFold tf = TakagiFold::make();
    FoldOptions opt;
    opt.witness_trials = 100;
    const FoldedFunction ff = run_folding(tf.source, tf.witness, 0.3, 1, opt);
    VerifyOptions vo;
    vo.holder_pairs = 2000;
    vo.column_cap = 512;
    vo.sampled_columns = 256;
    const double thetas[] = {0.3, 0.4};
    const FoldVerification v = verify_fold(ff, tf.witness, thetas, vo);
    EXPECT_LE(v.holder.max_ratio, 3.0);
    EXPECT_EQ(v.columns.size(), 2u);
    for (const auto& c : v.columns) {
        EXPECT_NE(c.osc_status, CheckStatus::fail);
        EXPECT_NE(c.count_status, CheckStatus::fail);
    }
}

TEST(Witness, EstimateIsConsistent) {
    const TakagiFold tf = TakagiFold::make();
    EXPECT_GT(tf.witness.C_upper, tf.witness.c_lower);
    EXPECT_GT(tf.witness.c_lower, 0);
    const WitnessCheck c = check_witness(tf.source, tf.witness, 200, 3);
    // c is an empirical minimum, so an independent sample may dip slightly below it
    EXPECT_GT(c.worst_lower_ratio, 0.8);
    EXPECT_EQ(c.lower_ok, c.worst_lower_ratio >= 1);
    EXPECT_LT(c.worst_upper_ratio, 1.5);
}

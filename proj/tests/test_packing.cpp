#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "aslb/packing.hpp"
#include "support.hpp"

using namespace aslb;
using aslb::testing::Gen;

namespace {

// plain sequence written out independently of ZigzagSpec
double a_plain(double s, long long m) { return std::pow(static_cast<double>(m), 1 - s); }

long long brute_force_violations(const PackingSet& ps) {
    long long bad = 0;
    const auto& p = ps.points;
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = i + 1; j < p.size(); ++j)
            if (std::hypot(p[i].x - p[j].x, p[i].y - p[j].y) <= ps.r_n) ++bad;
    return bad;
}

}  // namespace

TEST(Packing, DefaultConstant) {
    EXPECT_NEAR(default_c0(3), std::pow(2.0, 1.0 / 6) / 2, 1e-15);
    EXPECT_NEAR(default_c0(2.5), std::pow(1.5 / std::sqrt(2.0), 0.4) / 2, 1e-15);
}

TEST(Packing, SmallInstanceFromFirstPrinciples) {
    const double s = 3, theta = 0.5;
    const PackingSet ps = build_packing(s, theta, 10, default_c0(s), ZigzagVariant::plain);
    EXPECT_DOUBLE_EQ(ps.R_n, 0.01);
    EXPECT_NEAR(ps.r_n, 1e-4, 1e-19);
    EXPECT_EQ(ps.N_n % 2, 0);
    long long total = 0;
    for (const auto& [m, M] : ps.M) {
        const double am = a_plain(s, m), an = a_plain(s, m + 1);
        const double L = std::hypot(am - an, am + an);
        EXPECT_EQ(M, static_cast<long long>(std::ceil(L / ps.r_n))) << m;
        EXPECT_GT(L / static_cast<double>(M - 1), ps.r_n);
        total += M;
    }
    EXPECT_EQ(static_cast<long long>(ps.points.size()), total);
    EXPECT_EQ(brute_force_violations(ps), 0);

    const PackingAudit a = verify_packing(ps);
    EXPECT_TRUE(a.pass());
    EXPECT_TRUE(a.exact_recheck);
    EXPECT_GT(a.min_pairwise_distance, ps.r_n);
    EXPECT_EQ(a.cardinality, total);
    EXPECT_NEAR(a.empirical_gamma, std::log(static_cast<double>(total)) / std::log(ps.R_n / ps.r_n), 1e-15);
    EXPECT_EQ(a.target_gamma, 1.5);
}

TEST(Packing, EndpointsAreVertices) {
    const PackingSet ps = build_packing(3, 0.5, 12, default_c0(3), ZigzagVariant::plain);
    const ZigzagSpec z = ps.zigzag();
    for (const auto& w : ps.points) {
        if (w.k == 1) {
            EXPECT_EQ(w.x, z.vertex(w.m).first);
            EXPECT_EQ(w.y, z.vertex(w.m).second);
        }
    }
    const auto [qx, qy] = z.vertex(ps.points.back().m + 1);
    EXPECT_EQ(ps.points.back().x, qx);
    EXPECT_EQ(ps.points.back().y, qy);
}

TEST(Packing, SeparationAgainstBruteForceProperty) {
    Gen g(41);
    for (int trial = 0; trial < 8; ++trial) {
        const double s = g.real(2.2, 4);
        const long long n = g.integer(8, 20);
        // pick log(R_n / r_n) = (s - 1)(1/theta - 1) log n directly so the point set stays small
        const double log_ratio = g.real(std::log(25.0), std::log(120.0));
        const double theta = 1 / (1 + log_ratio / ((s - 1) * std::log(static_cast<double>(n))));
        PackingSet ps;
        try {
            ps = build_packing(s, theta, n, default_c0(s), ZigzagVariant::plain);
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::infeasible);
            continue;
        }
        if (ps.points.size() > 6000) continue;
        const PackingAudit a = audit_packing(ps);
        EXPECT_EQ(a.separated, brute_force_violations(ps) == 0) << s << ' ' << theta << ' ' << n;
        EXPECT_TRUE(a.on_segments);
        EXPECT_TRUE(a.in_square);
    }
}

TEST(Packing, AuditCatchesPlantedViolation) {
    PackingSet ps = build_packing(3, 0.5, 10, default_c0(3), ZigzagVariant::plain);
    ps.points[5].x = ps.points[4].x + 0.5 * ps.r_n * (ps.points[5].x - ps.points[4].x) /
                                          std::hypot(ps.points[5].x - ps.points[4].x, ps.points[5].y - ps.points[4].y);
    ps.points[5].y = ps.points[4].y + 0.5 * ps.r_n * (ps.points[5].y - ps.points[4].y) /
                                          std::hypot(ps.points[5].x - ps.points[4].x, ps.points[5].y - ps.points[4].y);
    const PackingAudit a = audit_packing(ps);
    EXPECT_FALSE(a.separated);
    ASSERT_FALSE(a.violations.empty());
    try {
        verify_packing(ps);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::audit_failure);
        EXPECT_NE(std::string(e.what()).find("distance <= r_n"), std::string::npos);
    }
    ps.points.pop_back();
    EXPECT_FALSE(audit_packing(ps).cardinality_matches);
}

TEST(Packing, Rejections) {
    EXPECT_THROW(build_packing(3, 0.7, 10, 0.5, ZigzagVariant::plain), Error);
    EXPECT_THROW(build_packing(2, 0.3, 10, 0.5, ZigzagVariant::plain), Error);
    try {
        build_packing(3, 0.5, 1, default_c0(3), ZigzagVariant::plain);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::infeasible);
    }
}

TEST(Packing, GammaTrend) {
    const long long ns[] = {10, 20, 40};
    const PackingTrend t = packing_exponent(3, 0.5, ns, ZigzagVariant::plain, default_c0(3));
    ASSERT_EQ(t.rows.size(), 3u);
    EXPECT_TRUE(t.nondecreasing);
    EXPECT_TRUE(t.below_target);
    for (const auto& r : t.rows) EXPECT_TRUE(r.pass);
    const long long bad[] = {20, 10};
    EXPECT_THROW(packing_exponent(3, 0.5, bad, ZigzagVariant::plain, default_c0(3)), Error);
}

TEST(Packing, DefaultN0IsStable) {
    const long long n0 = default_n0(3, 0.5, ZigzagVariant::plain, default_c0(3));
    EXPECT_GE(n0, 1);
    for (long long n = n0; n < n0 + 10; ++n)
        EXPECT_EQ(build_packing(3, 0.5, n, default_c0(3), ZigzagVariant::plain).shrinks, 0) << n;
}

TEST(Packing, LogCorrectedVariant) {
    const PackingSet ps = build_packing(3, 0.5, 30, default_c0(3), ZigzagVariant::log_corrected);
    EXPECT_TRUE(audit_packing(ps).pass());
    const double lg = std::log(30.0);
    EXPECT_NEAR(ps.R_n, 1 / (900 * lg * lg), 1e-18);
}

TEST(Orlicz, InverseRoundTripProperty) {
    Gen g(6);
    for (int i = 0; i < 500; ++i) {
        const double s = g.real(2.1, 6);
        const double t = std::exp(g.real(0, 20));
        const double back = orlicz_phi_inverse(orlicz_phi(t, s), s);
        EXPECT_NEAR(back / t, 1.0, 1e-12);
    }
    EXPECT_EQ(orlicz_phi(1, 3), 0.0);
}

TEST(MvtOffset, SatisfiesMeanValueIdentity) {
    for (auto variant : {ZigzagVariant::plain, ZigzagVariant::log_corrected}) {
        ZigzagSpec z;
        z.s = 3;
        z.variant = variant;
        for (long long m : {5LL, 50LL, 500LL}) {
            const double d = mvt_offset(z, m);
            ASSERT_GT(d, 0);
            ASSERT_LT(d, 1);
            // -a'(x) by central difference of the sequence formula
            const double x = static_cast<double>(m) + d, h = 1e-4;
            auto a = [&](double t) {
                const double base = std::pow(t, 1 - z.s);
                return variant == ZigzagVariant::plain ? base : base / (std::log(t) * std::log(t));
            };
            const double deriv = -(a(x + h) - a(x - h)) / (2 * h);
            EXPECT_NEAR(deriv / z.eps(m), 1.0, 1e-6) << m;
        }
    }
}

TEST(Borderline, ConstraintsAreTight) {
    for (long long n : {60LL, 100LL, 400LL}) {
        const BorderlineParams b = borderline_params(3, 0.5, n);
        EXPECT_EQ(b.N_n % 2, 0);
        EXPECT_LE(static_cast<double>(b.N_n), b.bound_1);
        if (b.N_n >= 4) {
            EXPECT_LT(static_cast<double>(b.N_n), b.bound_2);
        }
        EXPECT_TRUE(b.binding == "M>=2" || b.binding == "separation");
        EXPECT_TRUE(static_cast<double>(b.N_n + 2) > b.bound_1 || static_cast<double>(b.N_n + 2) >= b.bound_2);
        EXPECT_GT(b.eta_n, 0);
    }
}

TEST(RatioCheck, PlainAndLogCorrected) {
    ZigzagSpec z;
    z.s = 3;
    const RatioCheck r = ratio_check(z, 5000);
    EXPECT_TRUE(r.monotone);
    EXPECT_TRUE(r.pass);
    EXPECT_EQ(r.threshold_m, 200);
    EXPECT_GT(r.min_ratio_above, 0.99);
}

TEST(PackingCsv, HeaderAndRows) {
    const PackingSet ps = build_packing(3, 0.5, 10, default_c0(3), ZigzagVariant::plain);
    std::ostringstream os;
    write_packing_csv(os, ps);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, "m,k,x,y");
    std::size_t rows = 0;
    while (std::getline(is, line)) ++rows;
    EXPECT_EQ(rows, ps.points.size());
}

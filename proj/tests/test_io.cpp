#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "aslb/io.hpp"
#include "aslb/json.hpp"
#include "support.hpp"

using namespace aslb;
using aslb::testing::Gen;

namespace {

void expect_identical(const SampledFunction& a, const SampledFunction& b) {
    ASSERT_TRUE(a.same_grid(b));
    EXPECT_EQ(a.meta(), b.meta());
    for (std::size_t i = 0; i < a.size(); ++i) ASSERT_EQ(a.value(i), b.value(i));
}

}  // namespace

TEST(Io, CsvAndBinaryRoundTripProperty) {
    Gen g(77);
    for (int trial = 0; trial < 30; ++trial) {
        const auto n = static_cast<std::size_t>(g.integer(2, 400));
        auto v = g.reals(n, -1e3, 1e3);
        v[0] = 1e-310;  // subnormal
        v[n - 1] = -0.1;
        const double lo = g.real(-5, 5), step = g.real(1e-4, 1);
        const double hi = lo + step * static_cast<double>(n - 1);
        const SampledFunction f(lo, hi, step, v, {"random", {{"trial", trial}, {"scale", 0.1}}});

        std::stringstream text;
        write_csv(text, f);
        expect_identical(f, read_csv(text));

        std::stringstream bin(std::ios::in | std::ios::out | std::ios::binary);
        write_binary(bin, f);
        expect_identical(f, read_binary(bin));
    }
}

TEST(Io, RejectsCorruptInput) {
    std::stringstream bad("NOPE1xxxxxxxxxxxxxxxx");
    EXPECT_THROW(read_binary(bad), Error);
    std::stringstream truncated;
    write_binary(truncated, SampledFunction(0, 1, 0.5, {1, 2, 3}));
    std::string s = truncated.str();
    s.resize(s.size() - 4);
    std::stringstream cut(s);
    EXPECT_THROW(read_binary(cut), Error);
    std::stringstream text("# aslb sampled function\n0,1\n");
    EXPECT_THROW(read_csv(text), Error);
}

TEST(Io, FormatDouble) {
    EXPECT_EQ(format_double(0.1), "0.10000000000000001");
    EXPECT_EQ(format_double(2), "2");
    EXPECT_EQ(std::stod(format_double(1.0 / 3)), 1.0 / 3);
}

TEST(Json, NonFiniteNumbers) {
    EXPECT_EQ(number(INFINITY), "inf");
    EXPECT_EQ(number(-INFINITY), "-inf");
    EXPECT_EQ(number(NAN), "nan");
    EXPECT_EQ(number(1.5), 1.5);
}

TEST(Json, FoldPlanRoundTripIsExact) {
    FoldPlan p;
    p.theta0 = 0.3;
    p.precision = Precision::extended;
    p.orientation = -1;
    FoldSquare q;
    q.m = 0.5L + 1e-25L;
    q.delta = 1e-20L / 3;
    q.f_m = 0.9999L;
    q.orientation = -1;
    q.frame = {q.m, q.f_m, q.delta};
    p.squares = {q, q};
    const json j = p;
    const FoldPlan back = json::parse(j.dump()).get<FoldPlan>();
    ASSERT_EQ(back.squares.size(), 2u);
    EXPECT_EQ(back.squares[0].m, q.m);
    EXPECT_EQ(back.squares[0].delta, q.delta);
    EXPECT_EQ(back.squares[0].f_m, q.f_m);
    EXPECT_EQ(back.precision, Precision::extended);
    EXPECT_EQ(back.orientation, -1);
}

TEST(Json, CertificateRoundTrip) {
    CoHolderCertificate c;
    c.params = {0.4, 0.1, 0.05};
    c.c = 0.123;
    c.theta0 = c.params.theta0();
    CertifiedSquare s;
    s.square = {0.3, 0.2, 0.1};
    s.intervals = {{0.25, 0.3}, {0.31, 0.32}};
    s.total_length = 0.06;
    s.min_length = 0.01;
    s.osc_constant = 0.5;
    s.worst_J = {0.25, 0.26};
    c.squares = {s};
    const CoHolderCertificate back = json::parse(json(c).dump()).get<CoHolderCertificate>();
    EXPECT_EQ(back.c, c.c);
    EXPECT_EQ(back.params.eta, 0.1);
    ASSERT_EQ(back.squares.size(), 1u);
    EXPECT_EQ(back.squares[0].intervals[1].hi, 0.32);
    EXPECT_EQ(back.squares[0].square.half_side, 0.1);

    const HolderWitness w{0.5, 2.5, 0.25, 0.1};
    const HolderWitness wb = json(w).get<HolderWitness>();
    EXPECT_EQ(wb.C_upper, 2.5);
    EXPECT_EQ(wb.c_lower, 0.25);
}

TEST(Json, ReportsSerializeDeterministically) {
    const PackingAudit a;
    EXPECT_EQ(json(a).dump(), json(a).dump());
    const auto keys = json(FunctionMeta{"takagi", {{"b", 2}, {"a", 0.5}}}).dump();
    EXPECT_EQ(keys, R"({"family":"takagi","params":{"a":0.5,"b":2.0}})");
}

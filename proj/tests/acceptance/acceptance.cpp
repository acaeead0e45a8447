// Acceptance suite: one PASS/FAIL line per criterion; exit status 1 if any fails.
#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "aslb/coholder.hpp"
#include "aslb/covering.hpp"
#include "aslb/folding.hpp"
#include "aslb/funcspace.hpp"
#include "aslb/io.hpp"
#include "aslb/json.hpp"
#include "aslb/packing.hpp"
#include "aslb/parallel.hpp"
#include "support.hpp"

using namespace aslb;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
    json artifact;
};

struct Criterion {
    int id;
    double budget_seconds;  // 0: no runtime limit
    std::function<Outcome()> run;
};

int jobs = 1;

std::string fixed(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

SampledFunction takagi_half(std::size_t samples) {
    TakagiSpec t;
    t.a = std::sqrt(0.5);
    return sample_function(takagi_generator(t), 0, 1, samples);
}

Outcome box_dimension_takagi() {
    const SampledFunction f = takagi_half((std::size_t{1} << 20) + 1);
    const auto ladder = geometric_ladder(std::ldexp(1.0, -6), std::ldexp(1.0, -14), 9);
    const BoxDimensionResult res = box_dimension(f, ladder);
    Outcome o;
    o.pass = std::abs(res.estimate - 1.5) <= 0.05;
    o.detail = "estimate " + fixed(res.estimate) + " (target 1.5 +- 0.05, R^2 " + fixed(res.fit.r_squared, 5) +
               ", 2^20+1 samples)";
    o.artifact = res;
    return o;
}

Outcome holder_audit() {
    const double thetas[] = {0.1, 0.2, 0.3, 0.4};
    AuditOptions opt;
    opt.n_centers = 20;
    opt.n_ladders = 4;
    opt.tolerance = 0.05;
    opt.jobs = jobs;
    const std::size_t n = (std::size_t{1} << 20) + 1;

    const SampledFunction tk = takagi_half(n);
    const UpperBoundAudit a = audit_upper_bound(tk, Regularity::holder(0.5), thetas, opt);

    WeierstrassSpec ws;
    ws.b = 7;
    ws.a = 1 / std::sqrt(7.0);
    const SampledFunction wf = sample_function(weierstrass_generator(ws), 0, 1, n);
    const UpperBoundAudit b = audit_upper_bound(wf, Regularity::holder(ws.alpha()), thetas, opt);

    double worst_excess = -INFINITY;
    for (const auto* au : {&a, &b})
        for (const auto& r : au->rows) worst_excess = std::max(worst_excess, r.worst_exponent - r.bound);
    Outcome o;
    o.pass = a.pass && b.pass;
    o.detail = std::string("takagi ") + (a.pass ? "ok" : "VIOLATION") + ", weierstrass " +
               (b.pass ? "ok" : "VIOLATION") + "; worst exponent - bound = " + fixed(worst_excess) +
               " (allowed 0.05), 20 centers x 4 ladders";
    o.artifact = {{"takagi", a}, {"weierstrass", b}};
    return o;
}

Outcome folding_certificates() {
    TakagiSpec t;
    t.a = std::sqrt(0.5);
    t.truncation_tol = 1e-18;
    const Generator g = takagi_generator(t);
    const FunctionSource src(sample_function(g, 0, 1, (std::size_t{1} << 16) + 1), g);
    WitnessEstimateOptions wo;
    const HolderWitness w = estimate_witness(src, t.alpha(), 0.1, wo);
    FoldOptions fo;
    fo.plan.precision = Precision::extended;
    const FoldedFunction ff = run_folding(src, w, 0.3, 2, fo);
    const FoldInvariants inv = check_invariants(ff, w);
    VerifyOptions vo;
    vo.holder_pairs = 100000;
    vo.jobs = jobs;
    const double thetas[] = {0.2, 0.3, 0.4};
    const FoldVerification v = verify_fold(ff, w, thetas, vo);

    bool all_pass = true;
    double worst_osc = INFINITY, worst_count = INFINITY;
    for (const auto& c : v.columns) {
        all_pass = all_pass && c.osc_status == CheckStatus::pass && c.count_status == CheckStatus::pass;
        if (c.osc_status == CheckStatus::pass) worst_osc = std::min(worst_osc, c.min_osc_ratio / c.threshold_osc);
        if (c.count_status == CheckStatus::pass) worst_count = std::min(worst_count, c.count / c.threshold_count);
    }
    Outcome o;
    o.pass = v.holder.max_ratio <= 3 && v.holder.pairs >= 100000 && all_pass && inv.all() && v.columns.size() == 6;
    o.detail = "(a) holder ratio " + fixed(v.holder.max_ratio) + " <= 3 on " + std::to_string(v.holder.pairs) +
               " pairs; (b) min osc margin x" + fixed(worst_osc, 2) + "; (c) min count margin x" +
               fixed(worst_count, 2) + "; " + std::to_string(v.unresolvable) + " unresolvable";
    o.artifact = {{"witness", w}, {"plan", ff.plan()}, {"invariants", inv}, {"verification", v}};
    return o;
}

Outcome fold_equivalence() {
    aslb::testing::Gen g(2024);
    int exact = 0;
    json sizes = json::array();
    for (int k = 0; k < 50; ++k) {
        const auto n = static_cast<std::size_t>(g.integer(1, 500));
        const double lo = g.real(-1, 1), hi = lo + g.real(1e-3, 2);
        const double spread = g.real(0, 20) * (hi - lo);
        const auto seg = g.reals(n, lo - spread, hi + spread);
        const FoldResult pointwise = fold_rectangle(seg, {lo, hi});
        int passes = 0;
        const auto literal = aslb::testing::sequential_arc_reflection(seg, lo, hi, passes);
        exact += pointwise.values == literal;
        sizes.push_back({{"samples", n}, {"arc_passes", passes}, {"max_reflections", pointwise.reflections}});
    }
    Outcome o;
    o.pass = exact == 50;
    o.detail = std::to_string(exact) + "/50 instances bit-identical";
    o.artifact = sizes;
    return o;
}

Outcome zigzag_spectrum() {
    const long long ns[] = {10, 20, 40, 80};
    PackingAuditOptions ao;
    ao.jobs = jobs;
    const PackingTrend trend = packing_exponent(3, 0.5, ns, ZigzagVariant::plain, default_c0(3), ao);

    ZigzagSpec z;
    z.s = 3;
    z.m_max = 20000;
    const SampledFunction f = sample_function(zigzag_generator(z), 0, 1, (std::size_t{1} << 20) + 1);
    const double th[] = {0.5};
    AuditOptions opt;
    opt.jobs = jobs;
    opt.tolerance = 0.05;
    const UpperBoundAudit spread = audit_upper_bound(f, Regularity::sobolev(2), th, opt);
    opt.center_lo = 0;
    opt.center_hi = 0.01;  // the accumulation point of the zigzag
    const UpperBoundAudit origin = audit_upper_bound(f, Regularity::sobolev(2), th, opt);

    std::string gammas;
    for (const auto& r : trend.rows) gammas += (gammas.empty() ? "" : ", ") + fixed(r.gamma);
    const double worst = std::max(spread.rows[0].worst_exponent, origin.rows[0].worst_exponent);
    Outcome o;
    o.pass = trend.nondecreasing && trend.best_gamma >= 1.40 && spread.pass && origin.pass;
    o.detail = "gamma " + gammas + (trend.nondecreasing ? " nondecreasing" : " NOT monotone") + ", best " +
               fixed(trend.best_gamma) + " (>= 1.40, target 1.5); audit worst " + fixed(worst) + " <= 1.55";
    o.artifact = {{"trend", trend}, {"audit_spread", spread}, {"audit_origin", origin}};
    return o;
}

Outcome packing_separation() {
    PackingAuditOptions ao;
    ao.exact_recheck = true;
    ao.jobs = jobs;
    long long violations = 0, mismatches = 0, total = 0;
    double worst_margin = INFINITY;
    json rows = json::array();
    for (long long n = 10; n <= 40; ++n) {
        const PackingSet ps = build_packing(3, 0.5, n, default_c0(3), ZigzagVariant::plain);
        const PackingAudit a = audit_packing(ps, ao);
        long long sum_M = 0;
        for (const auto& [m, M] : ps.M) sum_M += M;
        violations += static_cast<long long>(a.violations.size()) + (a.separated ? 0 : 1);
        mismatches += static_cast<long long>(ps.points.size()) != sum_M;
        total += a.cardinality;
        worst_margin = std::min(worst_margin, a.min_pairwise_distance / ps.r_n);
        rows.push_back({{"n", n}, {"N_n", ps.N_n}, {"cardinality", a.cardinality}, {"sum_M", sum_M},
                        {"min_distance", a.min_pairwise_distance}, {"r_n", ps.r_n},
                        {"rechecked_pairs", a.rechecked_pairs}, {"pass", a.pass()}});
    }
    Outcome o;
    o.pass = violations == 0 && mismatches == 0;
    o.detail = "n = 10..40: " + std::to_string(total) + " points, " + std::to_string(violations) +
               " violations, " + std::to_string(mismatches) + " cardinality mismatches, min d / r_n = " +
               fixed(worst_margin, 6);
    o.artifact = rows;
    return o;
}

Outcome energy_dichotomy() {
    const long long m_max = 1000000;
    ZigzagSpec z;
    z.s = 3;
    const EnergyResult a = p_energy(z, 1.5, m_max);
    const EnergyResult b = p_energy(z, 2, m_max);
    ZigzagSpec lc = z;
    lc.variant = ZigzagVariant::log_corrected;
    const EnergyResult c = p_energy(lc, 2, m_max);

    // S_m linear in log m over the tail window
    std::vector<double> x, y;
    for (long long m = m_max / 10; m <= m_max; m += m_max / 1000) {
        x.push_back(std::log(static_cast<double>(m)));
        y.push_back(b.partial_sums[static_cast<std::size_t>(m - b.m_first)]);
    }
    const LineFit fit = fit_line(x, y);
    Outcome o;
    o.pass = a.verdict == EnergyVerdict::converging && b.verdict == EnergyVerdict::diverging &&
             fit.r_squared >= 0.99 && c.verdict == EnergyVerdict::converging;
    o.detail = "q=1.5 " + to_string(a.verdict) + " (tail exponent " + fixed(a.tail_exponent, 3) + "); q=2 " +
               to_string(b.verdict) + ", S_m vs log m R^2 " + fixed(fit.r_squared, 6) + "; log-corrected q=2 " +
               to_string(c.verdict);
    auto strip = [](EnergyResult r) {
        r.partial_sums.clear();
        return r;
    };
    o.artifact = {{"q1.5", strip(a)}, {"q2", strip(b)}, {"log_fit", fit}, {"log_corrected_q2", strip(c)}};
    return o;
}

Outcome bv_properties() {
    double worst = 0;
    int rot_pass = 0;
    for (int i = 0; i < 20; ++i) {
        const SampledFunction f = random_staircase(4097, 50, 1000 + static_cast<std::uint64_t>(i), i % 2 == 1);
        const RotationCheck c = rotate_monotone_check(f);
        worst = std::max(worst, c.max_abs_slope);
        rot_pass += c.pass && c.max_abs_slope <= 1 + 1e-9;
    }
    int sum_pass = 0;
    for (int i = 0; i < 100; ++i) {
        const SampledFunction g = random_walk(4097, 1.0, 2 * static_cast<std::uint64_t>(i) + 1);
        const SampledFunction h = random_walk(4097, 1.0, 2 * static_cast<std::uint64_t>(i) + 2);
        sum_pass += graph_sum_osc_check(g, h, 100, static_cast<std::uint64_t>(i));
    }
    Outcome o;
    o.pass = rot_pass == 20 && sum_pass == 100;
    o.detail = "rotation max slope " + format_double(worst) + " on " + std::to_string(rot_pass) +
               "/20 staircases; subadditivity on " + std::to_string(sum_pass * 100) + "/10000 triples";
    o.artifact = {{"max_slope", worst}, {"rotation_pass", rot_pass}, {"sum_pairs_pass", sum_pass}};
    return o;
}

Outcome coholder_consistency() {
    int equal = 0, tested = 0;
    bool at_theta0 = true;
    json rows = json::array();
    for (double alpha : {0.5, 0.3, 0.8}) {
        const CoHolderParams p{alpha, 0, 0};
        for (int i = 1; i <= 10; ++i) {
            const double theta = alpha * i / 11;
            const double lower = lower_spectrum_bound(p, theta);
            const double upper = Regularity::holder(alpha).bound(theta);
            equal += lower == upper;
            ++tested;
            rows.push_back({{"alpha", alpha}, {"theta", theta}, {"lower", lower}, {"holder_bound", upper}});
        }
        at_theta0 = at_theta0 && lower_spectrum_bound(p, p.theta0()) == 2.0;
    }
    Outcome o;
    o.pass = equal == tested && at_theta0;
    o.detail = std::to_string(equal) + "/" + std::to_string(tested) + " grid values equal; theta0 gives " +
               (at_theta0 ? "exactly 2" : "NOT 2");
    o.artifact = rows;
    return o;
}

std::vector<Criterion> criteria() {
    return {{1, 60, box_dimension_takagi},   {2, 300, holder_audit},       {3, 120, folding_certificates},
            {4, 0, fold_equivalence},        {5, 120, zigzag_spectrum},    {6, 0, packing_separation},
            {7, 30, energy_dichotomy},       {8, 0, bv_properties},        {9, 0, coholder_consistency}};
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"aslb acceptance suite"};
    std::string out = "acceptance-out";
    std::vector<int> only;
    bool rerun = true;
    app.add_option("--out", out, "artifact directory");
    app.add_option("--only", only, "run only these criteria (10 always reruns the selection)");
    app.add_flag("!--no-rerun", rerun, "skip the determinism rerun (criterion 10)");
    CLI11_PARSE(app, argc, argv);
    jobs = default_jobs();

    fs::create_directories(out);
    int failures = 0;
    std::vector<std::pair<Criterion, std::string>> done;
    for (const auto& c : criteria()) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("error: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = c.budget_seconds == 0 || secs < c.budget_seconds;
        const bool pass = o.pass && in_time;
        failures += !pass;
        std::string timing = fixed(secs, 1) + " s";
        if (c.budget_seconds > 0) timing += " of " + fixed(c.budget_seconds, 0) + " s";
        std::cout << "criterion " << c.id << ": " << (pass ? "PASS" : "FAIL") << "  " << o.detail << " [" << timing
                  << "]" << std::endl;
        const std::string text = o.artifact.dump(2) + "\n";
        std::ofstream(fs::path(out) / ("criterion_" + std::to_string(c.id) + ".json"), std::ios::binary) << text;
        done.emplace_back(c, text);
    }

    if (rerun && (only.empty() || std::find(only.begin(), only.end(), 10) != only.end() || !done.empty())) {
        int identical = 0;
        std::string differing;
        for (const auto& [c, first] : done) {
            Outcome o;
            try {
                o = c.run();
            } catch (const std::exception&) {
            }
            const std::string second = o.artifact.dump(2) + "\n";
            const std::string on_disk = read_file(fs::path(out) / ("criterion_" + std::to_string(c.id) + ".json"));
            if (second == first && on_disk == first)
                ++identical;
            else
                differing += " " + std::to_string(c.id);
        }
        const bool pass = identical == static_cast<int>(done.size());
        failures += !pass;
        std::cout << "criterion 10: " << (pass ? "PASS" : "FAIL") << "  " << identical << "/" << done.size()
                  << " artifacts byte-identical on rerun" << (differing.empty() ? "" : ", differing:" + differing)
                  << std::endl;
    }
    return failures == 0 ? 0 : 1;
}

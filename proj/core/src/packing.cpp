#include "aslb/packing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <tuple>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "aslb/io.hpp"
#include "aslb/parallel.hpp"

namespace aslb {

namespace {

using big = boost::multiprecision::cpp_bin_float_50;

constexpr double kInf = std::numeric_limits<double>::infinity();

void validate_params(double s, double theta) {
    require(std::isfinite(s) && s > 2, ErrorKind::invalid_argument, "packing: s must exceed 2");
    require(theta > 0 && theta < (s - 1) / s, ErrorKind::invalid_argument,
            "packing: theta must lie in (0, (s-1)/s) = (0, " + format_double((s - 1) / s) + ")");
}

double segment_length(const ZigzagSpec& z, long long m) { return std::hypot(z.eps(m), z.a(m) + z.a(m + 1)); }

long long points_on_segment(const ZigzagSpec& z, long long m, double r) {
    return static_cast<long long>(std::ceil(segment_length(z, m) / r));
}

long long initial_N(double s, double theta, long long n, double c0) {
    auto N = static_cast<long long>(std::floor(c0 * std::pow(static_cast<double>(n), (s - 1) / (s * theta))));
    if (N % 2 != 0) --N;
    return N;
}

/// Empty when N satisfies both constraints, else the name of the one failing.
std::string failed_constraint(const ZigzagSpec& z, long long n, long long N, double r) {
    if (N < 2) return "N>=2";
    if (points_on_segment(z, n + N - 2, r) < 2) return "M>=2";
    // a single segment has no cross-segment pairs
    if (N >= 4 && !(z.eps(n + N - 3) > r)) return "separation";
    return "";
}

/// -a'(x) for the sequence.
double neg_derivative(const ZigzagSpec& z, double x) {
    const double base = (z.s - 1) * std::pow(x, -z.s);
    if (z.variant == ZigzagVariant::plain) return base;
    const double lg = std::log(x);
    return base / (lg * lg) * (1 + 2 / ((z.s - 1) * lg));
}

}  // namespace

ZigzagSpec PackingSet::zigzag() const {
    ZigzagSpec z;
    z.s = s;
    z.variant = variant;
    z.m_max = n + std::max<long long>(N_n, 2);
    return z;
}

double default_c0(double s) { return std::pow(std::min((s - 1) / std::sqrt(2.0), s - 1), 1 / s) / 2; }

PackingSet build_packing(double s, double theta, long long n, double c0, ZigzagVariant variant) {
    validate_params(s, theta);
    require(c0 > 0 && std::isfinite(c0), ErrorKind::invalid_argument, "packing: c0 must be positive");
    PackingSet ps;
    ps.s = s;
    ps.theta = theta;
    ps.n = n;
    ps.variant = variant;
    ps.c0 = c0;
    ZigzagSpec z;
    z.s = s;
    z.variant = variant;
    require(n >= z.first_index(), ErrorKind::invalid_argument,
            "packing: n must be >= " + std::to_string(z.first_index()));
    ps.R_n = z.a(n);
    ps.r_n = std::pow(ps.R_n, 1 / theta);

    long long N = initial_N(s, theta, n, c0);
    ps.N_initial = N;
    for (std::string why; N >= 2 && !(why = failed_constraint(z, n, N, ps.r_n)).empty(); N -= 2) {
        ps.binding = why;
        ++ps.shrinks;
    }
    require(N >= 2, ErrorKind::infeasible,
            "packing: no even N(n) >= 2 satisfies the constraints at n = " + std::to_string(n) +
                " (n is below n0 for these parameters)");
    ps.N_n = N;

    std::vector<long long> offset{0};
    for (long long m = n; m <= n + N - 2; m += 2) {
        const long long M = points_on_segment(z, m, ps.r_n);
        ps.M.emplace_back(m, M);
        offset.push_back(offset.back() + M);
    }
    ps.points.resize(static_cast<std::size_t>(offset.back()));
    parallel_for(ps.M.size(), default_jobs(), [&](std::size_t i) {
        const auto [m, M] = ps.M[i];
        const auto [px, py] = z.vertex(m);
        const auto [qx, qy] = z.vertex(m + 1);
        for (long long k = 1; k <= M; ++k) {
            PackingPoint& w = ps.points[static_cast<std::size_t>(offset[i] + k - 1)];
            w.m = m;
            w.k = k;
            if (k == M) {
                w.x = qx;
                w.y = qy;
                continue;
            }
            const double t = static_cast<double>(k - 1) / static_cast<double>(M - 1);
            w.x = px + t * (qx - px);
            w.y = py + t * (qy - py);
        }
    });
    return ps;
}

long long default_n0(double s, double theta, ZigzagVariant variant, double c0, long long n_limit) {
    validate_params(s, theta);
    ZigzagSpec z;
    z.s = s;
    z.variant = variant;
    int run = 0;
    for (long long n = z.first_index(); n <= n_limit; ++n) {
        const double r = std::pow(z.a(n), 1 / theta);
        if (failed_constraint(z, n, initial_N(s, theta, n, c0), r).empty()) {
            if (++run == 10) return n - 9;
        } else {
            run = 0;
        }
    }
    fail(ErrorKind::infeasible, "packing: no n0 found up to " + std::to_string(n_limit));
}

PackingAudit audit_packing(const PackingSet& ps, const PackingAuditOptions& opt) {
    PackingAudit audit;
    const auto& pts = ps.points;
    const double r = ps.r_n;
    audit.cardinality = static_cast<long long>(pts.size());
    for (const auto& [m, M] : ps.M) audit.sum_M += M;
    audit.cardinality_matches = audit.sum_M == audit.cardinality;
    audit.target_gamma = ps.target_gamma();
    audit.empirical_gamma = pts.empty() ? 0 : std::log(static_cast<double>(pts.size())) / std::log(ps.R_n / r);
    audit.exact_recheck = opt.exact_recheck.value_or(ps.n <= 50);
    auto note = [&](std::size_t i, std::size_t j, double d, std::string what) {
        if (audit.violations.size() < opt.max_violations) audit.violations.push_back({i, j, d, std::move(what)});
    };

    // membership
    const ZigzagSpec z = ps.zigzag();
    const double R_tol = ps.R_n + 4 * std::nextafter(ps.R_n, kInf) - 4 * ps.R_n;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const PackingPoint& w = pts[i];
        if (std::abs(w.x) > R_tol || std::abs(w.y) > R_tol) {
            audit.in_square = false;
            note(i, i, 0, "outside Q(0, R_n)");
        }
        const auto [px, py] = z.vertex(w.m);
        const auto [qx, qy] = z.vertex(w.m + 1);
        const double dx = qx - px, dy = qy - py, L2 = dx * dx + dy * dy;
        const double t = ((w.x - px) * dx + (w.y - py) * dy) / L2;
        const double cross = ((w.x - px) * dy - (w.y - py) * dx) / L2;
        if (std::abs(cross) > 1e-12 || t < -1e-12 || t > 1 + 1e-12) {
            audit.on_segments = false;
            note(i, i, 0, "off segment [z_m, z_m+1]");
        }
    }

    // Pairs within 2r share or neighbour a cell of side 2r. Each segment holds
    // consecutive points at most 2r apart, so the global minimum is among them.
    const double cell = 2 * r;
    std::vector<std::tuple<long long, long long, std::size_t>> keys(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i)
        keys[i] = {static_cast<long long>(std::floor(pts[i].x / cell)), static_cast<long long>(std::floor(pts[i].y / cell)), i};
    std::sort(keys.begin(), keys.end());

    struct Near {
        double d = kInf;
        std::size_t j = 0;
        std::vector<std::size_t> close;  // partners at distance <= r or near a tie
    };
    std::vector<Near> near(pts.size());
    parallel_for(keys.size(), opt.jobs, [&](std::size_t a) {
        const auto [cx, cy, i] = keys[a];
        Near& nb = near[i];
        for (long long gx = cx - 1; gx <= cx + 1; ++gx) {
            for (long long gy = cy - 1; gy <= cy + 1; ++gy) {
                auto lo = std::lower_bound(keys.begin(), keys.end(), std::make_tuple(gx, gy, std::size_t{0}));
                for (auto it = lo; it != keys.end() && std::get<0>(*it) == gx && std::get<1>(*it) == gy; ++it) {
                    const std::size_t j = std::get<2>(*it);
                    if (j <= i) continue;
                    const double d = std::hypot(pts[i].x - pts[j].x, pts[i].y - pts[j].y);
                    if (d < nb.d) {
                        nb.d = d;
                        nb.j = j;
                    }
                    if (d <= r * (1 + 1e-9)) nb.close.push_back(j);
                }
            }
        }
    });

    audit.min_pairwise_distance = kInf;
    std::vector<std::pair<std::size_t, std::size_t>> suspects;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (near[i].d < audit.min_pairwise_distance) {
            audit.min_pairwise_distance = near[i].d;
            audit.closest_pair = {i, near[i].j};
        }
        for (std::size_t j : near[i].close) suspects.emplace_back(i, j);
    }
    if (audit.exact_recheck && audit.min_pairwise_distance < kInf) suspects.push_back(audit.closest_pair);

    const big r2 = big(r) * big(r);
    for (const auto& [i, j] : suspects) {
        const double d = std::hypot(pts[i].x - pts[j].x, pts[i].y - pts[j].y);
        bool violates = d <= r;
        if (audit.exact_recheck) {
            const big ex = big(pts[i].x) - big(pts[j].x), ey = big(pts[i].y) - big(pts[j].y);
            violates = ex * ex + ey * ey <= r2;
            ++audit.rechecked_pairs;
        }
        if (violates) {
            audit.separated = false;
            note(i, j, d, "distance <= r_n");
        }
    }
    return audit;
}

PackingAudit verify_packing(const PackingSet& ps, const PackingAuditOptions& opt) {
    PackingAudit audit = audit_packing(ps, opt);
    if (audit.pass()) return audit;
    std::string msg = "packing audit failed:";
    if (!audit.cardinality_matches)
        msg += " cardinality " + std::to_string(audit.cardinality) + " != sum M " + std::to_string(audit.sum_M) + ";";
    for (const auto& v : audit.violations) {
        const auto& a = ps.points[v.i];
        const auto& b = ps.points[v.j];
        msg += " (m=" + std::to_string(a.m) + ",k=" + std::to_string(a.k) + ")";
        if (v.i != v.j) msg += "-(m=" + std::to_string(b.m) + ",k=" + std::to_string(b.k) + ") d=" + format_double(v.distance);
        msg += " " + v.what + ";";
    }
    fail(ErrorKind::audit_failure, msg);
}

PackingTrend packing_exponent(double s, double theta, std::span<const long long> n_list, ZigzagVariant variant,
                              double c0, const PackingAuditOptions& opt) {
    validate_params(s, theta);
    require(!n_list.empty(), ErrorKind::invalid_argument, "packing exponent: empty n list");
    for (std::size_t i = 1; i < n_list.size(); ++i)
        require(n_list[i] > n_list[i - 1], ErrorKind::invalid_argument, "packing exponent: n list must increase");
    PackingTrend trend;
    trend.s = s;
    trend.theta = theta;
    trend.variant = variant;
    trend.target_gamma = 1 + theta / ((1 - theta) * (s - 1));
    for (long long n : n_list) {
        const PackingSet ps = build_packing(s, theta, n, c0, variant);
        const PackingAudit audit = audit_packing(ps, opt);
        PackingTrendRow row;
        row.n = n;
        row.N_n = ps.N_n;
        row.cardinality = audit.cardinality;
        row.R_n = ps.R_n;
        row.r_n = ps.r_n;
        row.gamma = audit.empirical_gamma;
        row.min_distance = audit.min_pairwise_distance;
        row.c2 = static_cast<double>(audit.cardinality) / std::pow(static_cast<double>(n), (s - 1) / theta + 2 - s);
        row.pass = audit.pass();
        if (!trend.rows.empty() && row.gamma < trend.rows.back().gamma) trend.nondecreasing = false;
        if (!(row.gamma < trend.target_gamma)) trend.below_target = false;
        trend.best_gamma = std::max(trend.best_gamma, row.gamma);
        trend.rows.push_back(row);
    }
    return trend;
}

double orlicz_phi(double t, double s) {
    require(t >= 1, ErrorKind::out_of_range, "orlicz phi: t must be >= 1");
    return t * std::pow(std::log(t), 2 / s);
}

double orlicz_phi_inverse(double y, double s) {
    require(y >= 0 && std::isfinite(y), ErrorKind::out_of_range, "orlicz phi inverse: y must be finite and >= 0");
    if (y == 0) return 1;
    // phi(t) >= t once t >= e, so the root lies below max(y, e)
    double lo = 1, hi = std::max(y, std::exp(1.0));
    while (true) {
        const double mid = lo + (hi - lo) / 2;
        if (mid <= lo || mid >= hi) break;
        (orlicz_phi(mid, s) < y ? lo : hi) = mid;
    }
    return std::abs(orlicz_phi(lo, s) - y) <= std::abs(orlicz_phi(hi, s) - y) ? lo : hi;
}

double mvt_offset(const ZigzagSpec& z, long long m) {
    const double e = z.eps(m);
    const double md = static_cast<double>(m);
    if (z.variant == ZigzagVariant::plain) return std::pow((z.s - 1) / e, 1 / z.s) - md;
    double lo = md, hi = md + 1;  // -a' decreases
    while (true) {
        const double mid = lo + (hi - lo) / 2;
        if (mid <= lo || mid >= hi) break;
        (neg_derivative(z, mid) > e ? lo : hi) = mid;
    }
    return lo - md;
}

BorderlineParams borderline_params(double s, double theta, long long n) {
    validate_params(s, theta);
    require(n >= 2, ErrorKind::invalid_argument, "borderline: n must be >= 2");
    ZigzagSpec z;
    z.s = s;
    z.variant = ZigzagVariant::log_corrected;
    const double nd = static_cast<double>(n), ln = std::log(nd);
    const double growth = std::pow(nd, (s - 1) / (s * theta)) * std::pow(ln, 2 / (s * theta));
    const double c = std::pow((s - 1) / std::sqrt(2.0), 1 / s);
    const double cbar = std::pow(s - 1, 1 / s);
    const double asym = std::pow(nd, (s - 1) / (s * theta)) * std::pow(ln, 2 / s * (1 / theta - 1)) *
                        std::pow(s * theta / (s - 1), 2 / s);
    auto eta_at = [&](double x) { return std::pow(1 + 2 / ((s - 1) * std::log(x)), 1 / s) - 1; };

    auto evaluate = [&](long long N, BorderlineParams& p) -> std::string {
        const long long m1 = n + N - 2;
        p.delta_1 = mvt_offset(z, m1);
        p.eta_n = eta_at(static_cast<double>(m1) + p.delta_1);
        p.phi_inverse_1 = orlicz_phi_inverse(c * growth * (1 + p.eta_n), s);
        p.bound_1 = p.phi_inverse_1 - static_cast<double>(n - 2) - p.delta_1;
        p.asymptotic_1 = c * asym * (1 + p.eta_n);
        const bool ok1 = static_cast<double>(N) <= p.bound_1;
        bool ok2 = true;
        const long long m2 = n + N - 3;
        if (N >= 4) {
            p.delta_2 = mvt_offset(z, m2);
            p.eta_bar_n = eta_at(static_cast<double>(m2) + p.delta_2);
            p.phi_inverse_2 = orlicz_phi_inverse(cbar * growth * (1 + p.eta_bar_n), s);
            p.bound_2 = p.phi_inverse_2 - static_cast<double>(n - 3) - p.delta_2;
            p.asymptotic_2 = cbar * asym * (1 + p.eta_bar_n);
            ok2 = static_cast<double>(N) < p.bound_2;
        }
        if (!ok1) return "M>=2";
        if (!ok2) return "separation";
        return "";
    };

    BorderlineParams best;
    require(evaluate(2, best).empty(), ErrorKind::infeasible,
            "borderline: no even N(n) >= 2 is admissible at n = " + std::to_string(n));
    // admissibility is monotone in N: gallop, then bisect over even N
    long long good = 2, bad = 4;
    BorderlineParams probe;
    while (evaluate(bad, probe).empty()) {
        good = bad;
        bad *= 2;
    }
    while (bad - good > 2) {
        long long mid = good + (bad - good) / 2;
        if (mid % 2 != 0) --mid;
        if (evaluate(mid, probe).empty())
            good = mid;
        else
            bad = mid;
    }
    evaluate(good, best);
    best.N_n = good;
    best.binding = evaluate(good + 2, probe);
    return best;
}

RatioCheck ratio_check(const ZigzagSpec& z, long long m_to) {
    RatioCheck rc;
    rc.threshold_m = static_cast<long long>(std::ceil(100 * (z.s - 1)));
    require(m_to > rc.threshold_m, ErrorKind::invalid_argument,
            "ratio check: m_to must exceed " + std::to_string(rc.threshold_m));
    rc.min_ratio_above = kInf;
    double prev = 0;
    for (long long m = z.first_index(); m <= m_to; ++m) {
        const double ratio = 1 - z.eps(m) / z.a(m);
        if (ratio < prev) rc.monotone = false;
        prev = ratio;
        if (m > rc.threshold_m) rc.min_ratio_above = std::min(rc.min_ratio_above, ratio);
    }
    rc.pass = rc.monotone && rc.min_ratio_above > 0.99;
    return rc;
}

void write_packing_csv(std::ostream& os, const PackingSet& ps) {
    os << "m,k,x,y\n";
    for (const auto& w : ps.points)
        os << w.m << ',' << w.k << ',' << format_double(w.x) << ',' << format_double(w.y) << '\n';
}

}  // namespace aslb

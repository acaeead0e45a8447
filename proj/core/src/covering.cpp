#include "aslb/covering.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "aslb/parallel.hpp"

namespace aslb {

namespace {

double clamp_exponent(double e) { return std::clamp(e, 0.0, 2.0); }

Square graph_square(const SampledFunction& f, double x) {
    const std::size_t i = f.nearest_index(x);
    return {f.t(i), f.value(i), 0};
}

}  // namespace

double unit_uniform(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

CoverReport column_cover_count(const SampledFunction& f, const Square& q, double r) {
    require(std::isfinite(q.half_side) && q.half_side > 0, ErrorKind::invalid_argument,
            "cover count: half_side must be positive");
    require(std::isfinite(r) && r > 0 && r <= 2 * q.half_side * (1 + 1e-12), ErrorKind::invalid_argument,
            "cover count: need 0 < r <= 2R");
    require(f.step() <= r / 4 * (1 + 1e-9), ErrorKind::resolution_too_coarse,
            "cover count: grid step " + std::to_string(f.step()) + " exceeds r/4 = " + std::to_string(r / 4));

    const auto columns = static_cast<std::size_t>(std::max(1.0, std::ceil(2 * q.half_side / r - 1e-9)));
    CoverReport rep;
    rep.square = q;
    rep.r = r;
    rep.per_column_counts.assign(columns, 0);
    const double x0 = q.x_lo(), yb = q.y_lo(), yt = q.y_hi();
    const auto values = f.values();
    for (std::size_t j = 0; j < columns; ++j) {
        const double a = x0 + static_cast<double>(j) * r;
        const double b = std::min(x0 + static_cast<double>(j + 1) * r, q.x_hi());
        const IndexRange idx = f.indices_in(a, b);
        if (idx.empty) continue;
        const auto col = values.subspan(idx.first, idx.size());
        const auto [mn, mx] = std::minmax_element(col.begin(), col.end());
        const double lo = std::max(*mn, yb), hi = std::min(*mx, yt);
        if (lo > hi) continue;
        const long long row_lo = static_cast<long long>(std::floor((lo - yb) / r));
        const long long row_hi = static_cast<long long>(std::floor((hi - yb) / r));
        rep.per_column_counts[j] = row_hi - row_lo + 1;
        rep.count += rep.per_column_counts[j];
    }
    require(rep.count > 0, ErrorKind::disjoint, "cover count: square does not meet the sampled graph");
    return rep;
}

std::vector<double> geometric_ladder(double first, double last, std::size_t count) {
    require(count >= 1, ErrorKind::empty_ladder, "geometric ladder: count must be positive");
    require(first > 0 && last > 0, ErrorKind::invalid_argument, "geometric ladder: endpoints must be positive");
    std::vector<double> out(count);
    if (count == 1) {
        out[0] = first;
        return out;
    }
    const double lf = std::log(first), ll = std::log(last);
    for (std::size_t i = 0; i < count; ++i)
        out[i] = std::exp(lf + (ll - lf) * static_cast<double>(i) / static_cast<double>(count - 1));
    out.front() = first;
    out.back() = last;
    return out;
}

BoxDimensionResult box_dimension(const SampledFunction& f, std::span<const double> r_ladder) {
    require(!r_ladder.empty(), ErrorKind::empty_ladder, "box dimension: empty ladder");
    require(r_ladder.size() >= 4, ErrorKind::invalid_argument, "box dimension: need at least 4 scales");
    const double ratio = r_ladder[1] / r_ladder[0];
    for (std::size_t i = 1; i < r_ladder.size(); ++i) {
        require(r_ladder[i] > 0 && r_ladder[i] != r_ladder[i - 1], ErrorKind::invalid_argument,
                "box dimension: scales must be positive and distinct");
        require(std::abs(r_ladder[i] / r_ladder[i - 1] / ratio - 1) < 1e-6, ErrorKind::invalid_argument,
                "box dimension: ladder is not geometric");
    }
    for (double r : r_ladder)
        require(r >= 4 * f.step() * (1 - 1e-9), ErrorKind::resolution_too_coarse,
                "box dimension: scale " + std::to_string(r) + " below 4 grid steps");

    const auto [mn, mx] = std::minmax_element(f.values().begin(), f.values().end());
    const double width = f.domain_hi() - f.domain_lo();
    const double side = std::max(width, *mx - *mn);
    BoxDimensionResult res;
    res.square = {(f.domain_lo() + f.domain_hi()) / 2, (*mn + *mx) / 2, side / 2};
    std::vector<double> xs, ys;
    for (double r : r_ladder) {
        const CoverReport rep = column_cover_count(f, res.square, r);
        res.scales.push_back(r);
        res.counts.push_back(rep.count);
        xs.push_back(std::log(1 / r));
        ys.push_back(std::log(static_cast<double>(rep.count)));
    }
    res.fit = fit_line(xs, ys);
    res.estimate = std::clamp(res.fit.slope, 1.0, 2.0);
    return res;
}

SpectrumPoint spectrum_at_theta(const SampledFunction& f, double theta, std::span<const double> R_ladder,
                                std::span<const double> centers, int jobs) {
    require(std::isfinite(theta) && theta > 0 && theta < 1, ErrorKind::invalid_argument,
            "spectrum: theta must lie in (0,1)");
    require(!R_ladder.empty(), ErrorKind::empty_ladder, "spectrum: empty R ladder");
    require(!centers.empty(), ErrorKind::invalid_argument, "spectrum: no centers");
    std::vector<double> rs(R_ladder.size());
    for (std::size_t k = 0; k < R_ladder.size(); ++k) {
        const double R = R_ladder[k];
        require(R > 0 && R < 1, ErrorKind::invalid_argument, "spectrum: every R must lie in (0,1)");
        rs[k] = std::pow(R, 1 / theta);
        require(rs[k] >= 4 * f.step() * (1 - 1e-9), ErrorKind::resolution_too_coarse,
                "spectrum: R^(1/theta) = " + std::to_string(rs[k]) + " is below 4 grid steps");
    }

    const std::size_t nc = centers.size(), nr = R_ladder.size();
    std::vector<SpectrumEvidence> slots(nc * nr);
    parallel_for(nc * nr, jobs, [&](std::size_t idx) {
        const std::size_t c = idx / nr, k = idx % nr;
        Square q = graph_square(f, centers[c]);
        q.half_side = R_ladder[k];
        const CoverReport rep = column_cover_count(f, q, rs[k]);
        SpectrumEvidence& ev = slots[idx];
        ev.center_x = q.cx;
        ev.center_y = q.cy;
        ev.R = R_ladder[k];
        ev.r = rs[k];
        ev.count = rep.count;
        ev.exponent = std::log(static_cast<double>(rep.count)) / std::log(ev.R / ev.r);
    });

    SpectrumPoint pt;
    pt.theta = theta;
    pt.evidence = slots.front();
    pt.per_scale.resize(nr);
    for (std::size_t k = 0; k < nr; ++k) pt.per_scale[k] = slots[k];
    for (std::size_t idx = 0; idx < slots.size(); ++idx) {
        const SpectrumEvidence& ev = slots[idx];
        if (ev.exponent > pt.evidence.exponent) pt.evidence = ev;
        SpectrumEvidence& best = pt.per_scale[idx % nr];
        if (ev.count > best.count) best = ev;
    }
    pt.max_exponent = clamp_exponent(pt.evidence.exponent);
    pt.exponent = pt.max_exponent;

    std::vector<double> xs, ys;
    for (const auto& ev : pt.per_scale) {
        xs.push_back(std::log(ev.R / ev.r));
        ys.push_back(std::log(static_cast<double>(ev.count)));
    }
    const bool distinct = std::any_of(xs.begin(), xs.end(), [&](double x) { return x != xs.front(); });
    if (xs.size() >= 2 && distinct) {
        const LineFit fit = fit_line(xs, ys);
        pt.regression_exponent = clamp_exponent(fit.slope);
        pt.regression_r2 = fit.r_squared;
        pt.exponent = pt.regression_exponent;
    }
    return pt;
}

double min_admissible_R(const SampledFunction& f, double theta) {
    return std::pow(4 * f.step(), theta) * (1 + 1e-9);
}

std::vector<std::vector<double>> default_R_ladders(const SampledFunction& f, double theta, int n_ladders,
                                                   int scales_per_ladder, double R_max) {
    require(n_ladders >= 1 && scales_per_ladder >= 1, ErrorKind::empty_ladder, "ladders: counts must be positive");
    const double lo = min_admissible_R(f, theta);
    const double hi = std::min({R_max, (f.domain_hi() - f.domain_lo()) / 2, 0.999});
    require(lo < hi, ErrorKind::resolution_too_coarse,
            "ladders: grid too coarse for theta=" + std::to_string(theta) + " (need R >= " + std::to_string(lo) + ")");
    const auto total = static_cast<std::size_t>(n_ladders) * static_cast<std::size_t>(scales_per_ladder);
    const std::vector<double> base = geometric_ladder(hi, lo, total);
    std::vector<std::vector<double>> ladders(static_cast<std::size_t>(n_ladders));
    for (std::size_t i = 0; i < total; ++i) ladders[i % ladders.size()].push_back(base[i]);
    return ladders;
}

double regularized_spectrum(const SpectrumCurve& curve, double theta) {
    require(!curve.points.empty(), ErrorKind::out_of_range, "regularized spectrum: empty curve");
    require(theta >= curve.points.front().theta && theta <= curve.points.back().theta, ErrorKind::out_of_range,
            "regularized spectrum: theta outside the curve range");
    double best = 0;
    for (const auto& p : curve.points)
        if (p.theta <= theta) best = std::max(best, p.exponent);
    return best;
}

void Regularity::validate() const {
    if (kind == Kind::holder) {
        require(std::isfinite(value) && value > 0 && value < 1, ErrorKind::invalid_argument,
                "regularity: Hölder exponent must lie in (0,1)");
    } else {
        require(!std::isnan(value) && value >= 1, ErrorKind::invalid_argument,
                "regularity: Sobolev exponent must lie in [1, inf]");
    }
}

double Regularity::theta_max() const {
    if (kind == Kind::holder) return value;
    if (std::isinf(value)) return 1.0;
    return value / (value + 1);
}

double Regularity::bound(double theta) const {
    if (kind == Kind::holder) {
        if (theta >= value) return 2.0;
        return std::min(2.0, (2 - value - theta) / (1 - theta));
    }
    if (std::isinf(value)) return 1.0;
    return std::min(2.0, 1 + theta / ((1 - theta) * value));
}

std::string Regularity::describe() const {
    return (kind == Kind::holder ? "holder(" : "sobolev(") + (std::isinf(value) ? std::string("inf") : std::to_string(value)) + ")";
}

UpperBoundAudit audit_upper_bound(const SampledFunction& f, const Regularity& regularity,
                                  std::span<const double> theta_grid, const AuditOptions& opt) {
    regularity.validate();
    require(!theta_grid.empty(), ErrorKind::invalid_argument, "audit: empty theta grid");
    require(opt.n_centers >= 1 && opt.n_ladders >= 1, ErrorKind::invalid_argument, "audit: need centers and ladders");
    for (double th : theta_grid)
        require(th > 0 && th < 1 && th <= regularity.theta_max() * (1 + 1e-12), ErrorKind::invalid_argument,
                "audit: theta " + std::to_string(th) + " outside the nontrivial range of " + regularity.describe());

    UpperBoundAudit audit;
    audit.regularity = regularity;
    audit.tolerance = opt.tolerance;
    const double clo = std::isnan(opt.center_lo) ? f.domain_lo() : std::max(opt.center_lo, f.domain_lo());
    const double chi = std::isnan(opt.center_hi) ? f.domain_hi() : std::min(opt.center_hi, f.domain_hi());
    require(clo <= chi, ErrorKind::invalid_argument, "audit: empty center range");
    std::mt19937_64 rng(opt.seed);
    for (int i = 0; i < opt.n_centers; ++i) audit.centers.push_back(clo + (chi - clo) * unit_uniform(rng()));

    for (double th : theta_grid) {
        AuditRow row;
        row.theta = th;
        row.bound = regularity.bound(th);
        const auto ladders = default_R_ladders(f, th, opt.n_ladders, opt.scales_per_ladder, opt.R_max);
        for (const auto& ladder : ladders) {
            const SpectrumPoint pt = spectrum_at_theta(f, th, ladder, audit.centers, opt.jobs);
            row.ladder_exponents.push_back(pt.exponent);
            row.ladder_max_exponents.push_back(pt.max_exponent);
            if (row.ladder_exponents.size() == 1 || pt.exponent > row.worst_exponent) row.worst_exponent = pt.exponent;
            if (row.ladder_max_exponents.size() == 1 || pt.max_exponent > row.worst_max_exponent) {
                row.worst_max_exponent = pt.max_exponent;
                row.worst_evidence = pt.evidence;
            }
        }
        row.violation = row.worst_exponent > row.bound + opt.tolerance;
        audit.pass = audit.pass && !row.violation;
        audit.rows.push_back(std::move(row));
    }
    return audit;
}

RotationCheck rotate_monotone_check(const SampledFunction& f, double tol) {
    const auto v = f.values();
    bool nondecreasing = true, nonincreasing = true;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] < v[i - 1]) nondecreasing = false;
        if (v[i] > v[i - 1]) nonincreasing = false;
    }
    require(nondecreasing || nonincreasing, ErrorKind::not_monotone, "rotation check: function is not monotone");
    const double sign = nondecreasing ? 1.0 : -1.0;
    const double s = 1 / std::sqrt(2.0);
    RotationCheck out;
    double pu = 0, pv = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double x = f.t(i), y = sign * v[i];
        const double u = (x + y) * s, w = (y - x) * s;
        if (i > 0) {
            const double du = u - pu;
            require(du > 0, ErrorKind::not_monotone, "rotation check: rotated abscissae are not increasing");
            out.max_abs_slope = std::max(out.max_abs_slope, std::abs((w - pv) / du));
        }
        pu = u;
        pv = w;
    }
    out.pass = out.max_abs_slope <= 1 + tol;
    return out;
}

SampledFunction random_staircase(std::size_t samples, int steps, std::uint64_t seed, bool decreasing) {
    require(samples >= 2 && steps >= 0, ErrorKind::invalid_argument, "staircase: need >= 2 samples and steps >= 0");
    std::mt19937_64 rng(seed);
    std::vector<double> jump(samples, 0.0);
    for (int k = 0; k < steps; ++k) jump[1 + rng() % (samples - 1)] += unit_uniform(rng());
    std::vector<double> v(samples);
    double level = 0;
    for (std::size_t i = 0; i < samples; ++i) {
        level += jump[i];
        v[i] = decreasing ? -level : level;
    }
    const double h = 1.0 / static_cast<double>(samples - 1);
    return SampledFunction(0, 1, h, std::move(v), {"staircase", {{"steps", steps}}});
}

SampledFunction random_walk(std::size_t samples, double scale, std::uint64_t seed) {
    require(samples >= 2, ErrorKind::invalid_argument, "random walk: need >= 2 samples");
    std::mt19937_64 rng(seed);
    std::vector<double> v(samples);
    for (std::size_t i = 1; i < samples; ++i) v[i] = v[i - 1] + scale * (2 * unit_uniform(rng()) - 1);
    const double h = 1.0 / static_cast<double>(samples - 1);
    return SampledFunction(0, 1, h, std::move(v), {"random_walk", {{"scale", scale}}});
}

bool graph_sum_osc_check(const SampledFunction& g, const SampledFunction& h, int trials, std::uint64_t seed) {
    require(g.same_grid(h), ErrorKind::grid_mismatch, "graph sum check: functions are sampled on different grids");
    require(trials >= 1, ErrorKind::invalid_argument, "graph sum check: trials must be positive");
    const SampledFunction sum = add(g, h);
    double scale = 0;
    for (double x : sum.values()) scale = std::max(scale, std::abs(x));
    const double slack = 8 * std::numeric_limits<double>::epsilon() * std::max(scale, 1.0);
    std::mt19937_64 rng(seed);
    const std::size_t n = g.size();
    for (int t = 0; t < trials; ++t) {
        std::size_t i = rng() % n, j = rng() % n;
        if (i > j) std::swap(i, j);
        const double a = g.t(i), b = g.t(j);
        if (oscillation(sum, a, b) > oscillation(g, a, b) + oscillation(h, a, b) + slack) return false;
    }
    return true;
}

}  // namespace aslb

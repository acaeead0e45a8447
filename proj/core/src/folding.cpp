#include "aslb/folding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "aslb/parallel.hpp"

namespace aslb {

namespace {

std::string fmt(long double v) {
    std::ostringstream os;
    os.precision(20);
    os << v;
    return os.str();
}

long double round_to(long double x, Precision p) {
    return p == Precision::standard ? static_cast<long double>(static_cast<double>(x)) : x;
}

/// Uniform grid of function values on [a, b].
struct LocalGrid {
    long double a = 0;
    long double step = 0;
    std::vector<long double> y;

    long double x(std::size_t i) const { return a + step * static_cast<long double>(i); }
};

LocalGrid make_grid(const FunctionSource& f, long double a, long double b, std::size_t n, Precision p) {
    LocalGrid g;
    g.a = a;
    g.step = (b - a) / static_cast<long double>(n - 1);
    g.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) g.y[i] = f.eval(round_to(g.x(i), p), p);
    return g;
}

/// Grid-resolved delta around grid index i: fine grid first, then the base
/// samples beyond it, then the domain edge.
long double grid_delta(const FunctionSource& f, const LocalGrid& g, std::size_t i) {
    const long double fm = g.y[i];
    const long double m = g.x(i);
    const SampledFunction& base = f.base();
    const long double lo = base.domain_lo(), hi = base.domain_hi();

    long double dl = -1;
    for (std::size_t j = i; j-- > 0;) {
        if (g.y[j] >= fm) {
            dl = m - g.x(j);
            break;
        }
    }
    if (dl < 0) {
        const long double edge = g.x(0);
        for (std::size_t j = base.size(); j-- > 0;) {
            const long double t = base.t(j);
            if (t >= edge) continue;
            if (base.value(j) >= fm) {
                dl = m - t;
                break;
            }
        }
        if (dl < 0) dl = m - lo;
    }

    long double dr = -1;
    for (std::size_t j = i + 1; j < g.y.size(); ++j) {
        if (g.y[j] >= fm) {
            dr = g.x(j) - m;
            break;
        }
    }
    if (dr < 0) {
        const long double edge = g.x(g.y.size() - 1);
        for (std::size_t j = 0; j < base.size(); ++j) {
            const long double t = base.t(j);
            if (t <= edge) continue;
            if (base.value(j) >= fm) {
                dr = t - m;
                break;
            }
        }
        if (dr < 0) dr = hi - m;
    }
    return std::min(dl, dr);
}

struct Candidate {
    std::size_t index = 0;
    long double m = 0;
    long double value = 0;
    long double delta = 0;
};

std::vector<std::size_t> strict_maxima(const LocalGrid& g, long double open_lo, long double open_hi) {
    std::vector<std::size_t> out;
    for (std::size_t i = 1; i + 1 < g.y.size(); ++i) {
        const long double x = g.x(i);
        if (x <= open_lo || x >= open_hi) continue;
        if (g.y[i] > g.y[i - 1] && g.y[i] > g.y[i + 1]) out.push_back(i);
    }
    return out;
}

std::size_t usable_points(long double width, long double anchor, std::size_t wanted, Precision p) {
    const long double quantum = 8 * ulp_at(std::abs(anchor) + width, p);
    const long double fit = std::floor(width / quantum) + 1;
    if (fit >= static_cast<long double>(wanted)) return wanted;
    return static_cast<std::size_t>(std::max<long double>(fit, 0));
}

FoldSquare make_square(const Candidate& best, int orientation, const std::vector<Candidate>& pool,
                       std::size_t max_alternatives) {
    FoldSquare sq;
    sq.m = best.m;
    sq.delta = best.delta;
    sq.f_m = best.value;
    sq.orientation = orientation;
    sq.frame = {best.m, best.value, best.delta};
    for (const auto& c : pool) {
        if (sq.alternatives.size() >= max_alternatives) break;
        if (c.index == best.index) continue;
        sq.alternatives.push_back({c.m, c.delta, c.value});
    }
    return sq;
}

/// Largest delta first, then leftmost.
void rank(std::vector<Candidate>& pool) {
    std::sort(pool.begin(), pool.end(), [](const Candidate& a, const Candidate& b) {
        if (a.delta != b.delta) return a.delta > b.delta;
        return a.m < b.m;
    });
}

}  // namespace

std::string to_string(Precision p) { return p == Precision::standard ? "double" : "extended"; }

Precision parse_precision(const std::string& name) {
    if (name == "double" || name == "standard") return Precision::standard;
    if (name == "extended") return Precision::extended;
    fail(ErrorKind::invalid_argument, "unknown precision '" + name + "' (expected double or extended)");
}

long double ulp_at(long double x, Precision p) {
    const int digits = p == Precision::standard ? std::numeric_limits<double>::digits
                                                : std::numeric_limits<long double>::digits;
    x = std::abs(x);
    if (x < std::numeric_limits<double>::min()) return std::numeric_limits<double>::denorm_min();
    return std::ldexp(1.0L, std::ilogb(x) - (digits - 1));
}

FunctionSource::FunctionSource(SampledFunction base) : base_(std::move(base)) {}

FunctionSource::FunctionSource(SampledFunction base, Generator generator)
    : base_(std::move(base)), generator_(std::move(generator)) {}

long double FunctionSource::eval(long double x, Precision p) const {
    if (generator_) {
        if (p == Precision::extended) return generator_->extended(x);
        return (*generator_)(static_cast<double>(x));
    }
    const long double lo = base_.domain_lo(), h = base_.step();
    const long double last = lo + h * static_cast<long double>(base_.size() - 1);
    require(x >= lo - h * 1e-9L && x <= last + h * 1e-9L, ErrorKind::out_of_range,
            "function source: x=" + fmt(x) + " outside the sampled range");
    const long double pos = std::clamp((x - lo) / h, 0.0L, static_cast<long double>(base_.size() - 1));
    const auto i = std::min(static_cast<std::size_t>(std::floor(pos)), base_.size() - 2);
    const long double frac = pos - static_cast<long double>(i);
    if (frac == 0) return base_.value(i);
    return base_.value(i) + (static_cast<long double>(base_.value(i + 1)) - base_.value(i)) * frac;
}

long double FunctionSource::eval_local(long double anchor, long double offset, Precision p) const {
    if (p == Precision::extended && generator_ && generator_->has_local()) return generator_->local(anchor, offset);
    return eval(round_to(anchor + offset, p), p);
}

long double FunctionSource::argument_quantum(long double x, Precision p) const {
    if (!generator_) return base_.step();
    const long double detail = generator_->resolution();
    if (p == Precision::extended && generator_->has_local()) return detail;
    return std::max(ulp_at(x, p), detail);
}

FoldResult fold_rectangle(std::span<const double> segment, Band band) {
    require(band.lo < band.hi, ErrorKind::invalid_argument, "fold: band must have positive height");
    FoldResult out;
    out.values.resize(segment.size());
    const double lo = static_cast<double>(band.lo), hi = static_cast<double>(band.hi);
    for (std::size_t i = 0; i < segment.size(); ++i) {
        const auto [y, n] = accordion_fold(segment[i], lo, hi);
        out.values[i] = y;
        out.reflections = std::max(out.reflections, n);
    }
    return out;
}

std::vector<double> find_local_maxima(const SampledFunction& f, int window, const Generator* refine) {
    require(window >= 1, ErrorKind::invalid_argument, "local maxima: window must be >= 1");
    const auto v = f.values();
    const auto w = static_cast<std::size_t>(window);
    std::vector<double> out;
    if (v.size() < 2 * w + 1) return out;
    for (std::size_t i = w; i + w < v.size(); ++i) {
        bool strict = true;
        for (std::size_t d = 1; d <= w && strict; ++d) strict = v[i] > v[i - d] && v[i] > v[i + d];
        if (!strict) continue;
        double x = f.t(i);
        if (refine) {
            // golden-section search between the neighbouring grid points
            const double phi = (std::sqrt(5.0) - 1) / 2;
            double a = f.t(i - 1), b = f.t(i + 1);
            double c = b - phi * (b - a), d = a + phi * (b - a);
            double fc = (*refine)(c), fd = (*refine)(d);
            for (int it = 0; it < 80 && b - a > 4 * std::numeric_limits<double>::epsilon() * std::abs(x); ++it) {
                if (fc >= fd) {
                    b = d;
                    d = c;
                    fd = fc;
                    c = b - phi * (b - a);
                    fc = (*refine)(c);
                } else {
                    a = c;
                    c = d;
                    fc = fd;
                    d = a + phi * (b - a);
                    fd = (*refine)(d);
                }
            }
            const double xr = fc >= fd ? c : d;
            if ((*refine)(xr) > v[i]) x = xr;
        }
        out.push_back(x);
    }
    return out;
}

DeltaRadius delta_radius(const SampledFunction& f, double m) {
    const std::size_t i = f.nearest_index(m);
    const auto v = f.values();
    require(std::abs(f.t(i) - m) <= f.step() / 2 * (1 + 1e-9), ErrorKind::not_a_maximum,
            "delta radius: m lies outside the sampled domain");
    require(i > 0 && i + 1 < v.size() && v[i] > v[i - 1] && v[i] > v[i + 1], ErrorKind::not_a_maximum,
            "delta radius: no strict grid maximum at m=" + fmt(m));
    const double fm = v[i];
    double dl = m - f.domain_lo(), dr = f.domain_hi() - m;
    for (std::size_t j = i; j-- > 0;)
        if (v[j] >= fm) {
            dl = m - f.t(j);
            break;
        }
    for (std::size_t j = i + 1; j < v.size(); ++j)
        if (v[j] >= fm) {
            dr = f.t(j) - m;
            break;
        }
    return {m, std::min(dl, dr)};
}

int depth_cap(Precision p) { return p == Precision::standard ? 4 : 5; }

FoldPlan plan_squares(const FunctionSource& f, const HolderWitness& witness, double theta0, int K,
                      const PlanOptions& opt) {
    const SampledFunction& base = f.base();
    const long double lo = base.domain_lo(), hi = base.domain_hi();
    witness.validate_against(static_cast<double>(hi - lo));
    require(theta0 > 0 && theta0 < witness.alpha, ErrorKind::invalid_argument, "plan: theta0 must lie in (0, alpha)");
    require(K >= 1, ErrorKind::invalid_argument, "plan: K must be >= 1");
    require(K <= depth_cap(opt.precision), ErrorKind::depth_exceeded,
            "plan: K=" + std::to_string(K) + " exceeds the depth cap " + std::to_string(depth_cap(opt.precision)) +
                " for " + to_string(opt.precision) + " precision");
    require(opt.search_points >= 65, ErrorKind::invalid_argument, "plan: need at least 65 search points");

    FoldPlan plan;
    plan.theta0 = theta0;
    plan.precision = opt.precision;

    auto evaluate = [&](const LocalGrid& g, const std::vector<std::size_t>& idx) {
        std::vector<Candidate> out;
        for (std::size_t i : idx) out.push_back({i, g.x(i), g.y[i], grid_delta(f, g, i)});
        return out;
    };
    auto edge_in_band = [&](const Candidate& c, int sigma) {
        const long double e = round_to(c.m - sigma * c.delta, plan.precision);
        const long double fe = f.eval(e, plan.precision);
        return std::abs(fe - c.value) <= c.delta;
    };

    // first square: one maximum on each side of the midpoint
    const long double mid = (lo + hi) / 2;
    const long double w = std::min<long double>(witness.r0, 0.1L * (hi - lo)) / 2;
    const LocalGrid g1 = make_grid(f, std::max(lo, mid - 3 * w), std::min(hi, mid + 3 * w), opt.search_points,
                                   plan.precision);
    auto left = evaluate(g1, strict_maxima(g1, mid - w, mid));
    auto right = evaluate(g1, strict_maxima(g1, mid, mid + w));
    require(!left.empty() || !right.empty(), ErrorKind::no_maximum_found,
            "plan: no strict grid maximum within " + fmt(w) + " of the midpoint");
    auto peak = [](const std::vector<Candidate>& v) {
        long double best = -std::numeric_limits<long double>::infinity();
        for (const auto& c : v) best = std::max(best, c.value);
        return best;
    };
    const bool use_right = !right.empty() && (left.empty() || peak(right) <= peak(left));
    plan.orientation = use_right ? 1 : -1;
    std::vector<Candidate> pool;
    for (const auto& c : use_right ? right : left)
        if (c.delta > 0 && edge_in_band(c, plan.orientation)) pool.push_back(c);
    require(!pool.empty(), ErrorKind::no_maximum_found, "plan: no admissible first maximum");
    rank(pool);
    plan.squares.push_back(make_square(pool.front(), plan.orientation, pool, opt.max_alternatives));

    for (int k = 1; k < K; ++k) {
        const FoldSquare& prev = plan.squares.back();
        const int s = plan.orientation;
        const long double wk = std::pow(10.0L, -k) * prev.delta / 2;
        const long double a = s > 0 ? prev.m : std::max(lo, prev.m - 2 * wk);
        const long double b = s > 0 ? std::min(hi, prev.m + 2 * wk) : prev.m;
        const std::size_t n = usable_points(b - a, prev.m, opt.search_points, plan.precision);
        require(n >= 65, ErrorKind::depth_exceeded,
                "plan: level " + std::to_string(k + 1) + " window " + fmt(wk) + " is below " +
                    to_string(plan.precision) + " resolution");
        const LocalGrid g = make_grid(f, a, b, n, plan.precision);
        const long double open_lo = s > 0 ? prev.m : prev.m - wk;
        const long double open_hi = s > 0 ? prev.m + wk : prev.m;
        pool.clear();
        for (const auto& c : evaluate(g, strict_maxima(g, open_lo, open_hi))) {
            const long double gap = std::abs(c.m - prev.m);
            if (!(c.delta > 0 && c.delta < gap)) continue;
            if (gap + c.delta > prev.delta) continue;
            if (c.value - c.delta < prev.f_m - prev.delta || c.value + c.delta > prev.f_m + prev.delta) continue;
            if (!edge_in_band(c, s)) continue;
            pool.push_back(c);
        }
        require(!pool.empty(), ErrorKind::no_maximum_found,
                "plan: no admissible maximum for square " + std::to_string(k + 1) + " near m=" + fmt(prev.m));
        rank(pool);
        plan.squares.push_back(make_square(pool.front(), s, pool, opt.max_alternatives));
    }
    return plan;
}

FoldedFunction::FoldedFunction(FunctionSource source, FoldPlan plan, std::size_t patch_samples)
    : source_(std::move(source)), plan_(std::move(plan)) {
    require(patch_samples >= 2, ErrorKind::invalid_argument, "folded function: need at least 2 patch samples");
    const SampledFunction& base = source_.base();
    for (std::size_t k = 0; k < plan_.squares.size(); ++k) {
        const FoldSquare& sq = plan_.squares[k];
        require(sq.delta > 0, ErrorKind::invalid_argument, "folded function: square with non-positive delta");
        require(sq.span_lo() >= base.domain_lo() && sq.span_hi() <= base.domain_hi(), ErrorKind::invalid_argument,
                "folded function: square span leaves the domain");
        const Band band = sq.band();
        FoldPatch patch;
        patch.square = k;
        patch.frame = sq.frame;
        int refl = 0;
        for (std::size_t i = 0; i < patch_samples; ++i) {
            const long double x = round_to(
                sq.span_lo() + sq.delta * static_cast<long double>(i) / static_cast<long double>(patch_samples - 1),
                plan_.precision);
            const long double y = source_.eval(x, plan_.precision);
            const auto [yf, n] = accordion_fold(y, band.lo, band.hi);
            refl = std::max(refl, n);
            patch.u.push_back(static_cast<double>(sq.frame.to_local_x(x)));
            patch.v_base.push_back(static_cast<double>(sq.frame.to_local_y(y)));
            patch.v_folded.push_back(static_cast<double>(sq.frame.to_local_y(yf)));
        }
        for (std::size_t i = 0; i < base.size(); ++i) {
            const long double t = base.t(i);
            if (t < sq.span_lo() || t > sq.span_hi()) continue;
            refl = std::max(refl, accordion_fold<long double>(base.value(i), band.lo, band.hi).second);
        }
        patch.reflections = refl;
        reflections_.push_back(refl);
        patches_.push_back(std::move(patch));
    }
}

int FoldedFunction::square_at(long double x) const {
    for (std::size_t k = 0; k < plan_.squares.size(); ++k) {
        const FoldSquare& sq = plan_.squares[k];
        if (x >= sq.span_lo() && x <= sq.span_hi()) return static_cast<int>(k);
    }
    return -1;
}

long double FoldedFunction::value(long double x) const {
    const long double y = source_.eval(x, plan_.precision);
    const int k = square_at(x);
    if (k < 0) return y;
    const Band band = plan_.squares[static_cast<std::size_t>(k)].band();
    return accordion_fold(y, band.lo, band.hi).first;
}

long double FoldedFunction::value_local(long double anchor, long double offset) const {
    const long double y = source_.eval_local(anchor, offset, plan_.precision);
    const int k = square_at(anchor + offset);
    if (k < 0) return y;
    const Band band = plan_.squares[static_cast<std::size_t>(k)].band();
    return accordion_fold(y, band.lo, band.hi).first;
}

SampledFunction FoldedFunction::to_sampled() const {
    const SampledFunction& base = source_.base();
    std::vector<double> v(base.values().begin(), base.values().end());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const int k = square_at(base.t(i));
        if (k < 0) continue;
        const Band band = plan_.squares[static_cast<std::size_t>(k)].band();
        v[i] = static_cast<double>(accordion_fold<long double>(v[i], band.lo, band.hi).first);
    }
    FunctionMeta meta = base.meta();
    meta.params["folded_squares"] = static_cast<double>(plan_.squares.size());
    meta.params["theta0"] = plan_.theta0;
    return SampledFunction(base.domain_lo(), base.domain_hi(), base.step(), std::move(v), std::move(meta));
}

WitnessCheck check_witness(const FunctionSource& f, const HolderWitness& w, int trials, std::uint64_t seed) {
    WitnessCheck out;
    const SampledFunction& base = f.base();
    const double lo = base.domain_lo(), hi = base.domain_hi(), len = hi - lo;
    std::mt19937_64 rng(seed);
    out.worst_lower_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < trials; ++i) {
        const double d = len * std::pow(10.0, -7 * unit_uniform(rng()));
        const double t = lo + (len - d) * unit_uniform(rng());
        const double s = t + d;
        const double ratio = static_cast<double>(std::abs(f.eval(t, Precision::standard) - f.eval(s, Precision::standard))) /
                             (w.C_upper * std::pow(d, w.alpha));
        if (ratio > out.worst_upper_ratio) {
            out.worst_upper_ratio = ratio;
            out.upper_pair = {t, s};
        }
        const double L = std::min(w.r0, len) * std::pow(10.0, -5 * unit_uniform(rng()));
        const double a = lo + (len - L) * unit_uniform(rng());
        long double mn = std::numeric_limits<long double>::infinity(), mx = -mn;
        for (int j = 0; j <= 64; ++j) {
            const long double y = f.eval(a + L * j / 64.0, Precision::standard);
            mn = std::min(mn, y);
            mx = std::max(mx, y);
        }
        const double lr = static_cast<double>(mx - mn) / (w.c_lower * std::pow(L, w.alpha));
        if (lr < out.worst_lower_ratio) {
            out.worst_lower_ratio = lr;
            out.lower_interval = {a, a + L};
        }
    }
    if (out.worst_upper_ratio > 1) {
        out.upper_ok = false;
        out.warnings.push_back("upper Hölder bound exceeded by factor " + fmt(out.worst_upper_ratio) + " at t=" +
                               fmt(out.upper_pair.first) + ", s=" + fmt(out.upper_pair.second));
    }
    if (out.worst_lower_ratio < 1) {
        out.lower_ok = false;
        out.warnings.push_back("lower oscillation bound missed by factor " + fmt(out.worst_lower_ratio) + " on [" +
                               fmt(out.lower_interval.first) + ", " + fmt(out.lower_interval.second) + "]");
    }
    return out;
}

HolderWitness estimate_witness(const FunctionSource& f, double alpha, double r0, const WitnessEstimateOptions& opt) {
    require(alpha > 0 && alpha < 1, ErrorKind::invalid_argument, "witness estimate: alpha must lie in (0,1)");
    const SampledFunction& base = f.base();
    const double lo = base.domain_lo(), len = base.domain_hi() - base.domain_lo();
    require(r0 > 0 && r0 <= len, ErrorKind::invalid_argument, "witness estimate: r0 must lie in (0, domain length]");
    const Precision p = f.has_generator() ? Precision::extended : Precision::standard;
    const double floor_len = f.has_generator() ? opt.min_length : std::max(opt.min_length, base.step());
    std::mt19937_64 rng(opt.seed);
    HolderWitness w;
    w.alpha = alpha;
    w.r0 = r0;
    w.C_upper = 0;
    for (double d = len / 2; d >= floor_len; d /= 2) {
        for (int i = 0; i < opt.pairs_per_scale; ++i) {
            const double di = d * std::exp2(unit_uniform(rng()));
            const double t = lo + (len - di) * unit_uniform(rng());
            const long double diff = std::abs(f.eval(t, p) - f.eval(t + di, p));
            w.C_upper = std::max(w.C_upper, static_cast<double>(diff) / std::pow(di, alpha));
        }
    }
    w.c_lower = std::numeric_limits<double>::infinity();
    const int pts = std::max(opt.osc_points, 2);
    for (double L = r0; L >= floor_len * (pts - 1); L /= 2) {
        for (int i = 0; i < opt.intervals_per_scale; ++i) {
            const double a = lo + (len - L) * unit_uniform(rng());
            long double mn = std::numeric_limits<long double>::infinity(), mx = -mn;
            for (int j = 0; j < pts; ++j) {
                const long double y = f.eval(a + L * j / (pts - 1.0), p);
                mn = std::min(mn, y);
                mx = std::max(mx, y);
            }
            w.c_lower = std::min(w.c_lower, static_cast<double>(mx - mn) / std::pow(L, alpha));
        }
    }
    return w;
}

FoldedFunction run_folding(const FunctionSource& f, const HolderWitness& witness, double theta0, int K,
                           const FoldOptions& opt) {
    witness.validate_against(f.base().domain_hi() - f.base().domain_lo());
    require(theta0 > 0 && theta0 < witness.alpha, ErrorKind::invalid_argument, "fold: theta0 must lie in (0, alpha)");
    const WitnessCheck wc = check_witness(f, witness, opt.witness_trials, opt.seed);
    FoldPlan plan = plan_squares(f, witness, theta0, K, opt.plan);
    FoldedFunction ff(f, std::move(plan), opt.patch_samples);
    ff.warnings = wc.warnings;
    return ff;
}

FoldInvariants check_invariants(const FoldedFunction& ff, const HolderWitness& witness) {
    FoldInvariants inv;
    const FoldPlan& plan = ff.plan();
    const SampledFunction& base = ff.base();
    const SampledFunction folded = ff.to_sampled();
    for (std::size_t i = 0; i < base.size(); ++i) {
        const int k = ff.square_at(base.t(i));
        if (k < 0) {
            if (folded.value(i) != base.value(i)) {
                inv.locality = false;
                inv.failures.push_back("locality: sample " + std::to_string(i) + " changed outside every span");
                break;
            }
        } else if (!plan.squares[static_cast<std::size_t>(k)].band().contains(folded.value(i))) {
            inv.band_containment = false;
            inv.failures.push_back("band: grid sample " + std::to_string(i) + " escapes its band");
            break;
        }
    }
    for (const auto& patch : ff.patches()) {
        for (double v : patch.v_folded) {
            if (v < -1 - 1e-12 || v > 1 + 1e-12) {
                inv.band_containment = false;
                inv.failures.push_back("band: patch " + std::to_string(patch.square) + " escapes its band");
                break;
            }
        }
    }
    for (std::size_t k = 0; k < plan.squares.size(); ++k) {
        const FoldSquare& sq = plan.squares[k];
        const long double Mk = std::ceil(witness.C_upper * std::pow(sq.delta, witness.alpha - 1) - 2);
        const long long limit = static_cast<long long>(std::max<long double>(Mk, 0)) + 1;
        inv.reflection_limits.push_back(limit);
        if (ff.reflection_counts()[k] > limit) {
            inv.reflection_bound = false;
            inv.failures.push_back("reflections: square " + std::to_string(k + 1) + " used " +
                                   std::to_string(ff.reflection_counts()[k]) + " > " + std::to_string(limit));
        }
        const long double near = sq.orientation > 0 ? sq.span_lo() : sq.span_hi();
        if (!sq.band().contains(ff.base_value(near))) {
            inv.edge_continuity = false;
            inv.failures.push_back("edge: square " + std::to_string(k + 1) + " outer edge value leaves the band");
        }
        if (k == 0) continue;
        const FoldSquare& pr = plan.squares[k - 1];
        if (!(sq.delta < std::pow(10.0L, -static_cast<long double>(k)) * pr.delta)) {
            inv.nesting = false;
            inv.failures.push_back("nesting: square " + std::to_string(k + 1) + " is not 10^-k smaller");
        }
        if (sq.m - sq.delta < pr.m - pr.delta || sq.m + sq.delta > pr.m + pr.delta ||
            sq.f_m - sq.delta < pr.f_m - pr.delta || sq.f_m + sq.delta > pr.f_m + pr.delta) {
            inv.containment = false;
            inv.failures.push_back("containment: square " + std::to_string(k + 1) + " leaves its parent");
        }
        for (std::size_t j = 0; j < k; ++j) {
            const FoldSquare& o = plan.squares[j];
            if (!(sq.span_hi() < o.span_lo() || sq.span_lo() > o.span_hi())) {
                inv.disjoint = false;
                inv.failures.push_back("disjoint: spans " + std::to_string(j + 1) + " and " + std::to_string(k + 1) +
                                       " overlap");
            }
        }
    }
    return inv;
}

std::string to_string(CheckStatus s) {
    switch (s) {
        case CheckStatus::pass: return "pass";
        case CheckStatus::fail: return "fail";
        case CheckStatus::unresolvable: return "unresolvable";
    }
    return "fail";
}

namespace {

struct PairResult {
    double ratio = 0;
    long double t = 0;
    long double s = 0;
};

std::vector<std::pair<long double, long double>> holder_pairs(const FoldedFunction& ff, const VerifyOptions& opt) {
    const SampledFunction& base = ff.base();
    const long double lo = base.domain_lo(), hi = base.domain_hi(), len = hi - lo;
    const Precision p = ff.precision();
    const auto& squares = ff.plan().squares;
    std::vector<std::pair<long double, long double>> pairs;
    pairs.reserve(opt.holder_pairs);
    auto push = [&](long double t, long double s) {
        t = round_to(std::clamp(t, lo, hi), p);
        s = round_to(std::clamp(s, lo, hi), p);
        if (std::abs(t - s) < 1e-12L) return;
        if (pairs.size() < opt.holder_pairs) pairs.emplace_back(t, s);
    };
    std::mt19937_64 rng(opt.seed);
    for (std::size_t k = 0; k < squares.size(); ++k) {
        const FoldSquare& sq = squares[k];
        for (int i = 0; i < 48; ++i) {
            const long double d =
                std::max(1e-12L, sq.delta * std::pow(10.0L, -12.0L * static_cast<long double>(i) / 47));
            for (long double anchor : {sq.span_lo(), sq.span_hi(), sq.m}) {
                push(anchor, anchor + d);
                push(anchor, anchor - d);
                push(anchor - d / 2, anchor + d / 2);
            }
        }
        for (std::size_t j = 0; j < squares.size(); ++j) {
            if (j == k) continue;
            for (int i = 0; i < 64; ++i)
                push(sq.span_lo() + sq.delta * unit_uniform(rng()),
                     squares[j].span_lo() + squares[j].delta * unit_uniform(rng()));
        }
    }
    while (pairs.size() < opt.holder_pairs) {
        const long double d = len * std::pow(10.0L, -12.0L * unit_uniform(rng()));
        const bool near_square = !squares.empty() && (rng() & 1u);
        long double t;
        if (near_square) {
            const FoldSquare& sq = squares[rng() % squares.size()];
            t = sq.span_lo() - sq.delta / 4 + 1.5L * sq.delta * unit_uniform(rng());
        } else {
            t = lo + len * unit_uniform(rng());
        }
        push(t, (rng() & 1u) ? t + d : t - d);
    }
    return pairs;
}

struct ColumnStats {
    long double lo = 0;
    long double hi = 0;
};

ColumnStats column_range(const FoldedFunction& ff, long double a, long double width, std::size_t points) {
    ColumnStats st{std::numeric_limits<long double>::infinity(), -std::numeric_limits<long double>::infinity()};
    a = round_to(a, ff.precision());
    for (std::size_t i = 0; i < points; ++i) {
        const long double y =
            ff.value_local(a, width * static_cast<long double>(i) / static_cast<long double>(points - 1));
        st.lo = std::min(st.lo, y);
        st.hi = std::max(st.hi, y);
    }
    return st;
}

std::vector<std::size_t> pick_columns(std::size_t total, const VerifyOptions& opt, std::uint64_t salt,
                                      std::string& mode) {
    std::vector<std::size_t> out;
    if (total <= opt.column_cap) {
        mode = "exhaustive";
        out.resize(total);
        for (std::size_t j = 0; j < total; ++j) out[j] = j;
        return out;
    }
    mode = "sampled";
    std::mt19937_64 rng(opt.seed ^ (salt * 0x9E3779B97F4A7C15ull));
    out.resize(opt.sampled_columns);
    for (auto& j : out) j = rng() % total;
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

FoldVerification verify_fold(const FoldedFunction& ff, const HolderWitness& witness,
                             std::span<const double> theta_grid, const VerifyOptions& opt) {
    witness.validate();
    require(opt.column_points >= 2, ErrorKind::invalid_argument, "verify: need at least 2 points per column");
    FoldVerification rep;
    rep.c_tilde = witness.c_tilde();
    const Precision p = ff.precision();
    const double alpha = witness.alpha;

    const auto pairs = holder_pairs(ff, opt);
    std::vector<PairResult> results(pairs.size());
    parallel_for(pairs.size(), opt.jobs, [&](std::size_t i) {
        const auto [t, s] = pairs[i];
        const long double diff = std::abs(ff.value(t) - ff.value(s));
        results[i] = {static_cast<double>(diff / (witness.C_upper * std::pow(std::abs(t - s), static_cast<long double>(alpha)))), t, s};
    });
    rep.holder.pairs = pairs.size();
    for (const auto& r : results) {
        if (r.ratio > rep.holder.max_ratio) {
            rep.holder.max_ratio = r.ratio;
            rep.holder.worst_t = static_cast<double>(r.t);
            rep.holder.worst_s = static_cast<double>(r.s);
        }
    }
    rep.holder.pass = rep.holder.max_ratio <= 3.0;

    const auto& squares = ff.plan().squares;
    const long double dom_lo = ff.base().domain_lo(), dom_hi = ff.base().domain_hi();
    for (std::size_t k = 0; k < squares.size(); ++k) {
        const FoldSquare& sq = squares[k];
        for (std::size_t ti = 0; ti < theta_grid.size(); ++ti) {
            const double theta = theta_grid[ti];
            require(theta > 0 && theta < 1, ErrorKind::invalid_argument, "verify: theta must lie in (0,1)");
            ColumnCheck cc;
            cc.square = k;
            cc.theta = theta;
            const long double rt = std::pow(sq.delta, 1.0L / theta);
            cc.r_tilde = static_cast<double>(rt);
            cc.threshold_osc = rep.c_tilde;
            cc.threshold_count = 0.5 * rep.c_tilde * std::pow(cc.r_tilde, alpha + theta - 2);
            // point spacing must carry detail and the expected oscillation must
            // dwarf the rounding of function values
            const long double x_quantum = 4 * ff.source().argument_quantum(std::abs(sq.m) + sq.delta, p);
            const long double y_quantum = 1024 * ulp_at(std::abs(sq.f_m) + sq.delta, p);
            const bool resolvable = rt / static_cast<long double>(opt.column_points - 1) >= x_quantum &&
                                    rep.c_tilde * std::pow(rt, static_cast<long double>(alpha)) >= y_quantum &&
                                    rt <= witness.r0 && rt < sq.delta;
            if (!resolvable) {
                cc.mode = "none";
                cc.osc_status = CheckStatus::unresolvable;
                cc.count_status = CheckStatus::unresolvable;
                ++rep.unresolvable;
                rep.columns.push_back(cc);
                continue;
            }

            // (b) lower oscillation on the columns of the folded span
            const long double total_j = std::floor(sq.delta / rt);
            cc.columns_total = static_cast<std::size_t>(std::min<long double>(total_j, 1e18L));
            const auto cols = pick_columns(cc.columns_total, opt, 2 * (k * theta_grid.size() + ti) + 1, cc.mode);
            cc.columns_checked = cols.size();
            std::vector<double> ratios(cols.size());
            const long double rta = std::pow(rt, static_cast<long double>(alpha));
            parallel_for(cols.size(), opt.jobs, [&](std::size_t i) {
                const long double a = sq.span_lo() + static_cast<long double>(cols[i]) * rt;
                const ColumnStats st = column_range(ff, a, rt, opt.column_points);
                ratios[i] = static_cast<double>((st.hi - st.lo) / rta);
            });
            cc.min_osc_ratio = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < cols.size(); ++i) {
                if (ratios[i] < cc.min_osc_ratio) {
                    cc.min_osc_ratio = ratios[i];
                    cc.worst_column_lo = static_cast<double>(sq.span_lo() + static_cast<long double>(cols[i]) * rt);
                }
            }
            cc.osc_status = cc.min_osc_ratio >= cc.threshold_osc ? CheckStatus::pass : CheckStatus::fail;

            // (c) column count over the whole square Q_k at scale r~
            const long double x0 = sq.m - sq.delta, yb = sq.f_m - sq.delta, yt = sq.f_m + sq.delta;
            const long double total_m = std::ceil(2 * sq.delta / rt - 1e-9L);
            const auto m_cols = static_cast<std::size_t>(std::min<long double>(total_m, 1e18L));
            std::string count_mode;
            const auto ccols = pick_columns(m_cols, opt, 2 * (k * theta_grid.size() + ti) + 2, count_mode);
            std::vector<long long> counts(ccols.size());
            parallel_for(ccols.size(), opt.jobs, [&](std::size_t i) {
                // width is clipped directly: a + rt may round back to a
                const long double a = x0 + static_cast<long double>(ccols[i]) * rt;
                const long double ca = std::max(a, dom_lo);
                const long double right = std::min(sq.m + sq.delta, dom_hi);
                long double width = rt - (ca - a);
                if (ca + width > right) width = right - ca;
                if (width < 0) {
                    counts[i] = 0;
                    return;
                }
                const ColumnStats st = column_range(ff, ca, width, opt.column_points);
                const long double clo = std::max(st.lo, yb), chi = std::min(st.hi, yt);
                counts[i] = clo > chi ? 0
                                      : static_cast<long long>(std::floor((chi - yb) / rt) - std::floor((clo - yb) / rt)) + 1;
            });
            long double sum = 0;
            for (long long c : counts) sum += static_cast<long double>(c);
            cc.count = count_mode == "exhaustive"
                           ? static_cast<double>(sum)
                           : static_cast<double>(sum / static_cast<long double>(ccols.size()) * static_cast<long double>(m_cols));
            if (count_mode != cc.mode) cc.mode += "/" + count_mode;
            cc.count_status = cc.count >= cc.threshold_count ? CheckStatus::pass : CheckStatus::fail;
            rep.columns.push_back(cc);
        }
    }
    rep.pass = rep.holder.pass;
    for (const auto& c : rep.columns)
        if (c.osc_status == CheckStatus::fail || c.count_status == CheckStatus::fail) rep.pass = false;
    return rep;
}

}  // namespace aslb

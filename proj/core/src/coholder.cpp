#include "aslb/coholder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "aslb/parallel.hpp"

namespace aslb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t bit_reverse(std::uint64_t i, int bits) {
    std::uint64_t r = 0;
    for (int b = 0; b < bits; ++b) {
        r = (r << 1) | (i & 1);
        i >>= 1;
    }
    return r;
}

std::size_t argmax(const SampledFunction& f, IndexRange idx) {
    std::size_t best = idx.first;
    for (std::size_t i = idx.first; i <= idx.last; ++i)
        if (f.value(i) > f.value(best)) best = i;
    return best;
}

struct SquareEvidence {
    Square square;
    std::vector<Interval> intervals;
    std::vector<double> prefix;  // prefix[k] = sum of the k+1 longest
    LowerOscillation osc;
    bool disjoint = false;
};

/// Index of the shortest interval in the greedy prefix reaching `need`, or
/// intervals.size() when even the full union falls short.
std::size_t greedy_end(const SquareEvidence& ev, double need) {
    const auto it = std::lower_bound(ev.prefix.begin(), ev.prefix.end(), need);
    return static_cast<std::size_t>(it - ev.prefix.begin());
}

bool square_passes(const SquareEvidence& ev, const CoHolderParams& p, double c) {
    if (ev.disjoint || ev.osc.best_c < c) return false;
    const double R = ev.square.half_side;
    const std::size_t k = greedy_end(ev, c * std::pow(R, 1 + p.epsilon));
    if (k >= ev.intervals.size()) return false;
    return ev.intervals[k].length() >= c * std::pow(R, 1 / p.theta0());
}

/// Largest c in {0.001, ..., 0.999} passing; 0 if none. Passing is monotone in c.
double largest_c(const SquareEvidence& ev, const CoHolderParams& p) {
    int lo = 0, hi = 1000;  // lo passes (or is the sentinel), hi fails
    while (hi - lo > 1) {
        const int mid = (lo + hi) / 2;
        if (square_passes(ev, p, mid / 1000.0))
            lo = mid;
        else
            hi = mid;
    }
    return lo / 1000.0;
}

SquareEvidence gather(const SampledFunction& f, const Square& q, const CoHolderParams& p,
                      const CertificateOptions& opt) {
    SquareEvidence ev;
    ev.square = q;
    require(q.half_side > 0 && q.half_side < 1, ErrorKind::invalid_argument,
            "co-holder: square radius must lie in (0,1)");
    try {
        ev.intervals = interval_decomposition(f, q);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::disjoint) throw;
        ev.disjoint = true;
        return ev;
    }
    ev.prefix.resize(ev.intervals.size());
    double acc = 0;
    for (std::size_t k = 0; k < ev.intervals.size(); ++k) ev.prefix[k] = acc += ev.intervals[k].length();
    ev.osc = measure_lower_oscillation(f, q, p.alpha, p.eta, opt.J_count, opt.min_points);
    return ev;
}

}  // namespace

Interval projection(const SampledFunction& f, const Square& q) {
    return {std::max(q.x_lo(), f.domain_lo()), std::min(q.x_hi(), f.domain_hi())};
}

std::vector<Interval> interval_decomposition(const SampledFunction& f, const Square& q) {
    std::vector<Interval> out;
    const IndexRange idx = f.indices_in(q.x_lo(), q.x_hi());
    bool open = false;
    std::size_t start = 0;
    if (!idx.empty) {
        for (std::size_t i = idx.first; i <= idx.last; ++i) {
            const bool in = q.contains(f.t(i), f.value(i));
            if (in && !open) {
                open = true;
                start = i;
            } else if (!in && open) {
                open = false;
                out.push_back({f.t(start), f.t(i - 1)});
            }
        }
        if (open) out.push_back({f.t(start), f.t(idx.last)});
    }
    require(!out.empty(), ErrorKind::disjoint, "interval decomposition: no sample of the graph lies in the square");
    std::stable_sort(out.begin(), out.end(),
                     [](const Interval& a, const Interval& b) { return a.length() > b.length(); });
    return out;
}

LowerOscillation measure_lower_oscillation(const SampledFunction& f, const Square& q, double alpha, double eta,
                                           int J_count, int min_points) {
    require(J_count >= 1, ErrorKind::invalid_argument, "lower oscillation: J_count must be >= 1");
    require(min_points >= 2, ErrorKind::invalid_argument, "lower oscillation: min_points must be >= 2");
    require(alpha > 0 && alpha <= 1 && eta >= 0, ErrorKind::invalid_argument,
            "lower oscillation: need 0 < alpha <= 1 and eta >= 0");
    const Interval P = projection(f, q);
    require(P.length() > 0, ErrorKind::invalid_argument, "lower oscillation: square misses the sampled domain");
    const RangeExtrema extrema(f.values());
    const double scale = std::pow(P.length(), eta);
    const double min_len = (min_points - 1) * f.step();

    LowerOscillation out;
    out.best_c = kInf;
    for (int k = 0; k < 62; ++k) {
        const double len = std::ldexp(P.length(), -k);
        if (len < min_len * (1 - 1e-9)) break;
        ++out.levels;
        const std::uint64_t positions = std::uint64_t{1} << k;
        const std::uint64_t n = std::min<std::uint64_t>(positions, static_cast<std::uint64_t>(J_count));
        for (std::uint64_t i = 0; i < n; ++i) {
            const std::uint64_t j = bit_reverse(i, k);
            const double a = P.lo + static_cast<double>(j) * len;
            const double b = j + 1 == positions ? P.hi : a + len;
            const IndexRange idx = f.indices_in(a, b);
            if (idx.empty || idx.size() < static_cast<std::size_t>(min_points)) continue;
            const double ratio = extrema.osc(idx.first, idx.last) / (scale * std::pow(len, alpha));
            ++out.tested;
            if (ratio < out.best_c) {
                out.best_c = ratio;
                out.worst_J = {a, b};
            }
        }
    }
    if (out.tested == 0) out.best_c = 0;
    return out;
}

void CoHolderParams::validate() const {
    require(alpha > 0 && alpha < 1, ErrorKind::invalid_argument, "co-holder: alpha must lie in (0,1)");
    require(eta >= 0 && epsilon >= 0, ErrorKind::invalid_argument, "co-holder: eta and epsilon must be >= 0");
    require(eta + epsilon < 1 - alpha, ErrorKind::parameter_violation,
            "co-holder: need eta + epsilon < 1 - alpha (got " + std::to_string(eta + epsilon) + " >= " +
                std::to_string(1 - alpha) + ")");
}

CertificateResult certificate_search(const SampledFunction& f, const CoHolderParams& params,
                                     std::span<const Square> candidates, const CertificateOptions& opt) {
    params.validate();
    require(!candidates.empty(), ErrorKind::invalid_argument, "certificate search: no candidate squares");
    require(opt.c_floor > 0 && opt.c_floor < 1, ErrorKind::invalid_argument,
            "certificate search: c_floor must lie in (0,1)");

    std::vector<SquareEvidence> ev(candidates.size());
    parallel_for(candidates.size(), opt.jobs,
                 [&](std::size_t i) { ev[i] = gather(f, candidates[i], params, opt); });

    std::vector<double> c_max(ev.size());
    double common = 1;
    for (std::size_t i = 0; i < ev.size(); ++i) {
        c_max[i] = largest_c(ev[i], params);
        common = std::min(common, c_max[i]);
    }

    CertificateResult out;
    const bool certified = common >= opt.c_floor;
    const double c_ref = certified ? common : opt.c_floor;
    out.deviation.reference_c = c_ref;
    for (std::size_t i = 0; i < ev.size(); ++i) {
        const SquareEvidence& e = ev[i];
        SquareDeviation d;
        d.square = e.square;
        d.c_max = c_max[i];
        d.disjoint = e.disjoint;
        if (e.disjoint) {
            d.sum_shortfall = d.min_length_shortfall = d.osc_shortfall = kInf;
            out.deviation.squares.push_back(d);
            continue;
        }
        const double R = e.square.half_side;
        const double need_sum = c_ref * std::pow(R, 1 + params.epsilon);
        const double need_min = c_ref * std::pow(R, 1 / params.theta0());
        d.available_length = e.prefix.back();
        d.sum_shortfall = need_sum / d.available_length;
        const std::size_t k = std::min(greedy_end(e, need_sum), e.intervals.size() - 1);
        d.worst_I = e.intervals[k];
        d.min_length_shortfall = d.worst_I.length() > 0 ? need_min / d.worst_I.length() : kInf;
        d.osc_shortfall = e.osc.best_c > 0 ? c_ref / e.osc.best_c : kInf;
        d.worst_J = e.osc.worst_J;
        out.deviation.squares.push_back(d);
    }

    if (!certified) return out;
    CoHolderCertificate cert;
    cert.params = params;
    cert.c = common;
    cert.theta0 = params.theta0();
    for (const auto& e : ev) {
        CertifiedSquare cs;
        cs.square = e.square;
        const std::size_t k = greedy_end(e, common * std::pow(e.square.half_side, 1 + params.epsilon));
        cs.intervals.assign(e.intervals.begin(), e.intervals.begin() + static_cast<std::ptrdiff_t>(k + 1));
        cs.total_length = e.prefix[k];
        cs.min_length = cs.intervals.back().length();
        cs.osc_constant = e.osc.best_c;
        cs.worst_J = e.osc.worst_J;
        cert.squares.push_back(std::move(cs));
    }
    out.certificate = std::move(cert);
    return out;
}

CertificateAudit reverify_certificate(const SampledFunction& f, const CoHolderCertificate& cert,
                                      const CertificateOptions& opt) {
    CertificateAudit audit;
    auto failure = [&](std::size_t n, const std::string& what) {
        audit.pass = false;
        audit.failures.push_back("square " + std::to_string(n) + ": " + what);
    };
    try {
        cert.params.validate();
    } catch (const Error& e) {
        audit.pass = false;
        audit.failures.push_back(e.what());
        return audit;
    }
    if (!(cert.c > 0 && cert.c < 1)) {
        audit.pass = false;
        audit.failures.push_back("c outside (0,1)");
    }
    if (cert.theta0 != cert.params.theta0()) {
        audit.pass = false;
        audit.failures.push_back("theta0 does not match alpha / (1 - eta - epsilon)");
    }
    const double th0 = cert.params.theta0();
    for (std::size_t n = 0; n < cert.squares.size(); ++n) {
        const CertifiedSquare& cs = cert.squares[n];
        const Square& q = cs.square;
        if (!(q.half_side > 0 && q.half_side < 1)) failure(n, "radius outside (0,1)");
        if (cs.intervals.empty()) {
            failure(n, "no intervals");
            continue;
        }
        auto sorted = cs.intervals;
        std::sort(sorted.begin(), sorted.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
        for (std::size_t k = 0; k + 1 < sorted.size(); ++k)
            if (!(sorted[k].hi < sorted[k + 1].lo)) failure(n, "intervals overlap");
        double total = 0, shortest = kInf;
        for (const auto& I : cs.intervals) {
            total += I.length();
            shortest = std::min(shortest, I.length());
            const IndexRange idx = f.indices_in(I.lo, I.hi);
            bool inside = !idx.empty;
            for (std::size_t i = idx.first; inside && i <= idx.last; ++i)
                inside = q.contains(f.t(i), f.value(i));
            if (!inside) failure(n, "interval [" + std::to_string(I.lo) + ", " + std::to_string(I.hi) + "] leaves the square");
        }
        if (total < cert.c * std::pow(q.half_side, 1 + cert.params.epsilon))
            failure(n, "total interval length below c R^{1+epsilon}");
        if (shortest < cert.c * std::pow(q.half_side, 1 / th0)) failure(n, "shortest interval below c R^{1/theta0}");
        const LowerOscillation lo =
            measure_lower_oscillation(f, q, cert.params.alpha, cert.params.eta, opt.J_count, opt.min_points);
        if (lo.best_c < cert.c) failure(n, "lower oscillation constant " + std::to_string(lo.best_c) + " below c");
    }
    return audit;
}

std::vector<Square> propose_squares(const SampledFunction& f, double R_hi, double R_lo, std::size_t count) {
    require(R_lo > 0 && R_lo <= R_hi && R_hi < 1, ErrorKind::invalid_argument,
            "propose squares: need 0 < R_lo <= R_hi < 1");
    std::vector<Square> out;
    std::size_t centre = argmax(f, {0, f.size() - 1, false});
    for (double R : geometric_ladder(R_hi, R_lo, count)) {
        const IndexRange idx = f.indices_in(f.t(centre) - R, f.t(centre) + R);
        centre = argmax(f, idx);
        out.push_back({f.t(centre), f.value(centre), R});
    }
    return out;
}

double lower_spectrum_bound(const CoHolderParams& params, double theta) {
    params.validate();
    const double th0 = params.theta0();
    require(theta > 0 && theta <= th0, ErrorKind::out_of_range,
            "lower spectrum bound: theta must lie in (0, theta0 = " + std::to_string(th0) + "]");
    if (theta == th0) return 2.0;
    return (2 - params.alpha - (1 + params.eta + params.epsilon) * theta) / (1 - theta);
}

double lower_spectrum_bound(const CoHolderCertificate& cert, double theta) {
    return lower_spectrum_bound(cert.params, theta);
}

}  // namespace aslb

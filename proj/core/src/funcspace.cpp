#include "aslb/funcspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

#include "aslb/stats.hpp"

namespace aslb {

namespace {

constexpr double kGridEps = 1e-9;

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

void validate_series(const char* family, double a, double b, double tol) {
    require(std::isfinite(a) && std::isfinite(b) && std::isfinite(tol), ErrorKind::invalid_spec,
            std::string(family) + ": non-finite parameter");
    require(a > 0 && a < 1, ErrorKind::invalid_spec, std::string(family) + ": a must lie in (0,1), got " + fmt(a));
    require(a * b > 1, ErrorKind::invalid_spec,
            std::string(family) + ": need b > 1/a, got a=" + fmt(a) + " b=" + fmt(b));
    require(tol > 0, ErrorKind::invalid_spec, std::string(family) + ": truncation_tol must be positive");
}

}  // namespace

int series_last_term(double a, double tol) {
    int n = 0;
    double tail = a / (1 - a);
    while (tail > tol) {
        tail *= a;
        ++n;
        require(n < 100000, ErrorKind::invalid_spec, "series truncation does not terminate");
    }
    return n;
}

void WeierstrassSpec::validate() const { validate_series("weierstrass", a, b, truncation_tol); }
int WeierstrassSpec::last_term() const { return series_last_term(a, truncation_tol); }
FunctionMeta WeierstrassSpec::meta() const {
    return {"weierstrass", {{"a", a}, {"b", b}, {"truncation_tol", truncation_tol}}};
}

void TakagiSpec::validate() const { validate_series("takagi", a, b, truncation_tol); }
int TakagiSpec::last_term() const { return series_last_term(a, truncation_tol); }
FunctionMeta TakagiSpec::meta() const {
    return {"takagi", {{"a", a}, {"b", b}, {"truncation_tol", truncation_tol}}};
}

double eval_weierstrass(const WeierstrassSpec& spec, double t) {
    spec.validate();
    return eval_weierstrass<double>(spec, t, spec.last_term());
}

double eval_takagi(const TakagiSpec& spec, double t) {
    spec.validate();
    return eval_takagi<double>(spec, t, spec.last_term());
}

std::string to_string(ZigzagVariant v) { return v == ZigzagVariant::plain ? "plain" : "log_corrected"; }

ZigzagVariant parse_zigzag_variant(const std::string& name) {
    if (name == "plain") return ZigzagVariant::plain;
    if (name == "log_corrected" || name == "log-corrected") return ZigzagVariant::log_corrected;
    fail(ErrorKind::invalid_spec, "unknown zigzag variant '" + name + "'");
}

void ZigzagSpec::validate() const {
    require(std::isfinite(s) && s > 2, ErrorKind::invalid_spec, "zigzag: s must exceed 2, got " + fmt(s));
    require(m_max >= first_index() + 1, ErrorKind::invalid_spec, "zigzag: m_max too small");
}

double ZigzagSpec::a(long long m) const {
    require(m >= first_index(), ErrorKind::invalid_argument, "zigzag: index below first index");
    const double md = static_cast<double>(m);
    const double base = std::pow(md, 1 - s);
    if (variant == ZigzagVariant::plain) return base;
    const double lg = std::log(md);
    return base / (lg * lg);
}

double ZigzagSpec::eps(long long m) const {
    const double md = static_cast<double>(m);
    const double l1 = std::log1p(1 / md);
    double log_ratio = (1 - s) * l1;  // log(a_{m+1}/a_m)
    if (variant == ZigzagVariant::log_corrected) log_ratio -= 2 * std::log1p(l1 / std::log(md));
    return -a(m) * std::expm1(log_ratio);
}

std::pair<double, double> ZigzagSpec::vertex(long long m) const {
    const double am = a(m);
    return {am, (m % 2 == 0) ? am : -am};
}

FunctionMeta ZigzagSpec::meta() const {
    return {"zigzag",
            {{"s", s},
             {"m_max", static_cast<double>(m_max)},
             {"log_corrected", variant == ZigzagVariant::log_corrected ? 1.0 : 0.0}}};
}

PiecewiseLinearFunction::PiecewiseLinearFunction(std::vector<Point> breakpoints) : pts_(std::move(breakpoints)) {
    require(pts_.size() >= 2, ErrorKind::invalid_argument, "piecewise linear: need at least two breakpoints");
    for (std::size_t i = 0; i < pts_.size(); ++i) {
        require(std::isfinite(pts_[i].x) && std::isfinite(pts_[i].y), ErrorKind::invalid_argument,
                "piecewise linear: non-finite breakpoint");
        if (i > 0)
            require(pts_[i].x > pts_[i - 1].x, ErrorKind::invalid_argument,
                    "piecewise linear: x must be strictly increasing");
    }
}

double PiecewiseLinearFunction::operator()(double x) const {
    require(x >= lo() && x <= hi(), ErrorKind::out_of_range,
            "piecewise linear: x=" + fmt(x) + " outside [" + fmt(lo()) + ", " + fmt(hi()) + "]");
    auto it = std::upper_bound(pts_.begin(), pts_.end(), x, [](double v, const Point& p) { return v < p.x; });
    const std::size_t j = static_cast<std::size_t>(it - pts_.begin());  // first breakpoint with x_j > x
    const Point& p = pts_[j - 1];
    if (p.x == x || j == pts_.size()) return p.y;
    const Point& q = pts_[j];
    return p.y + (q.y - p.y) * ((x - p.x) / (q.x - p.x));
}

PiecewiseLinearFunction build_zigzag(const ZigzagSpec& spec) {
    spec.validate();
    std::vector<PiecewiseLinearFunction::Point> pts;
    pts.reserve(static_cast<std::size_t>(spec.m_max - spec.first_index() + 2));
    pts.push_back({0.0, 0.0});
    for (long long m = spec.m_max; m >= spec.first_index(); --m) {
        const auto [x, y] = spec.vertex(m);
        pts.push_back({x, y});
    }
    return PiecewiseLinearFunction(std::move(pts));
}

Generator::Generator(FunctionMeta meta, Eval eval, EvalExtended eval_ext)
    : meta_(std::move(meta)), eval_(std::move(eval)), eval_ext_(std::move(eval_ext)) {
    require(static_cast<bool>(eval_), ErrorKind::invalid_argument, "generator needs an evaluator");
}

long double Generator::extended(long double t) const {
    if (eval_ext_) return eval_ext_(t);
    return eval_(static_cast<double>(t));
}

long double Generator::local(long double anchor, long double offset) const {
    if (eval_local_) return eval_local_(anchor, offset);
    return extended(anchor + offset);
}

Generator& Generator::with_local(EvalLocal f) {
    eval_local_ = std::move(f);
    return *this;
}

Generator& Generator::with_resolution(double r) {
    resolution_ = r;
    return *this;
}

bool is_power_of_two(double b) {
    int e = 0;
    return b >= 2 && std::frexp(b, &e) == 0.5;
}

Generator weierstrass_generator(const WeierstrassSpec& spec) {
    spec.validate();
    const int n = spec.last_term();
    Generator g(
        spec.meta(), [spec, n](double t) { return eval_weierstrass<double>(spec, t, n); },
        [spec, n](long double t) { return eval_weierstrass<long double>(spec, t, n); });
    g.with_resolution(std::pow(spec.b, -(n + 1)));
    return g;
}

Generator takagi_generator(const TakagiSpec& spec) {
    spec.validate();
    const int n = spec.last_term();
    Generator g(
        spec.meta(), [spec, n](double t) { return eval_takagi<double>(spec, t, n); },
        [spec, n](long double t) { return eval_takagi<long double>(spec, t, n); });
    g.with_resolution(std::pow(spec.b, -(n + 1)));
    if (is_power_of_two(spec.b))
        g.with_local([spec, n](long double anchor, long double offset) {
            return eval_takagi_local<long double>(spec, anchor, offset, n);
        });
    return g;
}

Generator zigzag_generator(const ZigzagSpec& spec) {
    auto pl = std::make_shared<PiecewiseLinearFunction>(build_zigzag(spec));
    return Generator(spec.meta(), [pl](double x) { return (*pl)(x); });
}

Generator identity_generator() {
    return Generator({"identity", {}}, [](double t) { return t; }, [](long double t) { return t; });
}

Generator constant_generator(double value) {
    return Generator(
        {"constant", {{"value", value}}}, [value](double) { return value; },
        [value](long double) { return static_cast<long double>(value); });
}

Generator tent_generator() {
    return Generator(
        {"tent", {}}, [](double x) { return 1 - std::abs(2 * x - 1); },
        [](long double x) { return 1 - std::abs(2 * x - 1); });
}

SampledFunction::SampledFunction(double domain_lo, double domain_hi, double step, std::vector<double> values,
                                 FunctionMeta meta)
    : lo_(domain_lo), hi_(domain_hi), step_(step), values_(std::move(values)), meta_(std::move(meta)) {
    require(std::isfinite(lo_) && std::isfinite(hi_) && lo_ < hi_, ErrorKind::invalid_argument,
            "sampled function: need finite domain_lo < domain_hi");
    require(std::isfinite(step_) && step_ > 0, ErrorKind::invalid_argument, "sampled function: step must be positive");
    const double expected = std::floor((hi_ - lo_) / step_ + kGridEps) + 1;
    require(static_cast<double>(values_.size()) == expected, ErrorKind::invalid_argument,
            "sampled function: expected " + fmt(expected) + " values, got " + std::to_string(values_.size()));
    for (double v : values_)
        require(std::isfinite(v), ErrorKind::invalid_argument, "sampled function: non-finite value");
}

IndexRange SampledFunction::indices_in(double a, double b) const {
    IndexRange r;
    if (!(a <= b)) return r;
    const double n1 = static_cast<double>(values_.size() - 1);
    double first = std::ceil((a - lo_) / step_ - kGridEps);
    double last = std::floor((b - lo_) / step_ + kGridEps);
    first = std::max(first, 0.0);
    last = std::min(last, n1);
    if (first > last) return r;
    r.first = static_cast<std::size_t>(first);
    r.last = static_cast<std::size_t>(last);
    r.empty = false;
    return r;
}

std::size_t SampledFunction::nearest_index(double x) const {
    const double i = std::round((x - lo_) / step_);
    if (i <= 0) return 0;
    return std::min(static_cast<std::size_t>(i), values_.size() - 1);
}

bool SampledFunction::same_grid(const SampledFunction& other) const {
    return lo_ == other.lo_ && hi_ == other.hi_ && step_ == other.step_ && values_.size() == other.values_.size();
}

SampledFunction sample_function(const Generator& g, double lo, double hi, std::size_t n_samples) {
    require(n_samples >= 2, ErrorKind::invalid_argument, "sample_function: need at least 2 samples");
    require(std::isfinite(lo) && std::isfinite(hi) && lo < hi, ErrorKind::invalid_argument,
            "sample_function: need lo < hi");
    const double h = (hi - lo) / static_cast<double>(n_samples - 1);
    std::vector<double> values(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) values[i] = g(lo + static_cast<double>(i) * h);
    return SampledFunction(lo, hi, h, std::move(values), g.meta());
}

SampledFunction add(const SampledFunction& g, const SampledFunction& h) {
    require(g.same_grid(h), ErrorKind::grid_mismatch, "add: functions are sampled on different grids");
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = g.value(i) + h.value(i);
    return SampledFunction(g.domain_lo(), g.domain_hi(), g.step(), std::move(v), {"sum", {}});
}

double oscillation(const SampledFunction& f, double a, double b) {
    const IndexRange r = f.indices_in(a, b);
    require(!r.empty, ErrorKind::empty_interval,
            "oscillation: no grid point in [" + fmt(a) + ", " + fmt(b) + "]");
    const auto v = f.values().subspan(r.first, r.size());
    const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
    return *mx - *mn;
}

RangeExtrema::RangeExtrema(std::span<const double> values) : values_(values) {
    const std::size_t nb = (values.size() + kBlock - 1) / kBlock;
    std::vector<double> bmin(nb), bmax(nb);
    for (std::size_t b = 0; b < nb; ++b) {
        const std::size_t e = std::min(values.size(), (b + 1) * kBlock);
        const auto [mn, mx] = std::minmax_element(values.begin() + b * kBlock, values.begin() + e);
        bmin[b] = *mn;
        bmax[b] = *mx;
    }
    block_min_.push_back(std::move(bmin));
    block_max_.push_back(std::move(bmax));
    for (std::size_t w = 1; 2 * w <= nb; w *= 2) {
        const auto& pmin = block_min_.back();
        const auto& pmax = block_max_.back();
        std::vector<double> lmin(nb - 2 * w + 1), lmax(nb - 2 * w + 1);
        for (std::size_t i = 0; i < lmin.size(); ++i) {
            lmin[i] = std::min(pmin[i], pmin[i + w]);
            lmax[i] = std::max(pmax[i], pmax[i + w]);
        }
        block_min_.push_back(std::move(lmin));
        block_max_.push_back(std::move(lmax));
    }
}

std::pair<double, double> RangeExtrema::minmax(std::size_t i, std::size_t j) const {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    auto scan = [&](std::size_t a, std::size_t b) {
        for (std::size_t k = a; k <= b; ++k) {
            lo = std::min(lo, values_[k]);
            hi = std::max(hi, values_[k]);
        }
    };
    const std::size_t bi = i / kBlock, bj = j / kBlock;
    if (bj <= bi + 1) {
        scan(i, j);
        return {lo, hi};
    }
    scan(i, (bi + 1) * kBlock - 1);
    scan(bj * kBlock, j);
    const std::size_t a = bi + 1, b = bj - 1, len = b - a + 1;
    std::size_t level = 0;
    while ((std::size_t{2} << level) <= len) ++level;
    const std::size_t w = std::size_t{1} << level;
    lo = std::min({lo, block_min_[level][a], block_min_[level][b + 1 - w]});
    hi = std::max({hi, block_max_[level][a], block_max_[level][b + 1 - w]});
    return {lo, hi};
}

void HolderWitness::validate() const {
    require(alpha > 0 && alpha < 1, ErrorKind::invalid_argument, "witness: alpha must lie in (0,1)");
    require(C_upper > 0 && c_lower > 0, ErrorKind::invalid_argument, "witness: constants must be positive");
    require(c_lower <= C_upper, ErrorKind::invalid_argument, "witness: need c_lower <= C_upper");
    require(r0 > 0, ErrorKind::invalid_argument, "witness: r0 must be positive");
}

void HolderWitness::validate_against(double domain_length) const {
    validate();
    require(r0 <= domain_length, ErrorKind::invalid_argument, "witness: r0 exceeds the domain length");
}

std::string to_string(EnergyVerdict v) {
    switch (v) {
        case EnergyVerdict::converging: return "converging";
        case EnergyVerdict::diverging: return "diverging";
        case EnergyVerdict::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

double energy_term(const ZigzagSpec& z, double q, long long m) {
    const double sum = z.a(m) + z.a(m + 1);
    return std::exp(q * std::log(sum) - (q - 1) * std::log(z.eps(m)));
}

EnergyResult p_energy(const ZigzagSpec& z, double q, long long m_max, const EnergyOptions& opt) {
    require(std::isfinite(q) && q >= 1, ErrorKind::invalid_argument, "p_energy: q must be >= 1");
    require(std::isfinite(z.s) && z.s > 2, ErrorKind::invalid_spec, "p_energy: s must exceed 2");
    EnergyResult res;
    res.q = q;
    res.m_first = z.first_index();
    require(m_max >= res.m_first + 20, ErrorKind::invalid_argument, "p_energy: m_max too small for a tail fit");

    std::vector<double> terms(static_cast<std::size_t>(m_max - res.m_first + 1));
    res.partial_sums.resize(terms.size());
    long double acc = 0;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        terms[i] = energy_term(z, q, res.m_first + static_cast<long long>(i));
        acc += terms[i];
        res.partial_sums[i] = static_cast<double>(acc);
    }

    const long long tail_lo =
        std::max(res.m_first + 1, static_cast<long long>(static_cast<double>(m_max) / opt.tail_fraction));
    std::vector<double> lm, lt, llm, lmt;
    const int n_fit = 64;
    long long prev = -1;
    for (int i = 0; i < n_fit; ++i) {
        const double frac = static_cast<double>(i) / (n_fit - 1);
        const auto m = static_cast<long long>(
            std::llround(std::exp(std::log(static_cast<double>(tail_lo)) +
                                  frac * (std::log(static_cast<double>(m_max)) - std::log(static_cast<double>(tail_lo))))));
        if (m == prev) continue;
        prev = m;
        const double t = terms[static_cast<std::size_t>(m - res.m_first)];
        const double md = static_cast<double>(m);
        lm.push_back(std::log(md));
        lt.push_back(std::log(t));
        llm.push_back(std::log(std::log(md)));
        lmt.push_back(std::log(md * t));
    }
    res.tail_exponent = -fit_line(lm, lt).slope;
    if (res.tail_exponent > 1 + opt.margin) {
        res.verdict = EnergyVerdict::converging;
    } else if (res.tail_exponent < 1 - opt.margin) {
        res.verdict = EnergyVerdict::diverging;
    } else {
        // borderline m^{-1}: decide by the Bertrand exponent of log m
        res.used_log_refinement = true;
        res.log_exponent = -fit_line(llm, lmt).slope;
        if (res.log_exponent > 1 + opt.margin)
            res.verdict = EnergyVerdict::converging;
        else if (res.log_exponent < 1 - opt.margin)
            res.verdict = EnergyVerdict::diverging;
        else
            res.verdict = EnergyVerdict::inconclusive;
    }
    return res;
}

}  // namespace aslb

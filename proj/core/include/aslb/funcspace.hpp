#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "aslb/error.hpp"

namespace aslb {

/// Family name plus numeric parameters; carried by every sampled function.
struct FunctionMeta {
    std::string family;
    std::map<std::string, double> params;

    bool operator==(const FunctionMeta&) const = default;
};

/// 1-periodic tent with range [0, 1/2].
template <std::floating_point Real>
Real sawtooth(Real t) {
    const Real u = t - std::floor(t);
    return u <= Real(0.5) ? u : Real(1) - u;
}

struct WeierstrassSpec {
    double a = 0.5;
    double b = 3.0;
    double truncation_tol = 1e-12;

    void validate() const;
    double alpha() const { return -std::log(a) / std::log(b); }
    /// Index N of the last retained term: smallest N with a^{N+1}/(1-a) <= tol.
    int last_term() const;
    FunctionMeta meta() const;
};

struct TakagiSpec {
    double a = 0.70710678118654752;  // 2^{-1/2}, alpha = 1/2
    double b = 2.0;
    double truncation_tol = 1e-12;

    void validate() const;
    double alpha() const { return -std::log(a) / std::log(b); }
    int last_term() const;
    FunctionMeta meta() const;
};

int series_last_term(double a, double tol);

template <std::floating_point Real>
Real eval_weierstrass(const WeierstrassSpec& spec, Real t, int last_term) {
    Real sum = 0, an = 1, bn = 1;
    const Real a = spec.a, b = spec.b;
    for (int n = 0; n <= last_term; ++n) {
        sum += an * std::cos(bn * t);
        an *= a;
        bn *= b;
    }
    return sum;
}

template <std::floating_point Real>
Real eval_takagi(const TakagiSpec& spec, Real t, int last_term) {
    Real sum = 0, an = 1, bn = 1;
    const Real a = spec.a, b = spec.b;
    const bool integral_base = std::floor(spec.b) == spec.b;
    for (int n = 0; n <= last_term; ++n) {
        const Real x = bn * t;
        // with an integer base every later argument is an integer too
        if (integral_base && x == std::floor(x)) break;
        sum += an * sawtooth(x);
        an *= a;
        bn *= b;
    }
    return sum;
}

/// Takagi sum at anchor + offset for a power-of-two base. Every b^n-multiple of
/// anchor and offset is reduced mod 1 exactly, so offsets far below the
/// spacing of representable numbers near anchor still resolve.
template <std::floating_point Real>
Real eval_takagi_local(const TakagiSpec& spec, Real anchor, Real offset, int last_term) {
    Real sum = 0, an = 1, A = anchor, O = offset;
    const Real a = spec.a, b = spec.b;
    for (int n = 0; n <= last_term; ++n) {
        Real u = (A - std::floor(A)) + (O - std::floor(O));
        u -= std::floor(u);
        sum += an * sawtooth(u);
        an *= a;
        A *= b;
        O *= b;
    }
    return sum;
}

bool is_power_of_two(double b);

double eval_weierstrass(const WeierstrassSpec& spec, double t);
double eval_takagi(const TakagiSpec& spec, double t);

enum class ZigzagVariant { plain, log_corrected };

std::string to_string(ZigzagVariant v);
ZigzagVariant parse_zigzag_variant(const std::string& name);

struct ZigzagSpec {
    double s = 3.0;
    ZigzagVariant variant = ZigzagVariant::plain;
    long long m_max = 1000;

    void validate() const;
    long long first_index() const { return variant == ZigzagVariant::plain ? 1 : 2; }
    double a(long long m) const;
    /// a_m - a_{m+1}, computed without cancellation.
    double eps(long long m) const;
    std::pair<double, double> vertex(long long m) const;
    FunctionMeta meta() const;
};

/// Linear interpolation between breakpoints; exact at breakpoints.
class PiecewiseLinearFunction {
public:
    struct Point {
        double x;
        double y;
    };

    explicit PiecewiseLinearFunction(std::vector<Point> breakpoints);

    double operator()(double x) const;
    const std::vector<Point>& breakpoints() const { return pts_; }
    double lo() const { return pts_.front().x; }
    double hi() const { return pts_.back().x; }

private:
    std::vector<Point> pts_;
};

PiecewiseLinearFunction build_zigzag(const ZigzagSpec& spec);

/// A function of one real variable with optional extended-precision evaluation.
class Generator {
public:
    using Eval = std::function<double(double)>;
    using EvalExtended = std::function<long double(long double)>;
    /// f(anchor + offset) without forming the sum.
    using EvalLocal = std::function<long double(long double, long double)>;

    Generator(FunctionMeta meta, Eval eval, EvalExtended eval_ext = {});

    double operator()(double t) const { return eval_(t); }
    long double extended(long double t) const;
    long double local(long double anchor, long double offset) const;
    bool has_extended() const { return static_cast<bool>(eval_ext_); }
    bool has_local() const { return static_cast<bool>(eval_local_); }
    const FunctionMeta& meta() const { return meta_; }
    /// Argument spacing below which the implemented function carries no further
    /// detail (e.g. the period of the last retained series term); 0 if unknown.
    double resolution() const { return resolution_; }

    Generator& with_local(EvalLocal f);
    Generator& with_resolution(double r);

private:
    FunctionMeta meta_;
    Eval eval_;
    EvalExtended eval_ext_;
    EvalLocal eval_local_;
    double resolution_ = 0;
};

Generator weierstrass_generator(const WeierstrassSpec& spec);
Generator takagi_generator(const TakagiSpec& spec);
Generator zigzag_generator(const ZigzagSpec& spec);
Generator identity_generator();
Generator constant_generator(double value);
Generator tent_generator();

struct IndexRange {
    std::size_t first = 0;
    std::size_t last = 0;  // inclusive
    bool empty = true;

    std::size_t size() const { return empty ? 0 : last - first + 1; }
};

class SampledFunction {
public:
    SampledFunction(double domain_lo, double domain_hi, double step, std::vector<double> values,
                    FunctionMeta meta = {});

    double domain_lo() const { return lo_; }
    double domain_hi() const { return hi_; }
    double step() const { return step_; }
    std::size_t size() const { return values_.size(); }
    std::span<const double> values() const { return values_; }
    double value(std::size_t i) const { return values_[i]; }
    double t(std::size_t i) const { return lo_ + static_cast<double>(i) * step_; }
    const FunctionMeta& meta() const { return meta_; }

    /// Grid indices i with t_i in the closed interval [a, b].
    IndexRange indices_in(double a, double b) const;
    std::size_t nearest_index(double x) const;
    bool same_grid(const SampledFunction& other) const;

private:
    double lo_;
    double hi_;
    double step_;
    std::vector<double> values_;
    FunctionMeta meta_;
};

SampledFunction sample_function(const Generator& g, double lo, double hi, std::size_t n_samples);
SampledFunction add(const SampledFunction& g, const SampledFunction& h);

double oscillation(const SampledFunction& f, double a, double b);

/// Range min/max over inclusive index ranges: blocks of 64 samples plus a
/// sparse table over block extrema.
class RangeExtrema {
public:
    explicit RangeExtrema(std::span<const double> values);

    std::pair<double, double> minmax(std::size_t i, std::size_t j) const;
    double osc(std::size_t i, std::size_t j) const {
        const auto [lo, hi] = minmax(i, j);
        return hi - lo;
    }

private:
    static constexpr std::size_t kBlock = 64;
    std::span<const double> values_;
    std::vector<std::vector<double>> block_min_;
    std::vector<std::vector<double>> block_max_;
};

struct HolderWitness {
    double alpha = 0.5;
    double C_upper = 1.0;
    double c_lower = 0.1;
    double r0 = 0.1;

    void validate() const;
    void validate_against(double domain_length) const;
    double c_tilde() const { return std::min(1.0, c_lower / 2.0); }
};

enum class EnergyVerdict { converging, diverging, inconclusive };

std::string to_string(EnergyVerdict v);

struct EnergyOptions {
    double margin = 0.1;
    /// Tail window starts at m_max / tail_fraction.
    double tail_fraction = 10.0;
};

struct EnergyResult {
    double q = 0;
    long long m_first = 1;
    std::vector<double> partial_sums;  // partial_sums[i] sums terms m_first..m_first+i
    EnergyVerdict verdict = EnergyVerdict::inconclusive;
    double tail_exponent = 0;  // t_m ~ m^{-beta}
    double log_exponent = 0;   // m t_m ~ log^{-kappa} m
    bool used_log_refinement = false;
};

double energy_term(const ZigzagSpec& z, double q, long long m);
EnergyResult p_energy(const ZigzagSpec& z, double q, long long m_max, const EnergyOptions& opt = {});

}  // namespace aslb

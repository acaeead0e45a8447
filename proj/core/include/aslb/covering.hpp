#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "aslb/funcspace.hpp"
#include "aslb/stats.hpp"

namespace aslb {

/// Closed axis-parallel square of side 2 * half_side.
struct Square {
    double cx = 0;
    double cy = 0;
    double half_side = 1;

    double x_lo() const { return cx - half_side; }
    double x_hi() const { return cx + half_side; }
    double y_lo() const { return cy - half_side; }
    double y_hi() const { return cy + half_side; }
    bool contains(double x, double y) const {
        return x >= x_lo() && x <= x_hi() && y >= y_lo() && y <= y_hi();
    }
};

struct CoverReport {
    Square square;
    double r = 0;
    long long count = 0;
    std::vector<long long> per_column_counts;
};

/// Cells of side r anchored at the square's lower-left corner. Column j is the
/// closed strip [x_j, x_j + r]; within it every row between the lowest and the
/// highest sample (clipped to the square) is counted, since the graph over a
/// column is connected.
CoverReport column_cover_count(const SampledFunction& f, const Square& q, double r);

struct BoxDimensionResult {
    double estimate = 0;
    LineFit fit;
    Square square;
    std::vector<double> scales;
    std::vector<long long> counts;
};

BoxDimensionResult box_dimension(const SampledFunction& f, std::span<const double> r_ladder);

/// Geometric ladder of `count` values from `first` to `last` inclusive.
std::vector<double> geometric_ladder(double first, double last, std::size_t count);

struct SpectrumEvidence {
    double center_x = 0;
    double center_y = 0;
    double R = 0;
    double r = 0;
    long long count = 0;
    double exponent = 0;
};

struct SpectrumPoint {
    double theta = 0;
    /// Regression estimate when the ladder has at least two scales, else the max estimate.
    double exponent = 0;
    double max_exponent = 0;
    double regression_exponent = std::numeric_limits<double>::quiet_NaN();
    double regression_r2 = std::numeric_limits<double>::quiet_NaN();
    SpectrumEvidence evidence;                  // maximiser of the max estimator
    std::vector<SpectrumEvidence> per_scale;    // best center for each R
};

struct SpectrumCurve {
    std::vector<SpectrumPoint> points;
};

SpectrumPoint spectrum_at_theta(const SampledFunction& f, double theta, std::span<const double> R_ladder,
                                std::span<const double> centers, int jobs = 1);

/// Smallest R for which R^{1/theta} still clears the resolution guard.
double min_admissible_R(const SampledFunction& f, double theta);

/// `n_ladders` interleaved geometric ladders spanning the admissible R range.
std::vector<std::vector<double>> default_R_ladders(const SampledFunction& f, double theta, int n_ladders,
                                                   int scales_per_ladder, double R_max = 0.5);

double regularized_spectrum(const SpectrumCurve& curve, double theta);

struct Regularity {
    enum class Kind { holder, sobolev };
    Kind kind = Kind::holder;
    double value = 0.5;  // alpha for holder, p for sobolev (may be +inf)

    static Regularity holder(double alpha) { return {Kind::holder, alpha}; }
    static Regularity sobolev(double p) { return {Kind::sobolev, p}; }

    void validate() const;
    /// Upper end of the nontrivial theta range.
    double theta_max() const;
    /// Closed-form upper bound for the spectrum at theta, capped at 2.
    double bound(double theta) const;
    std::string describe() const;
};

struct AuditOptions {
    int n_centers = 20;
    int n_ladders = 4;
    int scales_per_ladder = 5;
    double tolerance = 0.05;
    double R_max = 0.5;
    std::uint64_t seed = 1;
    int jobs = 1;
    /// Centers are drawn from [center_lo, center_hi]; NaN means the domain.
    double center_lo = std::numeric_limits<double>::quiet_NaN();
    double center_hi = std::numeric_limits<double>::quiet_NaN();
};

struct AuditRow {
    double theta = 0;
    double bound = 0;
    std::vector<double> ladder_exponents;      // regression estimate per ladder
    std::vector<double> ladder_max_exponents;  // max estimate per ladder
    double worst_exponent = 0;
    double worst_max_exponent = 0;
    SpectrumEvidence worst_evidence;
    bool violation = false;
};

struct UpperBoundAudit {
    Regularity regularity;
    double tolerance = 0.05;
    std::vector<double> centers;
    std::vector<AuditRow> rows;
    bool pass = true;
};

UpperBoundAudit audit_upper_bound(const SampledFunction& f, const Regularity& regularity,
                                  std::span<const double> theta_grid, const AuditOptions& opt = {});

struct RotationCheck {
    double max_abs_slope = 0;
    bool pass = false;
};

RotationCheck rotate_monotone_check(const SampledFunction& f, double tol = 1e-9);

/// Random monotone step function on [0,1]: `steps` jumps of random height at
/// random grid positions, nonincreasing when `decreasing`.
SampledFunction random_staircase(std::size_t samples, int steps, std::uint64_t seed, bool decreasing = false);

/// Random walk with uniform increments in [-scale, scale] on [0,1].
SampledFunction random_walk(std::size_t samples, double scale, std::uint64_t seed);

bool graph_sum_osc_check(const SampledFunction& g, const SampledFunction& h, int trials, std::uint64_t seed = 1);

/// Uniform double in [0,1) from the top 53 bits; stable across standard libraries.
double unit_uniform(std::uint64_t bits);

}  // namespace aslb

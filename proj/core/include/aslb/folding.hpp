#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "aslb/covering.hpp"
#include "aslb/funcspace.hpp"

namespace aslb {

enum class Precision { standard, extended };

std::string to_string(Precision p);
Precision parse_precision(const std::string& name);

/// Unit roundoff spacing at x for the evaluation precision.
long double ulp_at(long double x, Precision p);

/// Samples plus an optional pointwise evaluator. Without a generator, values
/// between grid points come from linear interpolation of the samples.
class FunctionSource {
public:
    explicit FunctionSource(SampledFunction base);
    FunctionSource(SampledFunction base, Generator generator);

    const SampledFunction& base() const { return base_; }
    bool has_generator() const { return generator_.has_value(); }
    long double eval(long double x, Precision p) const;
    /// f(anchor + offset); exact-reduction path when the generator offers one.
    long double eval_local(long double anchor, long double offset, Precision p) const;
    /// Smallest argument spacing that still carries detail near x.
    long double argument_quantum(long double x, Precision p) const;

private:
    SampledFunction base_;
    std::optional<Generator> generator_;
};

struct Band {
    long double lo = 0;
    long double hi = 0;

    bool contains(long double y) const { return y >= lo && y <= hi; }
};

/// Reflect y across the band edges until it lands inside; returns the value and
/// the number of reflections applied.
template <class Real>
std::pair<Real, int> accordion_fold(Real y, Real lo, Real hi) {
    int n = 0;
    while (y > hi || y < lo) {
        y = y > hi ? 2 * hi - y : 2 * lo - y;
        ++n;
    }
    return {y, n};
}

struct FoldResult {
    std::vector<double> values;
    int reflections = 0;  // largest per-sample reflection count
};

FoldResult fold_rectangle(std::span<const double> segment, Band band);

std::vector<double> find_local_maxima(const SampledFunction& f, int window, const Generator* refine = nullptr);

struct DeltaRadius {
    double m = 0;
    double delta = 0;
};

/// Distance from the grid maximum at m to the nearest grid point where f >= f(m),
/// or to the domain edge when there is none.
DeltaRadius delta_radius(const SampledFunction& f, double m);

/// World coordinates = origin + scale * local coordinates.
struct LocalFrame {
    long double x0 = 0;
    long double y0 = 0;
    long double scale = 1;

    long double to_local_x(long double x) const { return (x - x0) / scale; }
    long double to_local_y(long double y) const { return (y - y0) / scale; }
    long double to_world_x(long double u) const { return x0 + scale * u; }
    long double to_world_y(long double v) const { return y0 + scale * v; }
};

struct MaximumCandidate {
    long double m = 0;
    long double delta = 0;
    long double value = 0;
};

struct FoldSquare {
    long double m = 0;
    long double delta = 0;  // r_k^{theta0}
    long double f_m = 0;
    int orientation = 1;    // +1: span [m - delta, m]; -1: span [m, m + delta]
    LocalFrame frame;
    std::vector<MaximumCandidate> alternatives;

    long double span_lo() const { return orientation > 0 ? m - delta : m; }
    long double span_hi() const { return orientation > 0 ? m : m + delta; }
    Band band() const { return {f_m - delta, f_m + delta}; }
    Square square() const {
        return {static_cast<double>(m), static_cast<double>(f_m), static_cast<double>(delta)};
    }
};

struct FoldPlan {
    double theta0 = 0;
    Precision precision = Precision::standard;
    int orientation = 1;
    std::vector<FoldSquare> squares;
};

struct PlanOptions {
    Precision precision = Precision::standard;
    std::size_t search_points = 65537;
    std::size_t max_alternatives = 8;
};

int depth_cap(Precision p);

FoldPlan plan_squares(const FunctionSource& f, const HolderWitness& witness, double theta0, int K,
                      const PlanOptions& opt = {});

struct FoldPatch {
    std::size_t square = 0;
    LocalFrame frame;
    std::vector<double> u;         // local abscissae
    std::vector<double> v_base;    // local ordinates before folding
    std::vector<double> v_folded;  // local ordinates after folding
    int reflections = 0;
};

class FoldedFunction {
public:
    FoldedFunction(FunctionSource source, FoldPlan plan, std::size_t patch_samples = 4097);

    const FunctionSource& source() const { return source_; }
    const SampledFunction& base() const { return source_.base(); }
    const FoldPlan& plan() const { return plan_; }
    const std::vector<FoldPatch>& patches() const { return patches_; }
    const std::vector<int>& reflection_counts() const { return reflections_; }
    Precision precision() const { return plan_.precision; }

    /// Index of the square whose span contains x, or -1.
    int square_at(long double x) const;
    long double value(long double x) const;
    long double value_local(long double anchor, long double offset) const;
    long double base_value(long double x) const { return source_.eval(x, plan_.precision); }
    /// Folded values on the base grid.
    SampledFunction to_sampled() const;

    std::vector<std::string> warnings;

private:
    FunctionSource source_;
    FoldPlan plan_;
    std::vector<FoldPatch> patches_;
    std::vector<int> reflections_;
};

struct FoldOptions {
    PlanOptions plan;
    std::size_t patch_samples = 4097;
    int witness_trials = 2000;
    std::uint64_t seed = 1;
};

struct WitnessCheck {
    bool upper_ok = true;
    bool lower_ok = true;
    double worst_upper_ratio = 0;  // max |f(t)-f(s)| / (C |t-s|^alpha)
    double worst_lower_ratio = 0;  // min osc(f,I) / (c |I|^alpha)
    std::pair<double, double> upper_pair{0, 0};
    std::pair<double, double> lower_interval{0, 0};
    std::vector<std::string> warnings;
};

/// Spot-checks both witness inequalities on random pairs and intervals.
WitnessCheck check_witness(const FunctionSource& f, const HolderWitness& w, int trials, std::uint64_t seed);

struct WitnessEstimateOptions {
    int pairs_per_scale = 256;
    int intervals_per_scale = 128;
    int osc_points = 65;
    double min_length = 1e-9;
    std::uint64_t seed = 1;
};

/// Measured stand-ins for C (largest observed ratio) and c (smallest observed
/// oscillation ratio on intervals no longer than r0).
HolderWitness estimate_witness(const FunctionSource& f, double alpha, double r0,
                               const WitnessEstimateOptions& opt = {});

FoldedFunction run_folding(const FunctionSource& f, const HolderWitness& witness, double theta0, int K,
                           const FoldOptions& opt = {});

struct FoldInvariants {
    bool locality = true;
    bool band_containment = true;
    bool reflection_bound = true;
    bool nesting = true;
    bool containment = true;
    bool disjoint = true;
    bool edge_continuity = true;
    std::vector<long long> reflection_limits;  // M_k + 1
    std::vector<std::string> failures;

    bool all() const {
        return locality && band_containment && reflection_bound && nesting && containment && disjoint &&
               edge_continuity;
    }
};

FoldInvariants check_invariants(const FoldedFunction& ff, const HolderWitness& witness);

struct VerifyOptions {
    std::size_t holder_pairs = 100000;
    std::size_t column_points = 65;
    std::size_t column_cap = 16384;      // exhaustive up to this many columns
    std::size_t sampled_columns = 4096;  // otherwise a seeded subset of this size
    std::uint64_t seed = 1;
    int jobs = 1;
};

struct HolderCheck {
    std::size_t pairs = 0;
    double max_ratio = 0;  // max |f~(t)-f~(s)| / (C |t-s|^alpha), must be <= 3
    double worst_t = 0;
    double worst_s = 0;
    bool pass = true;
};

enum class CheckStatus { pass, fail, unresolvable };

std::string to_string(CheckStatus s);

struct ColumnCheck {
    std::size_t square = 0;
    double theta = 0;
    double r_tilde = 0;
    std::string mode;  // "exhaustive" or "sampled"
    // lower oscillation per column
    std::size_t columns_total = 0;
    std::size_t columns_checked = 0;
    double min_osc_ratio = 0;  // min osc / r~^alpha
    double threshold_osc = 0;  // c~
    double worst_column_lo = 0;
    CheckStatus osc_status = CheckStatus::pass;
    // column count over Q_k
    double count = 0;            // exact or estimated N(Q_k, r~)
    double threshold_count = 0;  // 0.5 c~ r~^{alpha+theta-2}
    CheckStatus count_status = CheckStatus::pass;
};

struct FoldVerification {
    HolderCheck holder;
    double c_tilde = 0;
    std::vector<ColumnCheck> columns;
    bool pass = true;
    std::size_t unresolvable = 0;
};

FoldVerification verify_fold(const FoldedFunction& ff, const HolderWitness& witness,
                             std::span<const double> theta_grid, const VerifyOptions& opt = {});

}  // namespace aslb

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "aslb/funcspace.hpp"

namespace aslb {

struct PackingPoint {
    long long m = 0;
    long long k = 0;  // 1-based position along [z_m, z_{m+1}]
    double x = 0;
    double y = 0;
};

struct PackingSet {
    double s = 3;
    double theta = 0.5;
    long long n = 10;
    ZigzagVariant variant = ZigzagVariant::plain;
    double c0 = 0;
    double R_n = 0;
    double r_n = 0;
    long long N_initial = 0;  // largest even integer <= c0 n^{(s-1)/(s theta)}
    long long N_n = 0;        // after shrinking
    int shrinks = 0;
    std::string binding;  // "", "M>=2" or "separation": the constraint that forced the last shrink
    std::vector<std::pair<long long, long long>> M;  // (m, M(m)) for m = n, n+2, ...
    std::vector<PackingPoint> points;

    ZigzagSpec zigzag() const;
    double target_gamma() const { return 1 + theta / ((1 - theta) * (s - 1)); }
};

double default_c0(double s);

/// Points equally spaced with both endpoints on each used segment; spacing is
/// |z_m - z_{m+1}| / (M(m) - 1) > r_n.
PackingSet build_packing(double s, double theta, long long n, double c0, ZigzagVariant variant);

/// Smallest n from which the unshrunk N(n) satisfies both constraints for 10
/// consecutive n. Scans up to n_limit.
long long default_n0(double s, double theta, ZigzagVariant variant, double c0, long long n_limit = 100000);

struct PackingViolation {
    std::size_t i = 0;
    std::size_t j = 0;
    double distance = 0;
    std::string what;
};

struct PackingAudit {
    double min_pairwise_distance = 0;
    std::pair<std::size_t, std::size_t> closest_pair{0, 0};
    long long cardinality = 0;
    long long sum_M = 0;
    double empirical_gamma = 0;
    double target_gamma = 0;
    bool separated = true;
    bool on_segments = true;
    bool in_square = true;
    bool cardinality_matches = true;
    bool exact_recheck = false;
    std::size_t rechecked_pairs = 0;
    std::vector<PackingViolation> violations;  // first few offenders

    bool pass() const { return separated && on_segments && in_square && cardinality_matches; }
};

struct PackingAuditOptions {
    /// Recheck the closest pair and near ties in 50-digit arithmetic; default is n <= 50.
    std::optional<bool> exact_recheck;
    std::size_t max_violations = 16;
    int jobs = 1;
};

/// Grid-bucketed all-pairs check; never throws on a failed audit.
PackingAudit audit_packing(const PackingSet& ps, const PackingAuditOptions& opt = {});

/// audit_packing, raising audit_failure with the offending pairs when it fails.
PackingAudit verify_packing(const PackingSet& ps, const PackingAuditOptions& opt = {});

struct PackingTrendRow {
    long long n = 0;
    long long N_n = 0;
    long long cardinality = 0;
    double R_n = 0;
    double r_n = 0;
    double gamma = 0;
    double min_distance = 0;
    double c2 = 0;  // cardinality / n^{(s-1)/theta + 2 - s}
    bool pass = false;
};

struct PackingTrend {
    double s = 3;
    double theta = 0.5;
    ZigzagVariant variant = ZigzagVariant::plain;
    double target_gamma = 0;
    std::vector<PackingTrendRow> rows;
    bool nondecreasing = true;
    bool below_target = true;  // every gamma < target
    double best_gamma = 0;
};

PackingTrend packing_exponent(double s, double theta, std::span<const long long> n_list, ZigzagVariant variant,
                              double c0, const PackingAuditOptions& opt = {});

/// Orlicz gauge t log^{2/s} t for t >= 1.
double orlicz_phi(double t, double s);
/// Inverse of orlicz_phi on [1, inf) by bisection.
double orlicz_phi_inverse(double y, double s);

/// Mean-value offset: the delta in (0,1) with a_m - a_{m+1} = -a'(m + delta).
double mvt_offset(const ZigzagSpec& z, long long m);

struct BorderlineParams {
    long long N_n = 0;
    std::string binding;  // constraint failing at N_n + 2
    double delta_1 = 0;   // offset at m = n + N - 2
    double delta_2 = 0;   // offset at m = n + N - 3
    double eta_n = 0;
    double eta_bar_n = 0;
    double phi_inverse_1 = 0;  // Phi^{-1}(c(s) n^{..} log^{..}(n) (1 + eta_n))
    double phi_inverse_2 = 0;  // Phi^{-1}(cbar(s) n^{..} log^{..}(n) (1 + etabar_n))
    double bound_1 = 0;        // right side of the first constraint
    double bound_2 = 0;        // right side of the second constraint
    double asymptotic_1 = 0;   // c'(s) n^{..} log^{..}(n) (1 + eta_n)
    double asymptotic_2 = 0;   // cbar'(s) n^{..} log^{..}(n) (1 + etabar_n)
};

/// Largest admissible even N(n) for the log-corrected sequence via the Orlicz
/// inverse; raises infeasible when N(n) < 2.
BorderlineParams borderline_params(double s, double theta, long long n);

struct RatioCheck {
    bool monotone = true;
    long long threshold_m = 0;  // checks start above this index
    double min_ratio_above = 0;
    bool pass = false;
};

/// a_{m+1}/a_m is increasing in m and exceeds 0.99 for m > 100 (s - 1).
RatioCheck ratio_check(const ZigzagSpec& z, long long m_to);

void write_packing_csv(std::ostream& os, const PackingSet& ps);

}  // namespace aslb

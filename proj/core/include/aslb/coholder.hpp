#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aslb/covering.hpp"
#include "aslb/funcspace.hpp"

namespace aslb {

struct Interval {
    double lo = 0;
    double hi = 0;

    double length() const { return hi - lo; }
};

/// Maximal runs of consecutive samples lying in q, longest first (ties by
/// position). Their union is the grid-resolved Proj_x(q ∩ graph).
std::vector<Interval> interval_decomposition(const SampledFunction& f, const Square& q);

/// Projection of q onto the sampled domain.
Interval projection(const SampledFunction& f, const Square& q);

struct LowerOscillation {
    double best_c = 0;  // min osc(f,J) / (|Proj_x q|^eta |J|^alpha)
    Interval worst_J;
    std::size_t tested = 0;
    int levels = 0;
};

/// Dyadic ladder of subintervals of Proj_x(q): level k has length |P| 2^-k and
/// visits up to J_count of its 2^k aligned positions in bit-reversed order, so a
/// larger J_count tests a superset. Levels stop once J would hold fewer than
/// `min_points` samples.
LowerOscillation measure_lower_oscillation(const SampledFunction& f, const Square& q, double alpha, double eta,
                                           int J_count, int min_points = 3);

struct CoHolderParams {
    double alpha = 0.5;
    double eta = 0;
    double epsilon = 0;

    void validate() const;
    double theta0() const { return alpha / (1 - eta - epsilon); }
};

struct CertifiedSquare {
    Square square;
    std::vector<Interval> intervals;  // greedy selection
    double total_length = 0;
    double min_length = 0;
    double osc_constant = 0;
    Interval worst_J;
};

struct CoHolderCertificate {
    CoHolderParams params;
    double c = 0;
    double theta0 = 0;
    std::vector<CertifiedSquare> squares;
};

struct SquareDeviation {
    Square square;
    double c_max = 0;  // largest c (to 3 decimals) this square passes alone; 0 if none
    // multiplicative shortfalls at the reference c; > 1 means the inequality fails
    double sum_shortfall = 0;
    double min_length_shortfall = 0;
    double osc_shortfall = 0;
    double available_length = 0;  // total length of all intervals
    Interval worst_I;
    Interval worst_J;
    bool disjoint = false;
};

struct DeviationReport {
    double reference_c = 0;
    std::vector<SquareDeviation> squares;
};

struct CertificateOptions {
    int J_count = 64;
    int min_points = 3;
    double c_floor = 0.001;
    int jobs = 1;
};

struct CertificateResult {
    std::optional<CoHolderCertificate> certificate;
    DeviationReport deviation;  // always filled; evidence for every square
};

CertificateResult certificate_search(const SampledFunction& f, const CoHolderParams& params,
                                     std::span<const Square> candidates, const CertificateOptions& opt = {});

struct CertificateAudit {
    bool pass = true;
    std::vector<std::string> failures;
};

/// Re-derives every certificate invariant from the raw samples.
CertificateAudit reverify_certificate(const SampledFunction& f, const CoHolderCertificate& cert,
                                      const CertificateOptions& opt = {});

/// Heuristic, not canonical: for R on a geometric ladder from R_hi down to R_lo,
/// centre on the largest sample within the previous square.
std::vector<Square> propose_squares(const SampledFunction& f, double R_hi, double R_lo, std::size_t count);

double lower_spectrum_bound(const CoHolderParams& params, double theta);
double lower_spectrum_bound(const CoHolderCertificate& cert, double theta);

}  // namespace aslb

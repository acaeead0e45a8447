#include "aslb/json.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace aslb {

namespace {

/// Exact hex rendering for long double fields that must round-trip.
std::string hex(long double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%La", v);
    return buf;
}

long double from_hex(const json& j) {
    const std::string s = j.get<std::string>();
    char* end = nullptr;
    const long double v = std::strtold(s.c_str(), &end);
    require(end && *end == '\0', ErrorKind::invalid_spec, "json: bad long double literal '" + s + "'");
    return v;
}

json numbers(std::span<const double> v) {
    json a = json::array();
    for (double x : v) a.push_back(number(x));
    return a;
}

}  // namespace

json number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

void to_json(json& j, const FunctionMeta& m) { j = json{{"family", m.family}, {"params", m.params}}; }

void from_json(const json& j, FunctionMeta& m) {
    j.at("family").get_to(m.family);
    m.params.clear();
    for (auto& [k, v] : j.at("params").items()) m.params[k] = v.get<double>();
}

void to_json(json& j, const HolderWitness& w) {
    j = json{{"alpha", w.alpha}, {"C", w.C_upper}, {"c", w.c_lower}, {"r0", w.r0}, {"c_tilde", w.c_tilde()}};
}

void from_json(const json& j, HolderWitness& w) {
    j.at("alpha").get_to(w.alpha);
    j.at("C").get_to(w.C_upper);
    j.at("c").get_to(w.c_lower);
    j.at("r0").get_to(w.r0);
}

void to_json(json& j, const EnergyResult& r) {
    j = json{{"q", r.q},
             {"m_first", r.m_first},
             {"terms", r.partial_sums.size()},
             {"final_partial_sum", r.partial_sums.empty() ? 0.0 : r.partial_sums.back()},
             {"verdict", to_string(r.verdict)},
             {"tail_exponent", number(r.tail_exponent)},
             {"log_exponent", number(r.log_exponent)},
             {"used_log_refinement", r.used_log_refinement}};
}

void to_json(json& j, const LineFit& f) {
    j = json{{"slope", number(f.slope)},
             {"intercept", number(f.intercept)},
             {"r_squared", number(f.r_squared)},
             {"points", f.points}};
}

void to_json(json& j, const Square& q) { j = json{{"cx", q.cx}, {"cy", q.cy}, {"half_side", q.half_side}}; }

void from_json(const json& j, Square& q) {
    j.at("cx").get_to(q.cx);
    j.at("cy").get_to(q.cy);
    j.at("half_side").get_to(q.half_side);
}

void to_json(json& j, const CoverReport& r) {
    j = json{{"square", r.square}, {"r", r.r}, {"count", r.count}, {"columns", r.per_column_counts.size()}};
}

void to_json(json& j, const BoxDimensionResult& r) {
    j = json{{"estimate", r.estimate}, {"fit", r.fit}, {"square", r.square}, {"scales", numbers(r.scales)},
             {"counts", r.counts}};
}

void to_json(json& j, const SpectrumEvidence& e) {
    j = json{{"center_x", e.center_x}, {"center_y", e.center_y}, {"R", e.R},
             {"r", e.r},               {"count", e.count},       {"exponent", number(e.exponent)}};
}

void to_json(json& j, const SpectrumPoint& p) {
    j = json{{"theta", p.theta},
             {"exponent", number(p.exponent)},
             {"max_exponent", number(p.max_exponent)},
             {"regression_exponent", number(p.regression_exponent)},
             {"regression_r2", number(p.regression_r2)},
             {"evidence", p.evidence},
             {"per_scale", p.per_scale}};
}

void to_json(json& j, const Regularity& r) {
    j = json{{"kind", r.kind == Regularity::Kind::holder ? "holder" : "sobolev"},
             {"value", number(r.value)},
             {"description", r.describe()}};
}

void to_json(json& j, const AuditRow& r) {
    j = json{{"theta", r.theta},
             {"bound", r.bound},
             {"ladder_exponents", numbers(r.ladder_exponents)},
             {"ladder_max_exponents", numbers(r.ladder_max_exponents)},
             {"worst_exponent", number(r.worst_exponent)},
             {"worst_max_exponent", number(r.worst_max_exponent)},
             {"worst_evidence", r.worst_evidence},
             {"violation", r.violation}};
}

void to_json(json& j, const UpperBoundAudit& a) {
    j = json{{"regularity", a.regularity},
             {"tolerance", a.tolerance},
             {"centers", numbers(a.centers)},
             {"rows", a.rows},
             {"pass", a.pass}};
}

void to_json(json& j, const RotationCheck& c) { j = json{{"max_abs_slope", c.max_abs_slope}, {"pass", c.pass}}; }

void to_json(json& j, const FoldSquare& q) {
    json alts = json::array();
    for (const auto& a : q.alternatives)
        alts.push_back({{"m", static_cast<double>(a.m)},
                        {"delta", static_cast<double>(a.delta)},
                        {"value", static_cast<double>(a.value)}});
    j = json{{"m", static_cast<double>(q.m)},
             {"delta", static_cast<double>(q.delta)},
             {"f_m", static_cast<double>(q.f_m)},
             {"orientation", q.orientation},
             {"span", {static_cast<double>(q.span_lo()), static_cast<double>(q.span_hi())}},
             {"exact", {{"m", hex(q.m)}, {"delta", hex(q.delta)}, {"f_m", hex(q.f_m)}}},
             {"alternatives", alts}};
}

void to_json(json& j, const FoldPlan& p) {
    j = json{{"theta0", p.theta0},
             {"precision", to_string(p.precision)},
             {"orientation", p.orientation},
             {"squares", p.squares}};
}

void from_json(const json& j, FoldPlan& p) {
    j.at("theta0").get_to(p.theta0);
    p.precision = parse_precision(j.at("precision").get<std::string>());
    j.at("orientation").get_to(p.orientation);
    p.squares.clear();
    for (const auto& s : j.at("squares")) {
        FoldSquare q;
        const json& ex = s.at("exact");
        q.m = from_hex(ex.at("m"));
        q.delta = from_hex(ex.at("delta"));
        q.f_m = from_hex(ex.at("f_m"));
        s.at("orientation").get_to(q.orientation);
        q.frame = {q.m, q.f_m, q.delta};
        p.squares.push_back(q);
    }
}

void to_json(json& j, const FoldInvariants& i) {
    j = json{{"locality", i.locality},
             {"band_containment", i.band_containment},
             {"reflection_bound", i.reflection_bound},
             {"nesting", i.nesting},
             {"containment", i.containment},
             {"disjoint", i.disjoint},
             {"edge_continuity", i.edge_continuity},
             {"reflection_limits", i.reflection_limits},
             {"failures", i.failures},
             {"all", i.all()}};
}

void to_json(json& j, const WitnessCheck& c) {
    j = json{{"upper_ok", c.upper_ok},
             {"lower_ok", c.lower_ok},
             {"worst_upper_ratio", number(c.worst_upper_ratio)},
             {"worst_lower_ratio", number(c.worst_lower_ratio)},
             {"upper_pair", {c.upper_pair.first, c.upper_pair.second}},
             {"lower_interval", {c.lower_interval.first, c.lower_interval.second}},
             {"warnings", c.warnings}};
}

void to_json(json& j, const HolderCheck& c) {
    j = json{{"pairs", c.pairs},
             {"max_ratio", number(c.max_ratio)},
             {"worst_t", c.worst_t},
             {"worst_s", c.worst_s},
             {"pass", c.pass}};
}

void to_json(json& j, const ColumnCheck& c) {
    j = json{{"square", c.square},
             {"theta", c.theta},
             {"r_tilde", c.r_tilde},
             {"mode", c.mode},
             {"columns_total", c.columns_total},
             {"columns_checked", c.columns_checked},
             {"min_osc_ratio", number(c.min_osc_ratio)},
             {"threshold_osc", c.threshold_osc},
             {"worst_column_lo", c.worst_column_lo},
             {"osc_status", to_string(c.osc_status)},
             {"count", number(c.count)},
             {"threshold_count", number(c.threshold_count)},
             {"count_status", to_string(c.count_status)}};
}

void to_json(json& j, const FoldVerification& v) {
    j = json{{"holder", v.holder},
             {"c_tilde", v.c_tilde},
             {"columns", v.columns},
             {"unresolvable", v.unresolvable},
             {"pass", v.pass}};
}

void to_json(json& j, const Interval& i) { j = json{i.lo, i.hi}; }

void from_json(const json& j, Interval& i) {
    i.lo = j.at(0).get<double>();
    i.hi = j.at(1).get<double>();
}

void to_json(json& j, const LowerOscillation& l) {
    j = json{{"best_c", number(l.best_c)}, {"worst_J", l.worst_J}, {"tested", l.tested}, {"levels", l.levels}};
}

void to_json(json& j, const CoHolderParams& p) {
    j = json{{"alpha", p.alpha}, {"eta", p.eta}, {"epsilon", p.epsilon}};
}

void from_json(const json& j, CoHolderParams& p) {
    j.at("alpha").get_to(p.alpha);
    j.at("eta").get_to(p.eta);
    j.at("epsilon").get_to(p.epsilon);
}

void to_json(json& j, const CertifiedSquare& s) {
    j = json{{"square", s.square},
             {"intervals", s.intervals},
             {"total_length", s.total_length},
             {"min_length", s.min_length},
             {"osc_constant", number(s.osc_constant)},
             {"worst_J", s.worst_J}};
}

void from_json(const json& j, CertifiedSquare& s) {
    j.at("square").get_to(s.square);
    j.at("intervals").get_to(s.intervals);
    j.at("total_length").get_to(s.total_length);
    j.at("min_length").get_to(s.min_length);
    s.osc_constant = j.at("osc_constant").is_number() ? j.at("osc_constant").get<double>() : 0.0;
    j.at("worst_J").get_to(s.worst_J);
}

void to_json(json& j, const CoHolderCertificate& c) {
    j = json{{"params", c.params}, {"c", c.c}, {"theta0", c.theta0}, {"squares", c.squares}};
}

void from_json(const json& j, CoHolderCertificate& c) {
    j.at("params").get_to(c.params);
    j.at("c").get_to(c.c);
    j.at("theta0").get_to(c.theta0);
    j.at("squares").get_to(c.squares);
}

void to_json(json& j, const SquareDeviation& d) {
    j = json{{"square", d.square},
             {"c_max", d.c_max},
             {"sum_shortfall", number(d.sum_shortfall)},
             {"min_length_shortfall", number(d.min_length_shortfall)},
             {"osc_shortfall", number(d.osc_shortfall)},
             {"available_length", d.available_length},
             {"worst_I", d.worst_I},
             {"worst_J", d.worst_J},
             {"disjoint", d.disjoint}};
}

void to_json(json& j, const DeviationReport& d) {
    j = json{{"reference_c", d.reference_c}, {"squares", d.squares}};
}

void to_json(json& j, const CertificateAudit& a) { j = json{{"pass", a.pass}, {"failures", a.failures}}; }

void to_json(json& j, const PackingSet& p) {
    json M = json::array();
    for (const auto& [m, count] : p.M) M.push_back({m, count});
    j = json{{"s", p.s},
             {"theta", p.theta},
             {"n", p.n},
             {"variant", to_string(p.variant)},
             {"c0", p.c0},
             {"R_n", p.R_n},
             {"r_n", p.r_n},
             {"N_initial", p.N_initial},
             {"N_n", p.N_n},
             {"shrinks", p.shrinks},
             {"binding", p.binding},
             {"target_gamma", p.target_gamma()},
             {"M", M},
             {"cardinality", p.points.size()}};
}

void to_json(json& j, const PackingAudit& a) {
    json v = json::array();
    for (const auto& x : a.violations)
        v.push_back({{"i", x.i}, {"j", x.j}, {"distance", x.distance}, {"what", x.what}});
    j = json{{"min_pairwise_distance", number(a.min_pairwise_distance)},
             {"closest_pair", {a.closest_pair.first, a.closest_pair.second}},
             {"cardinality", a.cardinality},
             {"sum_M", a.sum_M},
             {"empirical_gamma", a.empirical_gamma},
             {"target_gamma", a.target_gamma},
             {"separated", a.separated},
             {"on_segments", a.on_segments},
             {"in_square", a.in_square},
             {"cardinality_matches", a.cardinality_matches},
             {"exact_recheck", a.exact_recheck},
             {"rechecked_pairs", a.rechecked_pairs},
             {"violations", v},
             {"pass", a.pass()}};
}

void to_json(json& j, const PackingTrend& t) {
    json rows = json::array();
    for (const auto& r : t.rows)
        rows.push_back({{"n", r.n},
                        {"N_n", r.N_n},
                        {"cardinality", r.cardinality},
                        {"R_n", r.R_n},
                        {"r_n", r.r_n},
                        {"gamma", r.gamma},
                        {"min_distance", number(r.min_distance)},
                        {"c2", r.c2},
                        {"pass", r.pass}});
    j = json{{"s", t.s},
             {"theta", t.theta},
             {"variant", to_string(t.variant)},
             {"target_gamma", t.target_gamma},
             {"rows", rows},
             {"nondecreasing", t.nondecreasing},
             {"below_target", t.below_target},
             {"best_gamma", t.best_gamma}};
}

void to_json(json& j, const BorderlineParams& p) {
    j = json{{"N_n", p.N_n},
             {"binding", p.binding},
             {"delta_1", p.delta_1},
             {"delta_2", p.delta_2},
             {"eta_n", p.eta_n},
             {"eta_bar_n", p.eta_bar_n},
             {"phi_inverse_1", p.phi_inverse_1},
             {"phi_inverse_2", p.phi_inverse_2},
             {"bound_1", p.bound_1},
             {"bound_2", p.bound_2},
             {"asymptotic_1", p.asymptotic_1},
             {"asymptotic_2", p.asymptotic_2}};
}

void to_json(json& j, const RatioCheck& r) {
    j = json{{"monotone", r.monotone},
             {"threshold_m", r.threshold_m},
             {"min_ratio_above", number(r.min_ratio_above)},
             {"pass", r.pass}};
}

}  // namespace aslb

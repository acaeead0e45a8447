#include "cli/commands.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include "aslb/coholder.hpp"
#include "aslb/covering.hpp"
#include "aslb/error.hpp"
#include "aslb/folding.hpp"
#include "aslb/funcspace.hpp"
#include "aslb/io.hpp"
#include "aslb/json.hpp"
#include "aslb/packing.hpp"
#include "aslb/stats.hpp"

#ifndef ASLB_VERSION
#define ASLB_VERSION "0.0.0"
#endif

namespace aslb::cli {

namespace fs = std::filesystem;

std::string version() { return ASLB_VERSION; }

namespace {

constexpr double nan_v = std::numeric_limits<double>::quiet_NaN();

struct Outcome {
    json report = json::object();
    bool pass = true;
    std::string summary;
};

class Artifacts {
public:
    Artifacts(const RunConfig& cfg, fs::path dir) : cfg_(cfg), dir_(std::move(dir)) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) fail(ErrorKind::io, "cannot create output directory '" + dir_.string() + "': " + ec.message());
    }

    void write(const std::string& name, const std::string& content) {
        const fs::path p = dir_ / name;
        std::ofstream os(p, std::ios::binary | std::ios::trunc);
        os << content;
        os.close();
        if (!os) fail(ErrorKind::io, "cannot write '" + p.string() + "'");
        manifest_.push_back({name, content.size()});
    }

    /// CSV with a provenance comment line carrying the command and seed.
    void write_csv(const std::string& name, const std::string& header, const std::string& rows) {
        std::ostringstream os;
        os << "# aslb " << version() << ' ' << cfg_.command << " seed=" << cfg_.values.at("seed") << '\n'
           << header << '\n'
           << rows;
        write(name, os.str());
    }

    void copy_in(const std::string& name) {
        manifest_.push_back({name, static_cast<std::size_t>(fs::file_size(dir_ / name))});
    }

    const fs::path& dir() const { return dir_; }
    const std::vector<std::pair<std::string, std::size_t>>& manifest() const { return manifest_; }

private:
    const RunConfig& cfg_;
    fs::path dir_;
    std::vector<std::pair<std::string, std::size_t>> manifest_;
};

std::string fmt(double v) { return format_double(v); }

std::string fmt_ld(long double v) { return format_double(static_cast<double>(v)); }

json config_json(const RunConfig& cfg) {
    json j = json::object();
    for (const auto& [k, v] : cfg.values) j[k] = v;
    return j;
}

void require_unit_theta(const RunConfig& cfg, const std::string& key) {
    if (!cfg.has(key)) return;
    for (double t : cfg.reals(key))
        if (!(t > 0 && t < 1)) throw UsageError("--" + key + ": theta " + fmt(t) + " outside (0, 1)");
}

void require_positive(const RunConfig& cfg, const std::string& key, long long minimum = 1) {
    if (cfg.has(key) && cfg.integer(key) < minimum)
        throw UsageError("--" + key + " must be >= " + std::to_string(minimum));
}

/// Range checks shared by every command, applied before any work starts.
void validate(const RunConfig& cfg) {
    for (const char* k : {"theta", "theta0", "theta-grid"}) require_unit_theta(cfg, k);
    cfg.seed();
    cfg.jobs();
    parse_precision(cfg.str("precision"));
    for (const char* k : {"samples", "K", "centers", "ladders", "scales", "scales-per-ladder", "r-count", "J-count",
                          "min-points", "square-count", "trials", "steps", "pairs", "intervals", "holder-pairs",
                          "column-points", "column-cap", "sampled-columns", "search-points", "patch-samples",
                          "witness-trials", "curve-points", "n", "m-max"})
        require_positive(cfg, k);
    if (cfg.has("samples") && cfg.integer("samples") < 2) throw UsageError("--samples must be >= 2");
    if (cfg.has("format") && cfg.str("format") != "csv" && cfg.str("format") != "binary")
        throw UsageError("--format must be csv or binary");
    if (cfg.has("exact") && cfg.str("exact") != "auto" && cfg.str("exact") != "on" && cfg.str("exact") != "off")
        throw UsageError("--exact must be auto, on or off");
    if (cfg.has("variant")) parse_zigzag_variant(cfg.str("variant"));
}

// ---------------------------------------------------------------------------
// function setup

struct FunctionSetup {
    SampledFunction f;
    std::optional<Generator> gen;
    double alpha = nan_v;     // Hölder exponent when known
    double sobolev_p = nan_v; // Sobolev exponent when known
};

ZigzagSpec zigzag_spec(const RunConfig& cfg) {
    ZigzagSpec z;
    z.s = cfg.real("s");
    z.variant = parse_zigzag_variant(cfg.str("variant"));
    z.m_max = cfg.integer("m-max");
    z.validate();
    return z;
}

FunctionSetup load_input(const RunConfig& cfg) {
    const std::string path = cfg.str("input");
    const bool binary = fs::path(path).extension() == ".bin";
    SampledFunction f = binary ? load_binary(path) : load_csv(path);
    FunctionSetup out{std::move(f), std::nullopt, nan_v, nan_v};
    const auto& m = out.f.meta();
    if ((m.family == "takagi" || m.family == "weierstrass") && m.params.count("a") && m.params.count("b"))
        out.alpha = -std::log(m.params.at("a")) / std::log(m.params.at("b"));
    if (m.family == "zigzag" && m.params.count("s")) out.sobolev_p = m.params.at("s") - 1;
    return out;
}

FunctionSetup build_function(const RunConfig& cfg) {
    if (cfg.has("input")) {
        if (cfg.has("family")) throw UsageError("--input and --family are mutually exclusive");
        return load_input(cfg);
    }
    const std::string family = cfg.str("family");
    const auto samples = static_cast<std::size_t>(cfg.integer("samples"));
    double lo = cfg.has("lo") ? cfg.real("lo") : 0.0;
    double hi = cfg.has("hi") ? cfg.real("hi") : 1.0;
    std::optional<Generator> gen;
    double alpha = nan_v, p = nan_v;
    if (family == "takagi") {
        TakagiSpec t;
        t.a = cfg.has("a") ? cfg.real("a") : std::sqrt(0.5);
        t.b = cfg.has("b") ? cfg.real("b") : 2.0;
        t.truncation_tol = cfg.real("tol");
        t.validate();
        alpha = t.alpha();
        gen = takagi_generator(t);
    } else if (family == "weierstrass") {
        WeierstrassSpec w;
        w.a = cfg.has("a") ? cfg.real("a") : 0.5;
        w.b = cfg.has("b") ? cfg.real("b") : 3.0;
        w.truncation_tol = cfg.real("tol");
        w.validate();
        alpha = w.alpha();
        gen = weierstrass_generator(w);
    } else if (family == "zigzag") {
        const ZigzagSpec z = zigzag_spec(cfg);
        if (!cfg.has("hi")) hi = z.a(z.first_index());
        p = z.s - 1;
        gen = zigzag_generator(z);
    } else if (family == "identity") {
        gen = identity_generator();
    } else if (family == "tent") {
        gen = tent_generator();
    } else if (family == "constant") {
        gen = constant_generator(cfg.real("value"));
    } else {
        throw UsageError("--family: unknown family '" + family + "'");
    }
    if (!(lo < hi)) throw UsageError("--lo must be below --hi");
    SampledFunction f = sample_function(*gen, lo, hi, samples);
    return {std::move(f), std::move(gen), alpha, p};
}

double alpha_for(const RunConfig& cfg, const FunctionSetup& fn) {
    if (cfg.has("alpha")) return cfg.real("alpha");
    return fn.alpha;
}

std::optional<Regularity> regularity_for(const RunConfig& cfg, const FunctionSetup& fn) {
    if (cfg.has("p")) {
        const std::string& t = cfg.str("p");
        return Regularity::sobolev(t == "inf" ? std::numeric_limits<double>::infinity() : cfg.real("p"));
    }
    const double a = alpha_for(cfg, fn);
    if (!std::isnan(a)) return Regularity::holder(a);
    if (!std::isnan(fn.sobolev_p)) return Regularity::sobolev(fn.sobolev_p);
    return std::nullopt;
}

std::vector<double> stratified_centers(const SampledFunction& f, int n, std::uint64_t seed, double lo, double hi) {
    std::mt19937_64 rng(seed);
    std::vector<double> c(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) c[static_cast<std::size_t>(i)] = lo + (hi - lo) * (i + unit_uniform(rng())) / n;
    (void)f;
    return c;
}

// ---------------------------------------------------------------------------
// commands

Outcome cmd_generate(const RunConfig& cfg, Artifacts& art) {
    const FunctionSetup fn = build_function(cfg);
    const bool binary = cfg.str("format") == "binary";
    const std::string name = binary ? "samples.bin" : "samples.csv";
    if (binary)
        save_binary((art.dir() / name).string(), fn.f);
    else
        save_csv((art.dir() / name).string(), fn.f);
    art.copy_in(name);
    Outcome o;
    o.report["meta"] = fn.f.meta();
    o.report["domain"] = {fn.f.domain_lo(), fn.f.domain_hi()};
    o.report["step"] = fn.f.step();
    o.report["samples"] = fn.f.size();
    o.report["file"] = name;
    if (!std::isnan(fn.alpha)) o.report["alpha"] = fn.alpha;
    o.summary = "wrote " + std::to_string(fn.f.size()) + " samples";
    return o;
}

Outcome cmd_boxdim(const RunConfig& cfg, Artifacts& art) {
    const FunctionSetup fn = build_function(cfg);
    const double r_hi = cfg.real("r-hi"), r_lo = cfg.real("r-lo");
    if (!(r_lo > 0 && r_lo < r_hi)) throw UsageError("--r-lo must lie in (0, --r-hi)");
    const auto ladder = geometric_ladder(r_hi, r_lo, static_cast<std::size_t>(cfg.integer("r-count")));
    const BoxDimensionResult res = box_dimension(fn.f, ladder);
    const double a = alpha_for(cfg, fn);
    const double bound = std::isnan(a) ? nan_v : std::min(2.0, 2 - a);

    std::ostringstream rows;
    for (std::size_t i = 0; i < res.scales.size(); ++i) {
        const double x = std::log(1 / res.scales[i]);
        rows << fmt(res.scales[i]) << ',' << res.counts[i] << ',' << fmt(x) << ','
             << fmt(std::log(static_cast<double>(res.counts[i]))) << ','
             << fmt(res.fit.intercept + res.fit.slope * x) << ',' << fmt(res.estimate) << ',' << fmt(bound) << '\n';
    }
    art.write_csv("curves.csv", "r,count,log_inv_r,log_count,fitted_log_count,estimate,bound", rows.str());

    Outcome o;
    o.report["meta"] = fn.f.meta();
    o.report["samples"] = fn.f.size();
    o.report["result"] = res;
    o.report["bound"] = number(bound);
    o.summary = "box dimension " + fmt(res.estimate);
    return o;
}

Outcome cmd_spectrum(const RunConfig& cfg, Artifacts& art) {
    const FunctionSetup fn = build_function(cfg);
    const auto thetas = cfg.reals("theta-grid");
    const auto reg = regularity_for(cfg, fn);
    if (reg) reg->validate();
    const int n_centers = static_cast<int>(cfg.integer("centers"));
    const auto centers = stratified_centers(fn.f, n_centers, cfg.seed(), fn.f.domain_lo(), fn.f.domain_hi());

    SpectrumCurve curve;
    json skipped = json::array();
    std::ostringstream rows;
    for (double th : thetas) {
        const double b = reg ? reg->bound(th) : nan_v;
        std::vector<std::vector<double>> ladders;
        try {
            ladders = default_R_ladders(fn.f, th, 1, static_cast<int>(cfg.integer("scales")), cfg.real("R-max"));
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::resolution_too_coarse) throw;
            // r = R^{1/theta} falls below the grid for every admissible R
            skipped.push_back({{"theta", th}, {"reason", e.what()}});
            rows << fmt(th) << ",nan,nan,nan,nan," << fmt(b) << ",nan,nan,nan,nan,unresolvable\n";
            continue;
        }
        const SpectrumPoint pt = spectrum_at_theta(fn.f, th, ladders.front(), centers, cfg.jobs());
        curve.points.push_back(pt);
        rows << fmt(th) << ',' << fmt(pt.exponent) << ',' << fmt(pt.max_exponent) << ','
             << fmt(pt.regression_exponent) << ',' << fmt(pt.regression_r2) << ',' << fmt(b) << ','
             << fmt(pt.evidence.R) << ',' << fmt(pt.evidence.r) << ',' << fmt(pt.evidence.center_x) << ','
             << fmt(pt.evidence.center_y) << ",ok\n";
    }
    art.write_csv("curves.csv",
                  "theta,exponent,max_exponent,regression_exponent,regression_r2,bound,R,r,center_x,center_y,status",
                  rows.str());

    Outcome o;
    o.report["meta"] = fn.f.meta();
    o.report["samples"] = fn.f.size();
    o.report["centers"] = centers;
    if (reg) o.report["regularity"] = *reg;
    o.report["points"] = curve.points;
    o.report["skipped"] = skipped;
    o.summary = std::to_string(curve.points.size()) + " spectrum points";
    return o;
}

Outcome cmd_audit_upper(const RunConfig& cfg, Artifacts& art) {
    const FunctionSetup fn = build_function(cfg);
    const auto reg = regularity_for(cfg, fn);
    if (!reg) throw UsageError("--alpha or --p is required for audit-upper with this function");
    AuditOptions opt;
    opt.n_centers = static_cast<int>(cfg.integer("centers"));
    opt.n_ladders = static_cast<int>(cfg.integer("ladders"));
    opt.scales_per_ladder = static_cast<int>(cfg.integer("scales-per-ladder"));
    opt.tolerance = cfg.real("tolerance");
    opt.R_max = cfg.real("R-max");
    opt.seed = cfg.seed();
    opt.jobs = cfg.jobs();
    if (cfg.has("center-lo")) opt.center_lo = cfg.real("center-lo");
    if (cfg.has("center-hi")) opt.center_hi = cfg.real("center-hi");
    const auto thetas = cfg.reals("theta-grid");
    const UpperBoundAudit audit = audit_upper_bound(fn.f, *reg, thetas, opt);

    std::ostringstream rows;
    for (const auto& r : audit.rows)
        for (std::size_t l = 0; l < r.ladder_exponents.size(); ++l)
            rows << fmt(r.theta) << ',' << l << ',' << fmt(r.ladder_exponents[l]) << ','
                 << fmt(r.ladder_max_exponents[l]) << ',' << fmt(r.bound) << ',' << fmt(r.bound + audit.tolerance)
                 << ',' << (r.violation ? 1 : 0) << '\n';
    art.write_csv("curves.csv", "theta,ladder,exponent,max_exponent,bound,bound_plus_tolerance,violation", rows.str());

    Outcome o;
    o.report["meta"] = fn.f.meta();
    o.report["samples"] = fn.f.size();
    o.report["audit"] = audit;
    o.pass = audit.pass;
    o.summary = audit.pass ? "all exponents within the bound" : "bound exceeded";
    return o;
}

struct FoldSetup {
    FunctionSetup fn;
    HolderWitness witness;
};

FoldSetup fold_setup(const RunConfig& cfg) {
    const long long K = cfg.integer("K");
    if (K < 1) throw UsageError("--K must be >= 1");
    FunctionSetup fn = build_function(cfg);
    if (!fn.gen) throw UsageError("folding needs a --family generator, not --input");
    const double alpha = alpha_for(cfg, fn);
    if (std::isnan(alpha)) throw UsageError("--alpha is required for this family");
    const double theta0 = cfg.real("theta0");
    if (!(theta0 < alpha)) throw UsageError("--theta0 must lie below alpha = " + fmt(alpha));
    const double r0 = cfg.real("r0");
    HolderWitness w;
    if (!cfg.has("C") || !cfg.has("c")) {
        WitnessEstimateOptions wo;
        wo.seed = cfg.seed();
        const FunctionSource src(fn.f, *fn.gen);
        w = estimate_witness(src, alpha, r0, wo);
    }
    w.alpha = alpha;
    w.r0 = r0;
    if (cfg.has("C")) w.C_upper = cfg.real("C");
    if (cfg.has("c")) w.c_lower = cfg.real("c");
    w.validate_against(fn.f.domain_hi() - fn.f.domain_lo());
    return {std::move(fn), w};
}

FoldOptions fold_options(const RunConfig& cfg) {
    FoldOptions fo;
    fo.plan.precision = parse_precision(cfg.str("precision"));
    fo.plan.search_points = static_cast<std::size_t>(cfg.integer("search-points"));
    fo.patch_samples = static_cast<std::size_t>(cfg.integer("patch-samples"));
    fo.witness_trials = static_cast<int>(cfg.integer("witness-trials"));
    fo.seed = cfg.seed();
    return fo;
}

void write_fold_artifacts(const FoldedFunction& ff, const FoldInvariants& inv, Artifacts& art) {
    std::ostringstream rows;
    const auto& sq = ff.plan().squares;
    for (std::size_t k = 0; k < sq.size(); ++k) {
        const long long limit = k < inv.reflection_limits.size() ? inv.reflection_limits[k] : -1;
        rows << k << ',' << fmt_ld(sq[k].m) << ',' << fmt_ld(sq[k].delta) << ',' << fmt_ld(sq[k].f_m) << ','
             << sq[k].orientation << ',' << ff.reflection_counts()[k] << ',' << limit << '\n';
    }
    art.write_csv("curves.csv", "square,m,delta,f_m,orientation,reflections,reflection_limit", rows.str());

    const SampledFunction folded = ff.to_sampled();
    std::ostringstream pts;
    for (std::size_t i = 0; i < folded.size(); ++i)
        pts << fmt(folded.t(i)) << ',' << fmt(ff.base().value(i)) << ',' << fmt(folded.value(i)) << '\n';
    art.write_csv("points.csv", "t,base,folded", pts.str());
}

Outcome cmd_fold(const RunConfig& cfg, Artifacts& art) {
    const FoldSetup fs_ = fold_setup(cfg);
    const FunctionSource src(fs_.fn.f, *fs_.fn.gen);
    const FoldedFunction ff =
        run_folding(src, fs_.witness, cfg.real("theta0"), static_cast<int>(cfg.integer("K")), fold_options(cfg));
    const FoldInvariants inv = check_invariants(ff, fs_.witness);
    write_fold_artifacts(ff, inv, art);

    Outcome o;
    o.report["meta"] = fs_.fn.f.meta();
    o.report["samples"] = fs_.fn.f.size();
    o.report["witness"] = fs_.witness;
    o.report["plan"] = ff.plan();
    o.report["invariants"] = inv;
    o.report["warnings"] = ff.warnings;
    o.pass = inv.all();
    o.summary = std::to_string(ff.plan().squares.size()) + " squares, invariants " + (o.pass ? "hold" : "fail");
    return o;
}

FoldSetup loaded_fold_setup(const RunConfig& cfg, FoldPlan& plan) {
    std::ifstream in(cfg.str("plan"));
    if (!in) throw UsageError("--plan: cannot read '" + cfg.str("plan") + "'");
    json j;
    try {
        j = json::parse(in);
        plan = j.at("plan").get<FoldPlan>();
        FunctionSetup fn = build_function(cfg);
        if (!fn.gen) throw UsageError("verify-fold needs a --family generator");
        return {std::move(fn), j.at("witness").get<HolderWitness>()};
    } catch (const json::exception& e) {
        throw UsageError("--plan: " + std::string(e.what()));
    }
}

Outcome cmd_verify_fold(const RunConfig& cfg, Artifacts& art) {
    FoldPlan plan;
    const bool loaded = cfg.has("plan");
    const FoldSetup fs_ = loaded ? loaded_fold_setup(cfg, plan) : fold_setup(cfg);
    const FunctionSource src(fs_.fn.f, *fs_.fn.gen);
    std::optional<FoldedFunction> ff;
    if (loaded)
        ff.emplace(src, std::move(plan), static_cast<std::size_t>(cfg.integer("patch-samples")));
    else
        ff.emplace(run_folding(src, fs_.witness, cfg.real("theta0"), static_cast<int>(cfg.integer("K")),
                               fold_options(cfg)));
    const FoldInvariants inv = check_invariants(*ff, fs_.witness);
    write_fold_artifacts(*ff, inv, art);

    VerifyOptions vo;
    vo.holder_pairs = static_cast<std::size_t>(cfg.integer("holder-pairs"));
    vo.column_points = static_cast<std::size_t>(cfg.integer("column-points"));
    vo.column_cap = static_cast<std::size_t>(cfg.integer("column-cap"));
    vo.sampled_columns = static_cast<std::size_t>(cfg.integer("sampled-columns"));
    vo.seed = cfg.seed();
    vo.jobs = cfg.jobs();
    const auto thetas = cfg.reals("theta-grid");
    const FoldVerification v = verify_fold(*ff, fs_.witness, thetas, vo);

    std::ostringstream rows;
    for (const auto& c : v.columns)
        rows << c.square << ',' << fmt(c.theta) << ',' << fmt(c.r_tilde) << ',' << c.mode << ','
             << c.columns_checked << ',' << fmt(c.min_osc_ratio) << ',' << fmt(c.threshold_osc) << ','
             << to_string(c.osc_status) << ',' << fmt(c.count) << ',' << fmt(c.threshold_count) << ','
             << to_string(c.count_status) << '\n';
    art.write_csv("checks.csv",
                  "square,theta,r_tilde,mode,columns_checked,min_osc_ratio,threshold_osc,osc_status,count,"
                  "threshold_count,count_status",
                  rows.str());

    Outcome o;
    o.report["meta"] = fs_.fn.f.meta();
    o.report["witness"] = fs_.witness;
    o.report["plan"] = ff->plan();
    o.report["invariants"] = inv;
    o.report["verification"] = v;
    o.report["warnings"] = ff->warnings;
    o.pass = v.pass && inv.all();
    o.summary = "holder ratio " + fmt(v.holder.max_ratio) + ", " + std::to_string(v.unresolvable) +
                " unresolvable checks, " + (o.pass ? "pass" : "fail");
    return o;
}

std::vector<Square> parse_squares(const std::string& text) {
    std::vector<Square> out;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ';');) {
        if (item.find_first_not_of(" \t") == std::string::npos) continue;
        const auto v = parse_reals("squares", item);
        if (v.size() != 3 || !(v[2] > 0)) throw UsageError("--squares: expected 'cx,cy,R' with R > 0, got '" + item + "'");
        out.push_back({v[0], v[1], v[2]});
    }
    if (out.empty()) throw UsageError("--squares: no squares given");
    return out;
}

Outcome cmd_coholder(const RunConfig& cfg, Artifacts& art) {
    const FunctionSetup fn = build_function(cfg);
    CoHolderParams params;
    params.alpha = alpha_for(cfg, fn);
    if (std::isnan(params.alpha)) throw UsageError("--alpha is required for this family");
    params.eta = cfg.real("eta");
    params.epsilon = cfg.real("epsilon");
    params.validate();

    CertificateOptions opt;
    opt.J_count = static_cast<int>(cfg.integer("J-count"));
    opt.min_points = static_cast<int>(cfg.integer("min-points"));
    opt.c_floor = cfg.real("c-floor");
    opt.jobs = cfg.jobs();
    const std::vector<Square> squares =
        cfg.has("squares") ? parse_squares(cfg.str("squares"))
                           : propose_squares(fn.f, cfg.real("R-hi"), cfg.real("R-lo"),
                                             static_cast<std::size_t>(cfg.integer("square-count")));
    const CertificateResult res = certificate_search(fn.f, params, squares, opt);

    std::vector<double> thetas;
    if (cfg.has("theta-grid")) {
        thetas = cfg.reals("theta-grid");
    } else {
        for (int i = 1; i <= 10; ++i) thetas.push_back(params.theta0() * i / 10);
        thetas.back() = params.theta0();
    }
    const Regularity upper = Regularity::holder(std::min(params.alpha, 1 - 1e-12));
    std::ostringstream rows;
    for (double th : thetas) {
        const double lower = lower_spectrum_bound(params, th);
        rows << fmt(th) << ',' << fmt(lower) << ',' << fmt(upper.bound(th)) << ','
             << (res.certificate ? 1 : 0) << '\n';
    }
    art.write_csv("curves.csv", "theta,lower_bound,holder_upper_bound,certified", rows.str());

    Outcome o;
    o.report["meta"] = fn.f.meta();
    o.report["samples"] = fn.f.size();
    o.report["params"] = params;
    o.report["candidates"] = squares;
    o.report["deviation"] = res.deviation;
    if (res.certificate) {
        const CertificateAudit audit = reverify_certificate(fn.f, *res.certificate, opt);
        o.report["certificate"] = *res.certificate;
        o.report["reverification"] = audit;
        o.pass = audit.pass;
        o.summary = "certificate c = " + fmt(res.certificate->c) + (audit.pass ? "" : ", reverification failed");
    } else {
        o.report["certificate"] = nullptr;
        o.pass = false;
        o.summary = "no certificate found";
    }
    return o;
}

Outcome cmd_pack(const RunConfig& cfg, Artifacts& art) {
    const double s = cfg.real("s"), theta = cfg.real("theta");
    const ZigzagVariant variant = parse_zigzag_variant(cfg.str("variant"));
    const double c0 = cfg.has("c0") ? cfg.real("c0") : default_c0(s);
    PackingAuditOptions ao;
    ao.jobs = cfg.jobs();
    if (cfg.str("exact") != "auto") ao.exact_recheck = cfg.str("exact") == "on";

    const PackingSet ps = build_packing(s, theta, cfg.integer("n"), c0, variant);
    const PackingAudit audit = audit_packing(ps, ao);
    std::ostringstream pts;
    write_packing_csv(pts, ps);
    art.write("points.csv", "# aslb " + version() + " pack seed=" + cfg.values.at("seed") + '\n' + pts.str());

    Outcome o;
    o.report["packing"] = ps;
    o.report["audit"] = audit;
    o.report["ratio_check"] = ratio_check(ps.zigzag(), std::max<long long>(ps.n + ps.N_n, 1000));
    if (variant == ZigzagVariant::log_corrected) {
        try {
            o.report["borderline"] = borderline_params(s, theta, ps.n);
        } catch (const Error& e) {
            o.report["borderline"] = {{"error", std::string(to_string(e.kind()))}, {"message", e.what()}};
        }
    }
    o.pass = audit.pass();

    std::ostringstream rows;
    if (cfg.has("n-list")) {
        const auto ns = cfg.integers("n-list");
        const PackingTrend trend = packing_exponent(s, theta, ns, variant, c0, ao);
        for (const auto& r : trend.rows)
            rows << r.n << ',' << r.N_n << ',' << r.cardinality << ',' << fmt(r.R_n) << ',' << fmt(r.r_n) << ','
                 << fmt(r.gamma) << ',' << fmt(trend.target_gamma) << ',' << fmt(r.min_distance) << ','
                 << fmt(r.c2) << ',' << (r.pass ? 1 : 0) << '\n';
        o.report["trend"] = trend;
        for (const auto& r : trend.rows) o.pass = o.pass && r.pass;
    } else {
        rows << ps.n << ',' << ps.N_n << ',' << audit.cardinality << ',' << fmt(ps.R_n) << ',' << fmt(ps.r_n) << ','
             << fmt(audit.empirical_gamma) << ',' << fmt(audit.target_gamma) << ','
             << fmt(audit.min_pairwise_distance) << ',' << fmt(nan_v) << ',' << (audit.pass() ? 1 : 0) << '\n';
    }
    art.write_csv("curves.csv", "n,N_n,cardinality,R_n,r_n,gamma,target_gamma,min_distance,c2,pass", rows.str());
    o.summary = std::to_string(audit.cardinality) + " points, min distance " + fmt(audit.min_pairwise_distance) +
                " vs r_n " + fmt(ps.r_n) + (o.pass ? ", pass" : ", FAIL");
    return o;
}

Outcome cmd_energy(const RunConfig& cfg, Artifacts& art) {
    ZigzagSpec z;
    z.s = cfg.real("s");
    z.variant = parse_zigzag_variant(cfg.str("variant"));
    const long long m_max = cfg.integer("m-max");
    z.m_max = m_max;
    EnergyOptions eo;
    eo.margin = cfg.real("margin");
    eo.tail_fraction = cfg.real("tail-fraction");
    const double q = cfg.real("q");
    const EnergyResult res = p_energy(z, q, m_max, eo);

    // S_m against log m over the tail window: slope ~ constant means logarithmic growth
    std::vector<double> lx, ly;
    const auto first = static_cast<std::size_t>(std::max<double>(0, m_max / eo.tail_fraction - res.m_first));
    for (std::size_t i = first; i < res.partial_sums.size(); ++i) {
        lx.push_back(std::log(static_cast<double>(res.m_first + static_cast<long long>(i))));
        ly.push_back(res.partial_sums[i]);
    }
    const LineFit log_fit = fit_line(lx, ly);

    std::ostringstream rows;
    const auto n = res.partial_sums.size();
    const auto points = static_cast<std::size_t>(cfg.integer("curve-points"));
    std::size_t last = static_cast<std::size_t>(-1);
    for (std::size_t k = 0; k < points; ++k) {
        const double frac = points == 1 ? 1.0 : static_cast<double>(k) / static_cast<double>(points - 1);
        auto i = static_cast<std::size_t>(std::llround(std::pow(static_cast<double>(n), frac))) - 1;
        i = std::min(i, n - 1);
        if (i == last) continue;
        last = i;
        const long long m = res.m_first + static_cast<long long>(i);
        const double lm = std::log(static_cast<double>(m));
        rows << m << ',' << fmt(res.partial_sums[i]) << ',' << fmt(energy_term(z, q, m)) << ',' << fmt(lm) << ','
             << fmt(log_fit.intercept + log_fit.slope * lm) << '\n';
    }
    art.write_csv("curves.csv", "m,partial_sum,term,log_m,log_fit", rows.str());

    Outcome o;
    o.report["zigzag"] = z.meta();
    o.report["energy"] = res;
    o.report["log_fit"] = log_fit;
    o.summary = "q = " + fmt(q) + ": " + to_string(res.verdict);
    return o;
}

Outcome cmd_bv_check(const RunConfig& cfg, Artifacts& art) {
    const int trials = static_cast<int>(cfg.integer("trials"));
    const auto samples = static_cast<std::size_t>(cfg.integer("samples"));
    const int steps = static_cast<int>(cfg.integer("steps"));
    const std::uint64_t seed = cfg.seed();
    std::ostringstream rows;
    json rot = json::array();
    bool rot_ok = true;
    for (int i = 0; i < trials; ++i) {
        const SampledFunction f = random_staircase(samples, steps, seed * 1000003 + static_cast<std::uint64_t>(i), i % 2);
        const RotationCheck c = rotate_monotone_check(f);
        rot.push_back(c);
        rot_ok = rot_ok && c.pass;
        rows << i << ',' << fmt(c.max_abs_slope) << ',' << fmt(1.0 + 1e-9) << ',' << (c.pass ? 1 : 0) << '\n';
    }
    art.write_csv("curves.csv", "trial,max_abs_slope,bound,pass", rows.str());

    const int pairs = static_cast<int>(cfg.integer("pairs"));
    const int intervals = static_cast<int>(cfg.integer("intervals"));
    int sum_fail = 0;
    for (int i = 0; i < pairs; ++i) {
        const std::uint64_t s = seed * 7919 + static_cast<std::uint64_t>(i);
        const SampledFunction g = random_walk(samples, 1.0, 2 * s);
        const SampledFunction h = random_walk(samples, 1.0, 2 * s + 1);
        if (!graph_sum_osc_check(g, h, intervals, s)) ++sum_fail;
    }

    Outcome o;
    o.report["rotation"] = {{"trials", trials}, {"checks", rot}, {"pass", rot_ok}};
    o.report["graph_sum"] = {{"pairs", pairs},
                             {"intervals_per_pair", intervals},
                             {"triples", static_cast<long long>(pairs) * intervals},
                             {"failures", sum_fail},
                             {"pass", sum_fail == 0}};
    o.pass = rot_ok && sum_fail == 0;
    o.summary = std::string("rotation ") + (rot_ok ? "ok" : "FAIL") + ", graph sum " +
                (sum_fail == 0 ? "ok" : std::to_string(sum_fail) + " failures");
    return o;
}

Outcome execute(const RunConfig& cfg, Artifacts& art) {
    const std::string& c = cfg.command;
    if (c == "generate") return cmd_generate(cfg, art);
    if (c == "boxdim") return cmd_boxdim(cfg, art);
    if (c == "spectrum") return cmd_spectrum(cfg, art);
    if (c == "audit-upper") return cmd_audit_upper(cfg, art);
    if (c == "fold") return cmd_fold(cfg, art);
    if (c == "verify-fold") return cmd_verify_fold(cfg, art);
    if (c == "coholder") return cmd_coholder(cfg, art);
    if (c == "pack") return cmd_pack(cfg, art);
    if (c == "energy") return cmd_energy(cfg, art);
    if (c == "bv-check") return cmd_bv_check(cfg, art);
    throw UsageError("unknown command '" + c + "'");
}

bool is_usage_kind(ErrorKind k) {
    return k == ErrorKind::invalid_argument || k == ErrorKind::invalid_spec || k == ErrorKind::out_of_range ||
           k == ErrorKind::parameter_violation;
}

}  // namespace

int dispatch(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const auto start = std::chrono::steady_clock::now();
    try {
        validate(cfg);
        Artifacts art(cfg, cfg.str("out"));
        Outcome o = execute(cfg, art);

        json report;
        report["command"] = cfg.command;
        report["version"] = version();
        report["seed"] = cfg.seed();
        report["precision"] = cfg.str("precision");
        report["pass"] = o.pass;
        for (auto& [k, v] : o.report.items()) report[k] = std::move(v);
        art.write("report.json", report.dump(2) + "\n");

        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        json rec;
        rec["tool"] = "aslb";
        rec["version"] = version();
        rec["command"] = cfg.command;
        rec["config"] = config_json(cfg);
        json sources = json::object();
        for (const auto& [k, s] : cfg.sources) sources[k] = to_string(s);
        rec["sources"] = sources;
        rec["conflicts"] = cfg.conflicts;
        rec["wall_time_seconds"] = wall;
        json files = json::array();
        for (const auto& [name, bytes] : art.manifest()) files.push_back({{"file", name}, {"bytes", bytes}});
        rec["files"] = files;
        rec["summary"] = {{"pass", o.pass}, {"message", o.summary}};
        std::ofstream(art.dir() / "run_record.json", std::ios::binary | std::ios::trunc) << rec.dump(2) << '\n';

        out << cfg.command << ": " << o.summary << '\n';
        return o.pass ? exit_ok : exit_check_failed;
    } catch (const UsageError& e) {
        err << "aslb " << cfg.command << ": usage error: " << e.what() << '\n';
        return exit_usage;
    } catch (const Error& e) {
        err << "aslb " << cfg.command << ": " << e.what() << '\n';
        if (is_usage_kind(e.kind())) return exit_usage;
        return e.kind() == ErrorKind::audit_failure ? exit_check_failed : exit_runtime;
    } catch (const std::exception& e) {
        err << "aslb " << cfg.command << ": error: " << e.what() << '\n';
        return exit_runtime;
    }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Assouad spectrum, folding, co-Holder and packing toolkit", "aslb"};
    app.require_subcommand(1);
    app.set_version_flag("--version", version());

    std::map<std::string, std::map<std::string, std::string>> storage;
    std::map<std::string, std::string> config_paths;
    std::map<std::string, CLI::App*> subs;
    for (const auto& name : command_names()) {
        CLI::App* sub = app.add_subcommand(name, command_help(name));
        auto& vals = storage[name];
        for (const auto& p : params_for(name)) {
            std::string help = p.help;
            if (!p.fallback.empty()) help += " [" + p.fallback + "]";
            sub->add_option("--" + p.name, vals[p.name], help);
        }
        sub->add_option("--config", config_paths[name], "flat key = value file; flags take precedence");
        subs[name] = sub;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    std::string command;
    for (const auto& [name, sub] : subs)
        if (sub->parsed()) command = name;

    try {
        std::map<std::string, std::string> flags;
        for (const auto& p : params_for(command))
            if (subs[command]->count("--" + p.name) > 0) flags[p.name] = storage[command][p.name];
        std::map<std::string, std::string> file;
        if (!config_paths[command].empty()) file = read_config_file(config_paths[command]);
        const RunConfig cfg = resolve(command, flags, file, err);
        return dispatch(cfg, out, err);
    } catch (const UsageError& e) {
        err << "aslb " << command << ": usage error: " << e.what() << '\n';
        return exit_usage;
    }
}

}  // namespace aslb::cli

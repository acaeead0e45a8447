#include "cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "aslb/parallel.hpp"

namespace aslb::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<ParamSpec> global_params() {
    return {{"out", "aslb-out", "output directory"},
            {"seed", "1", "seed for every randomized choice"},
            {"jobs", "", "worker threads (default: ASLB_JOBS or 1)"},
            {"precision", "double", "double or extended"}};
}

std::vector<ParamSpec> function_params(const std::string& samples) {
    return {{"family", "", "weierstrass, takagi, zigzag, identity, tent or constant"},
            {"input", "", "sampled function file (.csv or .bin) instead of --family"},
            {"a", "", "series ratio (weierstrass 0.5, takagi 2^-1/2)"},
            {"b", "", "series base (weierstrass 3, takagi 2)"},
            {"tol", "1e-12", "series truncation tolerance"},
            {"s", "3", "zigzag exponent s > 2"},
            {"variant", "plain", "zigzag sequence: plain or log_corrected"},
            {"m-max", "20000", "zigzag vertices"},
            {"value", "0", "constant family value"},
            {"lo", "", "domain start (default 0)"},
            {"hi", "", "domain end (default 1, zigzag a_first)"},
            {"samples", samples, "grid samples"}};
}

std::vector<ParamSpec> fold_params() {
    return {{"K", "2", "number of squares"},
            {"theta0", "0.3", "construction parameter in (0, alpha)"},
            {"alpha", "", "Holder exponent (default from the family)"},
            {"C", "", "upper Holder constant (default: measured)"},
            {"c", "", "lower oscillation constant (default: measured)"},
            {"r0", "0.1", "scale below which the witness applies"},
            {"search-points", "65537", "grid points per maximum search"},
            {"patch-samples", "4097", "samples per folded patch"},
            {"witness-trials", "2000", "spot checks of the witness"}};
}

std::map<std::string, std::vector<ParamSpec>> build_table() {
    std::map<std::string, std::vector<ParamSpec>> t;
    auto add = [&](const std::string& cmd, std::vector<std::vector<ParamSpec>> groups) {
        auto& v = t[cmd];
        for (auto& g : groups) v.insert(v.end(), g.begin(), g.end());
        std::sort(v.begin(), v.end(), [](const ParamSpec& a, const ParamSpec& b) { return a.name < b.name; });
    };
    const auto G = global_params();
    const auto F = function_params("1048576");
    add("generate", {G, F, {{"format", "csv", "csv or binary"}}});
    add("boxdim", {G, F,
                   {{"r-lo", "6.103515625e-05", "smallest box side"},
                    {"r-hi", "0.015625", "largest box side"},
                    {"r-count", "9", "geometric ladder length"},
                    {"alpha", "", "Holder exponent for the bound column"}}});
    add("spectrum", {G, F,
                     {{"theta-grid", "0.05:0.45:0.05", "theta values"},
                      {"centers", "20", "graph centers"},
                      {"scales", "8", "R values per theta"},
                      {"R-max", "0.5", "largest R"},
                      {"alpha", "", "Holder exponent for the bound column"},
                      {"p", "", "Sobolev exponent for the bound column"}}});
    add("audit-upper", {G, F,
                        {{"theta-grid", "0.1:0.4:0.1", "theta values"},
                         {"centers", "20", "graph centers"},
                         {"ladders", "4", "interleaved R-ladders"},
                         {"scales-per-ladder", "5", "R values per ladder"},
                         {"tolerance", "0.05", "allowed excess over the bound"},
                         {"R-max", "0.5", "largest R"},
                         {"center-lo", "", "centers drawn from [center-lo, center-hi]"},
                         {"center-hi", "", "centers drawn from [center-lo, center-hi]"},
                         {"alpha", "", "Holder exponent"},
                         {"p", "", "Sobolev exponent"}}});
    const auto FF = function_params("65537");
    add("fold", {G, FF, fold_params()});
    add("verify-fold", {G, FF, fold_params(),
                        {{"theta-grid", "0.2,0.3,0.4", "theta values"},
                         {"plan", "", "report.json of an earlier fold run"},
                         {"holder-pairs", "100000", "sampled pairs for the Holder check"},
                         {"column-points", "65", "evaluations per column"},
                         {"column-cap", "16384", "exhaustive column limit"},
                         {"sampled-columns", "4096", "columns sampled above the limit"}}});
    add("coholder", {G, F,
                     {{"alpha", "", "co-Holder exponent (default from the family)"},
                      {"eta", "0", "decay parameter"},
                      {"epsilon", "0", "projection parameter"},
                      {"J-count", "64", "positions per dyadic level"},
                      {"min-points", "3", "samples per tested subinterval"},
                      {"squares", "", "candidate squares 'cx,cy,R;...' (default: proposed)"},
                      {"R-hi", "0.3", "largest proposed radius"},
                      {"R-lo", "0.01", "smallest proposed radius"},
                      {"square-count", "5", "proposed squares"},
                      {"c-floor", "0.001", "smallest certifiable c"},
                      {"theta-grid", "", "theta values for the bound curve (default: 10 up to theta0)"}}});
    add("pack", {G,
                 {{"s", "3", "zigzag exponent s > 2"},
                  {"theta", "0.5", "theta in (0, (s-1)/s)"},
                  {"n", "10", "scale index"},
                  {"n-list", "", "scale indices for the gamma trend"},
                  {"c0", "", "N(n) constant (default min((s-1)/sqrt2, s-1)^(1/s)/2)"},
                  {"variant", "plain", "plain or log_corrected"},
                  {"exact", "auto", "50-digit recheck: auto (n <= 50), on or off"}}});
    add("energy", {G,
                   {{"s", "3", "zigzag exponent s > 2"},
                    {"variant", "plain", "plain or log_corrected"},
                    {"q", "2", "energy exponent q >= 1"},
                    {"m-max", "100000", "terms"},
                    {"margin", "0.1", "decision margin on the tail exponent"},
                    {"tail-fraction", "10", "tail window starts at m-max / tail-fraction"},
                    {"curve-points", "200", "rows in curves.csv"}}});
    add("bv-check", {G,
                     {{"trials", "20", "monotone staircases"},
                      {"samples", "4097", "grid samples"},
                      {"steps", "50", "jumps per staircase"},
                      {"pairs", "100", "random (g, h) pairs"},
                      {"intervals", "100", "intervals J per pair"}}});
    return t;
}

const std::map<std::string, std::vector<ParamSpec>>& table() {
    static const auto t = build_table();
    return t;
}

double parse_real(const std::string& key, const std::string& text) {
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != text.size() || text.empty()) throw UsageError("--" + key + ": '" + text + "' is not a number");
    return v;
}

}  // namespace

std::string to_string(Source s) {
    switch (s) {
        case Source::fallback: return "default";
        case Source::file: return "file";
        case Source::flag: return "flag";
    }
    return "default";
}

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"generate",    "boxdim", "spectrum", "audit-upper", "fold",
                                                "verify-fold", "coholder", "pack",   "energy",      "bv-check"};
    return names;
}

std::string command_help(const std::string& command) {
    static const std::map<std::string, std::string> help{
        {"generate", "sample a function and write it out"},
        {"boxdim", "box-counting dimension from column covers"},
        {"spectrum", "empirical Assouad spectrum curve"},
        {"audit-upper", "audit spectrum estimates against the regularity bound"},
        {"fold", "fold a Holder graph into a sequence of squares"},
        {"verify-fold", "fold (or load a plan) and verify the folded certificates"},
        {"coholder", "co-Holder certificate search and lower spectrum bound"},
        {"pack", "separated point family on the zigzag graph"},
        {"energy", "partial sums of the zigzag p-energy"},
        {"bv-check", "rotation and graph-sum checks on random BV functions"}};
    return help.at(command);
}

const std::vector<ParamSpec>& params_for(const std::string& command) {
    const auto it = table().find(command);
    if (it == table().end()) throw UsageError("unknown command '" + command + "'");
    return it->second;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read config file '" + path + "'");
    std::map<std::string, std::string> out;
    std::string line;
    for (int lineno = 1; std::getline(in, line); ++lineno) {
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw UsageError(path + ":" + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        if (key.rfind("--", 0) == 0) key.erase(0, 2);
        if (key.empty()) throw UsageError(path + ":" + std::to_string(lineno) + ": empty key");
        out[key] = trim(line.substr(eq + 1));
    }
    return out;
}

RunConfig resolve(const std::string& command, const std::map<std::string, std::string>& flags,
                  const std::map<std::string, std::string>& file, std::ostream& log) {
    const auto& specs = params_for(command);
    auto known = [&](const std::string& k) {
        return std::any_of(specs.begin(), specs.end(), [&](const ParamSpec& p) { return p.name == k; });
    };
    for (const auto& [k, v] : file)
        if (!known(k)) throw UsageError("unknown config key '" + k + "' for " + command);
    for (const auto& [k, v] : flags)
        if (!known(k)) throw UsageError("unknown option --" + k + " for " + command);

    RunConfig cfg;
    cfg.command = command;
    for (const auto& p : specs) {
        const auto f = flags.find(p.name);
        const auto g = file.find(p.name);
        if (f != flags.end()) {
            cfg.values[p.name] = f->second;
            cfg.sources[p.name] = Source::flag;
            if (g != file.end() && g->second != f->second) {
                const std::string msg =
                    p.name + ": flag value '" + f->second + "' overrides config file value '" + g->second + "'";
                cfg.conflicts.push_back(msg);
                log << "warning: " << msg << '\n';
            }
        } else if (g != file.end()) {
            cfg.values[p.name] = g->second;
            cfg.sources[p.name] = Source::file;
        } else {
            cfg.values[p.name] = p.fallback;
            cfg.sources[p.name] = Source::fallback;
        }
    }
    if (cfg.values["jobs"].empty()) cfg.values["jobs"] = std::to_string(default_jobs());
    return cfg;
}

std::vector<double> parse_reals(const std::string& key, const std::string& text) {
    std::vector<double> out;
    if (text.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(text);
        for (std::string p; std::getline(ss, p, ':');) parts.push_back(trim(p));
        if (parts.size() != 3) throw UsageError("--" + key + ": range must be lo:hi:step");
        const double lo = parse_real(key, parts[0]), hi = parse_real(key, parts[1]), step = parse_real(key, parts[2]);
        if (!(step > 0) || hi < lo) throw UsageError("--" + key + ": need step > 0 and hi >= lo");
        const auto n = static_cast<long long>(std::floor((hi - lo) / step + 1e-9));
        if (n > 100000) throw UsageError("--" + key + ": range too long");
        for (long long i = 0; i <= n; ++i) out.push_back(lo + static_cast<double>(i) * step);
        return out;
    }
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ',');) out.push_back(parse_real(key, trim(p)));
    if (out.empty()) throw UsageError("--" + key + ": empty list");
    return out;
}

bool RunConfig::has(const std::string& key) const {
    const auto it = values.find(key);
    return it != values.end() && !it->second.empty();
}

const std::string& RunConfig::str(const std::string& key) const {
    const auto it = values.find(key);
    if (it == values.end() || it->second.empty()) throw UsageError("--" + key + " is required for " + command);
    return it->second;
}

double RunConfig::real(const std::string& key) const {
    const double v = parse_real(key, str(key));
    if (!std::isfinite(v)) throw UsageError("--" + key + " must be finite");
    return v;
}

long long RunConfig::integer(const std::string& key) const {
    const std::string& text = str(key);
    std::size_t used = 0;
    long long v = 0;
    try {
        v = std::stoll(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != text.size()) {
        // accept integral reals such as 1e6
        const double d = parse_real(key, text);
        if (d != std::floor(d) || std::abs(d) > 9e18) throw UsageError("--" + key + ": '" + text + "' is not an integer");
        v = static_cast<long long>(d);
    }
    return v;
}

std::vector<double> RunConfig::reals(const std::string& key) const { return parse_reals(key, str(key)); }

std::vector<long long> RunConfig::integers(const std::string& key) const {
    std::vector<long long> out;
    for (double d : reals(key)) {
        if (d != std::floor(d)) throw UsageError("--" + key + ": entries must be integers");
        out.push_back(static_cast<long long>(d));
    }
    return out;
}

std::uint64_t RunConfig::seed() const {
    const long long s = integer("seed");
    if (s < 0) throw UsageError("--seed must be >= 0");
    return static_cast<std::uint64_t>(s);
}

int RunConfig::jobs() const {
    const long long j = integer("jobs");
    if (j < 1 || j > 1024) throw UsageError("--jobs must lie in [1, 1024]");
    return static_cast<int>(j);
}

}  // namespace aslb::cli

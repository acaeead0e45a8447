#include "aslb/io.hpp"

#include <array>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "aslb/json.hpp"

namespace aslb {

namespace {

constexpr char kMagic[5] = {'A', 'S', 'L', 'B', '1'};

void put_u64(std::ostream& os, std::uint64_t v) {
    std::array<char, 8> b{};
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
    os.write(b.data(), 8);
}

void put_u32(std::ostream& os, std::uint32_t v) {
    std::array<char, 4> b{};
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
    os.write(b.data(), 4);
}

void put_f64(std::ostream& os, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    put_u64(os, bits);
}

std::uint64_t get_u64(std::istream& is) {
    std::array<unsigned char, 8> b{};
    is.read(reinterpret_cast<char*>(b.data()), 8);
    require(static_cast<bool>(is), ErrorKind::io, "binary: truncated input");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

std::uint32_t get_u32(std::istream& is) {
    std::array<unsigned char, 4> b{};
    is.read(reinterpret_cast<char*>(b.data()), 4);
    require(static_cast<bool>(is), ErrorKind::io, "binary: truncated input");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

double get_f64(std::istream& is) {
    const std::uint64_t bits = get_u64(is);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

double parse_double(const std::string& s) {
    const char* begin = s.c_str();
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(begin, &end);
    // ERANGE on underflow still yields the nearest subnormal
    const bool overflow = errno == ERANGE && (std::isinf(v) || v == 0);
    require(end != begin && !overflow && !std::isspace(static_cast<unsigned char>(s.front())), ErrorKind::io,
            "cannot parse number '" + s + "'");
    require(end == begin + s.size(), ErrorKind::io, "trailing characters in number '" + s + "'");
    return v;
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_csv(std::ostream& os, const SampledFunction& f) {
    os << "# aslb sampled function\n";
    os << "# meta " << json(f.meta()).dump() << '\n';
    os << "# domain_lo " << format_double(f.domain_lo()) << '\n';
    os << "# domain_hi " << format_double(f.domain_hi()) << '\n';
    os << "# step " << format_double(f.step()) << '\n';
    os << "t,value\n";
    for (std::size_t i = 0; i < f.size(); ++i) os << format_double(f.t(i)) << ',' << format_double(f.value(i)) << '\n';
}

SampledFunction read_csv(std::istream& is) {
    FunctionMeta meta;
    double lo = 0, hi = 0, step = 0;
    bool have_lo = false, have_hi = false, have_step = false, header = false;
    std::vector<double> values;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream ls(line.substr(1));
            std::string key;
            ls >> key;
            std::string rest;
            std::getline(ls >> std::ws, rest);
            if (key == "meta") {
                try {
                    meta = json::parse(rest).get<FunctionMeta>();
                } catch (const json::exception& e) {
                    fail(ErrorKind::io, std::string("csv: bad meta header: ") + e.what());
                }
            } else if (key == "domain_lo") {
                lo = parse_double(rest);
                have_lo = true;
            } else if (key == "domain_hi") {
                hi = parse_double(rest);
                have_hi = true;
            } else if (key == "step") {
                step = parse_double(rest);
                have_step = true;
            }
            continue;
        }
        if (!header) {
            require(line == "t,value", ErrorKind::io, "csv: expected 't,value' column header");
            header = true;
            continue;
        }
        const auto comma = line.find(',');
        require(comma != std::string::npos, ErrorKind::io, "csv: malformed row '" + line + "'");
        values.push_back(parse_double(line.substr(comma + 1)));
    }
    require(have_lo && have_hi && have_step, ErrorKind::io, "csv: missing grid header lines");
    return SampledFunction(lo, hi, step, std::move(values), std::move(meta));
}

void write_binary(std::ostream& os, const SampledFunction& f) {
    const std::string meta = json(f.meta()).dump();
    os.write(kMagic, sizeof kMagic);
    put_u32(os, static_cast<std::uint32_t>(meta.size()));
    os.write(meta.data(), static_cast<std::streamsize>(meta.size()));
    put_f64(os, f.domain_lo());
    put_f64(os, f.domain_hi());
    put_f64(os, f.step());
    put_u64(os, f.size());
    for (double v : f.values()) put_f64(os, v);
}

SampledFunction read_binary(std::istream& is) {
    char magic[sizeof kMagic];
    is.read(magic, sizeof magic);
    require(is && std::memcmp(magic, kMagic, sizeof kMagic) == 0, ErrorKind::io, "binary: bad magic header");
    const std::uint32_t len = get_u32(is);
    std::string meta(len, '\0');
    is.read(meta.data(), len);
    require(static_cast<bool>(is), ErrorKind::io, "binary: truncated meta");
    FunctionMeta fm;
    try {
        fm = json::parse(meta).get<FunctionMeta>();
    } catch (const json::exception& e) {
        fail(ErrorKind::io, std::string("binary: bad meta: ") + e.what());
    }
    const double lo = get_f64(is), hi = get_f64(is), step = get_f64(is);
    const std::uint64_t n = get_u64(is);
    require(n < (std::uint64_t{1} << 36), ErrorKind::io, "binary: implausible sample count");
    std::vector<double> values(n);
    for (auto& v : values) v = get_f64(is);
    return SampledFunction(lo, hi, step, std::move(values), std::move(fm));
}

void save_csv(const std::string& path, const SampledFunction& f) {
    std::ofstream os(path);
    require(static_cast<bool>(os), ErrorKind::io, "cannot open '" + path + "' for writing");
    write_csv(os, f);
}

SampledFunction load_csv(const std::string& path) {
    std::ifstream is(path);
    require(static_cast<bool>(is), ErrorKind::io, "cannot open '" + path + "'");
    return read_csv(is);
}

void save_binary(const std::string& path, const SampledFunction& f) {
    std::ofstream os(path, std::ios::binary);
    require(static_cast<bool>(os), ErrorKind::io, "cannot open '" + path + "' for writing");
    write_binary(os, f);
}

SampledFunction load_binary(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    require(static_cast<bool>(is), ErrorKind::io, "cannot open '" + path + "'");
    return read_binary(is);
}

}  // namespace aslb

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace aslb::cli {

/// Bad flags, unknown keys or out-of-range values; exit code 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ParamSpec {
    std::string name;
    std::string fallback;  // empty: unset unless given
    std::string help;
};

enum class Source { fallback, file, flag };

std::string to_string(Source s);

struct RunConfig {
    std::string command;
    std::map<std::string, std::string> values;
    std::map<std::string, Source> sources;
    std::vector<std::string> conflicts;

    bool has(const std::string& key) const;
    const std::string& str(const std::string& key) const;
    double real(const std::string& key) const;
    long long integer(const std::string& key) const;
    /// Comma list or inclusive "lo:hi:step" range.
    std::vector<double> reals(const std::string& key) const;
    std::vector<long long> integers(const std::string& key) const;
    std::uint64_t seed() const;
    int jobs() const;
};

const std::vector<std::string>& command_names();
std::string command_help(const std::string& command);
/// Every key accepted by `command`, flags and config file alike.
const std::vector<ParamSpec>& params_for(const std::string& command);

/// Flat key = value lines; '#' and ';' start comments; blank lines ignored.
std::map<std::string, std::string> read_config_file(const std::string& path);

/// Flags override file values; conflicts are logged to `log` and recorded.
RunConfig resolve(const std::string& command, const std::map<std::string, std::string>& flags,
                  const std::map<std::string, std::string>& file, std::ostream& log);

std::vector<double> parse_reals(const std::string& key, const std::string& text);

}  // namespace aslb::cli

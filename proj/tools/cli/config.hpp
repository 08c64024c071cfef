#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace cli {

/// Invalid or unknown configuration; maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct KeySpec {
    std::string section;
    std::string key;
    std::string fallback;
    std::string help;
};

using Schema = std::vector<KeySpec>;

/// Flat "section.key = value" configuration checked against a schema.
/// Values come from the schema defaults, then the INI file, then --set overrides.
class Config {
public:
    Config(const Schema& schema, const std::string& ini_path, const std::vector<std::string>& overrides);

    std::string str(const std::string& name) const;
    std::string choice(const std::string& name, const std::vector<std::string>& allowed) const;
    long integer(const std::string& name, long lo, long hi) const;
    double real(const std::string& name) const;
    /// Real in the open interval (lo, hi) unless inclusive.
    double real_in(const std::string& name, double lo, double hi, bool inclusive = false) const;
    bool boolean(const std::string& name) const;
    std::vector<double> reals(const std::string& name) const;
    std::vector<long> integers(const std::string& name, long lo, long hi) const;

    /// Records the effective value of a key whose empty value selected a default.
    void resolve_default(const std::string& name, const std::string& value) const;

    /// Resolved values in schema order.
    const std::vector<std::pair<std::string, std::string>>& resolved() const { return resolved_; }

private:
    const std::string& raw(const std::string& name) const;
    [[noreturn]] void fail(const std::string& name, const std::string& why) const;

    std::map<std::string, std::string> values_;
    mutable std::vector<std::pair<std::string, std::string>> resolved_;
};

/// Schema text for --help: one "section.key = default  # help" line per key.
std::string describe(const Schema& schema);

}  // namespace cli

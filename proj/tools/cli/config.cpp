#include "config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace cli {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, ','))
        out.push_back(trim(item));
    if (out.size() == 1 && out[0].empty())
        out.clear();
    return out;
}

bool parse_double(const std::string& s, double& v)
{
    const char* b = s.data();
    const char* e = b + s.size();
    auto [p, ec] = std::from_chars(b, e, v);
    return ec == std::errc() && p == e && std::isfinite(v);
}

bool parse_long(const std::string& s, long& v)
{
    const char* b = s.data();
    const char* e = b + s.size();
    auto [p, ec] = std::from_chars(b, e, v);
    return ec == std::errc() && p == e;
}

}  // namespace

Config::Config(const Schema& schema, const std::string& ini_path, const std::vector<std::string>& overrides)
{
    std::set<std::string> known;
    for (const auto& k : schema) {
        const std::string name = k.section + "." + k.key;
        known.insert(name);
        values_[name] = k.fallback;
    }
    auto assign = [&](const std::string& name, const std::string& value, const std::string& origin) {
        if (!known.count(name))
            throw ConfigError(origin + ": unknown key '" + name + "'");
        values_[name] = trim(value);
    };
    if (!ini_path.empty()) {
        std::ifstream in(ini_path);
        if (!in)
            throw ConfigError("cannot open config file '" + ini_path + "'");
        boost::property_tree::ptree tree;
        try {
            boost::property_tree::read_ini(in, tree);
        } catch (const boost::property_tree::ini_parser_error& e) {
            throw ConfigError(std::string("config file: ") + e.what());
        }
        for (const auto& [section, body] : tree) {
            if (body.empty())
                throw ConfigError(ini_path + ": key '" + section + "' outside a section");
            for (const auto& [key, value] : body)
                assign(section + "." + key, value.data(), ini_path);
        }
    }
    for (const auto& o : overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos)
            throw ConfigError("--set expects section.key=value, got '" + o + "'");
        assign(trim(o.substr(0, eq)), o.substr(eq + 1), "--set");
    }
    for (const auto& k : schema) {
        const std::string name = k.section + "." + k.key;
        resolved_.emplace_back(name, values_[name]);
    }
}

const std::string& Config::raw(const std::string& name) const
{
    auto it = values_.find(name);
    if (it == values_.end())
        throw std::logic_error("config key '" + name + "' missing from the schema");
    return it->second;
}

void Config::fail(const std::string& name, const std::string& why) const
{
    throw ConfigError(name + " = '" + raw(name) + "': " + why);
}

void Config::resolve_default(const std::string& name, const std::string& value) const
{
    for (auto& [k, v] : resolved_)
        if (k == name && v.empty())
            v = value;
}

std::string Config::str(const std::string& name) const { return raw(name); }

std::string Config::choice(const std::string& name, const std::vector<std::string>& allowed) const
{
    for (const auto& a : allowed)
        if (raw(name) == a)
            return a;
    std::string list;
    for (const auto& a : allowed)
        list += (list.empty() ? "" : ", ") + a;
    fail(name, "expected one of " + list);
}

long Config::integer(const std::string& name, long lo, long hi) const
{
    long v = 0;
    if (!parse_long(raw(name), v))
        fail(name, "not an integer");
    if (v < lo || v > hi)
        fail(name, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return v;
}

double Config::real(const std::string& name) const
{
    double v = 0;
    if (!parse_double(raw(name), v))
        fail(name, "not a finite number");
    return v;
}

double Config::real_in(const std::string& name, double lo, double hi, bool inclusive) const
{
    const double v = real(name);
    const bool ok = inclusive ? (v >= lo && v <= hi) : (v > lo && v < hi);
    if (!ok) {
        std::ostringstream os;
        os << "must lie in " << (inclusive ? "[" : "(") << lo << ", " << hi << (inclusive ? "]" : ")");
        fail(name, os.str());
    }
    return v;
}

bool Config::boolean(const std::string& name) const
{
    const auto& v = raw(name);
    if (v == "true" || v == "1" || v == "yes")
        return true;
    if (v == "false" || v == "0" || v == "no")
        return false;
    fail(name, "expected true or false");
}

std::vector<double> Config::reals(const std::string& name) const
{
    std::vector<double> out;
    for (const auto& item : split_list(raw(name))) {
        double v = 0;
        if (!parse_double(item, v))
            fail(name, "'" + item + "' is not a finite number");
        out.push_back(v);
    }
    return out;
}

std::vector<long> Config::integers(const std::string& name, long lo, long hi) const
{
    std::vector<long> out;
    for (const auto& item : split_list(raw(name))) {
        long v = 0;
        if (!parse_long(item, v))
            fail(name, "'" + item + "' is not an integer");
        if (v < lo || v > hi)
            fail(name, "entries must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
        out.push_back(v);
    }
    return out;
}

std::string describe(const Schema& schema)
{
    std::ostringstream os;
    std::string section;
    for (const auto& k : schema) {
        if (k.section != section) {
            section = k.section;
            os << "[" << section << "]\n";
        }
        os << "  " << k.key << " = " << k.fallback;
        if (!k.help.empty())
            os << "    ; " << k.help;
        os << "\n";
    }
    return os.str();
}

}  // namespace cli

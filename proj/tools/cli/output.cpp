#include "output.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <Eigen/Core>
#include <boost/version.hpp>

#include "json.hpp"

namespace cli {

void Table::add(std::vector<Cell> row)
{
    if (row.size() != columns.size())
        throw std::logic_error("table " + name + ": row width does not match the header");
    rows.push_back(std::move(row));
}

std::string format_number(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc())
        throw std::logic_error("format_number: buffer too small");
    return std::string(buf, p);
}

namespace {

std::string cell_text(const Cell& c)
{
    if (const auto* d = std::get_if<double>(&c))
        return format_number(*d);
    if (const auto* l = std::get_if<long>(&c))
        return std::to_string(*l);
    return std::get<std::string>(c);
}

nlohmann::ordered_json cell_json(const Cell& c)
{
    if (const auto* d = std::get_if<double>(&c))
        return std::isfinite(*d) ? nlohmann::ordered_json(*d) : nlohmann::ordered_json(format_number(*d));
    if (const auto* l = std::get_if<long>(&c))
        return *l;
    return std::get<std::string>(c);
}

nlohmann::ordered_json config_json(const std::vector<std::pair<std::string, std::string>>& config)
{
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& [k, v] : config)
        j[k] = v;
    return j;
}

void write_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << text;
}

}  // namespace

RunWriter::RunWriter(std::filesystem::path dir, Format format, std::string command,
                     std::vector<std::pair<std::string, std::string>> config, long seed, int threads)
    : dir_(std::move(dir)), format_(format), command_(std::move(command)), config_(std::move(config)), seed_(seed),
      threads_(threads), last_(std::chrono::steady_clock::now())
{
    std::filesystem::create_directories(dir_);
}

void RunWriter::write(const Table& t)
{
    std::string text;
    std::string file;
    if (format_ == Format::Csv) {
        file = t.name + ".csv";
        text += std::string("# ") + kCsvSchema + "\n";
        text += "# command: " + command_ + "\n";
        text += "# seed: " + std::to_string(seed_) + "\n";
        for (const auto& [k, v] : config_)
            text += "# config: " + k + " = " + v + "\n";
        for (std::size_t c = 0; c < t.columns.size(); ++c)
            text += (c ? "," : "") + t.columns[c];
        text += "\n";
        for (const auto& row : t.rows) {
            for (std::size_t c = 0; c < row.size(); ++c)
                text += (c ? "," : "") + cell_text(row[c]);
            text += "\n";
        }
    } else {
        file = t.name + ".json";
        nlohmann::ordered_json j;
        j["schema"] = kJsonSchema;
        j["command"] = command_;
        j["seed"] = seed_;
        j["config"] = config_json(config_);
        j["table"] = t.name;
        j["columns"] = t.columns;
        auto rows = nlohmann::ordered_json::array();
        for (const auto& row : t.rows) {
            auto r = nlohmann::ordered_json::array();
            for (const auto& c : row)
                r.push_back(cell_json(c));
            rows.push_back(std::move(r));
        }
        j["rows"] = std::move(rows);
        text = j.dump(1) + "\n";
    }
    write_file(dir_ / file, text);
    files_.push_back(file);
}

void RunWriter::mark(const std::string& label)
{
    const auto now = std::chrono::steady_clock::now();
    timings_.emplace_back(label, std::chrono::duration<double>(now - last_).count());
    last_ = now;
}

void RunWriter::finish(const std::string& status, const std::string& message)
{
    nlohmann::ordered_json j;
    j["schema"] = kJsonSchema;
    j["command"] = command_;
    j["status"] = status;
    if (!message.empty())
        j["message"] = message;
    j["seed"] = seed_;
    j["threads"] = threads_;
    j["format"] = format_ == Format::Csv ? "csv" : "json";
    j["config"] = config_json(config_);
    j["files"] = files_;
    j["versions"] = {{"beckmann", "1.0.0"},
                     {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                   std::to_string(EIGEN_MINOR_VERSION)},
                     {"boost", std::to_string(BOOST_VERSION / 100000) + "." + std::to_string(BOOST_VERSION / 100 % 1000) +
                                   "." + std::to_string(BOOST_VERSION % 100)}};
    write_file(dir_ / "run.json", j.dump(1) + "\n");

    nlohmann::ordered_json t = nlohmann::ordered_json::object();
    double total = 0.0;
    for (const auto& [k, v] : timings_) {
        t[k] = v;
        total += v;
    }
    t["total"] = total;
    write_file(dir_ / "timings.json", t.dump(1) + "\n");
}

}  // namespace cli

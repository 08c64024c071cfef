#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace cli {

constexpr const char* kCsvSchema = "beckmann-csv/1";
constexpr const char* kJsonSchema = "beckmann-json/1";

using Cell = std::variant<double, long, std::string>;

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row);
};

/// Shortest round-trip decimal form; non-finite values print as nan, inf, -inf.
std::string format_number(double v);

enum class Format { Csv, Json };

/// Collects the tables of one run and writes them with the resolved config
/// embedded. Timings go to a separate file so every other output is
/// byte-identical across repeated runs.
class RunWriter {
public:
    RunWriter(std::filesystem::path dir, Format format, std::string command,
              std::vector<std::pair<std::string, std::string>> config, long seed, int threads);

    void write(const Table& t);
    /// Elapsed seconds since the previous mark (or construction), under label.
    void mark(const std::string& label);
    /// Writes run.json and timings.json.
    void finish(const std::string& status, const std::string& message = "");

    const std::filesystem::path& dir() const { return dir_; }

private:
    std::filesystem::path dir_;
    Format format_;
    std::string command_;
    std::vector<std::pair<std::string, std::string>> config_;
    long seed_;
    int threads_;
    std::vector<std::string> files_;
    std::vector<std::pair<std::string, double>> timings_;
    std::chrono::steady_clock::time_point last_;
};

}  // namespace cli

#include "app.hpp"

#include <algorithm>
#include <optional>
#include <ostream>

#include "CLI11.hpp"
#include "beckmann/errors.hpp"
#include "beckmann/parallel.hpp"
#include "commands.hpp"

namespace cli {

namespace {

struct Flags {
    std::string config;
    std::string out = "beckmann-out";
    int threads = 1;
    long seed = 1;
    std::string format = "csv";
    std::vector<std::string> sets;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Beckmann flux, transport flow and approximation experiments", "beckmann"};
    app.require_subcommand(1);
    Flags flags;
    for (const auto& cmd : commands()) {
        auto* sub = app.add_subcommand(cmd.name, cmd.description);
        sub->add_option("--config", flags.config, "INI file with the keys below")->check(CLI::ExistingFile);
        sub->add_option("--out", flags.out, "output directory")->capture_default_str();
        sub->add_option("--threads", flags.threads, "worker threads; 1 is the reference mode")
            ->check(CLI::Range(1, 1024))
            ->capture_default_str();
        sub->add_option("--seed", flags.seed, "seed of every random choice")
            ->check(CLI::NonNegativeNumber)
            ->capture_default_str();
        sub->add_option("--format", flags.format, "table format")
            ->check(CLI::IsMember({"csv", "json"}))
            ->capture_default_str();
        sub->add_option("--set", flags.sets, "override one key: section.key=value (repeatable)")
            ->allow_extra_args(false)
            ->take_all();
        sub->footer("Config keys (section, key = default):\n" + describe(cmd.schema));
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kConfigError;
    }

    const Command* cmd = nullptr;
    for (const auto& c : commands())
        if (app.got_subcommand(c.name))
            cmd = &c;

    Runner runner;
    std::vector<std::pair<std::string, std::string>> resolved;
    try {
        Config config(cmd->schema, flags.config, flags.sets);
        runner = cmd->prepare(config, flags.seed);
        resolved = config.resolved();
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kConfigError;
    }

    beckmann::set_thread_count(flags.threads);
    std::optional<RunWriter> writer;
    try {
        writer.emplace(flags.out, flags.format == "json" ? Format::Json : Format::Csv, cmd->name, resolved,
                       flags.seed, flags.threads);
        runner(*writer);
        writer->finish("ok");
    } catch (const beckmann::NumericalError& e) {
        err << "numerical failure in module " << e.module() << ": " << e.what() << "\n";
        if (writer)
            writer->finish("failed", e.module() + ": " + e.what());
        return kNumericalError;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << "\n";
        if (writer)
            writer->finish("failed", e.what());
        return kConfigError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kInternalError;
    }
    out << cmd->name << ": wrote " << writer->dir().string() << "\n";
    return kOk;
}

}  // namespace cli

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "beckmann/grid.hpp"
#include "config.hpp"
#include "output.hpp"

namespace cli {

/// Work of one subcommand after its config has been fully validated.
using Runner = std::function<void(RunWriter&)>;

struct Command {
    std::string name;
    std::string description;
    Schema schema;
    /// Validates every key and returns the runner; throws ConfigError.
    std::function<Runner(const Config&, long seed)> prepare;
};

const std::vector<Command>& commands();

/// f = Lap u for u = prod_a cos(pi x_a); both are mean-free on the grid.
beckmann::ScalarField manufactured_rhs(const beckmann::Grid& grid);
beckmann::ScalarField manufactured_solution(const beckmann::Grid& grid);

}  // namespace cli

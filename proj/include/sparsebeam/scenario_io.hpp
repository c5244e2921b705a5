#ifndef SPARSEBEAM_SCENARIO_IO_HPP
#define SPARSEBEAM_SCENARIO_IO_HPP

#include <cstdint>
#include <string>

#include "sparsebeam/cone.hpp"
#include "sparsebeam/design.hpp"
#include "sparsebeam/model.hpp"

namespace sparsebeam {

// Parse errors carry the offending field in the message.
struct ParseError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Everything a run needs beyond the Scenario itself.
struct RunConfig {
    Scenario scenario;
    SolverSettings solver;
    SparsityController controller;
    double epsilon = 0.05;  // reweighting epsilon
    double sweep_deg = 0.25;
    std::uint64_t seed = 1;
};

// JSON text -> validated Scenario, defaults applied (spacing_ratio 0.5,
// weights 1, rho 1, total_power 1).
Scenario load_scenario(const std::string& text);

// Full config document: scenario plus optional "solver", "controller",
// "sweep_deg", "seed" sections.
RunConfig load_config(const std::string& text);
RunConfig load_config_file(const std::string& path);

}  // namespace sparsebeam

#endif

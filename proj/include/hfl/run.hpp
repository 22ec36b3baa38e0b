#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "hfl/acceptance.hpp"

namespace hfl::run {

struct Subcommand {
    std::string name;
    std::string help;
    std::vector<std::string> experiments;  // experiment names, criterion order
    std::vector<std::string> parts;        // --part choices besides "all"; empty means no --part
};

const std::vector<Subcommand>& subcommands();
const Subcommand& subcommand(const std::string& name);

struct RunConfig {
    std::string command;
    std::string part = "all";
    acc::Params overrides;  // --flag values as given; routed to the experiment that declares them
    std::filesystem::path out;  // empty: <output root>/<command>
    int jobs = 1;
    bool plot_data = false;
};

// $HFL_OUTPUT_ROOT or "hfl-runs".
std::filesystem::path output_root();

struct Planned {
    const acc::Experiment* experiment = nullptr;
    acc::Params params;  // resolved
};

// Resolves every parameter; raises UsageError before anything is written.
std::vector<Planned> plan(const RunConfig& cfg);

// Runs the plan on a pool of cfg.jobs threads, then writes manifest.json,
// one CSV per table, summary.json and (with plot_data) .dat files into a
// fresh run directory. Returns 0 when every check passes, 1 otherwise.
int execute(const RunConfig& cfg, std::ostream& log);

}  // namespace hfl::run

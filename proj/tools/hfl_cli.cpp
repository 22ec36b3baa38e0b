#include <exception>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "hfl/acceptance.hpp"
#include "hfl/error.hpp"
#include "hfl/run.hpp"

namespace {

constexpr int kUsage = 2;
constexpr int kFailure = 1;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"High-frequency limit experiments"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Print help for every subcommand");

    hfl::run::RunConfig cfg;
    std::string out;
    std::map<std::string, std::map<std::string, std::string>> values;
    std::map<std::string, std::map<std::string, CLI::Option*>> options;

    for (const auto& sc : hfl::run::subcommands()) {
        CLI::App* sub = app.add_subcommand(sc.name, sc.help);
        sub->add_option("--out", out, "Run directory (default: $HFL_OUTPUT_ROOT or hfl-runs, then the subcommand)");
        sub->add_option("--jobs", cfg.jobs, "Worker threads")->check(CLI::PositiveNumber);
        sub->add_flag("--plot-data", cfg.plot_data, "Also write gnuplot whitespace columns (.dat)");
        if (!sc.parts.empty()) {
            std::vector<std::string> parts = sc.parts;
            parts.push_back("all");
            sub->add_option("--part", cfg.part, "Part to run")->check(CLI::IsMember(parts));
        }
        for (const auto& ename : sc.experiments) {
            const auto& e = hfl::acc::experiment(ename);
            for (const auto& p : e.params) {
                if (options[sc.name].count(p.name)) continue;
                std::string help = p.help + " [" + p.value + "]";
                if (sc.experiments.size() > 1) help += " (" + e.name + ")";
                options[sc.name][p.name] = sub->add_option("--" + p.name, values[sc.name][p.name], help);
            }
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "hfl: " << e.what() << "\n";
        return kUsage;
    }

    const CLI::App* chosen = app.get_subcommands().front();
    cfg.command = chosen->get_name();
    cfg.out = out;
    for (const auto& [name, opt] : options[cfg.command])
        if (opt->count() > 0) cfg.overrides[name] = values[cfg.command][name];

    try {
        return hfl::run::execute(cfg, std::cout);
    } catch (const hfl::UsageError& e) {
        std::cerr << "hfl: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "hfl: " << e.what() << "\n";
        return kFailure;
    }
}

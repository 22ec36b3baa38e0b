#pragma once

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "hfl/io.hpp"

namespace hfl::acc {

using Params = std::map<std::string, std::string>;

enum class Kind { Real, Int, IntList, Text };

struct ParamSpec {
    std::string name;
    std::string value;  // default
    Kind kind = Kind::Text;
    std::string help;
    std::vector<std::string> choices;  // Text only; empty means free form
};

struct Check {
    std::string name;
    bool pass = false;
    double value = 0.0;
    std::string relation;  // "<=", ">=", "==", "flag"
    double threshold = 0.0;
};

struct Report {
    int criterion = 0;
    std::string name;
    std::vector<Check> checks;
    std::vector<std::pair<std::string, double>> metrics;
    std::vector<std::pair<std::string, std::string>> notes;
    std::vector<io::Table> tables;
    std::string error;  // originating module error, empty when the run completed
    double seconds = 0.0;

    bool pass() const;
    void at_most(const std::string& name, double value, double bound);
    void at_least(const std::string& name, double value, double bound);
    void flag(const std::string& name, bool ok);
    void metric(const std::string& name, double value) { metrics.emplace_back(name, value); }
    void note(const std::string& name, const std::string& value) { notes.emplace_back(name, value); }
    // One line: "criterion N name: PASS|FAIL (k/m checks[, first failure])".
    std::string line() const;
};

struct Experiment {
    std::string name;
    int criterion = 0;
    std::string title;
    std::vector<ParamSpec> params;
    std::function<Report(const Params&)> run;
};

// Criteria 1..10 in order.
const std::vector<Experiment>& experiments();
const Experiment& experiment(const std::string& name);

// Defaults merged with overrides; unknown keys and ill-typed values raise UsageError.
Params resolve(const Experiment& e, const Params& overrides);

// Resolves, runs, times, and turns NumericalError into a failed report.
Report run_experiment(const Experiment& e, const Params& overrides = {});

// All ten criteria with default parameters on up to `jobs` threads; reports in criterion order.
std::vector<Report> verify_all(int jobs = 1);

// "a..b" inclusive or a comma list.
std::vector<int> parse_int_list(const std::string& s);
double parse_real(const std::string& s);
long long parse_int(const std::string& s);

}  // namespace hfl::acc

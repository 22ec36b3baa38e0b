#include "hfl/run.hpp"

#include <fftw3.h>

#include <Eigen/Core>
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <ostream>
#include <set>
#include <thread>

#include "hfl/error.hpp"
#include "hfl/io.hpp"
#include "hfl/kernels.hpp"
#include "json.hpp"

namespace hfl::run {

using json = nlohmann::ordered_json;

const std::vector<Subcommand>& subcommands() {
    static const std::vector<Subcommand> v{
        {"burnett", "Burnett weak limit of the plane-wave family", {"burnett"}, {}},
        {"shell-limit", "Impulsive shell limit of the plane-wave family", {"shell-limit"}, {}},
        {"gowdy", "Polarized Gowdy family and its limit", {"gowdy"}, {}},
        {"constraints", "Null constraint solver with dust", {"constraints"}, {}},
        {"hf-approx", "Oscillation absorber and mollification", {"oscillation", "mollification"},
         {"oscillation", "mollification"}},
        {"pipeline", "Measure-to-vacuum pipeline and characteristic reconstruction", {"pipeline", "characteristic"},
         {"full", "characteristic"}},
        {"trapped", "Null dust shell and trapped surfaces", {"trapped"}, {}},
        {"cc-demo", "Frequency decomposition and weak products", {"cc-demo"}, {}},
        {"verify-all", "All acceptance criteria",
         {"burnett", "shell-limit", "gowdy", "constraints", "oscillation", "mollification", "pipeline", "trapped",
          "cc-demo", "characteristic"},
         {}},
    };
    return v;
}

const Subcommand& subcommand(const std::string& name) {
    for (const auto& s : subcommands())
        if (s.name == name) return s;
    throw UsageError("unknown subcommand '" + name + "'");
}

std::filesystem::path output_root() {
    const char* env = std::getenv("HFL_OUTPUT_ROOT");
    return env && *env ? std::filesystem::path(env) : std::filesystem::path("hfl-runs");
}

std::vector<Planned> plan(const RunConfig& cfg) {
    const Subcommand& sc = subcommand(cfg.command);
    if (cfg.jobs < 1) throw UsageError("--jobs must be at least 1");
    std::vector<std::string> names = sc.experiments;
    if (cfg.part != "all") {
        auto it = std::find(sc.parts.begin(), sc.parts.end(), cfg.part);
        if (it == sc.parts.end()) throw UsageError(cfg.command + ": unknown --part '" + cfg.part + "'");
        names = {sc.experiments[static_cast<std::size_t>(it - sc.parts.begin())]};
    }
    std::set<std::string> used;
    std::vector<Planned> out;
    for (const auto& n : names) {
        const auto& e = acc::experiment(n);
        acc::Params mine;
        for (const auto& [k, v] : cfg.overrides)
            if (std::any_of(e.params.begin(), e.params.end(), [&](const acc::ParamSpec& s) { return s.name == k; })) {
                mine[k] = v;
                used.insert(k);
            }
        out.push_back({&e, acc::resolve(e, mine)});
    }
    for (const auto& [k, v] : cfg.overrides)
        if (!used.count(k)) throw UsageError(cfg.command + ": --" + k + " does not apply to the selected part");
    return out;
}

namespace {

std::vector<acc::Report> run_pool(const std::vector<Planned>& p, int jobs) {
    std::vector<acc::Report> out(p.size());
    std::vector<std::exception_ptr> errors(p.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < p.size(); i = next++) {
            try {
                out[i] = acc::run_experiment(*p[i].experiment, p[i].params);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const int n = std::clamp(jobs, 1, static_cast<int>(std::max<std::size_t>(p.size(), 1)));
    std::vector<std::thread> pool;
    for (int i = 1; i < n; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

json versions() {
    json v;
    v["hfl"] = "1.0.0";
    v["compiler"] = __VERSION__;
    v["cxx_standard"] = static_cast<long>(__cplusplus);
    v["fftw"] = std::string(fftw_version);
    v["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                 std::to_string(EIGEN_MINOR_VERSION);
    v["json"] = std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." + std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                std::to_string(NLOHMANN_JSON_VERSION_PATCH);
    v["simd_kernel"] = kern::active().name;
    return v;
}

json report_json(const acc::Report& r) {
    json j;
    j["criterion"] = r.criterion;
    j["name"] = r.name;
    j["pass"] = r.pass();
    if (!r.error.empty()) j["error"] = r.error;
    j["checks"] = json::array();
    for (const auto& c : r.checks)
        j["checks"].push_back({{"name", c.name}, {"pass", c.pass}, {"value", c.value}, {"relation", c.relation},
                               {"threshold", c.threshold}});
    j["metrics"] = json::object();
    for (const auto& [k, v] : r.metrics) j["metrics"][k] = v;
    for (const auto& [k, v] : r.notes) j["notes"][k] = v;
    return j;
}

// A directory is ours to replace when it is missing, empty, or holds a previous manifest.
void prepare_dir(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    if (!fs::exists(dir)) return;
    if (!fs::is_directory(dir)) throw UsageError(dir.string() + " exists and is not a directory");
    if (fs::is_empty(dir)) return;
    if (!fs::exists(dir / "manifest.json"))
        throw UsageError("refusing to overwrite " + dir.string() + ": not an earlier run directory");
    fs::remove_all(dir);
}

}  // namespace

int execute(const RunConfig& cfg, std::ostream& log) {
    namespace fs = std::filesystem;
    const auto planned = plan(cfg);
    const fs::path dir = cfg.out.empty() ? output_root() / cfg.command : cfg.out;
    const auto t0 = std::chrono::steady_clock::now();
    const auto reports = run_pool(planned, cfg.jobs);
    const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    bool pass = true;
    for (const auto& r : reports) pass = pass && r.pass();
    const int code = pass ? 0 : 1;

    prepare_dir(dir);
    fs::create_directories(dir);
    json artifacts = json::array();
    for (std::size_t i = 0; i < reports.size(); ++i)
        for (const auto& t : reports[i].tables) {
            io::write_file(dir / (t.name + ".csv"), io::to_csv(t));
            artifacts.push_back(t.name + ".csv");
            if (cfg.plot_data) {
                io::write_file(dir / (t.name + ".dat"), io::to_plot_data(t));
                artifacts.push_back(t.name + ".dat");
            }
        }

    json summary;
    summary["command"] = cfg.command;
    summary["pass"] = pass;
    summary["exit_code"] = code;
    summary["criteria"] = json::array();
    for (const auto& r : reports) summary["criteria"].push_back(report_json(r));
    io::write_file(dir / "summary.json", summary.dump(2) + "\n");
    artifacts.push_back("summary.json");

    json manifest;
    manifest["command"] = cfg.command;
    manifest["part"] = cfg.part;
    manifest["jobs"] = cfg.jobs;
    manifest["plot_data"] = cfg.plot_data;
    manifest["output_dir"] = dir.string();
    json config = json::object();
    for (const auto& p : planned) config[p.experiment->name] = json(p.params);
    manifest["config"] = config;
    manifest["versions"] = versions();
    json times = json::object();
    for (std::size_t i = 0; i < reports.size(); ++i) times[planned[i].experiment->name] = reports[i].seconds;
    times["total"] = total;
    manifest["wall_seconds"] = times;
    manifest["artifacts"] = artifacts;
    io::write_file(dir / "manifest.json", manifest.dump(2) + "\n");

    for (const auto& r : reports) log << r.line() << "\n";
    log << "artifacts: " << dir.string() << "\n";
    return code;
}

}  // namespace hfl::run

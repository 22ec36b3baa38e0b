#include "doctest.h"

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hfl/acceptance.hpp"
#include "hfl/error.hpp"
#include "hfl/io.hpp"
#include "hfl/rate_fit.hpp"
#include "hfl/run.hpp"

namespace fs = std::filesystem;
using namespace hfl;

namespace {

std::string cli() {
    const char* p = std::getenv("HFL_CLI");
    REQUIRE_MESSAGE(p != nullptr, "HFL_CLI must point at the hfl binary");
    return p;
}

fs::path scratch(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("hfl_cli_test_" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    fs::create_directories(p.parent_path());
    return p;
}

int invoke(const std::string& args, const fs::path& root) {
    const std::string cmd = "HFL_OUTPUT_ROOT='" + root.string() + "' '" + cli() + "' " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

std::size_t count(const std::string& s, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + needle.size())) ++n;
    return n;
}

}  // namespace

TEST_CASE("fit_rate") {
    std::vector<double> xs{1, 2, 4, 8, 16, 32}, ys;
    for (double x : xs) ys.push_back(1.0 / x);
    CHECK(std::abs(fit_rate(xs, ys).slope + 1.0) <= 1e-10);

    std::mt19937 rng(5);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::vector<double> noisy;
    for (double x : xs) noisy.push_back((1.0 + 0.01 * U(rng)) / x);
    CHECK(std::abs(fit_rate(xs, noisy).slope + 1.0) <= 0.05);

    CHECK(fit_rate(xs, std::vector<double>(xs.size(), 3.0)).slope == doctest::Approx(0.0).epsilon(1e-14));
    CHECK_THROWS_AS(fit_rate(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3}), UsageError);
    CHECK_THROWS_AS(fit_rate(xs, std::vector<double>{1, 1, 1, 0, 1, 1}), UsageError);
}

TEST_CASE("CSV and plot-data formatting") {
    CHECK(io::csv_field("plain") == "plain");
    CHECK(io::csv_field("a,b") == "\"a,b\"");
    CHECK(io::csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(io::csv_field("two\nlines") == "\"two\nlines\"");
    io::Table t{"t", {"name", "value"}, {}};
    t.add({"x,y", io::fmt(0.1)});
    t.add({"z", io::fmt(-2.5e-300)});
    CHECK(io::to_csv(t) == "name,value\r\n\"x,y\",0.1\r\nz,-2.5e-300\r\n");
    CHECK(io::to_plot_data(t) == "# name value\nx,y 0.1\nz -2.5e-300\n");
    CHECK_THROWS_AS(t.add({"only one"}), UsageError);
    CHECK(io::fmt(1.0 / 3.0) == "0.3333333333333333");
    CHECK(std::stod(io::fmt(1.0 / 3.0)) == 1.0 / 3.0);
    CHECK(io::fmt(std::nan("")) == "nan");
}

TEST_CASE("Parameter resolution") {
    CHECK(acc::parse_int_list("2..10").size() == 9);
    CHECK(acc::parse_int_list("4,8,16") == std::vector<int>{4, 8, 16});
    CHECK_THROWS_AS(acc::parse_int_list("5..2"), UsageError);
    CHECK_THROWS_AS(acc::parse_int_list("1,x"), UsageError);
    const auto& e = acc::experiment("trapped");
    auto p = acc::resolve(e, {{"ustar", "0.3"}});
    CHECK(p.at("ustar") == "0.3");
    CHECK(p.at("mass") == "const:1.2");
    CHECK_THROWS_AS(acc::resolve(e, {{"bogus", "1"}}), UsageError);
    CHECK_THROWS_AS(acc::resolve(e, {{"ustar", "half"}}), UsageError);
    CHECK_THROWS_AS(acc::resolve(acc::experiment("cc-demo"), {{"pair", "nope"}}), UsageError);
    CHECK(acc::experiments().size() == 10);
    for (std::size_t i = 0; i < acc::experiments().size(); ++i) CHECK(acc::experiments()[i].criterion == int(i) + 1);

    run::RunConfig cfg;
    cfg.command = "hf-approx";
    cfg.part = "mollification";
    cfg.overrides = {{"n-seq", "8,16"}};
    CHECK_THROWS_AS(run::plan(cfg), UsageError);
    cfg.overrides = {{"m-max", "5"}};
    auto planned = run::plan(cfg);
    REQUIRE(planned.size() == 1);
    CHECK(planned[0].params.at("m-max") == "5");
}

TEST_CASE("burnett run writes a 9-row table, manifest and summary") {
    const fs::path root = scratch("burnett");
    CHECK(invoke("burnett --lambda-seq 2..10", root) == 0);
    const fs::path dir = root / "burnett";
    const std::string csv = slurp(dir / "burnett_pairings.csv");
    CHECK(count(csv, "\r\n") == 10);
    const std::string summary = slurp(dir / "summary.json");
    CHECK(summary.find("\"slope\"") != std::string::npos);
    CHECK(summary.find("\"pass\": true") != std::string::npos);
    const std::string manifest = slurp(dir / "manifest.json");
    for (const char* key : {"\"config\"", "\"versions\"", "\"wall_seconds\"", "\"lambda-seq\": \"2..10\"", "\"fftw\""})
        CHECK(manifest.find(key) != std::string::npos);
}

TEST_CASE("trapped run reports the verdict") {
    const fs::path root = scratch("trapped");
    CHECK(invoke("trapped --ustar 0.5 --mass const:1.2 --samples 50", root) == 0);
    const std::string summary = slurp(root / "trapped" / "summary.json");
    CHECK(summary.find("\"trapped\": 1.0") != std::string::npos);
    CHECK(summary.find("\"verdict\": \"trapped\"") != std::string::npos);
    CHECK(invoke("trapped --ustar 0.5 --mass const:0.9 --samples 50", root) == 0);
    CHECK(slurp(root / "trapped" / "summary.json").find("\"verdict\": \"not trapped\"") != std::string::npos);
}

TEST_CASE("usage errors exit 2 and write nothing") {
    const fs::path root = scratch("usage");
    CHECK(invoke("burnett --lamda-seq 2..10", root) == 2);
    CHECK(invoke("burnett --lambda-seq ten", root) == 2);
    CHECK(invoke("trapped --mass wobbly:1", root) == 2);
    CHECK(invoke("cc-demo --pair nope", root) == 2);
    CHECK(invoke("gowdy --jobs 0", root) == 2);
    CHECK(invoke("hf-approx --part nothing", root) == 2);
    CHECK(invoke("no-such-command", root) == 2);
    CHECK(invoke("", root) == 2);
    CHECK_FALSE(fs::exists(root));

    fs::create_directories(root / "keep");
    std::ofstream(root / "keep" / "notes.txt") << "mine";
    CHECK(invoke("trapped --samples 10 --out '" + (root / "keep").string() + "'", root) == 2);
    CHECK(slurp(root / "keep" / "notes.txt") == "mine");
}

TEST_CASE("acceptance failure exits 1 and keeps the artifacts") {
    const fs::path root = scratch("fail");
    // Transverse frequencies in 4D violate the support property.
    CHECK(invoke("cc-demo --dim 4 --c1 1.5 --trials 20 --pair sin2 --n-seq 4,8 --grid 32", root) == 1);
    const std::string summary = slurp(root / "cc-demo" / "summary.json");
    CHECK(summary.find("\"pass\": false") != std::string::npos);
    CHECK(fs::exists(root / "cc-demo" / "cc_support.csv"));
}

TEST_CASE("runs are deterministic and honour --out, --jobs and --plot-data") {
    const fs::path root = scratch("det");
    const std::string args = "cc-demo --trials 5 --n-seq 8,16,32 --grid 128";
    CHECK(invoke(args + " --out '" + (root / "a").string() + "'", root) == 0);
    CHECK(invoke(args + " --jobs 3 --plot-data --out '" + (root / "b").string() + "'", root) == 0);
    for (const char* f : {"cc_support.csv", "cc_pairings.csv"}) CHECK(slurp(root / "a" / f) == slurp(root / "b" / f));
    CHECK_FALSE(fs::exists(root / "a" / "cc_pairings.dat"));
    const std::string dat = slurp(root / "b" / "cc_pairings.dat");
    CHECK(dat.rfind("# pair n pairing", 0) == 0);

    // Rerunning into an earlier run directory replaces it.
    CHECK(invoke(args + " --out '" + (root / "a").string() + "'", root) == 0);

    CHECK(invoke("pipeline --part characteristic --jobs 2", root) == 0);
    CHECK(fs::exists(root / "pipeline" / "characteristic_minkowski.csv"));
    CHECK_FALSE(fs::exists(root / "pipeline" / "pipeline_pairings.csv"));
    fs::remove_all(root.parent_path());
}

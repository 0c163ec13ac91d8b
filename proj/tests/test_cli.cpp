#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include "cli.hpp"
#include "json.hpp"
#include "selfsim/exact.hpp"

namespace fs = std::filesystem;
using selfsim::cli::run;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& leaf) const { return (path / leaf).string(); }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::vector<std::vector<std::string>> rows;
    std::ifstream in(p);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

}  // namespace

TEST_CASE("usage errors exit with 2") {
    CHECK(run({}) == 2);
    CHECK(run({"frobnicate"}) == 2);
    CHECK(run({"exact", "--alpha", "0.5", "--bogus", "1"}) == 2);
    CHECK(run({"exact"}) == 2);
    CHECK(run({"exact", "--alpha", "1.5"}) == 2);
    CHECK(run({"verify", "--suite", "nope"}) == 2);
}

TEST_CASE("exact writes the closed form") {
    const TempDir dir("selfsim_cli_exact");
    REQUIRE(run({"exact", "--alpha", "0.5", "--grid-n", "256", "--out", dir / "w.csv"}) == 0);
    const auto rows = read_csv(dir / "w.csv");
    REQUIRE(rows.size() == 257);
    CHECK(rows[0] == std::vector<std::string>{"y", "W", "HW"});
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double y = std::stod(rows[i][0]);
        CHECK(std::stod(rows[i][1]) == doctest::Approx(selfsim::exact_w(0.5, y)).epsilon(1e-15));
        CHECK(std::stod(rows[i][2]) == doctest::Approx(selfsim::exact_hw(0.5, y)).epsilon(1e-15));
    }

    const auto manifest = read_json(dir.path / "manifest.json");
    CHECK(manifest["command"] == "exact");
    CHECK(manifest["version"] == selfsim::cli::kToolVersion);
    CHECK(manifest["grid"]["n"] == 256);
    CHECK(manifest.contains("timestamp"));

    std::size_t manifests = 0;
    for (const auto& e : fs::directory_iterator(dir.path)) manifests += e.path().filename() == "manifest.json";
    CHECK(manifests == 1);
}

TEST_CASE("verify kernel") {
    const TempDir dir("selfsim_cli_kernel");
    REQUIRE(run({"verify", "--suite", "kernel", "--samples", "500", "--seed", "3", "--out", dir / "k.csv"}) == 0);
    const auto rows = read_csv(dir / "k.csv");
    REQUIRE(rows.size() == 501);
    CHECK(rows[0].back() == "verdict");
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].back() == "pass");
    CHECK(read_json(dir.path / "manifest.json")["seed"] == 3);

    // Same seed, same bytes.
    REQUIRE(run({"verify", "--suite", "kernel", "--samples", "500", "--seed", "3", "--out", dir / "k2.csv"}) == 0);
    CHECK(slurp(dir.path / "k.csv") == slurp(dir.path / "k2.csv"));
}

TEST_CASE("solve report") {
    const TempDir dir("selfsim_cli_solve");
    REQUIRE(run({"solve", "--alpha", "0.5", "--a", "0.02", "--out", dir / "s.json"}) == 0);
    const auto report = read_json(dir.path / "s.json");
    CHECK(report["status"] == "converged");
    CHECK(report["residual_l2"].get<double>() <= 1e-8);
    CHECK(std::abs(report["lambda"].get<double>()) < 0.1);
    CHECK(fs::exists(dir.path / "s.profile.csv"));

    // A non-converged solve is a verification failure, not a crash.
    CHECK(run({"solve", "--alpha", "0.5", "--a", "4", "--grid-n", "1024", "--out", dir / "bad.json"}) == 1);
}

TEST_CASE("config file merge") {
    const TempDir dir("selfsim_cli_config");
    {
        std::ofstream cfg(dir / "run.cfg");
        cfg << "# defaults for exact\nalpha = 0.9\ngrid-n=128\n";
    }
    REQUIRE(run({"exact", "--config", dir / "run.cfg", "--grid-n", "64", "--out", dir / "w.csv"}) == 0);
    const auto manifest = read_json(dir.path / "manifest.json");
    CHECK(manifest["grid"]["n"] == 64);
    CHECK(manifest["grid"]["alpha"] == 0.9);
    CHECK(read_csv(dir / "w.csv").size() == 65);

    const auto merged = selfsim::cli::merge_config({"exact", "--config", dir / "run.cfg", "--alpha", "0.3"});
    CHECK(std::find(merged.begin(), merged.end(), "--config") == merged.end());
    CHECK(std::count(merged.begin(), merged.end(), "--alpha") == 1);

    CHECK(run({"exact", "--config", dir / "missing.cfg"}) == 2);
}

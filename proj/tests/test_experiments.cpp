// SPDX-License-Identifier: Apache-2.0
#include "oracles.hpp"

#include "pass/experiments.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace pass;

namespace {

Scenario bundled(const char* name)
{
    return load_scenario(std::string(PASS_SCENARIO_DIR) + "/" + name);
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text)
{
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ','))
            cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

} // namespace

TEST_CASE("array gain CSV")
{
    const auto s = bundled("desk_array_gain.yaml");
    SweepSpec spec;
    spec.n_list = {1};
    const auto csv = run_array_gain(s, spec);
    const auto rows = parse_csv(csv);
    REQUIRE(rows.size() == 2);
    CHECK(csv.substr(0, csv.find('\n')) == kArrayGainHeader);
    CHECK(rows[1][0] == "1");
    CHECK(rows[1][1] == "0.25");
    CHECK(rows[1][2] == "equal");
    CHECK(std::stod(rows[1][3]) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(std::stod(rows[1][4])) < 1e-9);

    spec.n_list = {4, 2, 4, 1};
    const auto sorted = parse_csv(run_array_gain(s, spec));
    REQUIRE(sorted.size() == 4);
    CHECK(sorted[1][0] == "1");
    CHECK(sorted[2][0] == "2");
    CHECK(sorted[3][0] == "4");

    spec.spacing_m = -1.0;
    CHECK_THROWS_AS(run_array_gain(s, spec), ValidationError);
}

TEST_CASE("array gain sweep has an interior maximum")
{
    const auto s = bundled("desk_array_gain.yaml");
    SweepSpec spec;
    for (std::size_t n = 1; n <= 200; ++n)
        spec.n_list.push_back(n);
    const auto rows = parse_csv(run_array_gain(s, spec));
    REQUIRE(rows.size() == 201);
    std::size_t best = 1;
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (std::stod(rows[i][3]) > std::stod(rows[best][3]))
            best = i;
    CHECK(best > 1);
    CHECK(best < 200);
}

TEST_CASE("min power CSV")
{
    const auto s = bundled("desk_min_power.yaml");
    SweepSpec spec;
    spec.experiment = Experiment::MinPower;
    spec.sinr_db = {10.0};
    spec.systems = {SystemKind::Conventional};
    const auto csv = run_min_power(s, spec);
    const auto rows = parse_csv(csv);
    REQUIRE(rows.size() == 2);
    CHECK(csv.substr(0, csv.find('\n')) == kMinPowerHeader);
    CHECK(rows[1][0] == "10");
    CHECK(rows[1][1] == "conventional");
    CHECK(rows[1][3] == "true");

    // Closed form check: the baseline solved directly, converted to dBm.
    const auto radio = s.radio();
    const std::vector<double> gamma{10.0, 10.0};
    const auto direct = baseline_conventional_mimo(s.users_m, s.bs_position_m, s.waveguides.size(), gamma, radio);
    REQUIRE(direct.feasible);
    CHECK(std::stod(rows[1][2]) == doctest::Approx(watts_to_dbm(direct.total_power)).epsilon(1e-9));
    CHECK(watts_to_dbm(1.0) == 30.0);
    CHECK(watts_to_dbm(1e-3) == doctest::Approx(0.0));

    spec.sinr_db.clear();
    CHECK(run_min_power(s, spec) == std::string(kMinPowerHeader) + "\n");
}

TEST_CASE("min power CSV: infeasible rows")
{
    // Two users at the same spot cannot both reach 0 dB.
    auto s = bundled("desk_min_power.yaml");
    s.users_m = {{20, 0, 0}, {20, 0, 0}};
    SweepSpec spec;
    spec.experiment = Experiment::MinPower;
    spec.sinr_db = {0.0};
    spec.systems = {SystemKind::Conventional};
    const auto rows = parse_csv(run_min_power(s, spec));
    REQUIRE(rows.size() == 2);
    CHECK(rows[1][2] == "inf");
    CHECK(rows[1][3] == "false");
}

TEST_CASE("reruns are byte-identical and files are written whole")
{
    const auto s = bundled("desk_min_power.yaml");
    SweepSpec spec;
    spec.experiment = Experiment::MinPower;
    spec.sinr_db = {0.0, 10.0};
    spec.systems = {SystemKind::PassDiscrete, SystemKind::Massive};
    const auto a = run_min_power(s, spec);
    const auto b = run_min_power(s, spec);
    CHECK(a == b);

    const auto dir = std::filesystem::temp_directory_path() / "pass_test_experiments";
    std::filesystem::create_directories(dir);
    const auto path = dir / "out.csv";
    write_file_atomically(path, a);
    std::ifstream in(path, std::ios::binary);
    std::stringstream back;
    back << in.rdbuf();
    CHECK(back.str() == a);
    CHECK_FALSE(std::filesystem::exists(dir / "out.csv.tmp"));
    std::filesystem::remove_all(dir);

    CHECK_THROWS(write_file_atomically("/nonexistent-dir/x/out.csv", a));
}

TEST_CASE("sweep spec validation")
{
    SweepSpec spec;
    spec.n_list = {0};
    CHECK_THROWS_AS(spec.validate(), ValidationError);
    spec = {};
    spec.experiment = Experiment::MinPower;
    spec.sinr_db = {std::nan("")};
    spec.systems = {SystemKind::Conventional};
    CHECK_THROWS_AS(spec.validate(), ValidationError);
    spec.sinr_db = {1.0};
    spec.systems.clear();
    CHECK_THROWS_AS(spec.validate(), ValidationError);
}

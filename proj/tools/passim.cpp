// SPDX-License-Identifier: Apache-2.0
//
// passim: command-line front end for the pinching-antenna experiments.
//
//   passim validate <scenario.yaml>
//   passim array-gain --scenario s.yaml [--out gain.csv] [--n-list 1:200] [--spacing 0.25]
//   passim min-power  --scenario s.yaml [--out power.csv] [--sinr-db 0,5,10,15,20]
//
// Exit status: 0 success, 1 invalid input or usage, 2 runtime failure.
#include "pass/experiments.hpp"
#include "pass/scenario.hpp"

#include <CLI11.hpp>

#include <fmt/format.h>

#include <iostream>
#include <sstream>
#include <string>

namespace {

std::vector<std::string> split(const std::string& text)
{
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string token;
    while (std::getline(ss, token, ','))
        if (!token.empty())
            out.push_back(token);
    return out;
}

std::size_t to_count(const std::string& s)
{
    std::size_t used = 0;
    long long v = 0;
    try {
        v = std::stoll(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != s.size() || v < 1)
        throw pass::ValidationError(fmt::format("invalid antenna count '{}'", s));
    return static_cast<std::size_t>(v);
}

// "1,2,8" or "1:200" (inclusive) or a mix of both.
std::vector<std::size_t> parse_counts(const std::string& text)
{
    std::vector<std::size_t> out;
    for (const auto& token : split(text)) {
        const auto colon = token.find(':');
        if (colon == std::string::npos) {
            out.push_back(to_count(token));
            continue;
        }
        const auto lo = to_count(token.substr(0, colon));
        const auto hi = to_count(token.substr(colon + 1));
        if (hi < lo)
            throw pass::ValidationError(fmt::format("empty range '{}'", token));
        for (auto n = lo; n <= hi; ++n)
            out.push_back(n);
    }
    return out;
}

std::vector<double> parse_reals(const std::string& text)
{
    std::vector<double> out;
    for (const auto& token : split(text)) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(token, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != token.size())
            throw pass::ValidationError(fmt::format("invalid number '{}'", token));
        out.push_back(v);
    }
    return out;
}

void emit(const std::string& csv, const std::string& out_path)
{
    if (out_path.empty())
        std::cout << csv;
    else
        pass::write_file_atomically(out_path, csv);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Pinching-antenna system simulator"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out_path;
    std::uint64_t seed = 0;

    auto* validate = app.add_subcommand("validate", "Parse a scenario and print its normalised form");
    std::string positional_path;
    validate->add_option("file", positional_path, "Scenario file");
    validate->add_option("--scenario", scenario_path, "Scenario file");

    auto* gain = app.add_subcommand("array-gain", "Array gain versus the number of pinching antennas");
    std::string n_list = "1:200";
    double spacing = 0.0;
    bool raw_phase = false;
    gain->add_option("--scenario", scenario_path, "Scenario file")->required();
    gain->add_option("--out", out_path, "CSV output path (stdout when omitted)");
    gain->add_option("--seed", seed, "Random seed (overrides the scenario)");
    gain->add_option("--n-list", n_list, "Antenna counts, e.g. 1,2,4 or 1:200")->capture_default_str();
    gain->add_option("--spacing", spacing, "Antenna spacing [m] (overrides the scenario)");
    gain->add_flag("--raw-phase", raw_phase, "Keep exact equal spacing instead of phase-aligned offsets");

    auto* power = app.add_subcommand("min-power", "Minimum transmit power versus the SINR target");
    std::string sinr_db = "0,5,10,15,20";
    std::string systems = "pass_continuous,pass_discrete,conventional,massive";
    power->add_option("--scenario", scenario_path, "Scenario file")->required();
    power->add_option("--out", out_path, "CSV output path (stdout when omitted)");
    power->add_option("--seed", seed, "Random seed (overrides the scenario)");
    power->add_option("--sinr-db", sinr_db, "SINR targets in dB, comma separated")->capture_default_str();
    power->add_option("--systems", systems, "Systems to evaluate, comma separated")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 1;
    }

    try {
        if (validate->parsed()) {
            if (scenario_path.empty())
                scenario_path = positional_path;
            if (scenario_path.empty()) {
                std::cerr << "error: a scenario file is required\n\n" << validate->help();
                return 1;
            }
            std::cout << pass::normalize(pass::load_scenario(scenario_path));
            return 0;
        }

        const auto scenario = pass::load_scenario(scenario_path);
        pass::SweepSpec spec;
        spec.output = out_path;
        if (gain->count("--seed") || power->count("--seed"))
            spec.seed = seed;

        if (gain->parsed()) {
            spec.experiment = pass::Experiment::ArrayGain;
            spec.n_list = parse_counts(n_list);
            if (gain->count("--spacing"))
                spec.spacing_m = spacing;
            spec.phase_aligned = !raw_phase;
            emit(pass::run_array_gain(scenario, spec), out_path);
        } else {
            spec.experiment = pass::Experiment::MinPower;
            spec.sinr_db = parse_reals(sinr_db);
            for (const auto& name : split(systems))
                spec.systems.push_back(pass::parse_system(name));
            emit(pass::run_min_power(scenario, spec), out_path);
        }
        return 0;
    } catch (const pass::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return 2;
    }
}

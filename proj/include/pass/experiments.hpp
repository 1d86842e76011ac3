// SPDX-License-Identifier: Apache-2.0
//
// Experiment drivers behind the CLI. Each returns the CSV text it produced;
// numbers are linear internally and converted to dB/dBm only here.
#pragma once

#include "pass/joint.hpp"
#include "pass/scenario.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace pass {

enum class Experiment { ArrayGain, MinPower };

struct SweepSpec {
    Experiment experiment = Experiment::ArrayGain;
    std::vector<std::size_t> n_list;   ///< array_gain
    std::vector<double> sinr_db;       ///< min_power
    std::vector<SystemKind> systems;   ///< min_power
    std::filesystem::path output;
    std::optional<double> spacing_m;   ///< overrides array_gain_spacing_m
    std::optional<std::uint64_t> seed; ///< overrides the scenario seed
    bool phase_aligned = true;

    void validate() const;
};

inline constexpr const char* kArrayGainHeader = "n_antennas,spacing_m,power_model,gain_linear,gain_db";
inline constexpr const char* kMinPowerHeader = "sinr_db,system,total_power_dbm,feasible,iterations";

/// Rows sorted by n_antennas. Uses the first user and the first waveguide.
std::string run_array_gain(const Scenario& scenario, const SweepSpec& spec);

/// One row per (SINR, system), SINR-major in the given order.
std::string run_min_power(const Scenario& scenario, const SweepSpec& spec);

/// Joint problem and sweep setup described by a scenario (sub-connected feed).
SweepSetup min_power_setup(const Scenario& scenario, std::uint64_t seed);

double watts_to_dbm(double watts);

/// Writes to a sibling temporary file, then renames it over `path`.
void write_file_atomically(const std::filesystem::path& path, const std::string& contents);

} // namespace pass

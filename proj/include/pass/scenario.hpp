// SPDX-License-Identifier: Apache-2.0
//
// Scenario files: YAML maps whose keys carry their units (frequency_ghz,
// length_m, noise_dbm, ...). Unknown keys are rejected.
#pragma once

#include "pass/channel.hpp"
#include "pass/coupling.hpp"
#include "pass/errors.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace pass {

/// Malformed or invalid scenario; the message names the key and, when known, the line.
class ScenarioError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

struct Scenario {
    double frequency_ghz = 10.0;
    double n_eff = 1.4;
    double attenuation_db_per_m = 0.0;
    double noise_dbm = -90.0;
    std::uint64_t seed = 0;
    PowerModel power_model = PowerModel::equal();
    double candidate_spacing_m = 0.5;
    std::size_t pa_per_waveguide = 4;
    double array_gain_spacing_m = 0.25;
    Vec3 bs_position_m = Vec3::Zero();
    std::size_t massive_antennas_per_rf = 16;
    std::vector<WaveguideLayout> waveguides; ///< n_eff and attenuation already applied
    std::vector<Vec3> users_m;

    double wavelength() const { return kSpeedOfLight / (frequency_ghz * 1e9); }
    double noise_watts() const;
    RadioParams radio() const;
    void validate() const;

    friend bool operator==(const Scenario&, const Scenario&);
};

Scenario parse_scenario(std::string_view text, std::string_view source = "<scenario>");
Scenario load_scenario(const std::filesystem::path& path);

/// Canonical YAML with every field spelled out; parse_scenario(normalize(s)) == s.
std::string normalize(const Scenario& scenario);

} // namespace pass

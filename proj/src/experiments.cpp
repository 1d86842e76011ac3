// SPDX-License-Identifier: Apache-2.0
#include "pass/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <system_error>

#include <fmt/format.h>

namespace pass {

namespace {

std::string format_number(double v)
{
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    if (std::isnan(v))
        return "nan";
    return fmt::format("{:.12g}", v);
}

} // namespace

void SweepSpec::validate() const
{
    if (spacing_m && (!(*spacing_m > 0.0) || !std::isfinite(*spacing_m)))
        throw ValidationError(fmt::format("spacing must be > 0, got {}", *spacing_m));
    for (auto n : n_list)
        if (n == 0)
            throw ValidationError("antenna counts must be >= 1");
    for (double db : sinr_db)
        if (!std::isfinite(db))
            throw ValidationError("SINR grid entries must be finite");
    if (experiment == Experiment::MinPower && !sinr_db.empty() && systems.empty())
        throw ValidationError("at least one system is required");
}

double watts_to_dbm(double watts)
{
    return 10.0 * std::log10(watts) + 30.0;
}

std::string run_array_gain(const Scenario& scenario, const SweepSpec& spec)
{
    spec.validate();
    scenario.validate();
    const double spacing = spec.spacing_m.value_or(scenario.array_gain_spacing_m);
    std::vector<std::size_t> n_list = spec.n_list;
    std::sort(n_list.begin(), n_list.end());
    n_list.erase(std::unique(n_list.begin(), n_list.end()), n_list.end());

    const auto sweep = array_gain_sweep(scenario.users_m.front(), scenario.waveguides.front(), n_list,
                                        spacing, scenario.power_model, scenario.radio(),
                                        spec.phase_aligned);
    std::string csv = std::string(kArrayGainHeader) + "\n";
    for (const auto& point : sweep)
        csv += fmt::format("{},{},{},{},{}\n", point.n_antennas, format_number(spacing),
                           scenario.power_model.name(), format_number(point.gain),
                           format_number(10.0 * std::log10(point.gain)));
    return csv;
}

SweepSetup min_power_setup(const Scenario& scenario, std::uint64_t seed)
{
    SweepSetup setup;
    auto& p = setup.problem;
    p.users = scenario.users_m;
    p.waveguides = scenario.waveguides;
    p.n_pa_per_waveguide = scenario.pa_per_waveguide;
    p.power_model = scenario.power_model;
    p.radio = scenario.radio();
    p.candidate_spacing = scenario.candidate_spacing_m;
    p.architecture = SubConnected{};
    setup.bs_position = scenario.bs_position_m;
    setup.massive_antennas_per_rf = scenario.massive_antennas_per_rf;
    setup.seed = seed;
    return setup;
}

std::string run_min_power(const Scenario& scenario, const SweepSpec& spec)
{
    spec.validate();
    scenario.validate();
    const auto setup = min_power_setup(scenario, spec.seed.value_or(scenario.seed));
    const auto rows = power_vs_sinr_sweep(setup, spec.sinr_db, spec.systems);

    std::string csv = std::string(kMinPowerHeader) + "\n";
    for (const auto& row : rows)
        csv += fmt::format("{},{},{},{},{}\n", format_number(row.sinr_db), system_name(row.system),
                           format_number(row.feasible ? watts_to_dbm(row.total_power)
                                                      : std::numeric_limits<double>::infinity()),
                           row.feasible ? "true" : "false", row.iterations);
    return csv;
}

void write_file_atomically(const std::filesystem::path& path, const std::string& contents)
{
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error(fmt::format("cannot write {}", tmp.string()));
        out << contents;
        out.flush();
        if (!out)
            throw std::runtime_error(fmt::format("failed writing {}", tmp.string()));
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw std::runtime_error(fmt::format("cannot move output into {}: {}", path.string(), ec.message()));
    }
}

} // namespace pass

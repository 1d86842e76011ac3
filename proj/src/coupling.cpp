// SPDX-License-Identifier: Apache-2.0
#include "pass/coupling.hpp"

#include "pass/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

namespace pass {

void CouplerSpec::validate() const
{
    if (!std::isfinite(coupling_length) || coupling_length < 0.0)
        throw ValidationError(fmt::format("coupling_length must be >= 0, got {}", coupling_length));
    if (!std::isfinite(coupling_coefficient) || coupling_coefficient <= 0.0)
        throw ValidationError(
            fmt::format("coupling_coefficient must be > 0, got {}", coupling_coefficient));
    if (!(max_efficiency > 0.0 && max_efficiency <= 1.0))
        throw ValidationError(fmt::format("max_efficiency must lie in (0, 1], got {}", max_efficiency));
}

PowerModel PowerModel::proportional(double ratio)
{
    if (!(ratio > 0.0 && ratio <= 1.0))
        throw ValidationError(fmt::format("proportional ratio must lie in (0, 1], got {}", ratio));
    return PowerModel(Kind::Proportional, ratio);
}

std::string PowerModel::name() const
{
    return kind_ == Kind::Equal ? "equal" : "proportional";
}

double PowerProfile::total() const
{
    return std::accumulate(fractions.begin(), fractions.end(), 0.0) + residual;
}

CoupledPower coupled_power(const CouplerSpec& spec)
{
    spec.validate();
    const double s = std::sin(spec.coupling_coefficient * spec.coupling_length);
    const double pinch = spec.max_efficiency * s * s;
    return {1.0 - pinch, pinch};
}

double length_for_fraction(double target, double kappa, double max_efficiency)
{
    CouplerSpec{0.0, kappa, max_efficiency}.validate();
    if (!(target >= 0.0))
        throw ValidationError(fmt::format("target fraction must be >= 0, got {}", target));
    if (target > max_efficiency)
        throw UnreachableFractionError(fmt::format(
            "fraction {} exceeds maximum coupling efficiency {}", target, max_efficiency));
    const double ratio = std::min(1.0, target / max_efficiency);
    return std::asin(std::sqrt(ratio)) / kappa;
}

PowerProfile power_profile(const PowerModel& model, std::size_t n_antennas)
{
    if (n_antennas == 0)
        throw ValidationError("power profile needs at least one antenna");

    PowerProfile profile;
    profile.fractions.reserve(n_antennas);
    if (model.kind() == PowerModel::Kind::Equal) {
        profile.fractions.assign(n_antennas, 1.0 / static_cast<double>(n_antennas));
        profile.residual = 0.0;
        return profile;
    }

    const double alpha = model.ratio();
    double remaining = 1.0;
    for (std::size_t n = 0; n < n_antennas; ++n) {
        profile.fractions.push_back(alpha * remaining);
        remaining *= 1.0 - alpha;
    }
    profile.residual = remaining;
    return profile;
}

std::vector<CouplerSpec> equal_power_coupler_chain(std::size_t n_antennas, double kappa,
                                                   double max_efficiency)
{
    if (n_antennas == 0)
        throw ValidationError("coupler chain needs at least one antenna");
    CouplerSpec{0.0, kappa, max_efficiency}.validate();

    std::vector<CouplerSpec> chain;
    chain.reserve(n_antennas);
    for (std::size_t k = 0; k < n_antennas; ++k) {
        const double stage_ratio = 1.0 / static_cast<double>(n_antennas - k);
        if (stage_ratio > max_efficiency)
            throw UnreachableFractionError(fmt::format(
                "stage {} of {} must extract {} of the guided power, above F = {}", k + 1,
                n_antennas, stage_ratio, max_efficiency));
        chain.push_back({length_for_fraction(stage_ratio, kappa, max_efficiency), kappa,
                         max_efficiency});
    }
    return chain;
}

std::vector<CouplerSpec> proportional_coupler_chain(std::size_t n_antennas, double ratio,
                                                    double kappa, double max_efficiency)
{
    if (n_antennas == 0)
        throw ValidationError("coupler chain needs at least one antenna");
    PowerModel::proportional(ratio);
    const double length = length_for_fraction(ratio, kappa, max_efficiency);
    return std::vector<CouplerSpec>(n_antennas, CouplerSpec{length, kappa, max_efficiency});
}

PowerProfile cascade(const std::vector<CouplerSpec>& chain)
{
    PowerProfile profile;
    profile.fractions.reserve(chain.size());
    double remaining = 1.0;
    for (const auto& coupler : chain) {
        const double extracted = remaining * coupled_power(coupler).pinch;
        profile.fractions.push_back(extracted);
        remaining -= extracted;
    }
    profile.residual = remaining;
    return profile;
}

} // namespace pass

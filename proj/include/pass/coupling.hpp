// SPDX-License-Identifier: Apache-2.0
//
// Coupled-mode power exchange between a dielectric waveguide and a pinched
// dielectric particle, and the coupler cascades that realise the equal and
// proportional per-antenna power models.
#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace pass {

/// One pinching antenna modelled as an open-ended directional coupler.
struct CouplerSpec {
    double coupling_length = 0.0;      ///< L [m]
    double coupling_coefficient = 1.0; ///< kappa [rad/m]
    double max_efficiency = 1.0;       ///< F, in (0, 1]

    /// Throws ValidationError naming the offending field.
    void validate() const;
};

struct CoupledPower {
    double guide = 1.0; ///< normalised power left in the waveguide
    double pinch = 0.0; ///< normalised power transferred to the antenna
};

/// Per-antenna radiated power profile of one waveguide.
class PowerModel {
public:
    enum class Kind { Equal, Proportional };

    static PowerModel equal() { return PowerModel(Kind::Equal, 1.0); }
    /// Each antenna radiates `ratio` of the power still guided at its position.
    static PowerModel proportional(double ratio);

    Kind kind() const { return kind_; }
    double ratio() const { return ratio_; }
    std::string name() const;

    friend bool operator==(const PowerModel&, const PowerModel&) = default;

private:
    PowerModel(Kind kind, double ratio) : kind_(kind), ratio_(ratio) {}

    Kind kind_;
    double ratio_; // only meaningful for Proportional
};

struct PowerProfile {
    std::vector<double> fractions; ///< radiated share of unit waveguide input, per antenna
    double residual = 0.0;         ///< power still guided after the last antenna

    double total() const;
};

/// P_pinch = F sin^2(kappa L), P_guide = 1 - P_pinch.
CoupledPower coupled_power(const CouplerSpec& spec);

/// Shortest coupling length L >= 0 with F sin^2(kappa L) = target.
/// Throws UnreachableFractionError when target > F.
double length_for_fraction(double target, double kappa, double max_efficiency = 1.0);

PowerProfile power_profile(const PowerModel& model, std::size_t n_antennas);

/// Couplers whose cascade radiates 1/N of the input at every antenna. Stage k
/// (1-based) extracts 1/(N-k+1) of the power reaching it.
std::vector<CouplerSpec> equal_power_coupler_chain(std::size_t n_antennas, double kappa,
                                                   double max_efficiency = 1.0);

/// N identical couplers, each extracting `ratio` of the guided power.
std::vector<CouplerSpec> proportional_coupler_chain(std::size_t n_antennas, double ratio,
                                                    double kappa, double max_efficiency = 1.0);

/// Propagates unit input power through the chain in order.
PowerProfile cascade(const std::vector<CouplerSpec>& chain);

} // namespace pass

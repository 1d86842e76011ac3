// SPDX-License-Identifier: Apache-2.0
//
// Line-of-sight channel from a waveguide feed, through in-waveguide
// propagation to each pinching antenna, and over free space to a user.
#pragma once

#include "pass/coupling.hpp"

#include <complex>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace pass {

using cdouble = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using CMatrix = Eigen::MatrixXcd;

inline constexpr double kSpeedOfLight = 299792458.0; // m/s
inline constexpr double kPi = 3.14159265358979323846;

struct WaveguideLayout {
    Vec3 feed_point = Vec3::Zero();
    Vec3 axis = Vec3::UnitX(); ///< unit vector, direction of propagation
    double length = 1.0;       ///< m
    double refractive_index = 1.4;
    double attenuation_db_per_m = 0.0;

    void validate() const;
    Vec3 point_at(double offset) const { return feed_point + offset * axis; }
    /// Offset of the orthogonal projection of `p` onto the waveguide line, clamped to [0, length].
    double foot_offset(const Vec3& p) const;
    /// In-waveguide amplitude factor 10^(-att*d/20).
    double amplitude_at(double offset) const;
};

struct PinchConfig {
    std::vector<double> offsets; ///< strictly increasing, within [0, length]
    PowerModel power_model = PowerModel::equal();

    void validate(const WaveguideLayout& waveguide) const;
};

struct RadioParams {
    double wavelength = 0.01;     ///< m
    double reference_gain = 0.0;  ///< |beta|, amplitude at 1 m
    double noise_power = 1e-12;   ///< W

    /// reference_gain = lambda / (4 pi).
    static RadioParams from_wavelength(double wavelength, double noise_power);
    static RadioParams from_frequency(double frequency_hz, double noise_power);
    double wavenumber() const { return 2.0 * kPi / wavelength; }
    void validate() const;
};

/// Waveguide-to-RF-chain feed topology.
struct SubConnected {};
struct FullyConnected {
    CMatrix splitter; ///< K_waveguides x K_rf, unit-norm columns
};
struct PsFullyConnected {
    CMatrix phases; ///< K_waveguides x K_rf, unit-modulus entries
};
using FeedArchitecture = std::variant<SubConnected, FullyConnected, PsFullyConnected>;

FullyConnected uniform_splitter(Eigen::Index n_waveguides, Eigen::Index n_rf);
void validate_architecture(const FeedArchitecture& arch);
Eigen::Index rf_chain_count(const FeedArchitecture& arch, Eigen::Index n_waveguides);

/// Free-space coefficient of one antenna at `offset` along the waveguide:
/// A(d) |beta| / r * exp(-j 2pi/lambda (r + n_eff d)).
cdouble pa_coefficient(const Vec3& user, const WaveguideLayout& waveguide, double offset,
                       const RadioParams& radio);

/// Same law with no waveguide segment: an ordinary antenna at `antenna`.
cdouble free_space_coefficient(const Vec3& user, const Vec3& antenna, const RadioParams& radio);

/// sum_n sqrt(P_n) g_n over the antennas of one waveguide.
cdouble composite_channel(const Vec3& user, const WaveguideLayout& waveguide,
                          const PinchConfig& pinch, const RadioParams& radio);

/// K_users x K_waveguides matrix of composite channels.
CMatrix channel_matrix(std::span<const Vec3> users, std::span<const WaveguideLayout> waveguides,
                       std::span<const PinchConfig> pinches, const RadioParams& radio);

/// K_users x K_rf channel seen by the digital precoder.
CMatrix effective_channel(const CMatrix& channels, const FeedArchitecture& arch);

/// SINR_k = |h_k^H w_k|^2 / (sum_{j!=k} |h_k^H w_j|^2 + sigma^2), h_k = row k of `effective`.
std::vector<double> sinr(const CMatrix& effective, const CMatrix& precoder, double noise_power);

} // namespace pass

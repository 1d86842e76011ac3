// SPDX-License-Identifier: Apache-2.0
#include "pass/channel.hpp"

#include "pass/errors.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace pass {

namespace {

bool finite(const Vec3& v)
{
    return v.allFinite();
}

} // namespace

void WaveguideLayout::validate() const
{
    if (!finite(feed_point))
        throw ValidationError("waveguide feed_point must be finite");
    if (!finite(axis) || std::abs(axis.norm() - 1.0) > 1e-9)
        throw ValidationError(fmt::format("waveguide axis must have unit norm, got {}", axis.norm()));
    if (!std::isfinite(length) || length <= 0.0)
        throw ValidationError(fmt::format("waveguide length must be > 0, got {}", length));
    if (!std::isfinite(refractive_index) || refractive_index < 1.0)
        throw ValidationError(
            fmt::format("waveguide refractive_index must be >= 1, got {}", refractive_index));
    if (!std::isfinite(attenuation_db_per_m) || attenuation_db_per_m < 0.0)
        throw ValidationError(fmt::format("waveguide attenuation_db_per_m must be >= 0, got {}",
                                          attenuation_db_per_m));
}

double WaveguideLayout::foot_offset(const Vec3& p) const
{
    return std::clamp((p - feed_point).dot(axis), 0.0, length);
}

double WaveguideLayout::amplitude_at(double offset) const
{
    return std::pow(10.0, -attenuation_db_per_m * offset / 20.0);
}

void PinchConfig::validate(const WaveguideLayout& waveguide) const
{
    for (std::size_t n = 0; n < offsets.size(); ++n) {
        const double d = offsets[n];
        if (!(d >= 0.0 && d <= waveguide.length))
            throw ValidationError(fmt::format("pinch offset {} = {} lies outside [0, {}]", n, d,
                                              waveguide.length));
        if (n > 0 && !(d > offsets[n - 1]))
            throw ValidationError(fmt::format("pinch offsets must be strictly increasing (index {})", n));
    }
}

RadioParams RadioParams::from_wavelength(double wavelength, double noise_power)
{
    RadioParams radio{wavelength, wavelength / (4.0 * kPi), noise_power};
    radio.validate();
    return radio;
}

RadioParams RadioParams::from_frequency(double frequency_hz, double noise_power)
{
    if (!(frequency_hz > 0.0))
        throw ValidationError(fmt::format("frequency must be > 0, got {}", frequency_hz));
    return from_wavelength(kSpeedOfLight / frequency_hz, noise_power);
}

void RadioParams::validate() const
{
    if (!(wavelength > 0.0) || !std::isfinite(wavelength))
        throw ValidationError(fmt::format("wavelength must be > 0, got {}", wavelength));
    if (!(reference_gain > 0.0) || !std::isfinite(reference_gain))
        throw ValidationError(fmt::format("reference_gain must be > 0, got {}", reference_gain));
    if (!(noise_power > 0.0) || !std::isfinite(noise_power))
        throw ValidationError(fmt::format("noise_power must be > 0, got {}", noise_power));
}

FullyConnected uniform_splitter(Eigen::Index n_waveguides, Eigen::Index n_rf)
{
    if (n_waveguides < 1 || n_rf < 1)
        throw ValidationError("splitter needs at least one waveguide and one RF chain");
    FullyConnected fc;
    fc.splitter = CMatrix::Constant(n_waveguides, n_rf,
                                    cdouble(1.0 / std::sqrt(static_cast<double>(n_waveguides)), 0.0));
    return fc;
}

void validate_architecture(const FeedArchitecture& arch)
{
    if (const auto* fc = std::get_if<FullyConnected>(&arch)) {
        if (fc->splitter.size() == 0)
            throw ValidationError("splitter matrix is empty");
        for (Eigen::Index c = 0; c < fc->splitter.cols(); ++c)
            if (std::abs(fc->splitter.col(c).norm() - 1.0) > 1e-9)
                throw ValidationError(fmt::format("splitter column {} does not have unit norm", c));
    } else if (const auto* ps = std::get_if<PsFullyConnected>(&arch)) {
        if (ps->phases.size() == 0)
            throw ValidationError("phase matrix is empty");
        for (Eigen::Index i = 0; i < ps->phases.size(); ++i)
            if (std::abs(std::abs(ps->phases.data()[i]) - 1.0) > 1e-9)
                throw ValidationError("phase shifter entries must have unit modulus");
    }
}

Eigen::Index rf_chain_count(const FeedArchitecture& arch, Eigen::Index n_waveguides)
{
    if (const auto* fc = std::get_if<FullyConnected>(&arch))
        return fc->splitter.cols();
    if (const auto* ps = std::get_if<PsFullyConnected>(&arch))
        return ps->phases.cols();
    return n_waveguides;
}

cdouble pa_coefficient(const Vec3& user, const WaveguideLayout& waveguide, double offset,
                       const RadioParams& radio)
{
    if (!(offset >= 0.0 && offset <= waveguide.length))
        throw ValidationError(
            fmt::format("offset {} lies outside the waveguide [0, {}]", offset, waveguide.length));
    const double r = (waveguide.point_at(offset) - user).norm();
    if (!(r > 0.0))
        throw SingularityError("user coincides with a pinching antenna");
    const double amplitude = waveguide.amplitude_at(offset) * radio.reference_gain / r;
    const double phase = -radio.wavenumber() * (r + waveguide.refractive_index * offset);
    return std::polar(amplitude, phase);
}

cdouble free_space_coefficient(const Vec3& user, const Vec3& antenna, const RadioParams& radio)
{
    const double r = (antenna - user).norm();
    if (!(r > 0.0))
        throw SingularityError("user coincides with an antenna");
    return std::polar(radio.reference_gain / r, -radio.wavenumber() * r);
}

cdouble composite_channel(const Vec3& user, const WaveguideLayout& waveguide,
                          const PinchConfig& pinch, const RadioParams& radio)
{
    if (pinch.offsets.empty())
        return {0.0, 0.0};
    pinch.validate(waveguide);
    const auto profile = power_profile(pinch.power_model, pinch.offsets.size());
    cdouble h{0.0, 0.0};
    for (std::size_t n = 0; n < pinch.offsets.size(); ++n)
        h += std::sqrt(profile.fractions[n]) * pa_coefficient(user, waveguide, pinch.offsets[n], radio);
    return h;
}

CMatrix channel_matrix(std::span<const Vec3> users, std::span<const WaveguideLayout> waveguides,
                       std::span<const PinchConfig> pinches, const RadioParams& radio)
{
    if (pinches.size() != waveguides.size())
        throw ValidationError(fmt::format("expected one pinch configuration per waveguide ({}), got {}",
                                          waveguides.size(), pinches.size()));
    const auto n_users = static_cast<Eigen::Index>(users.size());
    const auto n_guides = static_cast<Eigen::Index>(waveguides.size());
    CMatrix channels(n_users, n_guides);
    for (Eigen::Index k = 0; k < n_users; ++k)
        for (Eigen::Index w = 0; w < n_guides; ++w)
            channels(k, w) = composite_channel(users[k], waveguides[w], pinches[w], radio);
    return channels;
}

CMatrix effective_channel(const CMatrix& channels, const FeedArchitecture& arch)
{
    validate_architecture(arch);
    return std::visit(
        [&](const auto& a) -> CMatrix {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, SubConnected>) {
                return channels;
            } else {
                const CMatrix& feed = [&]() -> const CMatrix& {
                    if constexpr (std::is_same_v<T, FullyConnected>)
                        return a.splitter;
                    else
                        return a.phases;
                }();
                if (feed.rows() != channels.cols())
                    throw ValidationError(fmt::format(
                        "feed matrix has {} rows but the channel has {} waveguides", feed.rows(),
                        channels.cols()));
                if constexpr (std::is_same_v<T, FullyConnected>)
                    return channels * feed;
                else
                    return channels * feed / std::sqrt(static_cast<double>(feed.rows()));
            }
        },
        arch);
}

std::vector<double> sinr(const CMatrix& effective, const CMatrix& precoder, double noise_power)
{
    if (precoder.rows() != effective.cols() || precoder.cols() != effective.rows())
        throw ValidationError(fmt::format("precoder is {}x{} but the effective channel is {}x{}",
                                          precoder.rows(), precoder.cols(), effective.rows(),
                                          effective.cols()));
    if (!(noise_power > 0.0))
        throw ValidationError("noise power must be > 0");

    // gains(k, j) = h_k^H w_j with h_k the k-th row taken as a column vector.
    const CMatrix gains = effective.conjugate() * precoder;
    std::vector<double> out(static_cast<std::size_t>(effective.rows()));
    for (Eigen::Index k = 0; k < gains.rows(); ++k) {
        double interference = 0.0;
        for (Eigen::Index j = 0; j < gains.cols(); ++j)
            if (j != k)
                interference += std::norm(gains(k, j));
        out[static_cast<std::size_t>(k)] = std::norm(gains(k, k)) / (interference + noise_power);
    }
    return out;
}

} // namespace pass

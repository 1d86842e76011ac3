// SPDX-License-Identifier: Apache-2.0
//
// Single-waveguide, single-user placement of pinching antennas.
#pragma once

#include "pass/channel.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace pass {

/// Pre-installed antenna positions for discrete activation.
struct CandidateGrid {
    double spacing = 0.5;
    std::vector<double> offsets;

    /// Offsets 0, s, 2s, ... up to the waveguide length.
    static CandidateGrid covering(const WaveguideLayout& waveguide, double spacing);
};

enum class Activation { Continuous, Discrete };

struct PlacementResult {
    std::vector<double> offsets;
    double received_power = 0.0; ///< |h|^2 for unit input power
    int iterations = 0;
    Activation mode = Activation::Continuous;
};

double received_power(const Vec3& user, const WaveguideLayout& waveguide,
                      std::span<const double> offsets, const PowerModel& model,
                      const RadioParams& radio);

/// Analytic d|h|^2 / d d_n with the per-antenna power fractions held at their
/// index positions.
std::vector<double> power_gradient(const Vec3& user, const WaveguideLayout& waveguide,
                                   std::span<const double> offsets, const PowerModel& model,
                                   const RadioParams& radio);

/// Euclidean projection onto {0 <= d_1, d_{n+1} - d_n >= separation, d_N <= length}.
std::vector<double> project_offsets(std::span<const double> offsets, double length,
                                    double separation);

struct ContinuousOptions {
    int restarts = 8;
    std::uint64_t seed = 0;
    double seed_grid_spacing = 0.5; ///< grid used for the discrete-best start
    double min_separation = 0.0;    ///< 0 selects lambda / 2
    int max_iterations = 2000;
};

/// Multi-start projected gradient ascent with Armijo backtracking. The first
/// start is the discrete optimum on the seed grid, so the result never falls
/// below it.
PlacementResult optimize_continuous(const Vec3& user, const WaveguideLayout& waveguide,
                                    std::size_t n_antennas, const PowerModel& model,
                                    const RadioParams& radio, const ContinuousOptions& options = {});

struct DiscreteOptions {
    /// Enumerate every subset when C(candidates, N) does not exceed this;
    /// otherwise greedy selection followed by pairwise-swap local search.
    std::uint64_t exhaustive_limit = 1'000'000;
};

PlacementResult optimize_discrete(const Vec3& user, const WaveguideLayout& waveguide,
                                  const CandidateGrid& grid, std::size_t n_antennas,
                                  const PowerModel& model, const RadioParams& radio,
                                  const DiscreteOptions& options = {});

/// N offsets spaced by `spacing`, centred on the user's foot point.
/// Throws TruncationError when the aperture leaves the waveguide.
std::vector<double> centered_offsets(const Vec3& user, const WaveguideLayout& waveguide,
                                     std::size_t n_antennas, double spacing);

/// Moves each offset by less than half a local phase period so that every
/// antenna's phase matches the one nearest the foot point.
std::vector<double> phase_align(const Vec3& user, const WaveguideLayout& waveguide,
                                std::span<const double> offsets, const RadioParams& radio);

struct ArrayGainPoint {
    std::size_t n_antennas = 0;
    double gain = 0.0; ///< linear, relative to one antenna at the foot point
};

std::vector<ArrayGainPoint> array_gain_sweep(const Vec3& user, const WaveguideLayout& waveguide,
                                             std::span<const std::size_t> n_list, double spacing,
                                             const PowerModel& model, const RadioParams& radio,
                                             bool phase_aligned = true);

/// Received power of an N-element half-wavelength array steered coherently at
/// the user, normalised like array_gain_sweep (single antenna at `reference_distance`).
double fixed_array_gain(std::size_t n_antennas, double distance, double reference_distance,
                        const RadioParams& radio);

} // namespace pass

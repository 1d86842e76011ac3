// SPDX-License-Identifier: Apache-2.0
//
// Joint transmit and pinching beamforming for the multi-waveguide downlink,
// and the fixed-antenna baselines it is compared against.
#pragma once

#include "pass/beamforming.hpp"
#include "pass/placement.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pass {

struct JointProblem {
    std::vector<Vec3> users;
    std::vector<WaveguideLayout> waveguides;
    std::size_t n_pa_per_waveguide = 1;
    PowerModel power_model = PowerModel::proportional(0.9);
    std::vector<double> sinr_targets; ///< linear, one per user
    RadioParams radio;
    Activation activation = Activation::Continuous;
    /// Discrete activation: one grid per waveguide. Left empty, each waveguide
    /// gets CandidateGrid::covering(waveguide, candidate_spacing).
    std::vector<CandidateGrid> grids;
    double candidate_spacing = 0.5;
    FeedArchitecture architecture = SubConnected{};

    void validate() const;
    std::vector<CandidateGrid> resolved_grids() const;
};

struct JointOptions {
    int max_rounds = 100;
    double tolerance = 1e-6; ///< relative power improvement that ends the descent
    /// Discrete problems with at most this many placement combinations are
    /// initialised by enumerating all of them.
    std::uint64_t exhaustive_limit = 4096;
    double search_step = 0.0; ///< continuous 1D search grid; 0 selects lambda / 8
    bool randomize_order = false;
    /// Extra starting placement (per-waveguide offsets), e.g. a discrete solution.
    std::optional<std::vector<std::vector<double>>> initial_offsets;
    PrecoderOptions precoder;
};

struct BeamformingSolution {
    bool feasible = false;
    CMatrix precoder; ///< K_rf x K_users
    std::vector<PinchConfig> placements;
    double total_power = 0.0; ///< W at the waveguide inputs
    std::vector<double> achieved_sinr;
    int iterations = 0; ///< outer rounds
    std::vector<double> power_history; ///< initial power, then one entry per outer round
    double best_margin = 0.0;          ///< best min_k SINR_k / gamma_k seen
};

/// Block-coordinate descent: min-power precoder for fixed placements, then a
/// 1D search per antenna maximising the smallest SINR margin under the
/// current precoder, and the precoder re-solved. Total power never increases.
BeamformingSolution joint_min_power(const JointProblem& problem, std::uint64_t seed,
                                    const JointOptions& options = {});

/// Inner problem for fixed placements.
PrecoderResult solve_for_placements(const JointProblem& problem,
                                    std::span<const PinchConfig> placements,
                                    const PrecoderOptions& options = {});

/// Half-wavelength uniform linear array centred on `center`.
std::vector<Vec3> ula_positions(const Vec3& center, std::size_t n_antennas, double spacing,
                                const Vec3& axis = Vec3::UnitY());

/// One RF chain per antenna on a fixed half-wavelength array.
PrecoderResult baseline_conventional_mimo(std::span<const Vec3> users, const Vec3& bs_position,
                                          std::size_t n_antennas,
                                          std::span<const double> sinr_targets,
                                          const RadioParams& radio,
                                          const Vec3& array_axis = Vec3::UnitY());

/// Each RF chain drives its own sub-array through phase-only weights matched
/// to one user (round-robin), with a 1/sqrt(M) split; digital stage on top.
PrecoderResult baseline_massive_mimo_hybrid(std::span<const Vec3> users, const Vec3& bs_position,
                                            std::size_t n_rf, std::size_t antennas_per_rf,
                                            std::span<const double> sinr_targets,
                                            const RadioParams& radio,
                                            const Vec3& array_axis = Vec3::UnitY());

enum class SystemKind { PassContinuous, PassDiscrete, Conventional, Massive };

std::string system_name(SystemKind kind);
/// Throws ValidationError for unknown names.
SystemKind parse_system(const std::string& name);

struct SweepSetup {
    JointProblem problem; ///< sinr_targets and activation are overwritten per cell
    Vec3 bs_position = Vec3::Zero();
    std::size_t massive_antennas_per_rf = 16;
    std::uint64_t seed = 0;
    JointOptions options;
};

struct SweepRow {
    double sinr_db = 0.0;
    SystemKind system = SystemKind::PassContinuous;
    bool feasible = false;
    double total_power = 0.0; ///< W
    int iterations = 0;
};

/// Every system uses the same number of RF chains as the PASS feed. The
/// continuous PASS run is seeded with the discrete solution of the same cell.
std::vector<SweepRow> power_vs_sinr_sweep(const SweepSetup& setup, std::span<const double> sinr_db,
                                          std::span<const SystemKind> systems);

} // namespace pass

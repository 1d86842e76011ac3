// SPDX-License-Identifier: Apache-2.0
//
// Minimum-power downlink precoding under per-user SINR targets.
#pragma once

#include "pass/channel.hpp"

#include <span>
#include <vector>

namespace pass {

struct PrecoderOptions {
    int max_iterations = 500;
    double tolerance = 1e-10;       ///< relative change of the dual (uplink) powers
    double divergence_limit = 1e12; ///< dual powers beyond this multiple of the single-user scale
};

/// Infeasibility is reported through `feasible`, never by throwing.
struct PrecoderResult {
    bool feasible = false;
    CMatrix precoder;          ///< K_rf x K_users; empty when infeasible
    double total_power = 0.0;  ///< sum of squared column norms [W]
    std::vector<double> uplink_powers;
    int iterations = 0;
};

/// Solves min sum ||w_k||^2 s.t. SINR_k >= gamma_k via uplink-downlink duality:
/// fixed-point updates of the dual uplink powers with MMSE receive directions,
/// then the downlink powers from the tight SINR equations.
PrecoderResult min_power_precoder(const CMatrix& effective, std::span<const double> sinr_targets,
                                  double noise_power, const PrecoderOptions& options = {});

} // namespace pass

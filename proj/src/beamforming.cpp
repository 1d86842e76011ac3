// SPDX-License-Identifier: Apache-2.0
#include "pass/beamforming.hpp"

#include "pass/errors.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <fmt/format.h>

namespace pass {

namespace {

using RVector = Eigen::VectorXd;

// Solves B x = 1 and reports whether the solution is strictly positive and finite.
bool positive_solution(const Eigen::MatrixXd& b, RVector& x)
{
    Eigen::FullPivLU<Eigen::MatrixXd> lu(b);
    if (!lu.isInvertible())
        return false;
    x = lu.solve(RVector::Ones(b.rows()));
    return x.allFinite() && (x.array() > 0.0).all();
}

// Unit-norm MMSE directions (I + sum_j q_j g_j g_j^H)^{-1} g_k, one per column.
CMatrix mmse_directions(const CMatrix& g, const RVector& q, Eigen::VectorXd& quad)
{
    const Eigen::Index m = g.rows();
    CMatrix cov = CMatrix::Identity(m, m);
    for (Eigen::Index j = 0; j < g.cols(); ++j)
        cov.noalias() += q(j) * g.col(j) * g.col(j).adjoint();
    const Eigen::LLT<CMatrix> llt(cov);
    CMatrix u = llt.solve(g);
    quad.resize(g.cols());
    for (Eigen::Index k = 0; k < g.cols(); ++k) {
        quad(k) = std::real(g.col(k).dot(u.col(k))); // g_k^H cov^{-1} g_k
        u.col(k).normalize();
    }
    return u;
}

// Coupling matrix of the SINR equations for fixed unit beams; `uplink` swaps the roles of
// receiver and interferer.
Eigen::MatrixXd sinr_system(const CMatrix& g, const CMatrix& u, std::span<const double> gamma,
                            bool uplink)
{
    const CMatrix cross = u.adjoint() * g; // cross(a, b) = u_a^H g_b
    const Eigen::Index n = g.cols();
    Eigen::MatrixXd b(n, n);
    for (Eigen::Index k = 0; k < n; ++k)
        for (Eigen::Index j = 0; j < n; ++j) {
            const double c = uplink ? std::norm(cross(k, j)) : std::norm(cross(j, k));
            b(k, j) = k == j ? c / gamma[static_cast<std::size_t>(k)] : -c;
        }
    return b;
}

} // namespace

PrecoderResult min_power_precoder(const CMatrix& effective, std::span<const double> sinr_targets,
                                  double noise_power, const PrecoderOptions& options)
{
    const Eigen::Index n_users = effective.rows();
    const Eigen::Index n_rf = effective.cols();
    if (static_cast<Eigen::Index>(sinr_targets.size()) != n_users)
        throw ValidationError(fmt::format("{} SINR targets for {} users", sinr_targets.size(), n_users));
    if (!(noise_power > 0.0))
        throw ValidationError("noise power must be > 0");
    if (!effective.allFinite())
        throw ValidationError("effective channel has non-finite entries");
    for (double gamma : sinr_targets)
        if (!(gamma > 0.0) || !std::isfinite(gamma))
            throw ValidationError(fmt::format("SINR target must be > 0, got {}", gamma));

    PrecoderResult result;
    if (n_users == 0) {
        result.feasible = true;
        result.precoder = CMatrix::Zero(n_rf, 0);
        return result;
    }

    // Noise-normalised channels as columns: g_k = h_k / sigma, so the noise term is 1.
    const CMatrix g = effective.transpose() / std::sqrt(noise_power);
    double scale = 0.0;
    for (Eigen::Index k = 0; k < n_users; ++k) {
        const double gain = g.col(k).squaredNorm();
        if (!(gain > 0.0))
            return result; // a user with no channel can never be served
        scale = std::max(scale, sinr_targets[static_cast<std::size_t>(k)] / gain);
    }

    RVector q = RVector::Zero(n_users);
    RVector quad;
    bool converged = false;
    int it = 0;
    while (it < options.max_iterations) {
        ++it;
        const CMatrix u = mmse_directions(g, q, quad);

        // Exact uplink powers for the current receive beams when they are attainable;
        // otherwise one step of the standard interference mapping
        // q_k <- gamma_k / (g_k^H Sigma_{-k}^{-1} g_k), written via Sherman-Morrison.
        RVector next;
        if (!positive_solution(sinr_system(g, u, sinr_targets, true), next)) {
            next.resize(n_users);
            for (Eigen::Index k = 0; k < n_users; ++k)
                next(k) = sinr_targets[static_cast<std::size_t>(k)] * (1.0 - q(k) * quad(k)) / quad(k);
        }

        if (!next.allFinite() || next.maxCoeff() > options.divergence_limit * scale) {
            result.iterations = it;
            return result;
        }
        const double change = (next - q).cwiseAbs().maxCoeff();
        q = next;
        if (change <= options.tolerance * q.cwiseAbs().maxCoeff()) {
            converged = true;
            break;
        }
    }
    result.iterations = it;
    if (!converged)
        return result;

    const CMatrix u = mmse_directions(g, q, quad);
    RVector p;
    if (!positive_solution(sinr_system(g, u, sinr_targets, false), p))
        return result;

    result.feasible = true;
    result.precoder.resize(n_rf, n_users);
    for (Eigen::Index k = 0; k < n_users; ++k)
        result.precoder.col(k) = std::sqrt(p(k)) * u.col(k);
    result.total_power = p.sum();
    result.uplink_powers.assign(q.data(), q.data() + q.size());
    return result;
}

} // namespace pass

// SPDX-License-Identifier: Apache-2.0
#include "pass/joint.hpp"

#include "pass/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <Eigen/Dense>
#include <fmt/format.h>

namespace pass {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kGoldenRatio = 0.6180339887498949;

using Offsets = std::vector<std::vector<double>>;

CMatrix feed_matrix(const FeedArchitecture& arch, Eigen::Index n_waveguides)
{
    if (const auto* fc = std::get_if<FullyConnected>(&arch))
        return fc->splitter;
    if (const auto* ps = std::get_if<PsFullyConnected>(&arch))
        return ps->phases / std::sqrt(static_cast<double>(ps->phases.rows()));
    return CMatrix::Identity(n_waveguides, n_waveguides);
}

double min_margin(const CMatrix& effective, const CMatrix& precoder, std::span<const double> gamma,
                  double noise_power)
{
    if (effective.rows() == 0)
        return kInf;
    const auto s = sinr(effective, precoder, noise_power);
    double m = kInf;
    for (std::size_t k = 0; k < s.size(); ++k)
        m = std::min(m, s[k] / gamma[k]);
    return m;
}

// Stand-in precoder for placements whose inner problem is infeasible: unit MMSE
// directions computed with single-user powers, each scaled to its single-user power.
CMatrix heuristic_precoder(const CMatrix& effective, std::span<const double> gamma,
                           double noise_power)
{
    const Eigen::Index m = effective.cols();
    const Eigen::Index k_users = effective.rows();
    const CMatrix h = effective.transpose();
    Eigen::VectorXd power(k_users);
    CMatrix cov = noise_power * CMatrix::Identity(m, m);
    for (Eigen::Index k = 0; k < k_users; ++k) {
        const double gain = h.col(k).squaredNorm();
        power(k) = gain > 0.0 ? gamma[static_cast<std::size_t>(k)] * noise_power / gain : 0.0;
        cov.noalias() += power(k) * h.col(k) * h.col(k).adjoint();
    }
    CMatrix w = cov.ldlt().solve(h);
    for (Eigen::Index k = 0; k < k_users; ++k) {
        const double n = w.col(k).norm();
        if (n > 0.0)
            w.col(k) *= std::sqrt(power(k)) / n;
        else
            w.col(k).setZero();
    }
    return w;
}

std::uint64_t binomial(std::size_t n, std::size_t k)
{
    if (k > n)
        return 0;
    k = std::min(k, n - k);
    std::uint64_t v = 1;
    for (std::size_t i = 1; i <= k; ++i) {
        if (v > std::numeric_limits<std::uint64_t>::max() / (n - k + i))
            return std::numeric_limits<std::uint64_t>::max();
        v = v * (n - k + i) / i;
    }
    return v;
}

std::vector<std::vector<double>> all_subsets(const std::vector<double>& cand, std::size_t n)
{
    std::vector<std::vector<double>> out;
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    const std::size_t c = cand.size();
    while (true) {
        std::vector<double> offs;
        offs.reserve(n);
        for (auto i : idx)
            offs.push_back(cand[i]);
        out.push_back(std::move(offs));
        std::size_t pos = n;
        while (pos > 0 && idx[pos - 1] == c - n + (pos - 1))
            --pos;
        if (pos == 0)
            break;
        ++idx[pos - 1];
        for (std::size_t j = pos; j < n; ++j)
            idx[j] = idx[j - 1] + 1;
    }
    return out;
}

// Evaluation state of one placement: channel, effective channel, inner solution.
struct State {
    Offsets offsets;
    CMatrix channels;
    CMatrix effective;
    PrecoderResult inner;
    CMatrix working_precoder; // inner precoder, or the heuristic when infeasible
    double power = kInf;
    double margin = 0.0;
};

class Descent {
public:
    Descent(const JointProblem& problem, const JointOptions& options)
        : p_(problem), opt_(options),
          feed_(feed_matrix(problem.architecture, static_cast<Eigen::Index>(problem.waveguides.size()))),
          amplitudes_(power_profile(problem.power_model, problem.n_pa_per_waveguide).fractions)
    {
        for (double& a : amplitudes_)
            a = std::sqrt(a);
        separation_ = problem.radio.wavelength / 2.0;
        step_ = options.search_step > 0.0 ? options.search_step : problem.radio.wavelength / 8.0;
        if (problem.activation == Activation::Discrete)
            grids_ = problem.resolved_grids();
    }

    Eigen::VectorXcd column(std::size_t w, std::span<const double> offsets) const
    {
        const auto n_users = static_cast<Eigen::Index>(p_.users.size());
        Eigen::VectorXcd col = Eigen::VectorXcd::Zero(n_users);
        for (Eigen::Index k = 0; k < n_users; ++k)
            for (std::size_t n = 0; n < offsets.size(); ++n)
                col(k) += amplitudes_[n] *
                          pa_coefficient(p_.users[static_cast<std::size_t>(k)], p_.waveguides[w],
                                         offsets[n], p_.radio);
        return col;
    }

    State evaluate(const Offsets& offsets) const
    {
        State s;
        s.offsets = offsets;
        const auto n_users = static_cast<Eigen::Index>(p_.users.size());
        s.channels.resize(n_users, static_cast<Eigen::Index>(p_.waveguides.size()));
        for (std::size_t w = 0; w < p_.waveguides.size(); ++w)
            s.channels.col(static_cast<Eigen::Index>(w)) = column(w, offsets[w]);
        s.effective = s.channels * feed_;
        s.inner = min_power_precoder(s.effective, p_.sinr_targets, p_.radio.noise_power, opt_.precoder);
        if (s.inner.feasible) {
            s.power = s.inner.total_power;
            s.working_precoder = s.inner.precoder;
        } else {
            s.power = kInf;
            s.working_precoder = heuristic_precoder(s.effective, p_.sinr_targets, p_.radio.noise_power);
        }
        s.margin = min_margin(s.effective, s.working_precoder, p_.sinr_targets, p_.radio.noise_power);
        return s;
    }

    // a is preferred over b: lower feasible power, else larger margin.
    static bool improves(const State& a, const State& b)
    {
        if (a.inner.feasible || b.inner.feasible) {
            if (!b.inner.feasible)
                return true;
            if (!a.inner.feasible)
                return false;
            return a.power < b.power;
        }
        return a.margin > b.margin;
    }

    double margin_with_column(const State& s, std::size_t w, const Eigen::VectorXcd& col) const
    {
        const auto wi = static_cast<Eigen::Index>(w);
        const CMatrix eff = s.effective + (col - s.channels.col(wi)) * feed_.row(wi);
        return min_margin(eff, s.working_precoder, p_.sinr_targets, p_.radio.noise_power);
    }

    // Best replacement offset for antenna n of waveguide w, or nullopt if none beats the current.
    std::optional<std::vector<double>> search(const State& s, std::size_t w, std::size_t n) const
    {
        const auto& current = s.offsets[w];
        const double current_margin = s.margin;
        if (p_.activation == Activation::Discrete)
            return search_discrete(s, w, n, current_margin);

        const auto& wg = p_.waveguides[w];
        const double lo = n == 0 ? 0.0 : current[n - 1] + separation_;
        const double hi = n + 1 == current.size() ? wg.length : current[n + 1] - separation_;
        if (hi < lo)
            return std::nullopt;

        const auto n_users = static_cast<Eigen::Index>(p_.users.size());
        Eigen::VectorXcd base = s.channels.col(static_cast<Eigen::Index>(w));
        for (Eigen::Index k = 0; k < n_users; ++k)
            base(k) -= amplitudes_[n] *
                       pa_coefficient(p_.users[static_cast<std::size_t>(k)], wg, current[n], p_.radio);
        auto margin_at = [&](double d) {
            Eigen::VectorXcd col = base;
            for (Eigen::Index k = 0; k < n_users; ++k)
                col(k) += amplitudes_[n] *
                          pa_coefficient(p_.users[static_cast<std::size_t>(k)], wg, d, p_.radio);
            return margin_with_column(s, w, col);
        };

        const auto cells = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil((hi - lo) / step_)));
        const double h = (hi - lo) / static_cast<double>(cells);
        double best_d = lo;
        double best_m = -kInf;
        for (std::size_t i = 0; i <= cells; ++i) {
            const double d = i == cells ? hi : lo + static_cast<double>(i) * h;
            const double m = margin_at(d);
            if (m > best_m) {
                best_m = m;
                best_d = d;
            }
        }

        // Golden-section refinement around the best grid point.
        double a = std::max(lo, best_d - h);
        double b = std::min(hi, best_d + h);
        double x1 = b - kGoldenRatio * (b - a);
        double x2 = a + kGoldenRatio * (b - a);
        double f1 = margin_at(x1);
        double f2 = margin_at(x2);
        for (int i = 0; i < 80 && b - a > 1e-12; ++i) {
            if (f1 >= f2) {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - kGoldenRatio * (b - a);
                f1 = margin_at(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + kGoldenRatio * (b - a);
                f2 = margin_at(x2);
            }
        }
        if (f1 > best_m) {
            best_m = f1;
            best_d = x1;
        }
        if (f2 > best_m) {
            best_m = f2;
            best_d = x2;
        }
        if (!(best_m > current_margin) || best_d == current[n])
            return std::nullopt;
        auto next = current;
        next[n] = best_d;
        return next;
    }

    std::optional<std::vector<double>> search_discrete(const State& s, std::size_t w, std::size_t n,
                                                       double current_margin) const
    {
        const auto& current = s.offsets[w];
        double best_m = current_margin;
        std::optional<std::vector<double>> best;
        for (double c : grids_[w].offsets) {
            if (std::find(current.begin(), current.end(), c) != current.end())
                continue;
            auto trial = current;
            trial[n] = c;
            std::sort(trial.begin(), trial.end());
            const double m = margin_with_column(s, w, column(w, trial));
            if (m > best_m) {
                best_m = m;
                best = std::move(trial);
            }
        }
        return best;
    }

    std::vector<std::size_t> user_assignment() const
    {
        std::vector<std::size_t> assigned(p_.waveguides.size());
        std::vector<bool> taken(p_.users.size(), false);
        for (std::size_t w = 0; w < p_.waveguides.size(); ++w) {
            const auto& wg = p_.waveguides[w];
            auto distance = [&](std::size_t k) {
                return (wg.point_at(wg.foot_offset(p_.users[k])) - p_.users[k]).norm();
            };
            std::size_t best = p_.users.size();
            for (std::size_t pass_index = 0; pass_index < 2 && best == p_.users.size(); ++pass_index)
                for (std::size_t k = 0; k < p_.users.size(); ++k) {
                    if (pass_index == 0 && taken[k])
                        continue;
                    if (best == p_.users.size() || distance(k) < distance(best))
                        best = k;
                }
            taken[best] = true;
            assigned[w] = best;
        }
        return assigned;
    }

    std::vector<State> initial_states(std::uint64_t seed) const
    {
        const std::size_t n_pa = p_.n_pa_per_waveguide;
        std::vector<State> candidates;

        if (p_.activation == Activation::Discrete) {
            std::uint64_t combos = 1;
            for (const auto& g : grids_) {
                const auto c = binomial(g.offsets.size(), n_pa);
                combos = c == 0 || combos > opt_.exhaustive_limit / c ? opt_.exhaustive_limit + 1
                                                                      : combos * c;
            }
            if (combos <= opt_.exhaustive_limit) {
                std::vector<std::vector<std::vector<double>>> per_guide;
                for (const auto& g : grids_)
                    per_guide.push_back(all_subsets(g.offsets, n_pa));
                std::vector<std::size_t> digit(per_guide.size(), 0);
                std::optional<State> best;
                while (true) {
                    Offsets offs;
                    for (std::size_t w = 0; w < per_guide.size(); ++w)
                        offs.push_back(per_guide[w][digit[w]]);
                    State s = evaluate(offs);
                    if (!best || improves(s, *best))
                        best = std::move(s);
                    std::size_t w = per_guide.size();
                    while (w > 0 && ++digit[w - 1] == per_guide[w - 1].size())
                        digit[--w] = 0;
                    if (w == 0)
                        break;
                }
                candidates.push_back(std::move(*best));
            } else {
                const auto assigned = user_assignment();
                Offsets offs;
                for (std::size_t w = 0; w < p_.waveguides.size(); ++w)
                    offs.push_back(optimize_discrete(p_.users[assigned[w]], p_.waveguides[w],
                                                     grids_[w], n_pa, p_.power_model, p_.radio)
                                       .offsets);
                candidates.push_back(evaluate(offs));
            }
        } else {
            const auto assigned = user_assignment();
            Offsets offs;
            for (std::size_t w = 0; w < p_.waveguides.size(); ++w) {
                ContinuousOptions co;
                co.seed = seed + w;
                co.seed_grid_spacing = p_.candidate_spacing;
                offs.push_back(optimize_continuous(p_.users[assigned[w]], p_.waveguides[w], n_pa,
                                                   p_.power_model, p_.radio, co)
                                   .offsets);
            }
            candidates.push_back(evaluate(offs));
        }

        if (opt_.initial_offsets) {
            Offsets offs = *opt_.initial_offsets;
            if (offs.size() != p_.waveguides.size())
                throw ValidationError("initial placement must list offsets for every waveguide");
            for (std::size_t w = 0; w < offs.size(); ++w) {
                if (offs[w].size() != n_pa)
                    throw ValidationError(fmt::format(
                        "initial placement for waveguide {} has {} antennas, expected {}", w,
                        offs[w].size(), n_pa));
                std::sort(offs[w].begin(), offs[w].end());
                PinchConfig{offs[w], p_.power_model}.validate(p_.waveguides[w]);
                if (p_.activation == Activation::Continuous) {
                    bool ok = true;
                    for (std::size_t n = 1; n < offs[w].size(); ++n)
                        ok = ok && offs[w][n] - offs[w][n - 1] >= separation_;
                    if (!ok)
                        offs[w] = project_offsets(offs[w], p_.waveguides[w].length, separation_);
                }
            }
            // Supplied placement goes first so that it wins ties.
            candidates.insert(candidates.begin(), evaluate(offs));
        }
        return candidates;
    }

    /// Descends from every starting placement and keeps the best end point.
    BeamformingSolution run(std::uint64_t seed) const
    {
        std::optional<BeamformingSolution> best;
        for (auto& start : initial_states(seed)) {
            auto sol = descend(std::move(start), seed);
            if (!best || (sol.feasible && (!best->feasible || sol.total_power < best->total_power)) ||
                (!sol.feasible && !best->feasible && sol.best_margin > best->best_margin))
                best = std::move(sol);
        }
        return std::move(*best);
    }

    BeamformingSolution descend(State state, std::uint64_t seed) const
    {
        BeamformingSolution sol;
        sol.power_history.push_back(state.power);
        double best_margin = state.margin;

        std::vector<std::pair<std::size_t, std::size_t>> order;
        for (std::size_t w = 0; w < p_.waveguides.size(); ++w)
            for (std::size_t n = 0; n < p_.n_pa_per_waveguide; ++n)
                order.emplace_back(w, n);
        std::mt19937_64 rng(seed);

        int round = 0;
        while (round < opt_.max_rounds) {
            ++round;
            if (opt_.randomize_order)
                std::shuffle(order.begin(), order.end(), rng);
            const double before = state.power;
            bool moved = false;
            for (const auto& [w, n] : order) {
                auto proposal = search(state, w, n);
                if (!proposal)
                    continue;
                Offsets offs = state.offsets;
                offs[w] = std::move(*proposal);
                State next = evaluate(offs);
                const bool accept = state.inner.feasible
                                        ? next.inner.feasible && next.power <= state.power
                                        : improves(next, state);
                if (accept) {
                    state = std::move(next);
                    best_margin = std::max(best_margin, state.margin);
                    moved = true;
                }
            }
            sol.power_history.push_back(state.power);
            if (!moved)
                break;
            if (state.inner.feasible && std::isfinite(before) &&
                before - state.power <= opt_.tolerance * before)
                break;
        }

        sol.iterations = round;
        sol.feasible = state.inner.feasible;
        sol.total_power = state.power;
        sol.best_margin = best_margin;
        for (std::size_t w = 0; w < p_.waveguides.size(); ++w)
            sol.placements.push_back({state.offsets[w], p_.power_model});
        if (state.inner.feasible) {
            sol.precoder = state.inner.precoder;
            sol.achieved_sinr = sinr(state.effective, sol.precoder, p_.radio.noise_power);
        }
        return sol;
    }

private:
    const JointProblem& p_;
    const JointOptions& opt_;
    CMatrix feed_;
    std::vector<double> amplitudes_;
    std::vector<CandidateGrid> grids_;
    double separation_ = 0.0;
    double step_ = 0.0;
};

} // namespace

void JointProblem::validate() const
{
    if (users.empty())
        throw ValidationError("joint problem needs at least one user");
    if (waveguides.empty())
        throw ValidationError("joint problem needs at least one waveguide");
    if (n_pa_per_waveguide == 0)
        throw ValidationError("n_pa_per_waveguide must be >= 1");
    if (sinr_targets.size() != users.size())
        throw ValidationError(
            fmt::format("{} SINR targets for {} users", sinr_targets.size(), users.size()));
    for (double g : sinr_targets)
        if (!(g > 0.0) || !std::isfinite(g))
            throw ValidationError(fmt::format("SINR target must be > 0, got {}", g));
    for (const auto& wg : waveguides)
        wg.validate();
    radio.validate();
    validate_architecture(architecture);
    const auto rows = std::visit(
        [&](const auto& a) -> Eigen::Index {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, FullyConnected>)
                return a.splitter.rows();
            else if constexpr (std::is_same_v<T, PsFullyConnected>)
                return a.phases.rows();
            else
                return static_cast<Eigen::Index>(waveguides.size());
        },
        architecture);
    if (rows != static_cast<Eigen::Index>(waveguides.size()))
        throw ValidationError("feed matrix rows must match the number of waveguides");
    if (activation == Activation::Discrete) {
        const auto g = resolved_grids();
        for (std::size_t w = 0; w < g.size(); ++w)
            if (g[w].offsets.size() < n_pa_per_waveguide)
                throw ValidationError(fmt::format(
                    "waveguide {} has {} candidates for {} antennas", w, g[w].offsets.size(),
                    n_pa_per_waveguide));
    }
}

std::vector<CandidateGrid> JointProblem::resolved_grids() const
{
    if (!grids.empty()) {
        if (grids.size() != waveguides.size())
            throw ValidationError("one candidate grid per waveguide is required");
        return grids;
    }
    std::vector<CandidateGrid> out;
    for (const auto& wg : waveguides)
        out.push_back(CandidateGrid::covering(wg, candidate_spacing));
    return out;
}

PrecoderResult solve_for_placements(const JointProblem& problem,
                                    std::span<const PinchConfig> placements,
                                    const PrecoderOptions& options)
{
    const CMatrix channels =
        channel_matrix(problem.users, problem.waveguides, placements, problem.radio);
    return min_power_precoder(effective_channel(channels, problem.architecture),
                              problem.sinr_targets, problem.radio.noise_power, options);
}

BeamformingSolution joint_min_power(const JointProblem& problem, std::uint64_t seed,
                                    const JointOptions& options)
{
    problem.validate();
    return Descent(problem, options).run(seed);
}

std::vector<Vec3> ula_positions(const Vec3& center, std::size_t n_antennas, double spacing,
                                const Vec3& axis)
{
    std::vector<Vec3> out;
    out.reserve(n_antennas);
    const Vec3 dir = axis.normalized();
    for (std::size_t m = 0; m < n_antennas; ++m)
        out.push_back(center + (static_cast<double>(m) - 0.5 * static_cast<double>(n_antennas - 1)) *
                                   spacing * dir);
    return out;
}

namespace {

CMatrix array_channels(std::span<const Vec3> users, std::span<const Vec3> antennas,
                       const RadioParams& radio)
{
    CMatrix h(static_cast<Eigen::Index>(users.size()), static_cast<Eigen::Index>(antennas.size()));
    for (std::size_t k = 0; k < users.size(); ++k)
        for (std::size_t m = 0; m < antennas.size(); ++m)
            h(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(m)) =
                free_space_coefficient(users[k], antennas[m], radio);
    return h;
}

} // namespace

PrecoderResult baseline_conventional_mimo(std::span<const Vec3> users, const Vec3& bs_position,
                                          std::size_t n_antennas,
                                          std::span<const double> sinr_targets,
                                          const RadioParams& radio, const Vec3& array_axis)
{
    if (n_antennas == 0)
        throw ValidationError("conventional array needs at least one antenna");
    radio.validate();
    const auto antennas = ula_positions(bs_position, n_antennas, radio.wavelength / 2.0, array_axis);
    return min_power_precoder(array_channels(users, antennas, radio), sinr_targets,
                              radio.noise_power);
}

PrecoderResult baseline_massive_mimo_hybrid(std::span<const Vec3> users, const Vec3& bs_position,
                                            std::size_t n_rf, std::size_t antennas_per_rf,
                                            std::span<const double> sinr_targets,
                                            const RadioParams& radio, const Vec3& array_axis)
{
    if (n_rf == 0 || antennas_per_rf == 0)
        throw ValidationError("hybrid array needs at least one RF chain and one antenna per chain");
    if (users.empty())
        throw ValidationError("hybrid baseline needs at least one user");
    radio.validate();
    if (antennas_per_rf == 1)
        return baseline_conventional_mimo(users, bs_position, n_rf, sinr_targets, radio, array_axis);

    const auto antennas =
        ula_positions(bs_position, n_rf * antennas_per_rf, radio.wavelength / 2.0, array_axis);
    const CMatrix h = array_channels(users, antennas, radio);

    // Block-diagonal analog stage; chain r is phase-matched to user r mod K.
    const double split = 1.0 / std::sqrt(static_cast<double>(antennas_per_rf));
    CMatrix analog = CMatrix::Zero(h.cols(), static_cast<Eigen::Index>(n_rf));
    for (std::size_t r = 0; r < n_rf; ++r) {
        const auto user = static_cast<Eigen::Index>(r % users.size());
        for (std::size_t m = 0; m < antennas_per_rf; ++m) {
            const auto row = static_cast<Eigen::Index>(r * antennas_per_rf + m);
            analog(row, static_cast<Eigen::Index>(r)) = std::polar(split, std::arg(h(user, row)));
        }
    }
    // Gain seen by the digital stage: (A^H h_k)^T = h_k^T conj(A).
    return min_power_precoder(h * analog.conjugate(), sinr_targets, radio.noise_power);
}

std::string system_name(SystemKind kind)
{
    switch (kind) {
    case SystemKind::PassContinuous:
        return "pass_continuous";
    case SystemKind::PassDiscrete:
        return "pass_discrete";
    case SystemKind::Conventional:
        return "conventional";
    case SystemKind::Massive:
        return "massive";
    }
    return "unknown";
}

SystemKind parse_system(const std::string& name)
{
    for (auto kind : {SystemKind::PassContinuous, SystemKind::PassDiscrete,
                      SystemKind::Conventional, SystemKind::Massive})
        if (system_name(kind) == name)
            return kind;
    throw ValidationError(fmt::format(
        "unknown system '{}' (expected pass_continuous, pass_discrete, conventional or massive)", name));
}

std::vector<SweepRow> power_vs_sinr_sweep(const SweepSetup& setup, std::span<const double> sinr_db,
                                          std::span<const SystemKind> systems)
{
    std::vector<SweepRow> rows;
    if (sinr_db.empty() || systems.empty())
        return rows;

    const auto& base = setup.problem;
    const auto n_rf = static_cast<std::size_t>(
        rf_chain_count(base.architecture, static_cast<Eigen::Index>(base.waveguides.size())));
    const bool need_discrete =
        std::any_of(systems.begin(), systems.end(), [](SystemKind s) {
            return s == SystemKind::PassDiscrete || s == SystemKind::PassContinuous;
        });

    for (double db : sinr_db) {
        const double gamma = std::pow(10.0, db / 10.0);
        JointProblem problem = base;
        problem.sinr_targets.assign(base.users.size(), gamma);

        std::optional<BeamformingSolution> discrete;
        if (need_discrete) {
            problem.activation = Activation::Discrete;
            JointOptions opts = setup.options;
            opts.initial_offsets.reset();
            discrete = joint_min_power(problem, setup.seed, opts);
        }

        for (SystemKind system : systems) {
            SweepRow row;
            row.sinr_db = db;
            row.system = system;
            switch (system) {
            case SystemKind::PassDiscrete:
                row.feasible = discrete->feasible;
                row.total_power = discrete->total_power;
                row.iterations = discrete->iterations;
                break;
            case SystemKind::PassContinuous: {
                problem.activation = Activation::Continuous;
                JointOptions opts = setup.options;
                Offsets seedling;
                for (const auto& pc : discrete->placements)
                    seedling.push_back(pc.offsets);
                opts.initial_offsets = std::move(seedling);
                const auto sol = joint_min_power(problem, setup.seed, opts);
                row.feasible = sol.feasible;
                row.total_power = sol.total_power;
                row.iterations = sol.iterations;
                break;
            }
            case SystemKind::Conventional: {
                const auto r = baseline_conventional_mimo(base.users, setup.bs_position, n_rf,
                                                          problem.sinr_targets, base.radio);
                row.feasible = r.feasible;
                row.total_power = r.feasible ? r.total_power : kInf;
                row.iterations = r.iterations;
                break;
            }
            case SystemKind::Massive: {
                const auto r = baseline_massive_mimo_hybrid(base.users, setup.bs_position, n_rf,
                                                            setup.massive_antennas_per_rf,
                                                            problem.sinr_targets, base.radio);
                row.feasible = r.feasible;
                row.total_power = r.feasible ? r.total_power : kInf;
                row.iterations = r.iterations;
                break;
            }
            }
            rows.push_back(row);
        }
    }
    return rows;
}

} // namespace pass

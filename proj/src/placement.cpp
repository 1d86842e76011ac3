// SPDX-License-Identifier: Apache-2.0
#include "pass/placement.hpp"

#include "pass/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <random>

#include <fmt/format.h>

namespace pass {

namespace {

std::vector<double> amplitudes(const PowerModel& model, std::size_t n)
{
    std::vector<double> a;
    if (n == 0)
        return a;
    const auto profile = power_profile(model, n);
    a.reserve(n);
    for (double f : profile.fractions)
        a.push_back(std::sqrt(f));
    return a;
}

// Candidate ordering: higher power first, then lexicographically smaller offsets.
bool better(double power, std::span<const double> offsets, double best_power,
            std::span<const double> best_offsets)
{
    if (power != best_power)
        return power > best_power;
    return std::lexicographical_compare(offsets.begin(), offsets.end(), best_offsets.begin(),
                                        best_offsets.end());
}

bool feasible(std::span<const double> x, double length, double separation)
{
    for (std::size_t n = 0; n < x.size(); ++n) {
        if (x[n] < 0.0 || x[n] > length)
            return false;
        if (n > 0 && x[n] - x[n - 1] < separation)
            return false;
    }
    return true;
}

std::uint64_t binomial_capped(std::size_t n, std::size_t k, std::uint64_t cap)
{
    if (k > n)
        return 0;
    k = std::min(k, n - k);
    // Exact: each intermediate value is C(n-k+i, i).
    long double value = 1.0L;
    for (std::size_t i = 1; i <= k; ++i) {
        value = value * static_cast<long double>(n - k + i) / static_cast<long double>(i);
        if (value > static_cast<long double>(cap))
            return cap + 1;
    }
    return static_cast<std::uint64_t>(std::llround(value));
}

struct AscentOutcome {
    std::vector<double> offsets;
    double power = 0.0;
    int iterations = 0;
};

AscentOutcome projected_ascent(const Vec3& user, const WaveguideLayout& waveguide,
                               std::vector<double> x, const PowerModel& model,
                               const RadioParams& radio, double separation, int max_iterations)
{
    auto objective = [&](std::span<const double> offsets) {
        return received_power(user, waveguide, offsets, model, radio);
    };

    double fx = objective(x);
    const double max_move = radio.wavelength / 4.0; // largest single-coordinate move per step
    // Barzilai-Borwein step lengths: the objective is a narrow ridge (phase differences are
    // stiff, sliding a cluster is soft) where fixed-scale steps zigzag.
    std::vector<double> prev_x, prev_grad;
    int it = 0;
    for (; it < max_iterations; ++it) {
        const auto grad = power_gradient(user, waveguide, x, model, radio);
        double gmax = 0.0;
        for (double g : grad)
            gmax = std::max(gmax, std::abs(g));
        if (!(gmax > 0.0))
            break;

        double t = max_move / gmax;
        if (!prev_x.empty()) {
            double ss = 0.0, sy = 0.0;
            for (std::size_t n = 0; n < x.size(); ++n) {
                const double sn = x[n] - prev_x[n];
                ss += sn * sn;
                sy += sn * (grad[n] - prev_grad[n]);
            }
            if (sy < 0.0)
                t = std::min(t, ss / -sy);
        }
        bool accepted = false;
        std::vector<double> y(x.size());
        double fy = fx;
        for (int bt = 0; bt < 60; ++bt) {
            for (std::size_t n = 0; n < x.size(); ++n)
                y[n] = x[n] + t * grad[n];
            y = project_offsets(y, waveguide.length, separation);
            double ascent = 0.0;
            for (std::size_t n = 0; n < x.size(); ++n)
                ascent += grad[n] * (y[n] - x[n]);
            fy = objective(y);
            if (fy > fx && fy >= fx + 1e-4 * ascent) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted)
            break;

        double move = 0.0;
        for (std::size_t n = 0; n < x.size(); ++n)
            move = std::max(move, std::abs(y[n] - x[n]));
        const double gain = fy - fx;
        prev_x = x;
        prev_grad = grad;
        x = y;
        fx = fy;
        if (move < 1e-11 || gain <= 1e-15 * fx)
            break;
    }
    return {std::move(x), fx, it};
}

} // namespace

CandidateGrid CandidateGrid::covering(const WaveguideLayout& waveguide, double spacing)
{
    if (!(spacing > 0.0) || !std::isfinite(spacing))
        throw ValidationError(fmt::format("candidate spacing must be > 0, got {}", spacing));
    CandidateGrid grid;
    grid.spacing = spacing;
    const auto count = static_cast<std::size_t>(std::floor(waveguide.length / spacing + 1e-9)) + 1;
    grid.offsets.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
        grid.offsets.push_back(std::min(waveguide.length, static_cast<double>(i) * spacing));
    return grid;
}

double received_power(const Vec3& user, const WaveguideLayout& waveguide,
                      std::span<const double> offsets, const PowerModel& model,
                      const RadioParams& radio)
{
    const PinchConfig pinch{{offsets.begin(), offsets.end()}, model};
    return std::norm(composite_channel(user, waveguide, pinch, radio));
}

std::vector<double> power_gradient(const Vec3& user, const WaveguideLayout& waveguide,
                                   std::span<const double> offsets, const PowerModel& model,
                                   const RadioParams& radio)
{
    const auto a = amplitudes(model, offsets.size());
    const double k = radio.wavenumber();
    const double att = std::log(10.0) / 20.0 * waveguide.attenuation_db_per_m;

    std::vector<cdouble> g(offsets.size());
    std::vector<cdouble> dg(offsets.size());
    cdouble h{0.0, 0.0};
    for (std::size_t n = 0; n < offsets.size(); ++n) {
        const Vec3 delta = waveguide.point_at(offsets[n]) - user;
        const double r = delta.norm();
        if (!(r > 0.0))
            throw SingularityError("user coincides with a pinching antenna");
        const double dr = delta.dot(waveguide.axis) / r;
        g[n] = pa_coefficient(user, waveguide, offsets[n], radio);
        // dg/dd = g * (dA/A - r'/r - j k (r' + n_eff))
        dg[n] = g[n] * cdouble(-att - dr / r, -k * (dr + waveguide.refractive_index));
        h += a[n] * g[n];
    }

    std::vector<double> grad(offsets.size());
    for (std::size_t n = 0; n < offsets.size(); ++n)
        grad[n] = 2.0 * std::real(std::conj(h) * a[n] * dg[n]);
    return grad;
}

std::vector<double> project_offsets(std::span<const double> offsets, double length,
                                    double separation)
{
    const std::size_t n = offsets.size();
    std::vector<double> out(n);
    if (n == 0)
        return out;
    const double span = length - static_cast<double>(n - 1) * separation;
    if (span < 0.0)
        throw ValidationError(fmt::format("{} antennas with separation {} do not fit on {} m", n,
                                          separation, length));

    // Shift out the separation so the constraint becomes 0 <= e_1 <= ... <= e_N <= span;
    // the projection is then isotonic regression (pool-adjacent-violators) and a clip.
    std::vector<double> level;
    std::vector<std::size_t> weight;
    for (std::size_t i = 0; i < n; ++i) {
        level.push_back(offsets[i] - static_cast<double>(i) * separation);
        weight.push_back(1);
        while (level.size() > 1 && level[level.size() - 2] > level.back()) {
            const auto w1 = weight[weight.size() - 2];
            const auto w2 = weight.back();
            const double merged = (level[level.size() - 2] * static_cast<double>(w1) +
                                   level.back() * static_cast<double>(w2)) /
                                  static_cast<double>(w1 + w2);
            level.pop_back();
            weight.pop_back();
            level.back() = merged;
            weight.back() = w1 + w2;
        }
    }
    std::size_t i = 0;
    for (std::size_t b = 0; b < level.size(); ++b) {
        const double e = std::clamp(level[b], 0.0, span);
        for (std::size_t j = 0; j < weight[b]; ++j, ++i)
            out[i] = std::min(length, e + static_cast<double>(i) * separation);
    }
    return out;
}

PlacementResult optimize_continuous(const Vec3& user, const WaveguideLayout& waveguide,
                                    std::size_t n_antennas, const PowerModel& model,
                                    const RadioParams& radio, const ContinuousOptions& options)
{
    if (n_antennas == 0)
        throw ValidationError("continuous placement needs at least one antenna");
    waveguide.validate();
    const double separation =
        options.min_separation > 0.0 ? options.min_separation : radio.wavelength / 2.0;
    if (static_cast<double>(n_antennas - 1) * separation > waveguide.length)
        throw ValidationError(fmt::format("{} antennas with separation {} do not fit on {} m",
                                          n_antennas, separation, waveguide.length));

    std::vector<std::vector<double>> starts;
    const auto grid = CandidateGrid::covering(waveguide, options.seed_grid_spacing);
    if (grid.offsets.size() >= n_antennas) {
        starts.push_back(
            optimize_discrete(user, waveguide, grid, n_antennas, model, radio).offsets);
    } else {
        // Grid too coarse for N antennas: pack them around the foot point instead.
        const double foot = waveguide.foot_offset(user);
        std::vector<double> packed(n_antennas);
        for (std::size_t n = 0; n < n_antennas; ++n)
            packed[n] = foot + (static_cast<double>(n) - 0.5 * static_cast<double>(n_antennas - 1)) *
                                   separation;
        starts.push_back(project_offsets(packed, waveguide.length, separation));
    }

    // Greedy start on a lambda / 16 grid: each antenna goes where it helps most given
    // the ones already placed. Finds the tightly packed in-phase clusters that a coarse
    // seed grid steps over.
    {
        const double step = radio.wavelength / 16.0;
        std::vector<double> placed;
        for (std::size_t n = 0; n < n_antennas; ++n) {
            double best_power = -1.0;
            std::vector<double> best_set;
            for (double d = 0.0; d <= waveguide.length; d += step) {
                auto at = std::lower_bound(placed.begin(), placed.end(), d);
                if ((at != placed.end() && *at - d < separation) ||
                    (at != placed.begin() && d - *(at - 1) < separation))
                    continue;
                auto trial = placed;
                trial.insert(trial.begin() + (at - placed.begin()), d);
                const double p = received_power(user, waveguide, trial, model, radio);
                if (p > best_power) {
                    best_power = p;
                    best_set = std::move(trial);
                }
            }
            if (best_set.empty())
                break;
            placed = std::move(best_set);
        }
        if (placed.size() == n_antennas)
            starts.push_back(std::move(placed));
    }

    std::mt19937_64 rng(options.seed);
    const double jitter = 0.5 * options.seed_grid_spacing;
    std::uniform_real_distribution<double> uniform(-jitter, jitter);
    for (int s = 1; s < std::max(1, options.restarts); ++s) {
        std::vector<double> x = starts.front();
        for (double& d : x)
            d += uniform(rng);
        std::sort(x.begin(), x.end());
        starts.push_back(project_offsets(x, waveguide.length, separation));
    }

    PlacementResult best;
    best.mode = Activation::Continuous;
    best.received_power = -1.0;
    int total_iterations = 0;
    for (auto& start : starts) {
        if (!feasible(start, waveguide.length, separation))
            start = project_offsets(start, waveguide.length, separation);
        auto outcome = projected_ascent(user, waveguide, start, model, radio, separation,
                                        options.max_iterations);
        total_iterations += outcome.iterations;
        if (best.received_power < 0.0 ||
            better(outcome.power, outcome.offsets, best.received_power, best.offsets)) {
            best.offsets = std::move(outcome.offsets);
            best.received_power = outcome.power;
        }
    }

    // Escape local optima one antenna at a time: scan each antenna over its free
    // interval at lambda / 16 with the others fixed, then polish with the gradient.
    const double step = radio.wavelength / 16.0;
    for (int round = 0; round < 20; ++round) {
        bool improved = false;
        for (std::size_t n = 0; n < n_antennas; ++n) {
            const double lo = n == 0 ? 0.0 : best.offsets[n - 1] + separation;
            const double hi = n + 1 == n_antennas ? waveguide.length : best.offsets[n + 1] - separation;
            auto trial = best.offsets;
            double trial_power = best.received_power;
            double pick = best.offsets[n];
            for (double d = lo; d <= hi; d += step) {
                trial[n] = d;
                const double p = received_power(user, waveguide, trial, model, radio);
                if (p > trial_power) {
                    trial_power = p;
                    pick = d;
                }
            }
            if (pick == best.offsets[n])
                continue;
            trial[n] = pick;
            auto outcome = projected_ascent(user, waveguide, trial, model, radio, separation,
                                            options.max_iterations);
            total_iterations += outcome.iterations;
            if (outcome.power > best.received_power * (1.0 + 1e-12)) {
                best.offsets = std::move(outcome.offsets);
                best.received_power = outcome.power;
                improved = true;
            }
        }
        if (!improved)
            break;
    }
    best.iterations = total_iterations;
    return best;
}

PlacementResult optimize_discrete(const Vec3& user, const WaveguideLayout& waveguide,
                                  const CandidateGrid& grid, std::size_t n_antennas,
                                  const PowerModel& model, const RadioParams& radio,
                                  const DiscreteOptions& options)
{
    const auto& cand = grid.offsets;
    const std::size_t n_cand = cand.size();
    if (n_antennas == 0)
        throw ValidationError("discrete placement needs at least one antenna");
    if (n_antennas > n_cand)
        throw ValidationError(
            fmt::format("{} antennas requested but only {} candidates", n_antennas, n_cand));
    for (std::size_t c = 1; c < n_cand; ++c)
        if (!(cand[c] > cand[c - 1]))
            throw ValidationError("candidate offsets must be strictly increasing");

    std::vector<cdouble> g(n_cand);
    for (std::size_t c = 0; c < n_cand; ++c)
        g[c] = pa_coefficient(user, waveguide, cand[c], radio);

    // Power of a sorted index set, with the N-antenna profile assigned by rank.
    auto power_of = [&](std::span<const std::size_t> idx) {
        const auto a = amplitudes(model, idx.size());
        cdouble h{0.0, 0.0};
        for (std::size_t n = 0; n < idx.size(); ++n)
            h += a[n] * g[idx[n]];
        return std::norm(h);
    };
    auto offsets_of = [&](std::span<const std::size_t> idx) {
        std::vector<double> out;
        out.reserve(idx.size());
        for (auto i : idx)
            out.push_back(cand[i]);
        return out;
    };

    PlacementResult result;
    result.mode = Activation::Discrete;

    if (binomial_capped(n_cand, n_antennas, options.exhaustive_limit) <= options.exhaustive_limit) {
        // Lexicographic enumeration; strict improvement keeps the lowest offsets on ties.
        std::vector<std::size_t> idx(n_antennas);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::vector<std::size_t> best_idx = idx;
        double best_power = power_of(idx);
        int visited = 1;
        while (true) {
            std::size_t pos = n_antennas;
            while (pos > 0 && idx[pos - 1] == n_cand - n_antennas + (pos - 1))
                --pos;
            if (pos == 0)
                break;
            ++idx[pos - 1];
            for (std::size_t j = pos; j < n_antennas; ++j)
                idx[j] = idx[j - 1] + 1;
            const double p = power_of(idx);
            ++visited;
            if (p > best_power) {
                best_power = p;
                best_idx = idx;
            }
        }
        result.offsets = offsets_of(best_idx);
        result.received_power = best_power;
        result.iterations = visited;
        return result;
    }

    // Greedy growth.
    std::vector<std::size_t> chosen;
    std::vector<bool> used(n_cand, false);
    int evaluations = 0;
    while (chosen.size() < n_antennas) {
        double best_p = -1.0;
        std::size_t best_c = n_cand;
        for (std::size_t c = 0; c < n_cand; ++c) {
            if (used[c])
                continue;
            auto trial = chosen;
            trial.insert(std::upper_bound(trial.begin(), trial.end(), c), c);
            const double p = power_of(trial);
            ++evaluations;
            if (p > best_p) {
                best_p = p;
                best_c = c;
            }
        }
        used[best_c] = true;
        chosen.insert(std::upper_bound(chosen.begin(), chosen.end(), best_c), best_c);
    }

    // Pairwise swaps until none improves.
    double current = power_of(chosen);
    bool improved = true;
    while (improved) {
        improved = false;
        double best_p = current;
        std::vector<std::size_t> best_set;
        for (std::size_t i = 0; i < chosen.size(); ++i) {
            for (std::size_t c = 0; c < n_cand; ++c) {
                if (used[c])
                    continue;
                auto trial = chosen;
                trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(i));
                trial.insert(std::upper_bound(trial.begin(), trial.end(), c), c);
                const double p = power_of(trial);
                ++evaluations;
                if (p > best_p) {
                    best_p = p;
                    best_set = std::move(trial);
                }
            }
        }
        if (!best_set.empty()) {
            for (auto i : chosen)
                used[i] = false;
            chosen = std::move(best_set);
            for (auto i : chosen)
                used[i] = true;
            current = best_p;
            improved = true;
        }
    }
    result.offsets = offsets_of(chosen);
    result.received_power = current;
    result.iterations = evaluations;
    return result;
}

std::vector<double> centered_offsets(const Vec3& user, const WaveguideLayout& waveguide,
                                     std::size_t n_antennas, double spacing)
{
    if (n_antennas == 0)
        throw ValidationError("array needs at least one antenna");
    if (!(spacing > 0.0))
        throw ValidationError(fmt::format("antenna spacing must be > 0, got {}", spacing));
    const double foot = waveguide.foot_offset(user);
    const double half = 0.5 * static_cast<double>(n_antennas - 1) * spacing;
    constexpr double slack = 1e-9;
    if (foot - half < -slack || foot + half > waveguide.length + slack)
        throw TruncationError(fmt::format(
            "{} antennas at {} m spacing span [{}, {}] m, outside the {} m waveguide", n_antennas,
            spacing, foot - half, foot + half, waveguide.length));
    std::vector<double> offsets(n_antennas);
    for (std::size_t n = 0; n < n_antennas; ++n)
        offsets[n] = std::clamp(foot - half + static_cast<double>(n) * spacing, 0.0, waveguide.length);
    return offsets;
}

std::vector<double> phase_align(const Vec3& user, const WaveguideLayout& waveguide,
                                std::span<const double> offsets, const RadioParams& radio)
{
    std::vector<double> out(offsets.begin(), offsets.end());
    if (out.size() < 2)
        return out;

    const double k = radio.wavenumber();
    // Accumulated phase lag; nondecreasing in d because n_eff >= 1 >= |dr/dd|.
    auto lag = [&](double d) {
        return k * ((waveguide.point_at(d) - user).norm() + waveguide.refractive_index * d);
    };

    const double foot = waveguide.foot_offset(user);
    std::size_t ref = 0;
    for (std::size_t n = 1; n < out.size(); ++n)
        if (std::abs(out[n] - foot) < std::abs(out[ref] - foot))
            ref = n;
    const double target_phase = lag(out[ref]);

    // Smallest |shift| with lag(d + shift) = target (mod 2 pi), by bracketing then bisection.
    auto solve = [&](double d0, double target) -> std::optional<double> {
        const double f0 = lag(d0) - target;
        if (f0 == 0.0)
            return d0;
        const double dir = f0 < 0.0 ? 1.0 : -1.0;
        double step = radio.wavelength / 8.0;
        double lo = d0, hi = d0;
        for (int i = 0; i < 200; ++i) {
            hi = std::clamp(d0 + dir * step, 0.0, waveguide.length);
            if ((lag(hi) - target) * f0 <= 0.0)
                break;
            if (hi == 0.0 || hi == waveguide.length)
                return std::nullopt;
            lo = hi;
            step *= 1.5;
        }
        if ((lag(hi) - target) * f0 > 0.0)
            return std::nullopt;
        for (int i = 0; i < 200 && std::abs(hi - lo) > 1e-15; ++i) {
            const double mid = 0.5 * (lo + hi);
            if ((lag(mid) - target) * f0 > 0.0)
                lo = mid;
            else
                hi = mid;
        }
        return hi;
    };

    for (std::size_t n = 0; n < out.size(); ++n) {
        if (n == ref)
            continue;
        const double here = lag(out[n]);
        const double delta = std::remainder(target_phase - here, 2.0 * kPi);
        std::optional<double> aligned = solve(out[n], here + delta);
        if (!aligned)
            aligned = solve(out[n], here + delta + (delta > 0.0 ? -2.0 : 2.0) * kPi);
        if (aligned)
            out[n] = *aligned;
    }
    return out;
}

std::vector<ArrayGainPoint> array_gain_sweep(const Vec3& user, const WaveguideLayout& waveguide,
                                             std::span<const std::size_t> n_list, double spacing,
                                             const PowerModel& model, const RadioParams& radio,
                                             bool phase_aligned)
{
    waveguide.validate();
    const double foot = waveguide.foot_offset(user);
    const double reference = std::norm(pa_coefficient(user, waveguide, foot, radio));

    std::vector<ArrayGainPoint> sweep;
    sweep.reserve(n_list.size());
    for (std::size_t n : n_list) {
        auto offsets = centered_offsets(user, waveguide, n, spacing);
        if (phase_aligned)
            offsets = phase_align(user, waveguide, offsets, radio);
        sweep.push_back({n, received_power(user, waveguide, offsets, model, radio) / reference});
    }
    return sweep;
}

double fixed_array_gain(std::size_t n_antennas, double distance, double reference_distance,
                        const RadioParams& radio)
{
    if (n_antennas == 0)
        throw ValidationError("array needs at least one antenna");
    // Broadside half-wavelength array; equal power per element, conjugate-phase steering.
    const Vec3 user(0.0, 0.0, 0.0);
    double coherent = 0.0;
    for (std::size_t m = 0; m < n_antennas; ++m) {
        const double y = (static_cast<double>(m) - 0.5 * static_cast<double>(n_antennas - 1)) *
                         radio.wavelength / 2.0;
        coherent += std::abs(free_space_coefficient(user, Vec3(distance, y, 0.0), radio));
    }
    const double received = coherent * coherent / static_cast<double>(n_antennas);
    const double ref = radio.reference_gain / reference_distance;
    return received / (ref * ref);
}

} // namespace pass

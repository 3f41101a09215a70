#ifndef TRAJSEEK_DATAGEN_HPP
#define TRAJSEEK_DATAGEN_HPP

#include "trajseek/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iterator>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace trajseek {

/// Temporal activity profile of a generated dataset.
///  - uniform: fixed-length trajectories, start times uniform.
///  - normal:  fixed-length trajectories, start times from a truncated normal.
///  - normal5: like normal, drawing each start time from one of several
///             normal components spread over the start window.
///  - exp:     trajectory lengths from a truncated exponential, start times uniform.
enum class profile_kind { uniform, normal, normal5, exp };

inline const char* to_string(profile_kind k) {
    switch (k) {
    case profile_kind::uniform: return "uniform";
    case profile_kind::normal: return "normal";
    case profile_kind::normal5: return "normal5";
    case profile_kind::exp: return "exp";
    }
    return "unknown";
}

inline profile_kind parse_profile(const std::string& s) {
    for (auto k : {profile_kind::uniform, profile_kind::normal, profile_kind::normal5, profile_kind::exp})
        if (s == to_string(k))
            return k;
    throw std::invalid_argument("unknown profile: " + s);
}

struct gen_profile {
    profile_kind kind = profile_kind::uniform;
    std::size_t trajectories = 2500;
    /// Points per trajectory for the fixed-length profiles.
    std::size_t timesteps = 400;

    /// Start-time window; uniform and exp sample within it, normal profiles
    /// truncate to it.
    double start_min = 0;
    double start_max = 100;
    double start_mean = 200;
    double start_stddev = 200;
    std::size_t mixture_components = 5;

    /// exp: timestep count ~ Exp(rate), truncated to [min_steps, max_steps].
    double exp_rate = 1.0 / 70.0;
    std::size_t exp_min_steps = 2;
    std::size_t exp_max_steps = 1000;

    /// Per-axis standard deviation of one unit-time random-walk step.
    double step_scale = 1.0;
    /// Initial positions are uniform in [0, space_extent]^3.
    double space_extent = 1000.0;

    std::uint64_t seed = 1;

    /// Profile defaults matching the reference dataset family. normal and
    /// normal5 use 401 points per trajectory (400 segments each).
    static gen_profile defaults(profile_kind kind) {
        gen_profile p;
        p.kind = kind;
        switch (kind) {
        case profile_kind::uniform:
            break;
        case profile_kind::normal:
        case profile_kind::normal5:
            p.timesteps = 401;
            p.start_min = 0;
            p.start_max = 400;
            break;
        case profile_kind::exp:
            p.trajectories = 10000;
            p.start_min = 0;
            p.start_max = 20;
            break;
        }
        return p;
    }

    void validate() const {
        if (trajectories == 0)
            throw std::domain_error("profile: trajectory count must be positive");
        if (!(start_max >= start_min) || !std::isfinite(start_min) || !std::isfinite(start_max))
            throw std::domain_error("profile: invalid start-time window");
        if (!(step_scale >= 0) || !std::isfinite(step_scale))
            throw std::domain_error("profile: step scale must be finite and non-negative");
        if (!(space_extent >= 0) || !std::isfinite(space_extent))
            throw std::domain_error("profile: space extent must be finite and non-negative");
        switch (kind) {
        case profile_kind::uniform:
        case profile_kind::normal:
        case profile_kind::normal5:
            if (timesteps < 2)
                throw std::domain_error("profile: trajectories need at least 2 timesteps");
            break;
        case profile_kind::exp:
            if (!(exp_rate > 0) || exp_min_steps < 2 || exp_max_steps < exp_min_steps)
                throw std::domain_error("profile: invalid exponential length parameters");
            break;
        }
        if (kind == profile_kind::normal && !(start_stddev > 0))
            throw std::domain_error("profile: normal start stddev must be positive");
        if (kind == profile_kind::normal5 && mixture_components == 0)
            throw std::domain_error("profile: mixture needs at least one component");
    }
};

/// Mean of Exp(rate) truncated to [lo, hi].
inline double truncated_exponential_mean(double rate, double lo, double hi) {
    const double len = hi - lo;
    const double x = rate * len;
    if (x < 1e-4)
        return lo + len / 2 - rate * len * len / 12;
    return lo + 1.0 / rate - len / std::expm1(x);
}

namespace detail {

class trajectory_sampler {
public:
    explicit trajectory_sampler(const gen_profile& p) : p_(p), rng_(p.seed) {}

    /// Segments of the next trajectory, in seg_id order.
    std::vector<trajectory_segment> next(trajectory_id id) {
        const double t_start = sample_start();
        const std::size_t points = sample_points();
        std::uniform_real_distribution<double> place(0.0, p_.space_extent);
        std::normal_distribution<double> step(0.0, 1.0);

        vec3 pos{place(rng_), place(rng_), place(rng_)};
        std::vector<trajectory_segment> out;
        out.reserve(points - 1);
        for (std::size_t k = 0; k + 1 < points; ++k) {
            const vec3 move{p_.step_scale * step(rng_), p_.step_scale * step(rng_), p_.step_scale * step(rng_)};
            const vec3 nxt = pos + move;
            const double t = t_start + static_cast<double>(k);
            const double t1 = t_start + static_cast<double>(k + 1);
            out.push_back({id, k, {pos.x, pos.y, pos.z, t}, {nxt.x, nxt.y, nxt.z, t1}});
            pos = nxt;
        }
        return out;
    }

private:
    double sample_start() {
        switch (p_.kind) {
        case profile_kind::uniform:
        case profile_kind::exp:
            return std::uniform_real_distribution<double>(p_.start_min, p_.start_max)(rng_);
        case profile_kind::normal:
            return truncated_normal(p_.start_mean, p_.start_stddev);
        case profile_kind::normal5: {
            const double span = p_.start_max - p_.start_min;
            const auto k = std::uniform_int_distribution<std::size_t>(0, p_.mixture_components - 1)(rng_);
            const double mean =
                p_.start_min + span * (static_cast<double>(k) + 0.5) / static_cast<double>(p_.mixture_components);
            return truncated_normal(mean, span / 20.0);
        }
        }
        return 0;
    }

    double truncated_normal(double mean, double stddev) {
        if (!(stddev > 0))
            return std::clamp(mean, p_.start_min, p_.start_max);
        std::normal_distribution<double> dist(mean, stddev);
        for (;;) {
            const double v = dist(rng_);
            if (v >= p_.start_min && v <= p_.start_max)
                return v;
        }
    }

    std::size_t sample_points() {
        if (p_.kind != profile_kind::exp)
            return p_.timesteps;
        std::exponential_distribution<double> dist(p_.exp_rate);
        const double lo = static_cast<double>(p_.exp_min_steps);
        const double hi = static_cast<double>(p_.exp_max_steps);
        for (;;) {
            const double v = dist(rng_);
            if (v >= lo && v <= hi)
                return std::clamp(static_cast<std::size_t>(std::lround(v)), p_.exp_min_steps, p_.exp_max_steps);
        }
    }

    const gen_profile& p_;
    std::mt19937_64 rng_;
};

} // namespace detail

/// Random-walk trajectories of the profile, one vector per trajectory.
inline std::vector<std::vector<trajectory_segment>> generate_trajectories(const gen_profile& profile) {
    profile.validate();
    detail::trajectory_sampler sampler(profile);
    std::vector<std::vector<trajectory_segment>> out;
    out.reserve(profile.trajectories);
    for (std::size_t i = 0; i < profile.trajectories; ++i)
        out.push_back(sampler.next(i));
    return out;
}

inline segment_store flatten(const std::vector<std::vector<trajectory_segment>>& trajectories) {
    std::size_t n = 0;
    for (const auto& t : trajectories)
        n += t.size();
    std::vector<trajectory_segment> all;
    all.reserve(n);
    for (const auto& t : trajectories)
        all.insert(all.end(), t.begin(), t.end());
    return segment_store(std::move(all));
}

/// Deterministic dataset for the profile; the seed fixes every value.
inline segment_store generate(const gen_profile& profile) { return flatten(generate_trajectories(profile)); }

/// Picks `num_traj` whole trajectories without replacement from a pool
/// generated with the same profile under `seed`, sorted into a query set.
inline segment_store sample_queries(const gen_profile& profile, std::size_t num_traj, std::uint64_t seed) {
    if (num_traj > profile.trajectories)
        throw std::domain_error("sample_queries: pool has only " + std::to_string(profile.trajectories) +
                                " trajectories");
    if (num_traj == 0)
        return {};
    gen_profile pool_profile = profile;
    pool_profile.seed = seed;
    const auto pool = generate_trajectories(pool_profile);

    std::vector<std::size_t> picked;
    picked.reserve(num_traj);
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<std::size_t> ids(pool.size());
    std::iota(ids.begin(), ids.end(), 0);
    std::sample(ids.begin(), ids.end(), std::back_inserter(picked), num_traj, rng);

    std::vector<std::vector<trajectory_segment>> chosen;
    chosen.reserve(picked.size());
    for (auto i : picked)
        chosen.push_back(pool[i]);
    return flatten(chosen);
}

} // namespace trajseek

#endif // TRAJSEEK_DATAGEN_HPP

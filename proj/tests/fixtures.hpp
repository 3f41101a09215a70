#ifndef TRAJSEEK_TESTS_FIXTURES_HPP
#define TRAJSEEK_TESTS_FIXTURES_HPP

#include "trajseek/trajseek.hpp"

#include <cmath>
#include <cstddef>
#include <random>
#include <utility>
#include <vector>

namespace fixtures {

using namespace trajseek;

/// 15 entry segments over [0, 12]; with 4 bins the bin width is 3.
inline segment_store binning_store() {
    const std::pair<double, double> times[] = {
        {0, 1.7},   {0.6, 1.5}, {0.7, 1.3}, {1.9, 3.7},  {2.5, 7.5},  {2.8, 4.6},  {3.9, 5.5},   {4.1, 5.8},
        {4.8, 6.2}, {6.5, 9.4}, {7.0, 7.8}, {8.3, 11.0}, {9.3, 11.5}, {10.4, 12.0}, {11.6, 11.9}};
    std::vector<trajectory_segment> segs;
    for (std::size_t i = 0; i < std::size(times); ++i) {
        const double x = static_cast<double>(i);
        segs.push_back({i, 0, {x, 0, 0, times[i].first}, {x, 1, 0, times[i].second}});
    }
    return segment_store(std::move(segs));
}

struct batch_window {
    double begin;
    double end;
};

inline constexpr batch_window batch_windows[] = {{0.1, 5.2}, {4.8, 6.1}, {5.7, 9.1},
                                                    {8.0, 9.2}, {8.5, 10.5}, {11.5, 12.0}};

/// 60 query segments forming six consecutive 10-query batches whose extents
/// are batch_windows. Query j of a batch starts at begin + j * delta and
/// ends at the batch end, with delta keeping starts below the next batch.
inline segment_store windowed_queries() {
    std::vector<trajectory_segment> segs;
    const std::size_t n = std::size(batch_windows);
    for (std::size_t k = 0; k < n; ++k) {
        const auto [b, e] = batch_windows[k];
        const double limit = k + 1 < n ? std::min(batch_windows[k + 1].begin, e) : e;
        const double delta = (limit - b) / 10.0;
        for (std::size_t j = 0; j < 10; ++j) {
            const double t = b + static_cast<double>(j) * delta;
            const trajectory_id id = 100 + 10 * k + j;
            segs.push_back({id, 0, {static_cast<double>(j), 0.5, 0, t}, {static_cast<double>(j), 0.5, 1, e}});
        }
    }
    return segment_store(std::move(segs));
}

/// Random polyline trajectories with random time steps, for property tests.
inline segment_store random_store(std::uint64_t seed, std::size_t trajectories, std::size_t max_segments,
                                  double time_span = 50, double space = 20, trajectory_id first_id = 0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> start(0, time_span);
    std::uniform_real_distribution<double> step_t(0.05, 2.0);
    std::uniform_real_distribution<double> place(0, space);
    std::normal_distribution<double> move(0, 1.0);
    std::uniform_int_distribution<std::size_t> length(1, max_segments);
    std::vector<trajectory_segment> segs;
    for (std::size_t i = 0; i < trajectories; ++i) {
        double t = start(rng);
        vec3 p{place(rng), place(rng), place(rng)};
        const std::size_t n = length(rng);
        for (std::size_t k = 0; k < n; ++k) {
            const double t1 = t + step_t(rng);
            const vec3 q = p + vec3{move(rng), move(rng), move(rng)};
            segs.push_back({first_id + i, k, {p.x, p.y, p.z, t}, {q.x, q.y, q.z, t1}});
            t = t1;
            p = q;
        }
    }
    return segment_store(std::move(segs));
}

/// Separation of two segments at time t (inside both extents).
inline double distance_at(const trajectory_segment& a, const trajectory_segment& b, double t) {
    return std::sqrt((position_at(a, t) - position_at(b, t)).norm2());
}

struct sampling_report {
    std::size_t pairs = 0;
    std::size_t samples = 0;
    std::size_t mismatches = 0;
};

/// Compares threshold_interval with direct distance evaluation on random
/// segment pairs. A sample counts as a mismatch when its membership in the
/// returned interval disagrees with dist <= d and it lies further than eps
/// from an interval endpoint.
inline sampling_report sampling_suite(std::uint64_t seed, std::size_t pairs, double eps,
                                      std::size_t samples_per_pair = 64) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coord(-5, 5);
    std::uniform_real_distribution<double> t0(0, 10);
    std::uniform_real_distribution<double> len(0.1, 10);
    std::uniform_real_distribution<double> dist(0.25, 6);
    std::uniform_real_distribution<double> unit(0, 1);
    sampling_report rep;
    for (std::size_t p = 0; p < pairs; ++p) {
        auto make = [&](trajectory_id id) {
            const double a = t0(rng);
            return trajectory_segment{id, 0, {coord(rng), coord(rng), coord(rng), a},
                                      {coord(rng), coord(rng), coord(rng), a + len(rng)}};
        };
        const auto a = make(1);
        const auto b = make(2);
        const double d = dist(rng);
        const auto clipped = temporal_intersection(a, b);
        if (!clipped)
            continue;
        ++rep.pairs;
        const auto iv = threshold_interval(clipped->first, clipped->second, d);
        const double lo = clipped->first.start.t;
        const double hi = clipped->first.end.t;
        std::vector<double> ts;
        for (std::size_t k = 0; k < samples_per_pair; ++k)
            ts.push_back(lo + (hi - lo) * (static_cast<double>(k) + unit(rng)) / static_cast<double>(samples_per_pair));
        ts.push_back(lo);
        ts.push_back(hi);
        if (iv)
            for (double e : {iv->begin, iv->end})
                for (double off : {-2 * eps, 2 * eps})
                    if (e + off >= lo && e + off <= hi)
                        ts.push_back(e + off);
        for (double t : ts) {
            ++rep.samples;
            const bool inside = distance_at(a, b, t) <= d;
            const bool claimed = iv && iv->contains(t);
            if (inside == claimed)
                continue;
            const bool near_edge = iv && (std::abs(t - iv->begin) <= eps || std::abs(t - iv->end) <= eps);
            if (!near_edge)
                ++rep.mismatches;
        }
    }
    return rep;
}

} // namespace fixtures

#endif // TRAJSEEK_TESTS_FIXTURES_HPP

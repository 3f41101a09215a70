#ifndef TRAJSEEK_PERFMODEL_HPP
#define TRAJSEEK_PERFMODEL_HPP

// Response-time model for periodic batching.
//
// Engine (kernel) time of one batch with i interactions over c candidates:
//
//   T(i, c) = T_hit(a i, c) + T_tmiss(b i, c) + T_smiss(g i, c) - 2 Theta(i, c)
//
// where a, b, g are the hit / temporal-miss / spatial-miss fractions of the
// batch's interactions and each T_* is a benchmark surface that already
// contains one launch overhead Theta. Host time is a power law in the batch
// size plus a per-byte result transfer cost.

#include "trajseek/core.hpp"
#include "trajseek/engine.hpp"
#include "trajseek/index.hpp"
#include "trajseek/planner.hpp"
#include "trajseek/worker_pool.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace trajseek {

// ---------------------------------------------------------------------------
// Hit fraction per temporal epoch

struct alpha_epoch {
    time_interval span;
    double alpha = 0;
    std::size_t hits = 0;
    std::size_t interactions = 0;
    std::size_t samples = 0;
    /// No sample batch had its midpoint in this epoch; alpha is the global mean.
    bool fallback = false;
};

struct alpha_profile {
    std::vector<alpha_epoch> epochs;
    std::size_t sample_batch_size = 0;
    std::size_t trials = 0;
    double d = 0;
    double global_alpha = 0;
    /// Hits the profile predicts for the pool under periodic batching, and
    /// the pool's true hit count.
    double predicted_hits = 0;
    double true_hits = 0;
    bool converged = false;

    std::size_t epoch_of(double t) const {
        if (epochs.empty())
            throw std::logic_error("alpha_profile: no epochs");
        const double t0 = epochs.front().span.begin;
        const double t1 = epochs.back().span.end;
        const double width = (t1 - t0) / static_cast<double>(epochs.size());
        if (!(width > 0) || t <= t0)
            return 0;
        return std::min(static_cast<std::size_t>((t - t0) / width), epochs.size() - 1);
    }

    double alpha_at(double t) const { return epochs[epoch_of(t)].alpha; }

    /// Profile with a single epoch holding a constant alpha.
    static alpha_profile constant(double alpha, time_interval span, std::size_t s = 0, double d = 0) {
        alpha_profile p;
        p.epochs.push_back({span, alpha, 0, 0, 0, false});
        p.sample_batch_size = s;
        p.d = d;
        p.global_alpha = alpha;
        return p;
    }
};

/// Alpha profiles estimated at several sample batch sizes.
struct alpha_family {
    std::vector<alpha_profile> profiles;

    const alpha_profile& nearest(std::size_t s) const {
        if (profiles.empty())
            throw std::logic_error("alpha_family: empty");
        const alpha_profile* best = &profiles.front();
        auto dist = [s](const alpha_profile& p) {
            return p.sample_batch_size > s ? p.sample_batch_size - s : s - p.sample_batch_size;
        };
        for (const auto& p : profiles)
            if (dist(p) < dist(*best))
                best = &p;
        return *best;
    }
};

struct alpha_options {
    std::size_t epochs = 50;
    std::size_t min_trials = 3;
    std::size_t max_trials = 200;
    double tolerance = 0.05;
    std::uint64_t seed = 1;
};

namespace detail {

/// Extent of every window of `s` consecutive segments of a sorted set.
inline std::vector<time_interval> window_extents(std::span<const trajectory_segment> q, std::size_t s) {
    std::vector<time_interval> out;
    if (s == 0 || q.size() < s)
        return out;
    out.reserve(q.size() - s + 1);
    std::deque<std::size_t> maxq;
    for (std::size_t i = 0; i < q.size(); ++i) {
        while (!maxq.empty() && q[maxq.back()].end.t <= q[i].end.t)
            maxq.pop_back();
        maxq.push_back(i);
        if (maxq.front() + s <= i)
            maxq.pop_front();
        if (i + 1 >= s) {
            const std::size_t k = i + 1 - s;
            out.push_back({q[k].start.t, q[maxq.front()].end.t});
        }
    }
    return out;
}

inline std::vector<alpha_epoch> make_epochs(time_interval span, std::size_t count) {
    std::vector<alpha_epoch> out(count);
    const double width = span.length() / static_cast<double>(count);
    for (std::size_t e = 0; e < count; ++e) {
        out[e].span.begin = span.begin + static_cast<double>(e) * width;
        out[e].span.end = e + 1 == count ? span.end : span.begin + static_cast<double>(e + 1) * width;
    }
    return out;
}

inline double predicted_hits(const alpha_profile& p, const batch_plan& plan) {
    double total = 0;
    for (const auto& b : plan.batches)
        total += p.alpha_at(b.extent.midpoint()) * static_cast<double>(b.interactions);
    return total;
}

} // namespace detail

/// Estimates per-epoch hit fractions by running sample batches of `s`
/// consecutive pool segments whose midpoints fall in each epoch. Trials are
/// added until the hits predicted for the whole pool (periodic batching of
/// size s) come within `tolerance` of the pool's true hit count, or the
/// trial cap is reached (converged = false).
inline alpha_profile estimate_alpha(const segment_store& store, const temporal_index& index,
                                    const segment_store& pool, std::size_t s, double d,
                                    const alpha_options& opt, worker_pool& workers) {
    if (s == 0)
        throw std::domain_error("estimate_alpha: sample batch size must be positive");
    if (opt.epochs == 0)
        throw std::domain_error("estimate_alpha: need at least one epoch");
    if (pool.empty())
        throw std::domain_error("estimate_alpha: empty query pool");
    s = std::min(s, pool.size());

    alpha_profile prof;
    prof.sample_batch_size = s;
    prof.d = d;
    prof.epochs = detail::make_epochs(store.extent(), opt.epochs);

    const auto windows = detail::window_extents(pool.segments(), s);
    std::vector<std::vector<std::size_t>> by_epoch(opt.epochs);
    for (std::size_t k = 0; k < windows.size(); ++k)
        by_epoch[prof.epoch_of(windows[k].midpoint())].push_back(k);

    const batch_plan plan = periodic(pool.segments(), index, s);
    prof.true_hits = static_cast<double>(run_search(store, index, pool, plan, d, workers).stats.hits);

    std::mt19937_64 rng(opt.seed);
    const auto q = pool.segments();
    for (std::size_t trial = 1; trial <= opt.max_trials; ++trial) {
        for (std::size_t e = 0; e < opt.epochs; ++e) {
            const auto& starts = by_epoch[e];
            if (starts.empty())
                continue;
            const std::size_t k = starts[std::uniform_int_distribution<std::size_t>(0, starts.size() - 1)(rng)];
            auto& ep = prof.epochs[e];
            ++ep.samples;
            const auto range = index.candidate_range(windows[k]);
            if (!range)
                continue;
            const auto res = execute_batch(store, q.subspan(k, s), *range, d, workers);
            ep.hits += res.stats.hits;
            ep.interactions += res.stats.interactions_computed;
        }

        std::size_t hits = 0;
        std::size_t ints = 0;
        for (const auto& ep : prof.epochs) {
            hits += ep.hits;
            ints += ep.interactions;
        }
        prof.global_alpha = ints == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(ints);
        for (auto& ep : prof.epochs) {
            ep.fallback = ep.interactions == 0;
            ep.alpha = ep.fallback ? prof.global_alpha
                                   : static_cast<double>(ep.hits) / static_cast<double>(ep.interactions);
        }
        prof.trials = trial;
        prof.predicted_hits = detail::predicted_hits(prof, plan);
        const double err = std::abs(prof.predicted_hits - prof.true_hits);
        if (trial >= opt.min_trials && err <= opt.tolerance * prof.true_hits) {
            prof.converged = true;
            break;
        }
    }
    return prof;
}

inline alpha_family estimate_alpha_family(const segment_store& store, const temporal_index& index,
                                          const segment_store& pool, std::span<const std::size_t> sizes,
                                          double d, const alpha_options& opt, worker_pool& workers) {
    alpha_family fam;
    for (std::size_t s : sizes)
        fam.profiles.push_back(estimate_alpha(store, index, pool, s, d, opt, workers));
    return fam;
}

// ---------------------------------------------------------------------------
// Interaction mix

struct interaction_mix {
    double alpha = 0;
    double beta = 0;
    double gamma = 0;
    /// alpha + beta exceeded 1; gamma was clamped to 0 and alpha reduced.
    bool clamped = false;
};

/// Exact fraction of (query, candidate) pairs that are temporal misses.
inline double temporal_miss_fraction(std::span<const trajectory_segment> batch, const ordinal_range& range,
                                     const segment_store& store) {
    std::size_t misses = 0;
    for (std::size_t g = range.first; g <= range.last; ++g)
        for (const auto& q : batch)
            misses += temporally_overlap(store[g], q) ? 0 : 1;
    return static_cast<double>(misses) / static_cast<double>(batch.size() * range.size());
}

/// Exact beta; alpha from the epoch holding the batch midpoint; gamma the rest.
inline interaction_mix compute_mix(std::span<const trajectory_segment> batch, const ordinal_range& range,
                                   const segment_store& store, const alpha_profile& profile) {
    if (batch.empty())
        throw std::domain_error("compute_mix: empty batch");
    time_interval ext = extent_of(batch.front());
    for (const auto& q : batch)
        ext = hull(ext, extent_of(q));
    interaction_mix m;
    m.beta = temporal_miss_fraction(batch, range, store);
    m.alpha = profile.alpha_at(ext.midpoint());
    m.gamma = 1.0 - m.alpha - m.beta;
    if (m.gamma < 0) {
        m.clamped = true;
        m.gamma = 0;
        m.alpha = 1.0 - m.beta;
    }
    return m;
}

// ---------------------------------------------------------------------------
// Benchmark surfaces

/// Seconds on a (queries, candidates) grid with bilinear interpolation,
/// clamped to the grid edges.
struct surface {
    std::vector<double> q_axis;
    std::vector<double> c_axis;
    /// Row-major: seconds[iq * c_axis.size() + ic].
    std::vector<double> seconds;

    double& cell(std::size_t iq, std::size_t ic) { return seconds[iq * c_axis.size() + ic]; }
    double cell(std::size_t iq, std::size_t ic) const { return seconds[iq * c_axis.size() + ic]; }

    static surface zeros(std::vector<double> q, std::vector<double> c) {
        surface s{std::move(q), std::move(c), {}};
        s.seconds.assign(s.q_axis.size() * s.c_axis.size(), 0.0);
        return s;
    }

    void validate() const {
        auto increasing = [](const std::vector<double>& v) {
            return !v.empty() && std::adjacent_find(v.begin(), v.end(), std::greater_equal<>()) == v.end();
        };
        if (!increasing(q_axis) || !increasing(c_axis))
            throw std::domain_error("surface: axes must be non-empty and strictly increasing");
        if (seconds.size() != q_axis.size() * c_axis.size())
            throw std::domain_error("surface: grid size does not match axes");
        for (double v : seconds)
            if (!(v >= 0) || !std::isfinite(v))
                throw std::domain_error("surface: times must be finite and non-negative");
    }

    /// Value at q queries and c candidates.
    double at_qc(double q, double c) const {
        const auto [iq0, iq1, wq] = locate(q_axis, q);
        const auto [ic0, ic1, wc] = locate(c_axis, c);
        const double top = (1 - wc) * cell(iq0, ic0) + wc * cell(iq0, ic1);
        const double bot = (1 - wc) * cell(iq1, ic0) + wc * cell(iq1, ic1);
        return (1 - wq) * top + wq * bot;
    }

    /// Value for i interactions over c candidates (q = i / c).
    double operator()(double interactions, double c) const {
        return at_qc(c > 0 ? interactions / c : 0.0, c);
    }

    bool inside(double q, double c) const {
        return q >= q_axis.front() && q <= q_axis.back() && c >= c_axis.front() && c <= c_axis.back();
    }

private:
    struct bracket {
        std::size_t lo, hi;
        double w;
    };
    static bracket locate(const std::vector<double>& axis, double x) {
        if (axis.size() == 1 || x <= axis.front())
            return {0, 0, 0.0};
        if (x >= axis.back())
            return {axis.size() - 1, axis.size() - 1, 0.0};
        const auto it = std::upper_bound(axis.begin(), axis.end(), x);
        const std::size_t hi = static_cast<std::size_t>(it - axis.begin());
        const std::size_t lo = hi - 1;
        return {lo, hi, (x - axis[lo]) / (axis[hi] - axis[lo])};
    }
};

struct bench_surfaces {
    surface hit;           // all interactions temporal and spatial hits
    surface temporal_miss; // all interactions temporal misses
    surface spatial_miss;  // all temporal hits, spatial misses
    surface overhead;      // no-op launch
    std::vector<std::string> flags;

    /// Scales every surface by k.
    bench_surfaces scaled(double k) const {
        bench_surfaces out = *this;
        for (surface* s : {&out.hit, &out.temporal_miss, &out.spatial_miss, &out.overhead})
            for (double& v : s->seconds)
                v *= k;
        return out;
    }

    void validate() const {
        for (const surface* s : {&hit, &temporal_miss, &spatial_miss, &overhead})
            s->validate();
    }
};

/// Calibration grid. Query counts include 0 so that the fractional query
/// counts alpha*q < 1 interpolate towards the launch cost.
struct grid_spec {
    std::vector<double> q_values{0, 1, 5, 10, 20, 40, 60, 100, 150, 200, 300};
    std::vector<double> c_values;
    std::size_t repetitions = 5;
    std::size_t max_remeasure = 2;
    /// (max - min) / median of the repetitions above this flags a point.
    double noise_threshold = 0.5;
    /// A single measurement repeats the kernel until at least this long.
    double min_sample_seconds = 2e-5;
    double d = 1.0;
};

/// `count` log-spaced candidate counts over [c_min, c_max], deduplicated.
inline std::vector<double> log_spaced(double c_min, double c_max, std::size_t count) {
    if (!(c_min >= 1) || c_max < c_min || count == 0)
        throw std::domain_error("log_spaced: need 1 <= c_min <= c_max and count > 0");
    std::vector<double> out;
    for (std::size_t k = 0; k < count; ++k) {
        const double f = count == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(count - 1);
        const double v = std::round(c_min * std::pow(c_max / c_min, f));
        if (out.empty() || v > out.back())
            out.push_back(v);
    }
    return out;
}

inline grid_spec default_grid(std::size_t c_min, std::size_t c_max) {
    grid_spec g;
    g.c_values = log_spaced(static_cast<double>(std::max<std::size_t>(c_min, 1)),
                            static_cast<double>(std::max(c_max, std::max<std::size_t>(c_min, 1))), 10);
    return g;
}

namespace detail {

/// Synthetic pure-case inputs: entries move along x over [0, 1]; queries
/// move along z and are arranged so every pair is a hit, a temporal miss or
/// a spatial miss. Relative velocity is non-zero, so hits and spatial misses
/// go through the full quadratic solve.
struct pure_case_data {
    segment_store entries;
    std::vector<trajectory_segment> hit_queries;
    std::vector<trajectory_segment> temporal_miss_queries;
    std::vector<trajectory_segment> spatial_miss_queries;

    pure_case_data(std::size_t c, std::size_t q, double d) {
        std::vector<trajectory_segment> e;
        e.reserve(c);
        for (std::size_t i = 0; i < c; ++i)
            e.push_back({i, 0, {0, 0, 0, 0}, {0.25 * d, 0, 0, 1}});
        entries = segment_store(std::move(e));
        const double near = 0.1 * d;
        for (std::size_t j = 0; j < q; ++j) {
            const trajectory_id id = c + j;
            hit_queries.push_back({id, 0, {0, near, 0, 0}, {0, near, 0.25 * d, 1}});
            temporal_miss_queries.push_back({id, 0, {0, near, 0, 2}, {0, near, 0.25 * d, 3}});
            spatial_miss_queries.push_back({id, 0, {0, 1000 * d, 0, 0}, {0, 1000 * d, 0.25 * d, 1}});
        }
    }
};

/// Seconds per call of `fn`, repeating it until one sample lasts at least
/// `min_seconds`.
template <class Fn>
double timed_sample(Fn&& fn, double min_seconds) {
    std::size_t reps = 1;
    for (;;) {
        stopwatch w;
        for (std::size_t r = 0; r < reps; ++r)
            fn();
        const double t = w.seconds();
        if (t >= min_seconds || reps >= (1u << 20))
            return t / static_cast<double>(reps);
        reps *= 2;
    }
}

inline double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Median of `spec.repetitions` samples; re-measured while the spread
/// exceeds the noise threshold.
template <class Fn>
double measure_point(Fn&& fn, const grid_spec& spec, bool& noisy) {
    double med = 0;
    for (std::size_t attempt = 0; attempt <= spec.max_remeasure; ++attempt) {
        std::vector<double> samples;
        for (std::size_t r = 0; r < std::max<std::size_t>(spec.repetitions, 1); ++r)
            samples.push_back(timed_sample(fn, spec.min_sample_seconds));
        med = median_of(samples);
        const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
        noisy = med > 0 && (*hi - *lo) / med > spec.noise_threshold;
        if (!noisy)
            break;
    }
    return med;
}

} // namespace detail

/// Measures the four pure-case surfaces on the grid. The overhead surface is
/// then lowered to the pointwise minimum of all four, since every kernel run
/// includes one launch.
inline bench_surfaces calibrate_surfaces(const grid_spec& spec, worker_pool& workers) {
    if (spec.q_values.empty() || spec.c_values.empty())
        throw std::domain_error("calibrate_surfaces: empty grid");
    bench_surfaces out;
    out.hit = surface::zeros(spec.q_values, spec.c_values);
    out.temporal_miss = out.hit;
    out.spatial_miss = out.hit;
    out.overhead = out.hit;
    out.hit.validate();

    const auto c_max = static_cast<std::size_t>(spec.c_values.back());
    const auto q_max = static_cast<std::size_t>(spec.q_values.back());
    const detail::pure_case_data data(c_max, q_max, spec.d);

    for (std::size_t iq = 0; iq < spec.q_values.size(); ++iq) {
        const auto q = static_cast<std::size_t>(spec.q_values[iq]);
        for (std::size_t ic = 0; ic < spec.c_values.size(); ++ic) {
            const auto c = static_cast<std::size_t>(spec.c_values[ic]);
            const ordinal_range range{0, c - 1};
            auto run = [&](const std::vector<trajectory_segment>& queries, surface& target, const char* name) {
                const std::span<const trajectory_segment> batch(queries.data(), q);
                bool noisy = false;
                target.cell(iq, ic) = detail::measure_point(
                    [&] { (void)execute_batch(data.entries, batch, range, spec.d, workers); }, spec, noisy);
                if (noisy)
                    out.flags.push_back(std::string(name) + " noisy at q=" + std::to_string(q) +
                                        " c=" + std::to_string(c));
            };
            run(data.hit_queries, out.hit, "hit");
            run(data.temporal_miss_queries, out.temporal_miss, "temporal_miss");
            run(data.spatial_miss_queries, out.spatial_miss, "spatial_miss");

            bool noisy = false;
            double theta = detail::measure_point([&] { (void)execute_noop(c, workers); }, spec, noisy);
            theta = std::min({theta, out.hit.cell(iq, ic), out.temporal_miss.cell(iq, ic),
                              out.spatial_miss.cell(iq, ic)});
            out.overhead.cell(iq, ic) = theta;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Host-side model

struct power_law_fit {
    double a = 0;
    double b = 0;
    double c = 0;
    /// Root-mean-square residual.
    double rms = 0;
    double r2 = 0;
    /// The power term explains essentially none of the data (e.g. constant
    /// samples); coefficients are not meaningful.
    bool pathological = false;
};

namespace detail {

struct linear_fit {
    double a = 0;
    double b = 0;
    double sse = std::numeric_limits<double>::infinity();
};

inline linear_fit fit_for_exponent(std::span<const std::pair<double, double>> samples, double c) {
    const double n = static_cast<double>(samples.size());
    double mx = 0, my = 0;
    for (const auto& [s, t] : samples) {
        mx += std::pow(s, c);
        my += t;
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (const auto& [s, t] : samples) {
        const double dx = std::pow(s, c) - mx;
        sxx += dx * dx;
        sxy += dx * (t - my);
    }
    linear_fit f;
    if (!(sxx > 0))
        return f;
    f.b = sxy / sxx;
    f.a = my - f.b * mx;
    f.sse = 0;
    for (const auto& [s, t] : samples) {
        const double r = t - f.a - f.b * std::pow(s, c);
        f.sse += r * r;
    }
    return f;
}

} // namespace detail

/// Least-squares fit of t = a + b * s^c. The exponent is scanned on a grid
/// over [c_lo, c_hi] and refined by golden-section search; a and b solve the
/// linear problem for each trial exponent.
inline power_law_fit fit_power_law(std::span<const std::pair<double, double>> samples, double c_lo = -4.0,
                                   double c_hi = 2.0) {
    if (samples.size() < 4)
        throw std::domain_error("fit_power_law: need at least 4 samples");
    std::vector<double> xs;
    for (const auto& [s, t] : samples) {
        if (!(s > 0) || !std::isfinite(s) || !std::isfinite(t))
            throw std::domain_error("fit_power_law: samples need finite t and positive s");
        xs.push_back(s);
    }
    std::sort(xs.begin(), xs.end());
    if (std::adjacent_find(xs.begin(), xs.end()) != xs.end())
        throw std::domain_error("fit_power_law: s values must be distinct");

    constexpr double step = 0.01;
    double best_c = c_lo;
    double best_sse = std::numeric_limits<double>::infinity();
    for (double c = c_lo; c <= c_hi + 1e-12; c += step) {
        if (std::abs(c) < step / 2)
            continue; // s^0 is constant
        const auto f = detail::fit_for_exponent(samples, c);
        if (f.sse < best_sse) {
            best_sse = f.sse;
            best_c = c;
        }
    }

    double lo = best_c - step;
    double hi = best_c + step;
    const double phi = (std::sqrt(5.0) - 1) / 2;
    double x1 = hi - phi * (hi - lo);
    double x2 = lo + phi * (hi - lo);
    double f1 = detail::fit_for_exponent(samples, x1).sse;
    double f2 = detail::fit_for_exponent(samples, x2).sse;
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = detail::fit_for_exponent(samples, x1).sse;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = detail::fit_for_exponent(samples, x2).sse;
        }
    }
    const double refined = 0.5 * (lo + hi);
    const auto rf = detail::fit_for_exponent(samples, refined);
    const double c = rf.sse <= best_sse ? refined : best_c;
    const auto f = detail::fit_for_exponent(samples, c);

    power_law_fit out{f.a, f.b, c, 0, 0, false};
    const double n = static_cast<double>(samples.size());
    double mean = 0;
    double scale = 0;
    for (const auto& [s, t] : samples) {
        mean += t / n;
        scale = std::max(scale, std::abs(t));
    }
    double sst = 0;
    double xmin = std::numeric_limits<double>::infinity();
    double xmax = -xmin;
    for (const auto& [s, t] : samples) {
        sst += (t - mean) * (t - mean);
        xmin = std::min(xmin, std::pow(s, c));
        xmax = std::max(xmax, std::pow(s, c));
    }
    out.rms = std::isfinite(f.sse) ? std::sqrt(f.sse / n) : std::numeric_limits<double>::infinity();
    out.r2 = sst > 0 ? 1.0 - f.sse / sst : 0.0;
    out.pathological = !std::isfinite(f.sse) || std::abs(out.b) * (xmax - xmin) <= 1e-9 * std::max(scale, 1e-300);
    return out;
}

/// Host time: a + b * s^c for kernel launches and query staging, plus k
/// seconds per byte of result transfer.
struct cpu_overhead_model {
    double a = 0;
    double b = 0;
    double c = -1;
    double k = 0;
    double item_bytes = static_cast<double>(sizeof(result_item));
    /// Query-set size the model was calibrated at.
    std::size_t query_count = 0;

    double overhead(double s) const { return a + b * std::pow(s, c); }
    double transfer(double sigma) const { return k * sigma; }
    double operator()(double s, double sigma) const { return overhead(s) + transfer(sigma); }

    bool valid() const { return b > 0 && c < 0 && k >= 0; }
};

/// Host models calibrated at several query-set sizes.
struct cpu_model_family {
    std::vector<cpu_overhead_model> models;

    const cpu_overhead_model& nearest(std::size_t query_count) const {
        if (models.empty())
            throw std::logic_error("cpu_model_family: empty");
        const cpu_overhead_model* best = &models.front();
        auto dist = [query_count](const cpu_overhead_model& m) {
            return m.query_count > query_count ? m.query_count - query_count : query_count - m.query_count;
        };
        for (const auto& m : models)
            if (dist(m) < dist(*best))
                best = &m;
        return *best;
    }
};

/// Seconds per byte to move `items` result records into a result set.
inline double measure_transfer_cost(std::size_t items = 1u << 20, std::size_t reps = 5) {
    result_set src(items, result_item{1, 2, 3, 4, {0.5, 0.75}});
    std::vector<double> samples;
    for (std::size_t r = 0; r < reps; ++r) {
        result_set dst;
        stopwatch w;
        dst.insert(dst.end(), src.begin(), src.end());
        samples.push_back(w.seconds());
        if (dst.size() != items)
            throw std::logic_error("transfer benchmark lost items");
    }
    return detail::median_of(samples) / static_cast<double>(items * sizeof(result_item));
}

/// Fits the host power law from periodic searches run at a distance small
/// enough that result sets are negligible, so host time is launch and
/// staging overhead.
inline cpu_overhead_model calibrate_cpu_model(const segment_store& store, const temporal_index& index,
                                              const segment_store& queries, std::span<const std::size_t> sizes,
                                              std::size_t reps, worker_pool& workers,
                                              std::vector<std::pair<double, double>>* samples_out = nullptr) {
    constexpr double tiny_d = 1e-9;
    std::vector<std::pair<double, double>> samples;
    for (std::size_t s : sizes) {
        const auto plan = periodic(queries.segments(), index, s);
        std::vector<double> host;
        for (std::size_t r = 0; r < std::max<std::size_t>(reps, 1); ++r)
            host.push_back(run_search(store, index, queries, plan, tiny_d, workers).stats.host_seconds());
        samples.emplace_back(static_cast<double>(s), detail::median_of(host));
    }
    const auto fit = fit_power_law(samples, -4.0, -0.01);
    if (samples_out)
        *samples_out = samples;
    cpu_overhead_model m;
    m.a = fit.a;
    m.b = fit.b;
    m.c = fit.c;
    m.k = measure_transfer_cost();
    m.query_count = queries.size();
    return m;
}

// ---------------------------------------------------------------------------
// Prediction

struct prediction {
    std::size_t s = 0;
    double t_cpu = 0;
    double t_gpu = 0;
    double t_total = 0;
    /// Predicted result bytes.
    double sigma = 0;
    double predicted_hits = 0;
    std::size_t batches = 0;
    std::size_t interactions = 0;
    /// Batches whose modeled kernel time was negative and clamped to 0.
    std::size_t clamped_batches = 0;
    /// Batches whose mix needed gamma clamping.
    std::size_t clamped_mixes = 0;
    std::vector<std::string> warnings;
};

/// Kernel time of one batch from its interaction count, candidate count and mix.
inline double batch_kernel_time(const bench_surfaces& sf, double i, double c, const interaction_mix& m) {
    return sf.hit(m.alpha * i, c) + sf.temporal_miss(m.beta * i, c) + sf.spatial_miss(m.gamma * i, c) -
           2.0 * sf.overhead(i, c);
}

/// Predicted response time of periodic batching with size `s`.
inline prediction predict(std::size_t s, const segment_store& queries, const segment_store& store,
                          const temporal_index& index, const bench_surfaces& surfaces,
                          const alpha_profile& alpha, const cpu_overhead_model& cpu, double d) {
    if (s == 0)
        throw std::domain_error("predict: batch size must be positive");
    prediction p;
    p.s = s;
    if (alpha.d > 0 && std::abs(alpha.d - d) > 1e-12 * std::max(1.0, d))
        p.warnings.push_back("alpha profile estimated at d=" + std::to_string(alpha.d));
    if (static_cast<double>(s) > surfaces.hit.q_axis.back() || static_cast<double>(s) < surfaces.hit.q_axis.front())
        p.warnings.push_back("batch size outside the calibrated query range; surfaces clamped");

    const auto plan = periodic(queries.segments(), index, s);
    const auto q = queries.segments();
    bool outside = false;
    double hits = 0;
    for (const auto& b : plan.batches) {
        ++p.batches;
        const auto range = index.candidate_range(b.extent);
        if (!range)
            continue;
        const double i = static_cast<double>(b.interactions);
        const double c = static_cast<double>(range->size());
        p.interactions += b.interactions;
        const auto mix = compute_mix(q.subspan(b.lo, b.size()), *range, store, alpha);
        p.clamped_mixes += mix.clamped ? 1 : 0;
        outside = outside || !surfaces.hit.inside(static_cast<double>(b.size()), c);
        double t = batch_kernel_time(surfaces, i, c, mix);
        if (t < 0) {
            t = 0;
            ++p.clamped_batches;
        }
        p.t_gpu += t;
        hits += mix.alpha * i;
    }
    if (outside)
        p.warnings.push_back("some batches fall outside the calibrated grid; surfaces clamped");
    if (p.clamped_batches > 0)
        p.warnings.push_back(std::to_string(p.clamped_batches) + " negative kernel times clamped to 0");
    p.predicted_hits = hits;
    p.sigma = cpu.item_bytes * hits;
    p.t_cpu = cpu(static_cast<double>(s), p.sigma);
    p.t_total = p.t_cpu + p.t_gpu;
    return p;
}

inline prediction predict(std::size_t s, const segment_store& queries, const segment_store& store,
                          const temporal_index& index, const bench_surfaces& surfaces, const alpha_family& alpha,
                          const cpu_overhead_model& cpu, double d) {
    return predict(s, queries, store, index, surfaces, alpha.nearest(s), cpu, d);
}

/// Index of the smallest t_total; ties go to the smaller batch size.
inline std::size_t select_minimum(std::span<const prediction> preds) {
    if (preds.empty())
        throw std::domain_error("recommend_batch_size: no candidates");
    std::size_t best = 0;
    for (std::size_t k = 1; k < preds.size(); ++k) {
        const auto& p = preds[k];
        const auto& b = preds[best];
        if (p.t_total < b.t_total || (p.t_total == b.t_total && p.s < b.s))
            best = k;
    }
    return best;
}

struct recommendation {
    std::size_t s = 0;
    std::vector<prediction> predictions;
};

template <class Alpha>
recommendation recommend_batch_size(std::span<const std::size_t> candidates, const segment_store& queries,
                                    const segment_store& store, const temporal_index& index,
                                    const bench_surfaces& surfaces, const Alpha& alpha,
                                    const cpu_overhead_model& cpu, double d) {
    if (candidates.empty())
        throw std::domain_error("recommend_batch_size: no candidates");
    recommendation r;
    for (std::size_t s : candidates)
        r.predictions.push_back(predict(s, queries, store, index, surfaces, alpha, cpu, d));
    r.s = r.predictions[select_minimum(r.predictions)].s;
    return r;
}

} // namespace trajseek

#endif // TRAJSEEK_PERFMODEL_HPP

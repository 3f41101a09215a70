#ifndef TRAJSEEK_ENGINE_HPP
#define TRAJSEEK_ENGINE_HPP

#include "trajseek/core.hpp"
#include "trajseek/index.hpp"
#include "trajseek/planner.hpp"
#include "trajseek/worker_pool.hpp"

#include <chrono>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace trajseek {

class stopwatch {
public:
    using clock = std::chrono::steady_clock;

    stopwatch() : start_(clock::now()) {}
    void restart() { start_ = clock::now(); }
    double seconds() const { return std::chrono::duration<double>(clock::now() - start_).count(); }

private:
    clock::time_point start_;
};

struct batch_record {
    std::size_t batch = 0;
    std::size_t queries = 0;
    std::size_t candidates = 0;
    std::size_t interactions = 0;
    std::size_t hits = 0;
    /// Time spent inside the data-parallel kernel.
    double kernel_seconds = 0;
};

/// Interaction outcome counters. hits + temporal_misses + spatial_misses
/// always equals interactions_computed.
struct search_stats {
    std::size_t interactions_computed = 0;
    std::size_t temporal_misses = 0;
    std::size_t spatial_misses = 0;
    std::size_t hits = 0;
    std::vector<batch_record> per_batch;
    /// Sum of per-batch kernel times.
    double kernel_seconds = 0;
    /// Wall time of the whole search including host-side batch handling.
    double total_seconds = 0;

    double host_seconds() const { return total_seconds > kernel_seconds ? total_seconds - kernel_seconds : 0; }

    double wasteful_fraction() const {
        return interactions_computed == 0
                   ? 0.0
                   : static_cast<double>(temporal_misses) / static_cast<double>(interactions_computed);
    }

    void accumulate(const search_stats& o) {
        interactions_computed += o.interactions_computed;
        temporal_misses += o.temporal_misses;
        spatial_misses += o.spatial_misses;
        hits += o.hits;
        kernel_seconds += o.kernel_seconds;
    }
};

struct search_outcome {
    result_set results;
    search_stats stats;
};

namespace detail {

struct kernel_chunk {
    result_set results;
    std::size_t temporal_misses = 0;
    std::size_t spatial_misses = 0;
    std::size_t hits = 0;
};

/// One logical worker per candidate entry; each scans every batch query in
/// order. Temporal misses exit before any spatial arithmetic.
inline void search_candidates(const segment_store& store, std::span<const trajectory_segment> batch,
                              std::size_t first, std::size_t last, double d, kernel_chunk& out) {
    for (std::size_t g = first; g < last; ++g) {
        const trajectory_segment& entry = store[g];
        for (const trajectory_segment& query : batch) {
            if (!temporally_overlap(entry, query)) {
                ++out.temporal_misses;
                continue;
            }
            const auto clipped = temporal_intersection(entry, query);
            const auto interval = threshold_interval(clipped->first, clipped->second, d);
            if (!interval) {
                ++out.spatial_misses;
                continue;
            }
            ++out.hits;
            out.results.push_back({query.traj_id, query.seg_id, entry.traj_id, entry.seg_id, *interval});
        }
    }
}

} // namespace detail

/// Compares every query of `batch` with every entry in `range`.
///
/// Each pool chunk owns a contiguous candidate sub-range and reserves its own
/// output slot; slots are concatenated in chunk order, so results come out
/// candidate-major whatever the worker count.
inline search_outcome execute_batch(const segment_store& store, std::span<const trajectory_segment> batch,
                                    const ordinal_range& range, double d, worker_pool& pool) {
    if (!(d > 0))
        throw std::domain_error("execute_batch: d must be positive");
    if (range.last < range.first || range.last >= store.size())
        throw std::domain_error("execute_batch: candidate range outside the store");

    const std::size_t candidates = range.size();
    std::vector<detail::kernel_chunk> slots(pool.chunks_for(candidates));
    stopwatch watch;
    pool.parallel_for(candidates, [&](std::size_t b, std::size_t e, std::size_t chunk) {
        detail::search_candidates(store, batch, range.first + b, range.first + e, d, slots[chunk]);
    });

    search_outcome out;
    std::size_t total = 0;
    for (const auto& s : slots)
        total += s.results.size();
    out.results.reserve(total);
    for (auto& s : slots) {
        out.results.insert(out.results.end(), s.results.begin(), s.results.end());
        out.stats.temporal_misses += s.temporal_misses;
        out.stats.spatial_misses += s.spatial_misses;
        out.stats.hits += s.hits;
    }
    out.stats.kernel_seconds = watch.seconds();
    out.stats.interactions_computed = batch.size() * candidates;
    return out;
}

/// Dispatches one worker per candidate that does no work. Measures the fixed
/// cost of a kernel invocation.
inline double execute_noop(std::size_t candidates, worker_pool& pool) {
    std::vector<detail::kernel_chunk> slots(pool.chunks_for(candidates));
    stopwatch watch;
    pool.parallel_for(candidates, [&](std::size_t, std::size_t, std::size_t chunk) { slots[chunk].hits = 0; });
    result_set sink;
    for (auto& s : slots)
        sink.insert(sink.end(), s.results.begin(), s.results.end());
    return watch.seconds();
}

/// Runs every batch of `plan` in order against the indexed store.
inline search_outcome run_search(const segment_store& store, const temporal_index& index,
                                 const segment_store& queries, const batch_plan& plan, double d,
                                 worker_pool& pool) {
    if (!is_valid_plan(plan, queries.size()))
        throw std::domain_error("run_search: plan does not partition the query set");
    stopwatch total;
    search_outcome out;
    out.stats.per_batch.reserve(plan.size());
    std::vector<trajectory_segment> staged;

    for (std::size_t j = 0; j < plan.size(); ++j) {
        const auto& qb = plan.batches[j];
        const auto all = queries.segments();
        staged.assign(all.begin() + static_cast<std::ptrdiff_t>(qb.lo),
                      all.begin() + static_cast<std::ptrdiff_t>(qb.hi) + 1);
        time_interval ext = extent_of(staged.front());
        for (const auto& q : staged)
            ext = hull(ext, extent_of(q));

        batch_record rec{j, staged.size(), 0, 0, 0, 0};
        if (const auto range = index.candidate_range(ext)) {
            auto batch_out = execute_batch(store, staged, *range, d, pool);
            rec.candidates = range->size();
            rec.interactions = batch_out.stats.interactions_computed;
            rec.hits = batch_out.stats.hits;
            rec.kernel_seconds = batch_out.stats.kernel_seconds;
            out.stats.accumulate(batch_out.stats);
            out.results.insert(out.results.end(), batch_out.results.begin(), batch_out.results.end());
        }
        out.stats.per_batch.push_back(rec);
    }
    out.stats.total_seconds = total.seconds();
    return out;
}

} // namespace trajseek

#endif // TRAJSEEK_ENGINE_HPP

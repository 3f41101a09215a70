#ifndef TRAJSEEK_ORACLE_HPP
#define TRAJSEEK_ORACLE_HPP

// Reference implementations for tests and the `oracle` command. They share
// the segment geometry with the engine but nothing else: no index, no
// batching, no worker pool.

#include "trajseek/core.hpp"
#include "trajseek/index.hpp"
#include "trajseek/planner.hpp"

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>

namespace trajseek::oracle {

/// Query-major double loop over every (query, entry) pair.
inline result_set brute_force_search(std::span<const trajectory_segment> entries,
                                     std::span<const trajectory_segment> queries, double d) {
    if (!(d > 0))
        throw std::domain_error("brute_force_search: d must be positive");
    result_set out;
    for (const auto& q : queries) {
        for (const auto& e : entries) {
            const auto clipped = temporal_intersection(e, q);
            if (!clipped)
                continue;
            if (const auto iv = threshold_interval(clipped->first, clipped->second, d))
                out.push_back({q.traj_id, q.seg_id, e.traj_id, e.seg_id, *iv});
        }
    }
    return out;
}

/// Candidate range from a linear scan of every bin.
inline std::optional<ordinal_range> scan_candidate_range(const temporal_index& index, const time_interval& q) {
    std::size_t first = std::numeric_limits<std::size_t>::max();
    std::size_t last = 0;
    bool any = false;
    for (const auto& bin : index.bins()) {
        if (!bin.overlaps(q))
            continue;
        any = true;
        first = std::min(first, bin.first);
        last = std::max(last, bin.last);
    }
    if (!any)
        return std::nullopt;
    return ordinal_range{first, last};
}

/// Total interactions of a plan, recomputing each batch's extent and
/// candidate count from scratch.
inline std::size_t count_interactions_naive(const temporal_index& index,
                                            std::span<const trajectory_segment> queries, const batch_plan& plan) {
    std::size_t total = 0;
    for (const auto& b : plan.batches) {
        time_interval ext = extent_of(queries[b.lo]);
        for (std::size_t i = b.lo; i <= b.hi; ++i)
            ext = hull(ext, extent_of(queries[i]));
        if (const auto r = scan_candidate_range(index, ext))
            total += b.size() * r->size();
    }
    return total;
}

/// Ordinals of every entry whose extent overlaps `q`.
inline std::vector<std::size_t> overlapping_entries(std::span<const trajectory_segment> entries,
                                                    const time_interval& q) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < entries.size(); ++i)
        if (extent_of(entries[i]).overlaps(q))
            out.push_back(i);
    return out;
}

} // namespace trajseek::oracle

#endif // TRAJSEEK_ORACLE_HPP

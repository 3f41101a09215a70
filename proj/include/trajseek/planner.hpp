#ifndef TRAJSEEK_PLANNER_HPP
#define TRAJSEEK_PLANNER_HPP

#include "trajseek/core.hpp"
#include "trajseek/index.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace trajseek {

/// A contiguous run [lo, hi] of sorted query segments processed together.
struct query_batch {
    std::size_t lo = 0;
    std::size_t hi = 0;
    time_interval extent;
    std::size_t candidates = 0;
    std::size_t interactions = 0;

    std::size_t size() const { return hi - lo + 1; }
    friend bool operator==(const query_batch&, const query_batch&) = default;
};

struct plan_diagnostics {
    std::size_t merges = 0;
    /// SetSplit-MinMax only: batches that ended above `max` after phase 2.
    std::size_t oversize_batches = 0;
};

/// Ordered partition of the query set into contiguous batches.
struct batch_plan {
    std::vector<query_batch> batches;
    plan_diagnostics diagnostics;

    std::size_t size() const { return batches.size(); }

    std::size_t total_interactions() const {
        std::size_t n = 0;
        for (const auto& b : batches)
            n += b.interactions;
        return n;
    }

    std::size_t max_interactions() const {
        std::size_t n = 0;
        for (const auto& b : batches)
            n = std::max(n, b.interactions);
        return n;
    }

    std::size_t max_batch_size() const {
        std::size_t n = 0;
        for (const auto& b : batches)
            n = std::max(n, b.size());
        return n;
    }

    friend bool operator==(const batch_plan& a, const batch_plan& b) { return a.batches == b.batches; }
};

/// Checks the partition invariants: contiguous, ordered, covering [0, n).
inline bool is_valid_plan(const batch_plan& plan, std::size_t query_count) {
    if (query_count == 0)
        return plan.batches.empty();
    std::size_t next = 0;
    for (const auto& b : plan.batches) {
        if (b.lo != next || b.hi < b.lo)
            return false;
        if (b.interactions != b.size() * b.candidates)
            return false;
        next = b.hi + 1;
    }
    return next == query_count;
}

/// Builds and merges batches over one sorted query set, pricing each batch
/// by its candidate range in the index.
class batch_builder {
public:
    batch_builder(std::span<const trajectory_segment> queries, const temporal_index& index)
        : queries_(queries), index_(index) {}

    std::size_t query_count() const { return queries_.size(); }

    query_batch make(std::size_t lo, std::size_t hi) const {
        if (hi < lo || hi >= queries_.size())
            throw std::out_of_range("batch bounds outside the query set");
        time_interval ext = extent_of(queries_[lo]);
        for (std::size_t i = lo + 1; i <= hi; ++i)
            ext = hull(ext, extent_of(queries_[i]));
        return priced(lo, hi, ext);
    }

    query_batch merge(const query_batch& a, const query_batch& b) const {
        return priced(a.lo, b.hi, hull(a.extent, b.extent));
    }

    /// Interactions of the merged pair minus those of the two parts.
    std::int64_t merge_delta(const query_batch& a, const query_batch& b) const {
        return static_cast<std::int64_t>(merge(a, b).interactions) -
               static_cast<std::int64_t>(a.interactions + b.interactions);
    }

    std::vector<query_batch> singletons() const {
        std::vector<query_batch> out;
        out.reserve(queries_.size());
        for (std::size_t i = 0; i < queries_.size(); ++i)
            out.push_back(priced(i, i, extent_of(queries_[i])));
        return out;
    }

private:
    query_batch priced(std::size_t lo, std::size_t hi, const time_interval& ext) const {
        query_batch b{lo, hi, ext, candidate_count(index_, ext), 0};
        b.interactions = b.size() * b.candidates;
        return b;
    }

    std::span<const trajectory_segment> queries_;
    const temporal_index& index_;
};

/// |batch| x candidates of the batch's extent.
inline std::size_t num_ints(const query_batch& batch, const temporal_index& index) {
    return batch.size() * candidate_count(index, batch.extent);
}

/// Consecutive groups of `s` queries; the last group keeps the remainder.
inline batch_plan periodic(std::span<const trajectory_segment> queries, const temporal_index& index,
                           std::size_t s) {
    if (s == 0)
        throw std::domain_error("periodic: batch size must be positive");
    batch_builder builder(queries, index);
    batch_plan plan;
    for (std::size_t lo = 0; lo < queries.size(); lo += s)
        plan.batches.push_back(builder.make(lo, std::min(lo + s, queries.size()) - 1));
    return plan;
}

/// Selects how the SetSplit family searches for the cheapest adjacent merge.
///  - incremental: priority queue, only neighbours of a merge are re-priced.
///  - literal:     full rescan of all adjacent pairs after every merge.
/// Both pick the lowest-index pair among equal deltas and give identical plans.
enum class merge_search { incremental, literal };

namespace detail {

inline constexpr std::size_t no_limit = std::numeric_limits<std::size_t>::max();

/// Repeatedly merges the adjacent pair with the smallest interaction
/// increase, skipping merges larger than `max_size`, until `target` batches
/// remain or no legal merge is left.
inline std::vector<query_batch> cheapest_merges_literal(const batch_builder& builder,
                                                        std::vector<query_batch> b, std::size_t target,
                                                        std::size_t max_size, std::size_t& merges) {
    while (b.size() > target) {
        std::int64_t best_delta = std::numeric_limits<std::int64_t>::max();
        std::size_t best = b.size();
        for (std::size_t i = 0; i + 1 < b.size(); ++i) {
            if (b[i].size() + b[i + 1].size() > max_size)
                continue;
            const auto delta = builder.merge_delta(b[i], b[i + 1]);
            if (delta < best_delta) {
                best_delta = delta;
                best = i;
            }
        }
        if (best == b.size())
            break;
        b[best] = builder.merge(b[best], b[best + 1]);
        b.erase(b.begin() + static_cast<std::ptrdiff_t>(best) + 1);
        ++merges;
    }
    return b;
}

inline std::vector<query_batch> cheapest_merges_incremental(const batch_builder& builder,
                                                            std::vector<query_batch> b, std::size_t target,
                                                            std::size_t max_size, std::size_t& merges) {
    const std::size_t n = b.size();
    if (n <= target)
        return b;
    constexpr std::size_t none = std::numeric_limits<std::size_t>::max();

    // Nodes are addressed by their initial position; a live node's position
    // order equals its list order, which gives the lowest-index tie-break.
    std::vector<std::size_t> prev(n), next(n), version(n, 0);
    std::vector<bool> alive(n, true);
    for (std::size_t i = 0; i < n; ++i) {
        prev[i] = i == 0 ? none : i - 1;
        next[i] = i + 1 == n ? none : i + 1;
    }

    struct candidate {
        std::int64_t delta;
        std::size_t left;
        std::size_t right;
        std::size_t left_version;
        std::size_t right_version;
        bool operator>(const candidate& o) const {
            return std::tie(delta, left) > std::tie(o.delta, o.left);
        }
    };
    std::priority_queue<candidate, std::vector<candidate>, std::greater<>> heap;
    auto push = [&](std::size_t l) {
        if (l == none || next[l] == none)
            return;
        const std::size_t r = next[l];
        if (b[l].size() + b[r].size() > max_size)
            return;
        heap.push({builder.merge_delta(b[l], b[r]), l, r, version[l], version[r]});
    };
    for (std::size_t i = 0; i + 1 < n; ++i)
        push(i);

    std::size_t count = n;
    while (count > target && !heap.empty()) {
        const candidate c = heap.top();
        heap.pop();
        if (!alive[c.left] || !alive[c.right] || next[c.left] != c.right ||
            version[c.left] != c.left_version || version[c.right] != c.right_version)
            continue;
        b[c.left] = builder.merge(b[c.left], b[c.right]);
        ++version[c.left];
        alive[c.right] = false;
        next[c.left] = next[c.right];
        if (next[c.right] != none)
            prev[next[c.right]] = c.left;
        --count;
        ++merges;
        push(prev[c.left]);
        push(c.left);
    }

    std::vector<query_batch> out;
    out.reserve(count);
    for (std::size_t i = 0; i != none; i = next[i])
        out.push_back(b[i]);
    return out;
}

inline std::vector<query_batch> cheapest_merges(const batch_builder& builder, std::vector<query_batch> b,
                                                std::size_t target, std::size_t max_size, merge_search mode,
                                                std::size_t& merges) {
    if (mode == merge_search::literal)
        return cheapest_merges_literal(builder, std::move(b), target, max_size, merges);
    return cheapest_merges_incremental(builder, std::move(b), target, max_size, merges);
}

/// Merges adjacent batches whenever that adds no interactions, staying on
/// the grown batch after each merge.
inline std::vector<query_batch> free_merges(const batch_builder& builder, const std::vector<query_batch>& in,
                                            std::size_t& merges) {
    std::vector<query_batch> out;
    for (const auto& b : in) {
        if (!out.empty()) {
            auto merged = builder.merge(out.back(), b);
            if (merged.interactions == out.back().interactions + b.interactions) {
                out.back() = merged;
                ++merges;
                continue;
            }
        }
        out.push_back(b);
    }
    return out;
}

} // namespace detail

/// SetSplit-Fixed: greedy cheapest adjacent merges down to `num_batches`.
inline batch_plan setsplit_fixed(std::span<const trajectory_segment> queries, const temporal_index& index,
                                 std::size_t num_batches, merge_search mode = merge_search::incremental) {
    if (queries.empty())
        return {};
    if (num_batches == 0 || num_batches > queries.size())
        throw std::domain_error("setsplit_fixed: batch count must lie in [1, |Q|]");
    batch_builder builder(queries, index);
    batch_plan plan;
    plan.batches = detail::cheapest_merges(builder, builder.singletons(), num_batches, detail::no_limit, mode,
                                           plan.diagnostics.merges);
    return plan;
}

/// SetSplit-MinMax.
///
/// Phase 1 performs cheapest merges that keep batches within `max`, until
/// none is legal. Phase 2 absorbs every batch smaller than `min` into the
/// neighbour giving the smaller merged interaction count (right on ties).
/// Phase 2 may push a batch past `max`; such batches are counted in the
/// plan diagnostics.
inline batch_plan setsplit_minmax(std::span<const trajectory_segment> queries, const temporal_index& index,
                                  std::size_t min, std::size_t max,
                                  merge_search mode = merge_search::incremental) {
    if (queries.empty())
        return {};
    if (min == 0 || min > max || max > queries.size())
        throw std::domain_error("setsplit_minmax: require 1 <= min <= max <= |Q|");
    batch_builder builder(queries, index);
    batch_plan plan;
    auto phase1 = detail::cheapest_merges(builder, builder.singletons(), 1, max, mode, plan.diagnostics.merges);

    constexpr auto infinite = std::numeric_limits<std::size_t>::max();
    std::vector<query_batch> out;
    std::size_t k = 0;
    while (k < phase1.size()) {
        query_batch cur = phase1[k++];
        while (cur.size() < min) {
            const bool has_left = !out.empty();
            const bool has_right = k < phase1.size();
            if (!has_left && !has_right)
                break;
            const std::size_t left = has_left ? builder.merge(out.back(), cur).interactions : infinite;
            const std::size_t right = has_right ? builder.merge(cur, phase1[k]).interactions : infinite;
            if (left < right) {
                cur = builder.merge(out.back(), cur);
                out.pop_back();
            } else {
                cur = builder.merge(cur, phase1[k++]);
            }
            ++plan.diagnostics.merges;
        }
        out.push_back(cur);
    }
    for (const auto& b : out)
        if (b.size() > max)
            ++plan.diagnostics.oversize_batches;
    plan.batches = std::move(out);
    return plan;
}

/// SetSplit-Max: SetSplit-MinMax with min = 1.
inline batch_plan setsplit_max(std::span<const trajectory_segment> queries, const temporal_index& index,
                               std::size_t max, merge_search mode = merge_search::incremental) {
    return setsplit_minmax(queries, index, 1, max, mode);
}

/// GreedySetSplit-Min: free merges, then one forward pass growing each
/// batch smaller than `bound` into its successor. The last batch may stay
/// below `bound`.
inline batch_plan greedy_min(std::span<const trajectory_segment> queries, const temporal_index& index,
                             std::size_t bound) {
    if (bound == 0)
        throw std::domain_error("greedy_min: bound must be positive");
    if (queries.empty())
        return {};
    batch_builder builder(queries, index);
    batch_plan plan;
    const auto phase1 = detail::free_merges(builder, builder.singletons(), plan.diagnostics.merges);
    query_batch cur = phase1.front();
    for (std::size_t k = 1; k < phase1.size(); ++k) {
        if (cur.size() < bound) {
            cur = builder.merge(cur, phase1[k]);
            ++plan.diagnostics.merges;
        } else {
            plan.batches.push_back(cur);
            cur = phase1[k];
        }
    }
    plan.batches.push_back(cur);
    return plan;
}

/// GreedySetSplit-Max: free merges, then one forward pass that keeps
/// merging a batch into its successor while its size is at most `bound`.
/// A chain therefore stops one merge past `bound`.
inline batch_plan greedy_max(std::span<const trajectory_segment> queries, const temporal_index& index,
                             std::size_t bound) {
    if (bound == 0)
        throw std::domain_error("greedy_max: bound must be positive");
    if (queries.empty())
        return {};
    batch_builder builder(queries, index);
    batch_plan plan;
    const auto phase1 = detail::free_merges(builder, builder.singletons(), plan.diagnostics.merges);
    query_batch cur = phase1.front();
    for (std::size_t k = 1; k < phase1.size(); ++k) {
        if (cur.size() > bound) {
            plan.batches.push_back(cur);
            cur = phase1[k];
        } else {
            cur = builder.merge(cur, phase1[k]);
            ++plan.diagnostics.merges;
        }
    }
    plan.batches.push_back(cur);
    return plan;
}

enum class planner_kind { periodic, setsplit_fixed, setsplit_max, setsplit_minmax, greedy_min, greedy_max };

inline const char* to_string(planner_kind k) {
    switch (k) {
    case planner_kind::periodic: return "periodic";
    case planner_kind::setsplit_fixed: return "setsplit-fixed";
    case planner_kind::setsplit_max: return "setsplit-max";
    case planner_kind::setsplit_minmax: return "setsplit-minmax";
    case planner_kind::greedy_min: return "greedy-min";
    case planner_kind::greedy_max: return "greedy-max";
    }
    return "unknown";
}

inline planner_kind parse_planner(const std::string& name) {
    for (auto k : {planner_kind::periodic, planner_kind::setsplit_fixed, planner_kind::setsplit_max,
                   planner_kind::setsplit_minmax, planner_kind::greedy_min, planner_kind::greedy_max})
        if (name == to_string(k))
            return k;
    throw std::invalid_argument("unknown planner: " + name);
}

/// Planner choice plus the parameters each planner reads:
/// periodic: batch_size; setsplit-fixed: num_batches; setsplit-max: max;
/// setsplit-minmax: min, max; greedy-min / greedy-max: bound.
struct planner_config {
    planner_kind kind = planner_kind::periodic;
    std::size_t batch_size = 120;
    std::size_t num_batches = 1;
    std::size_t min = 1;
    std::size_t max = 1;
    std::size_t bound = 1;
    merge_search mode = merge_search::incremental;
};

inline batch_plan make_plan(std::span<const trajectory_segment> queries, const temporal_index& index,
                            const planner_config& cfg) {
    switch (cfg.kind) {
    case planner_kind::periodic: return periodic(queries, index, cfg.batch_size);
    case planner_kind::setsplit_fixed: return setsplit_fixed(queries, index, cfg.num_batches, cfg.mode);
    case planner_kind::setsplit_max: return setsplit_max(queries, index, cfg.max, cfg.mode);
    case planner_kind::setsplit_minmax: return setsplit_minmax(queries, index, cfg.min, cfg.max, cfg.mode);
    case planner_kind::greedy_min: return greedy_min(queries, index, cfg.bound);
    case planner_kind::greedy_max: return greedy_max(queries, index, cfg.bound);
    }
    throw std::invalid_argument("unknown planner");
}

} // namespace trajseek

#endif // TRAJSEEK_PLANNER_HPP

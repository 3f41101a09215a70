#ifndef TRAJSEEK_INDEX_HPP
#define TRAJSEEK_INDEX_HPP

#include "trajseek/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace trajseek {

/// How a bin's start time is defined.
///  - empirical: the earliest start time among its members (tightest extent).
///  - grid:      the bin's left edge, t0 + j * width.
enum class bin_start_rule { empirical, grid };

inline constexpr std::size_t default_bin_count = 10000;

/// Inclusive ordinal range [first, last] into a segment_store.
struct ordinal_range {
    std::size_t first = 0;
    std::size_t last = 0;

    std::size_t size() const { return last - first + 1; }
    friend bool operator==(const ordinal_range&, const ordinal_range&) = default;
};

struct temporal_bin {
    double start = 0;
    double end = 0;
    std::size_t first = 0;
    std::size_t last = 0;
    bool empty = true;

    std::size_t size() const { return empty ? 0 : last - first + 1; }
    /// Closed-interval overlap; empty bins overlap nothing.
    bool overlaps(const time_interval& q) const { return !empty && start <= q.end && q.begin <= end; }
};

/// Fixed-width temporal partitioning of a sorted segment store. Each bin owns
/// a contiguous ordinal range of segments, by start time.
class temporal_index {
public:
    temporal_index(const segment_store& store, std::size_t bin_count,
                   bin_start_rule rule = bin_start_rule::empirical)
        : rule_(rule) {
        if (store.empty())
            throw std::domain_error("build_index: empty store");
        if (bin_count == 0)
            throw std::domain_error("build_index: bin count must be positive");

        t0_ = store.t0();
        width_ = (store.t_max() - store.t0()) / static_cast<double>(bin_count);
        bins_.resize(bin_count);

        for (std::size_t i = 0; i < store.size(); ++i) {
            const auto& s = store[i];
            auto& bin = bins_[bin_of(s.start.t)];
            if (bin.empty) {
                bin = {s.start.t, s.end.t, i, i, false};
            } else {
                bin.last = i;
                bin.end = std::max(bin.end, s.end.t);
            }
        }
        if (rule_ == bin_start_rule::grid) {
            for (std::size_t j = 0; j < bins_.size(); ++j)
                if (!bins_[j].empty)
                    bins_[j].start = t0_ + static_cast<double>(j) * width_;
        }

        for (std::size_t j = 0; j < bins_.size(); ++j) {
            const auto& bin = bins_[j];
            if (bin.empty)
                continue;
            occupied_.push_back(j);
            starts_.push_back(bin.start);
            const double prev = prefix_max_end_.empty() ? -std::numeric_limits<double>::infinity()
                                                        : prefix_max_end_.back();
            prefix_max_end_.push_back(std::max(prev, bin.end));
        }
    }

    std::size_t bin_count() const { return bins_.size(); }
    double bin_width() const { return width_; }
    double origin() const { return t0_; }
    bin_start_rule rule() const { return rule_; }
    std::span<const temporal_bin> bins() const { return bins_; }
    std::size_t occupied_bins() const { return occupied_.size(); }

    /// Bin holding a segment that starts at `t_start`. Starts at t_max land
    /// in the last bin.
    std::size_t bin_of(double t_start) const {
        if (!(width_ > 0))
            return 0;
        const double j = std::floor((t_start - t0_) / width_);
        if (j < 0)
            return 0;
        return std::min(static_cast<std::size_t>(j), bins_.size() - 1);
    }

    /// Contiguous ordinal range covering every bin whose extent overlaps `q`.
    ///
    /// Bin starts are non-decreasing, so the bins starting no later than
    /// q.end form a prefix. Bin ends are not monotonic; a running maximum of
    /// ends locates the first overlapping bin, and a backward scan from the
    /// end of the prefix finds the last one.
    std::optional<ordinal_range> candidate_range(const time_interval& q) const {
        if (q.end < q.begin)
            throw std::domain_error("candidate_range: interval end precedes begin");
        const auto hi_it = std::upper_bound(starts_.begin(), starts_.end(), q.end);
        if (hi_it == starts_.begin())
            return std::nullopt;
        std::size_t hi = static_cast<std::size_t>(hi_it - starts_.begin()) - 1;

        const auto lo_it = std::lower_bound(prefix_max_end_.begin(), prefix_max_end_.end(), q.begin);
        const std::size_t lo = static_cast<std::size_t>(lo_it - prefix_max_end_.begin());
        if (lo > hi)
            return std::nullopt;
        while (hi > lo && bins_[occupied_[hi]].end < q.begin)
            --hi;
        return ordinal_range{bins_[occupied_[lo]].first, bins_[occupied_[hi]].last};
    }

private:
    bin_start_rule rule_;
    double t0_ = 0;
    double width_ = 0;
    std::vector<temporal_bin> bins_;
    // Parallel arrays over the non-empty bins, in bin order.
    std::vector<std::size_t> occupied_;
    std::vector<double> starts_;
    std::vector<double> prefix_max_end_;
};

inline temporal_index build_index(const segment_store& store, std::size_t bin_count,
                                  bin_start_rule rule = bin_start_rule::empirical) {
    return temporal_index(store, bin_count, rule);
}

inline std::optional<ordinal_range> candidate_range(const temporal_index& index, const time_interval& q) {
    return index.candidate_range(q);
}

inline std::size_t candidate_count(const temporal_index& index, const time_interval& q) {
    const auto r = index.candidate_range(q);
    return r ? r->size() : 0;
}

/// Interactions needed to compare `batch_size` queries spanning `q` against
/// the candidate range of `q`.
inline std::size_t interaction_count(const temporal_index& index, std::size_t batch_size,
                                     const time_interval& q) {
    if (batch_size == 0)
        throw std::domain_error("interaction_count: batch size must be positive");
    return batch_size * candidate_count(index, q);
}

} // namespace trajseek

#endif // TRAJSEEK_INDEX_HPP

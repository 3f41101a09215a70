#ifndef TRAJSEEK_CORE_HPP
#define TRAJSEEK_CORE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

namespace trajseek {

using trajectory_id = std::uint64_t;
using segment_id = std::uint64_t;

struct vec3 {
    double x = 0;
    double y = 0;
    double z = 0;

    friend vec3 operator+(const vec3& a, const vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend vec3 operator-(const vec3& a, const vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend vec3 operator*(double k, const vec3& a) { return {k * a.x, k * a.y, k * a.z}; }
    friend bool operator==(const vec3&, const vec3&) = default;

    double dot(const vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm2() const { return dot(*this); }
};

/// A point in space and time.
struct spacetime_point {
    double x = 0;
    double y = 0;
    double z = 0;
    double t = 0;

    vec3 position() const { return {x, y, z}; }
    bool finite() const {
        return std::isfinite(x) && std::isfinite(y) && std::isfinite(z) && std::isfinite(t);
    }

    friend bool operator==(const spacetime_point&, const spacetime_point&) = default;
};

/// One linear edge of a moving object's polyline.
struct trajectory_segment {
    trajectory_id traj_id = 0;
    segment_id seg_id = 0;
    spacetime_point start;
    spacetime_point end;

    double duration() const { return end.t - start.t; }

    friend bool operator==(const trajectory_segment&, const trajectory_segment&) = default;
};

inline std::ostream& operator<<(std::ostream& o, const trajectory_segment& s) {
    return o << "{traj: " << s.traj_id << ", seg: " << s.seg_id << ", t: [" << s.start.t << ", "
             << s.end.t << "]}";
}

/// Closed time interval. `begin == end` denotes a single instant.
struct time_interval {
    double begin = 0;
    double end = 0;

    double length() const { return end - begin; }
    double midpoint() const { return begin + 0.5 * (end - begin); }
    bool contains(double t) const { return begin <= t && t <= end; }
    bool overlaps(const time_interval& o) const { return begin <= o.end && o.begin <= end; }

    friend bool operator==(const time_interval&, const time_interval&) = default;
};

inline std::ostream& operator<<(std::ostream& o, const time_interval& i) {
    return o << "[" << i.begin << ", " << i.end << "]";
}

inline time_interval extent_of(const trajectory_segment& s) { return {s.start.t, s.end.t}; }

inline time_interval hull(const time_interval& a, const time_interval& b) {
    return {std::min(a.begin, b.begin), std::max(a.end, b.end)};
}

/// A (query segment, entry segment, proximity interval) record.
struct result_item {
    trajectory_id query_traj = 0;
    segment_id query_seg = 0;
    trajectory_id entry_traj = 0;
    segment_id entry_seg = 0;
    time_interval interval;

    friend bool operator==(const result_item&, const result_item&) = default;
};

using result_set = std::vector<result_item>;

inline auto canonical_key(const result_item& r) {
    return std::tie(r.query_traj, r.query_seg, r.entry_traj, r.entry_seg, r.interval.begin,
                    r.interval.end);
}

/// Sorts results into the canonical (query, entry, interval) order.
inline void canonical_sort(result_set& results) {
    std::sort(results.begin(), results.end(), [](const result_item& a, const result_item& b) {
        return canonical_key(a) < canonical_key(b);
    });
}

/// Set equality of two result sets, comparing interval endpoints with a
/// relative tolerance. Both inputs are copied and canonically sorted.
inline bool equivalent_results(result_set a, result_set b, double rel_tol = 1e-9) {
    if (a.size() != b.size())
        return false;
    canonical_sort(a);
    canonical_sort(b);
    auto close = [rel_tol](double u, double v) {
        return std::abs(u - v) <= rel_tol * std::max({1.0, std::abs(u), std::abs(v)});
    };
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto& x = a[i];
        const auto& y = b[i];
        if (x.query_traj != y.query_traj || x.query_seg != y.query_seg ||
            x.entry_traj != y.entry_traj || x.entry_seg != y.entry_seg)
            return false;
        if (!close(x.interval.begin, y.interval.begin) || !close(x.interval.end, y.interval.end))
            return false;
    }
    return true;
}

/// Interpolated spatial position of `seg` at time `t`.
/// Throws std::domain_error when t lies outside the segment's extent.
inline vec3 position_at(const trajectory_segment& seg, double t) {
    if (!(seg.start.t <= t && t <= seg.end.t))
        throw std::domain_error("position_at: time outside segment extent");
    // Exact endpoints, so clipping a clipped segment is a fixed point.
    if (t == seg.start.t)
        return seg.start.position();
    if (t == seg.end.t)
        return seg.end.position();
    const double f = (t - seg.start.t) / (seg.end.t - seg.start.t);
    return seg.start.position() + f * (seg.end.position() - seg.start.position());
}

namespace detail {

inline trajectory_segment clip(const trajectory_segment& s, double ta, double tb) {
    trajectory_segment out = s;
    const vec3 a = position_at(s, ta);
    const vec3 b = position_at(s, tb);
    out.start = {a.x, a.y, a.z, ta};
    out.end = {b.x, b.y, b.z, tb};
    return out;
}

} // namespace detail

/// True iff the closed temporal extents of `a` and `b` intersect.
inline bool temporally_overlap(const trajectory_segment& a, const trajectory_segment& b) {
    return a.start.t <= b.end.t && b.start.t <= a.end.t;
}

/// Clips both segments to their common time span. Returns nothing when the
/// extents are disjoint; touching extents yield a degenerate instant.
inline std::optional<std::pair<trajectory_segment, trajectory_segment>>
temporal_intersection(const trajectory_segment& a, const trajectory_segment& b) {
    const double ta = std::max(a.start.t, b.start.t);
    const double tb = std::min(a.end.t, b.end.t);
    if (ta > tb)
        return std::nullopt;
    return std::pair{detail::clip(a, ta, tb), detail::clip(b, ta, tb)};
}

inline constexpr double span_tolerance = 1e-9;

/// Time sub-interval during which two co-temporal segments are within
/// distance `d` (closed: distance exactly `d` counts).
///
/// With u the separation at the common start and v the relative velocity,
/// the squared separation is A tau^2 + B tau + C. It is convex, so the
/// sublevel set {<= d^2} is a single interval, clipped to the common span.
inline std::optional<time_interval> threshold_interval(const trajectory_segment& a,
                                                       const trajectory_segment& b, double d) {
    if (!(d > 0))
        throw std::domain_error("threshold_interval: d must be positive");
    if (std::abs(a.start.t - b.start.t) > span_tolerance || std::abs(a.end.t - b.end.t) > span_tolerance)
        throw std::domain_error("threshold_interval: segments must span the same time interval");

    const double ta = std::max(a.start.t, b.start.t);
    const double tb = std::min(a.end.t, b.end.t);
    const double span = tb - ta;
    const double d2 = d * d;

    const vec3 u = a.start.position() - b.start.position();
    const double C = u.norm2();
    if (!(span > 0)) {
        if (C <= d2)
            return time_interval{ta, ta};
        return std::nullopt;
    }

    auto velocity = [](const trajectory_segment& s) {
        const double dt = s.end.t - s.start.t;
        return dt > 0 ? (1.0 / dt) * (s.end.position() - s.start.position()) : vec3{};
    };
    const vec3 v = velocity(a) - velocity(b);
    const double A = v.norm2();
    const double B = 2.0 * u.dot(v);

    if (A == 0) {
        if (C <= d2)
            return time_interval{ta, tb};
        return std::nullopt;
    }

    const double c0 = C - d2;
    const double disc = B * B - 4.0 * A * c0;
    if (disc < 0)
        return std::nullopt;

    const double q = -0.5 * (B + std::copysign(std::sqrt(disc), B));
    double r1 = q / A;
    double r2 = q != 0 ? c0 / q : r1;
    if (r1 > r2)
        std::swap(r1, r2);
    if (r1 > span || r2 < 0)
        return std::nullopt;

    const double hi = r2 >= span ? tb : std::min(ta + r2, tb);
    const double lo = r1 <= 0 ? ta : std::min(ta + r1, hi);
    return time_interval{lo, hi};
}

/// Thrown when segment data violates a store invariant.
class invalid_segment_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

inline void validate_segment(const trajectory_segment& s) {
    if (!s.start.finite() || !s.end.finite())
        throw invalid_segment_error("segment has non-finite coordinates");
    if (s.end.t < s.start.t)
        throw invalid_segment_error("segment ends before it starts");
}

/// Ordering used for stores: start time, then identifiers so that equal
/// start times sort the same way regardless of insertion order.
inline bool store_order(const trajectory_segment& a, const trajectory_segment& b) {
    return std::tie(a.start.t, a.traj_id, a.seg_id, a.end.t) <
           std::tie(b.start.t, b.traj_id, b.seg_id, b.end.t);
}

/// An immutable sequence of segments sorted by non-decreasing start time.
/// The position of a segment in the sequence is its ordinal.
class segment_store {
public:
    segment_store() = default;

    explicit segment_store(std::vector<trajectory_segment> segments)
        : segments_(std::move(segments)) {
        for (const auto& s : segments_)
            validate_segment(s);
        if (!std::is_sorted(segments_.begin(), segments_.end(), store_order))
            std::sort(segments_.begin(), segments_.end(), store_order);
        check_trajectory_order();
        compute_extent();
    }

    std::span<const trajectory_segment> segments() const { return segments_; }
    std::size_t size() const { return segments_.size(); }
    bool empty() const { return segments_.empty(); }
    const trajectory_segment& operator[](std::size_t i) const { return segments_[i]; }
    auto begin() const { return segments_.begin(); }
    auto end() const { return segments_.end(); }

    double t0() const { return t0_; }
    double t_max() const { return t_max_; }
    time_interval extent() const { return {t0_, t_max_}; }

    friend bool operator==(const segment_store& a, const segment_store& b) {
        return a.segments_ == b.segments_;
    }

private:
    void check_trajectory_order() const {
        // Sorted by start time with seg_id as a tie-breaker, a trajectory whose
        // seg_ids are not time-ordered shows up as a decreasing seg_id.
        std::unordered_map<trajectory_id, segment_id> last_seen;
        for (const auto& s : segments_) {
            auto [it, inserted] = last_seen.try_emplace(s.traj_id, s.seg_id);
            if (!inserted) {
                if (s.seg_id < it->second)
                    throw invalid_segment_error("trajectory " + std::to_string(s.traj_id) +
                                                ": segment start times decrease with seg_id");
                it->second = s.seg_id;
            }
        }
    }

    void compute_extent() {
        if (segments_.empty())
            return;
        t0_ = segments_.front().start.t;
        t_max_ = segments_.front().end.t;
        for (const auto& s : segments_)
            t_max_ = std::max(t_max_, s.end.t);
    }

    std::vector<trajectory_segment> segments_;
    double t0_ = 0;
    double t_max_ = 0;
};

} // namespace trajseek

#endif // TRAJSEEK_CORE_HPP

#ifndef TRAJSEEK_CSV_IO_HPP
#define TRAJSEEK_CSV_IO_HPP

// Plain-text dataset and result files.
//
// Dataset / query set: header `traj_id,seg_id,x_s,y_s,z_s,t_s,x_e,y_e,z_e,t_e`
// then one segment per row. Results: header
// `query_traj,query_seg,entry_traj,entry_seg,t_begin,t_end`. Doubles are
// written in shortest round-trip form, so load(save(x)) == x exactly.

#include "trajseek/core.hpp"

#include <array>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace trajseek {

inline constexpr std::string_view dataset_header = "traj_id,seg_id,x_s,y_s,z_s,t_s,x_e,y_e,z_e,t_e";
inline constexpr std::string_view result_header = "query_traj,query_seg,entry_traj,entry_seg,t_begin,t_end";

/// Malformed or invariant-violating file content.
class format_error : public std::runtime_error {
public:
    format_error(const std::string& path, std::size_t line, const std::string& what)
        : std::runtime_error(path + ":" + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

namespace detail {

inline void append_double(std::string& out, double v) {
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    out.append(buf.data(), res.ptr);
}

inline void append_uint(std::string& out, std::uint64_t v) {
    std::array<char, 24> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    out.append(buf.data(), res.ptr);
}

template <class T>
bool parse_field(std::string_view s, T& v) {
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    for (;;) {
        const auto comma = line.find(',', pos);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(pos));
            return out;
        }
        out.push_back(line.substr(pos, comma - pos));
        pos = comma + 1;
    }
}

inline std::string_view strip_cr(std::string_view s) {
    if (!s.empty() && s.back() == '\r')
        s.remove_suffix(1);
    return s;
}

} // namespace detail

inline std::string format_segment_row(const trajectory_segment& s) {
    std::string row;
    detail::append_uint(row, s.traj_id);
    row += ',';
    detail::append_uint(row, s.seg_id);
    for (double v : {s.start.x, s.start.y, s.start.z, s.start.t, s.end.x, s.end.y, s.end.z, s.end.t}) {
        row += ',';
        detail::append_double(row, v);
    }
    return row;
}

inline void write_segments(std::ostream& os, std::span<const trajectory_segment> segments) {
    os << dataset_header << '\n';
    std::string row;
    for (const auto& s : segments) {
        row = format_segment_row(s);
        row += '\n';
        os.write(row.data(), static_cast<std::streamsize>(row.size()));
    }
}

inline void save(const segment_store& store, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw std::runtime_error("cannot open " + path + " for writing");
    write_segments(os, store.segments());
    if (!os)
        throw std::runtime_error("write failed: " + path);
}

/// Parses a dataset. With `strict`, rows must already be in store order.
inline segment_store read_segments(std::istream& is, const std::string& name, bool strict = false) {
    std::string line;
    std::size_t lineno = 1;
    if (!std::getline(is, line) || detail::strip_cr(line) != dataset_header)
        throw format_error(name, lineno, "expected header '" + std::string(dataset_header) + "'");

    std::vector<trajectory_segment> rows;
    while (std::getline(is, line)) {
        ++lineno;
        const auto text = detail::strip_cr(line);
        if (text.empty())
            continue;
        const auto f = detail::split_commas(text);
        if (f.size() != 10)
            throw format_error(name, lineno, "expected 10 fields, found " + std::to_string(f.size()));
        trajectory_segment s;
        bool ok = detail::parse_field(f[0], s.traj_id) && detail::parse_field(f[1], s.seg_id);
        double* targets[] = {&s.start.x, &s.start.y, &s.start.z, &s.start.t,
                             &s.end.x,   &s.end.y,   &s.end.z,   &s.end.t};
        for (std::size_t k = 0; ok && k < 8; ++k)
            ok = detail::parse_field(f[k + 2], *targets[k]);
        if (!ok)
            throw format_error(name, lineno, "malformed field");
        try {
            validate_segment(s);
        } catch (const invalid_segment_error& e) {
            throw format_error(name, lineno, e.what());
        }
        if (strict && !rows.empty() && store_order(s, rows.back()))
            throw format_error(name, lineno, "rows not sorted by start time");
        rows.push_back(s);
    }
    try {
        return segment_store(std::move(rows));
    } catch (const invalid_segment_error& e) {
        throw format_error(name, lineno, e.what());
    }
}

inline segment_store load(const std::string& path, bool strict = false) {
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw std::runtime_error("cannot open " + path);
    return read_segments(is, path, strict);
}

inline void write_results(std::ostream& os, const result_set& results) {
    os << result_header << '\n';
    std::string row;
    for (const auto& r : results) {
        row.clear();
        detail::append_uint(row, r.query_traj);
        row += ',';
        detail::append_uint(row, r.query_seg);
        row += ',';
        detail::append_uint(row, r.entry_traj);
        row += ',';
        detail::append_uint(row, r.entry_seg);
        row += ',';
        detail::append_double(row, r.interval.begin);
        row += ',';
        detail::append_double(row, r.interval.end);
        row += '\n';
        os.write(row.data(), static_cast<std::streamsize>(row.size()));
    }
}

inline void save_results(const result_set& results, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw std::runtime_error("cannot open " + path + " for writing");
    write_results(os, results);
    if (!os)
        throw std::runtime_error("write failed: " + path);
}

inline result_set read_results(std::istream& is, const std::string& name) {
    std::string line;
    std::size_t lineno = 1;
    if (!std::getline(is, line) || detail::strip_cr(line) != result_header)
        throw format_error(name, lineno, "expected header '" + std::string(result_header) + "'");
    result_set out;
    while (std::getline(is, line)) {
        ++lineno;
        const auto text = detail::strip_cr(line);
        if (text.empty())
            continue;
        const auto f = detail::split_commas(text);
        result_item r;
        if (f.size() != 6 || !detail::parse_field(f[0], r.query_traj) || !detail::parse_field(f[1], r.query_seg) ||
            !detail::parse_field(f[2], r.entry_traj) || !detail::parse_field(f[3], r.entry_seg) ||
            !detail::parse_field(f[4], r.interval.begin) || !detail::parse_field(f[5], r.interval.end))
            throw format_error(name, lineno, "malformed result row");
        out.push_back(r);
    }
    return out;
}

inline result_set load_results(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw std::runtime_error("cannot open " + path);
    return read_results(is, path);
}

} // namespace trajseek

#endif // TRAJSEEK_CSV_IO_HPP

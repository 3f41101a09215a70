#ifndef TRAJSEEK_PERFMODEL_IO_HPP
#define TRAJSEEK_PERFMODEL_IO_HPP

// JSON documents for calibrated model parts. Every document carries
// "format" and "format_version"; readers reject anything else.

#include "trajseek/perfmodel.hpp"

#include <json.hpp>

#include <fstream>
#include <stdexcept>
#include <string>

namespace trajseek {

inline constexpr int model_format_version = 1;

namespace detail {

using json = nlohmann::json;

inline json surface_to_json(const surface& s) {
    return {{"q_axis", s.q_axis}, {"c_axis", s.c_axis}, {"seconds", s.seconds}};
}

inline surface surface_from_json(const json& j) {
    surface s;
    j.at("q_axis").get_to(s.q_axis);
    j.at("c_axis").get_to(s.c_axis);
    j.at("seconds").get_to(s.seconds);
    s.validate();
    return s;
}

inline json cpu_to_json(const cpu_overhead_model& m) {
    return {{"a", m.a}, {"b", m.b}, {"c", m.c}, {"k", m.k}, {"item_bytes", m.item_bytes},
            {"query_count", m.query_count}};
}

inline cpu_overhead_model cpu_from_json(const json& j) {
    cpu_overhead_model m;
    m.a = j.at("a").get<double>();
    m.b = j.at("b").get<double>();
    m.c = j.at("c").get<double>();
    m.k = j.at("k").get<double>();
    m.item_bytes = j.at("item_bytes").get<double>();
    m.query_count = j.at("query_count").get<std::size_t>();
    return m;
}

inline json alpha_to_json(const alpha_profile& p) {
    json epochs = json::array();
    for (const auto& e : p.epochs)
        epochs.push_back({{"begin", e.span.begin}, {"end", e.span.end}, {"alpha", e.alpha}, {"hits", e.hits},
                          {"interactions", e.interactions}, {"samples", e.samples}, {"fallback", e.fallback}});
    return {{"sample_batch_size", p.sample_batch_size}, {"trials", p.trials}, {"d", p.d},
            {"global_alpha", p.global_alpha}, {"predicted_hits", p.predicted_hits},
            {"true_hits", p.true_hits}, {"converged", p.converged}, {"epochs", epochs}};
}

inline alpha_profile alpha_from_json(const json& j) {
    alpha_profile p;
    p.sample_batch_size = j.at("sample_batch_size").get<std::size_t>();
    p.trials = j.at("trials").get<std::size_t>();
    p.d = j.at("d").get<double>();
    p.global_alpha = j.at("global_alpha").get<double>();
    p.predicted_hits = j.at("predicted_hits").get<double>();
    p.true_hits = j.at("true_hits").get<double>();
    p.converged = j.at("converged").get<bool>();
    for (const auto& e : j.at("epochs")) {
        alpha_epoch ep;
        ep.span = {e.at("begin").get<double>(), e.at("end").get<double>()};
        ep.alpha = e.at("alpha").get<double>();
        ep.hits = e.at("hits").get<std::size_t>();
        ep.interactions = e.at("interactions").get<std::size_t>();
        ep.samples = e.at("samples").get<std::size_t>();
        ep.fallback = e.at("fallback").get<bool>();
        if (!(ep.alpha >= 0 && ep.alpha <= 1))
            throw std::domain_error("alpha outside [0, 1]");
        p.epochs.push_back(ep);
    }
    if (p.epochs.empty())
        throw std::domain_error("alpha profile has no epochs");
    return p;
}

inline void check_header(const json& j, const char* format) {
    if (!j.is_object() || j.value("format", std::string{}) != format)
        throw std::runtime_error(std::string("not a ") + format + " document");
    if (j.value("format_version", 0) != model_format_version)
        throw std::runtime_error(std::string(format) + ": unsupported format_version");
}

inline json read_json(const std::string& path) {
    std::ifstream is(path);
    if (!is)
        throw std::runtime_error("cannot open " + path);
    try {
        return json::parse(is);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

inline void write_json(const json& j, const std::string& path) {
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("cannot open " + path + " for writing");
    os << j.dump(2) << '\n';
    if (!os)
        throw std::runtime_error("write failed: " + path);
}

} // namespace detail

/// Surfaces plus host models: everything `calibrate` measures.
struct calibration {
    bench_surfaces surfaces;
    cpu_model_family cpu;
};

inline nlohmann::json to_json(const calibration& c) {
    nlohmann::json cpu = nlohmann::json::array();
    for (const auto& m : c.cpu.models)
        cpu.push_back(detail::cpu_to_json(m));
    return {{"format", "trajseek-calibration"},
            {"format_version", model_format_version},
            {"surfaces",
             {{"hit", detail::surface_to_json(c.surfaces.hit)},
              {"temporal_miss", detail::surface_to_json(c.surfaces.temporal_miss)},
              {"spatial_miss", detail::surface_to_json(c.surfaces.spatial_miss)},
              {"overhead", detail::surface_to_json(c.surfaces.overhead)},
              {"flags", c.surfaces.flags}}},
            {"cpu_models", cpu}};
}

inline calibration calibration_from_json(const nlohmann::json& j) {
    detail::check_header(j, "trajseek-calibration");
    calibration c;
    const auto& s = j.at("surfaces");
    c.surfaces.hit = detail::surface_from_json(s.at("hit"));
    c.surfaces.temporal_miss = detail::surface_from_json(s.at("temporal_miss"));
    c.surfaces.spatial_miss = detail::surface_from_json(s.at("spatial_miss"));
    c.surfaces.overhead = detail::surface_from_json(s.at("overhead"));
    s.at("flags").get_to(c.surfaces.flags);
    for (const auto& m : j.at("cpu_models"))
        c.cpu.models.push_back(detail::cpu_from_json(m));
    return c;
}

inline nlohmann::json to_json(const alpha_family& f) {
    nlohmann::json profiles = nlohmann::json::array();
    for (const auto& p : f.profiles)
        profiles.push_back(detail::alpha_to_json(p));
    return {{"format", "trajseek-alpha"}, {"format_version", model_format_version}, {"profiles", profiles}};
}

inline alpha_family alpha_family_from_json(const nlohmann::json& j) {
    detail::check_header(j, "trajseek-alpha");
    alpha_family f;
    for (const auto& p : j.at("profiles"))
        f.profiles.push_back(detail::alpha_from_json(p));
    if (f.profiles.empty())
        throw std::runtime_error("trajseek-alpha: no profiles");
    return f;
}

inline void save_calibration(const calibration& c, const std::string& path) { detail::write_json(to_json(c), path); }
inline calibration load_calibration(const std::string& path) {
    return calibration_from_json(detail::read_json(path));
}
inline void save_alpha(const alpha_family& f, const std::string& path) { detail::write_json(to_json(f), path); }
inline alpha_family load_alpha(const std::string& path) { return alpha_family_from_json(detail::read_json(path)); }

} // namespace trajseek

#endif // TRAJSEEK_PERFMODEL_IO_HPP

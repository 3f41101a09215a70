#ifndef TRAJSEEK_CLI_HPP
#define TRAJSEEK_CLI_HPP

#include "trajseek/trajseek.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace trajseek::cli {

using json = nlohmann::json;

/// Parses "a:b:step" (inclusive) or a comma-separated list of sizes.
inline std::vector<std::size_t> parse_sizes(const std::string& text) {
    std::vector<std::size_t> out;
    auto number = [&](const std::string& s) {
        std::size_t pos = 0;
        unsigned long long v = 0;
        try {
            v = std::stoull(s, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos == 0 || pos != s.size() || v == 0)
            throw std::invalid_argument("invalid size '" + s + "' in '" + text + "'");
        return static_cast<std::size_t>(v);
    };
    if (text.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(text);
        for (std::string p; std::getline(ss, p, ':');)
            parts.push_back(p);
        if (parts.size() != 3)
            throw std::invalid_argument("size range must be a:b:step, got '" + text + "'");
        const auto a = number(parts[0]);
        const auto b = number(parts[1]);
        const auto step = number(parts[2]);
        if (b < a)
            throw std::invalid_argument("size range end precedes start: '" + text + "'");
        for (std::size_t s = a; s <= b; s += step)
            out.push_back(s);
        return out;
    }
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ',');)
        out.push_back(number(p));
    if (out.empty())
        throw std::invalid_argument("empty size list");
    return out;
}

inline bin_start_rule parse_rule(const std::string& s) {
    if (s == "empirical")
        return bin_start_rule::empirical;
    if (s == "grid")
        return bin_start_rule::grid;
    throw std::invalid_argument("unknown bin rule: " + s);
}

inline const char* to_string(bin_start_rule r) { return r == bin_start_rule::grid ? "grid" : "empirical"; }

inline json planner_json(const planner_config& cfg) {
    json p{{"name", to_string(cfg.kind)}};
    switch (cfg.kind) {
    case planner_kind::periodic: p["batch_size"] = cfg.batch_size; break;
    case planner_kind::setsplit_fixed: p["num_batches"] = cfg.num_batches; break;
    case planner_kind::setsplit_max: p["max"] = cfg.max; break;
    case planner_kind::setsplit_minmax:
        p["min"] = cfg.min;
        p["max"] = cfg.max;
        break;
    case planner_kind::greedy_min:
    case planner_kind::greedy_max: p["bound"] = cfg.bound; break;
    }
    return p;
}

inline json stats_json(const search_stats& st, const batch_plan& plan, const planner_config& cfg, double d,
                       std::size_t bins, std::size_t workers) {
    json per_batch = json::array();
    for (const auto& b : st.per_batch)
        per_batch.push_back({{"batch", b.batch},
                             {"queries", b.queries},
                             {"candidates", b.candidates},
                             {"interactions", b.interactions},
                             {"hits", b.hits},
                             {"kernel_seconds", b.kernel_seconds}});
    return {{"planner", planner_json(cfg)},
            {"d", d},
            {"bins", bins},
            {"workers", workers},
            {"batches", plan.size()},
            {"max_batch_interactions", plan.max_interactions()},
            {"oversize_batches", plan.diagnostics.oversize_batches},
            {"interactions", st.interactions_computed},
            {"hits", st.hits},
            {"temporal_misses", st.temporal_misses},
            {"spatial_misses", st.spatial_misses},
            {"wasteful_fraction", st.wasteful_fraction()},
            {"kernel_seconds", st.kernel_seconds},
            {"host_seconds", st.host_seconds()},
            {"total_seconds", st.total_seconds},
            {"per_batch", per_batch}};
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw std::runtime_error("cannot open " + path + " for writing");
    os << text;
    if (!os)
        throw std::runtime_error("write failed: " + path);
}

/// Options shared by the commands that search a database.
struct search_inputs {
    std::string db;
    std::string queries;
    double d = 0;
    std::size_t bins = default_bin_count;
    std::string rule = "empirical";
    std::size_t workers = 0;

    void add_to(CLI::App& app, bool need_d = true) {
        app.add_option("--db", db, "database CSV")->required()->check(CLI::ExistingFile);
        app.add_option("--queries", queries, "query CSV")->required()->check(CLI::ExistingFile);
        auto* opt = app.add_option("--d", d, "distance threshold")->check(CLI::PositiveNumber);
        if (need_d)
            opt->required();
        app.add_option("--bins", bins, "temporal bin count")->check(CLI::PositiveNumber);
        app.add_option("--rule", rule, "bin start rule: empirical or grid");
        app.add_option("--workers", workers, "worker threads (default: TRAJSEEK_WORKERS or all cores)");
    }

    std::size_t resolved_workers() const { return workers > 0 ? workers : default_workers(); }
};

struct loaded {
    segment_store store;
    segment_store queries;
    std::optional<temporal_index> index;
};

inline loaded load_inputs(const search_inputs& in) {
    loaded l{load(in.db), load(in.queries), std::nullopt};
    l.index.emplace(l.store, in.bins, parse_rule(in.rule));
    return l;
}

inline void write_results_to(const std::string& path, result_set results, bool sorted, std::ostream& out) {
    if (sorted)
        canonical_sort(results);
    if (path.empty() || path == "-")
        write_results(out, results);
    else
        save_results(results, path);
}

/// Runs one subcommand. Returns the process exit code; diagnostics go to `err`.
inline int dispatch(int argc, const char* const* argv, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
    CLI::App app{"trajseek: distance threshold search over trajectory segments"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "generate a random-walk dataset or query set");
    std::string gen_profile_name = "uniform";
    std::string gen_out;
    std::uint64_t gen_seed = 1;
    std::size_t gen_traj = 0, gen_steps = 0, gen_sample = 0;
    double gen_start_min = 0, gen_start_max = 0, gen_space = 0;
    gen->add_option("--profile", gen_profile_name, "uniform, normal, normal5 or exp");
    gen->add_option("--trajectories", gen_traj, "trajectory count (profile default when omitted)");
    gen->add_option("--timesteps", gen_steps, "points per trajectory for fixed-length profiles");
    auto* gen_smin = gen->add_option("--start-min", gen_start_min, "start-time window lower bound");
    auto* gen_smax = gen->add_option("--start-max", gen_start_max, "start-time window upper bound");
    auto* gen_space_opt = gen->add_option("--space-extent", gen_space, "side of the initial-position cube");
    gen->add_option("--sample", gen_sample, "write N whole trajectories sampled from a pool instead");
    gen->add_option("--seed", gen_seed, "random seed");
    gen->add_option("--out", gen_out, "output CSV")->required();

    // index
    auto* idx = app.add_subcommand("index", "build the temporal index and report its bins");
    std::string idx_db, idx_rule = "empirical", idx_out;
    std::size_t idx_bins = default_bin_count;
    idx->add_option("--db", idx_db, "database CSV")->required()->check(CLI::ExistingFile);
    idx->add_option("--bins", idx_bins, "temporal bin count")->check(CLI::PositiveNumber);
    idx->add_option("--rule", idx_rule, "bin start rule: empirical or grid");
    idx->add_option("--out", idx_out, "write the per-bin table as JSON");

    // search
    auto* search = app.add_subcommand("search", "run a batched search");
    search_inputs s_in;
    s_in.add_to(*search);
    planner_config cfg;
    std::string planner_name = "periodic", s_out, s_stats;
    bool s_sorted = false, s_literal = false;
    search->add_option("--planner", planner_name,
                       "periodic, setsplit-fixed, setsplit-max, setsplit-minmax, greedy-min, greedy-max");
    search->add_option("--batch-size", cfg.batch_size, "periodic batch size")->check(CLI::PositiveNumber);
    search->add_option("--num-batches", cfg.num_batches, "setsplit-fixed batch count")->check(CLI::PositiveNumber);
    search->add_option("--min", cfg.min, "setsplit-minmax minimum batch size")->check(CLI::PositiveNumber);
    search->add_option("--max", cfg.max, "setsplit-max/minmax maximum batch size")->check(CLI::PositiveNumber);
    search->add_option("--bound", cfg.bound, "greedy planner size bound")->check(CLI::PositiveNumber);
    search->add_flag("--literal-merge", s_literal, "rescan all pairs after each SetSplit merge");
    search->add_option("--out", s_out, "result CSV (default: stdout)");
    search->add_option("--stats", s_stats, "statistics JSON");
    search->add_flag("--sorted", s_sorted, "write results in canonical order");

    // oracle
    auto* orc = app.add_subcommand("oracle", "brute-force reference search");
    search_inputs o_in;
    o_in.add_to(*orc);
    std::string o_out;
    bool o_sorted = false;
    orc->add_option("--out", o_out, "result CSV (default: stdout)");
    orc->add_flag("--sorted", o_sorted, "write results in canonical order");

    // calibrate
    auto* cal = app.add_subcommand("calibrate", "measure kernel surfaces and fit the host model");
    search_inputs c_in;
    c_in.add_to(*cal);
    std::string c_out, c_sizes = "10:300:10";
    std::size_t c_reps = 3;
    cal->add_option("--s", c_sizes, "batch sizes for the host fit, a:b:step or a list");
    cal->add_option("--reps", c_reps, "repetitions per measurement")->check(CLI::PositiveNumber);
    cal->add_option("--out", c_out, "calibration JSON")->required();

    // alpha
    auto* alp = app.add_subcommand("alpha", "estimate per-epoch hit fractions");
    search_inputs a_in;
    a_in.add_to(*alp);
    alpha_options a_opt;
    std::string a_out, a_sizes = "120";
    alp->add_option("--s", a_sizes, "sample batch sizes, a:b:step or a list");
    alp->add_option("--epochs", a_opt.epochs, "epoch count")->check(CLI::PositiveNumber);
    alp->add_option("--max-trials", a_opt.max_trials, "trial cap")->check(CLI::PositiveNumber);
    alp->add_option("--seed", a_opt.seed, "random seed");
    alp->add_option("--out", a_out, "alpha JSON")->required();

    // predict
    auto* prd = app.add_subcommand("predict", "predict periodic response times and recommend a batch size");
    search_inputs p_in;
    p_in.add_to(*prd);
    std::string p_model, p_alpha, p_sizes = "10:300:10", p_out;
    prd->add_option("--model", p_model, "calibration JSON")->required()->check(CLI::ExistingFile);
    prd->add_option("--alpha", p_alpha, "alpha JSON")->required()->check(CLI::ExistingFile);
    prd->add_option("--s", p_sizes, "candidate batch sizes");
    prd->add_option("--out", p_out, "prediction CSV (default: stdout)");

    // sweep
    auto* swp = app.add_subcommand("sweep", "measure periodic searches over a range of batch sizes");
    search_inputs w_in;
    w_in.add_to(*swp);
    std::string w_sizes = "10:300:10", w_out;
    std::size_t w_reps = 1;
    swp->add_option("--s", w_sizes, "batch sizes, a:b:step or a list");
    swp->add_option("--reps", w_reps, "repetitions per size (median reported)")->check(CLI::PositiveNumber);
    swp->add_option("--out", w_out, "sweep CSV (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (gen->parsed()) {
            gen_profile p = gen_profile::defaults(parse_profile(gen_profile_name));
            p.seed = gen_seed;
            if (gen_traj > 0)
                p.trajectories = gen_traj;
            if (gen_steps > 0)
                p.timesteps = gen_steps;
            if (*gen_smin)
                p.start_min = gen_start_min;
            if (*gen_smax)
                p.start_max = gen_start_max;
            if (*gen_space_opt)
                p.space_extent = gen_space;
            const segment_store s = gen_sample > 0 ? sample_queries(p, gen_sample, gen_seed) : generate(p);
            save(s, gen_out);
            out << "wrote " << s.size() << " segments to " << gen_out << '\n';
        } else if (idx->parsed()) {
            const segment_store store = load(idx_db);
            const temporal_index index(store, idx_bins, parse_rule(idx_rule));
            json summary{{"segments", store.size()},       {"bins", index.bin_count()},
                         {"occupied_bins", index.occupied_bins()}, {"bin_width", index.bin_width()},
                         {"t0", store.t0()},               {"t_max", store.t_max()},
                         {"rule", to_string(index.rule())}};
            out << summary.dump(2) << '\n';
            if (!idx_out.empty()) {
                json bins = json::array();
                for (const auto& b : index.bins()) {
                    if (b.empty)
                        bins.push_back(nullptr);
                    else
                        bins.push_back({{"first", b.first}, {"last", b.last}, {"start", b.start}, {"end", b.end}});
                }
                summary["per_bin"] = bins;
                write_text(idx_out, summary.dump(2) + "\n");
            }
        } else if (search->parsed()) {
            cfg.kind = parse_planner(planner_name);
            cfg.mode = s_literal ? merge_search::literal : merge_search::incremental;
            const auto in = load_inputs(s_in);
            const std::size_t workers = s_in.resolved_workers();
            worker_pool pool(workers);
            const auto plan = make_plan(in.queries.segments(), *in.index, cfg);
            auto res = run_search(in.store, *in.index, in.queries, plan, s_in.d, pool);
            if (!s_stats.empty())
                write_text(s_stats, stats_json(res.stats, plan, cfg, s_in.d, s_in.bins, workers).dump(2) + "\n");
            write_results_to(s_out, std::move(res.results), s_sorted, out);
        } else if (orc->parsed()) {
            const segment_store store = load(o_in.db);
            const segment_store queries = load(o_in.queries);
            write_results_to(o_out, oracle::brute_force_search(store.segments(), queries.segments(), o_in.d),
                             o_sorted, out);
        } else if (cal->parsed()) {
            const auto in = load_inputs(c_in);
            worker_pool pool(c_in.resolved_workers());
            const auto sizes = parse_sizes(c_sizes);
            std::size_t c_lo = std::numeric_limits<std::size_t>::max(), c_hi = 1;
            for (std::size_t s : sizes)
                for (const auto& b : periodic(in.queries.segments(), *in.index, s).batches)
                    if (b.candidates > 0) {
                        c_lo = std::min(c_lo, b.candidates);
                        c_hi = std::max(c_hi, b.candidates);
                    }
            grid_spec grid = default_grid(std::min(c_lo, c_hi), c_hi);
            grid.repetitions = c_reps;
            grid.d = c_in.d;
            calibration c;
            c.surfaces = calibrate_surfaces(grid, pool);
            c.cpu.models.push_back(calibrate_cpu_model(in.store, *in.index, in.queries, sizes, c_reps, pool));
            save_calibration(c, c_out);
            const auto& m = c.cpu.models.back();
            out << "host model: t = " << m.a << " + " << m.b << " * s^" << m.c << " + " << m.k
                << " * bytes; " << c.surfaces.flags.size() << " noisy grid points\n";
        } else if (alp->parsed()) {
            const auto in = load_inputs(a_in);
            worker_pool pool(a_in.resolved_workers());
            const auto sizes = parse_sizes(a_sizes);
            const auto fam = estimate_alpha_family(in.store, *in.index, in.queries, sizes, a_in.d, a_opt, pool);
            save_alpha(fam, a_out);
            for (const auto& p : fam.profiles)
                out << "s=" << p.sample_batch_size << " trials=" << p.trials << " global_alpha=" << p.global_alpha
                    << " predicted_hits=" << p.predicted_hits << " true_hits=" << p.true_hits
                    << (p.converged ? "" : " (not converged)") << '\n';
        } else if (prd->parsed()) {
            const auto in = load_inputs(p_in);
            const auto model = load_calibration(p_model);
            const auto fam = load_alpha(p_alpha);
            const auto sizes = parse_sizes(p_sizes);
            const auto& cpu = model.cpu.nearest(in.queries.size());
            const auto rec =
                recommend_batch_size(sizes, in.queries, in.store, *in.index, model.surfaces, fam, cpu, p_in.d);
            std::ostringstream csv;
            csv << "s,batches,interactions,t_cpu,t_gpu,t_total,sigma,predicted_hits\n";
            for (const auto& p : rec.predictions) {
                csv << p.s << ',' << p.batches << ',' << p.interactions << ',' << p.t_cpu << ',' << p.t_gpu << ','
                    << p.t_total << ',' << p.sigma << ',' << p.predicted_hits << '\n';
                for (const auto& w : p.warnings)
                    err << "warning: s=" << p.s << ": " << w << '\n';
            }
            if (p_out.empty() || p_out == "-")
                out << csv.str();
            else
                write_text(p_out, csv.str());
            out << "recommended batch size: " << rec.s << '\n';
        } else if (swp->parsed()) {
            const auto in = load_inputs(w_in);
            worker_pool pool(w_in.resolved_workers());
            std::ostringstream csv;
            csv << "s,batches,interactions,interactions_per_query,hits,temporal_misses,spatial_misses,"
                   "kernel_seconds,host_seconds,total_seconds\n";
            for (std::size_t s : parse_sizes(w_sizes)) {
                const auto plan = periodic(in.queries.segments(), *in.index, s);
                std::vector<search_stats> runs;
                for (std::size_t r = 0; r < w_reps; ++r)
                    runs.push_back(run_search(in.store, *in.index, in.queries, plan, w_in.d, pool).stats);
                std::sort(runs.begin(), runs.end(),
                          [](const auto& a, const auto& b) { return a.total_seconds < b.total_seconds; });
                const auto& st = runs[runs.size() / 2];
                csv << s << ',' << plan.size() << ',' << st.interactions_computed << ','
                    << static_cast<double>(st.interactions_computed) / static_cast<double>(in.queries.size())
                    << ',' << st.hits << ',' << st.temporal_misses << ',' << st.spatial_misses << ','
                    << st.kernel_seconds << ',' << st.host_seconds() << ',' << st.total_seconds << '\n';
            }
            if (w_out.empty() || w_out == "-")
                out << csv.str();
            else
                write_text(w_out, csv.str());
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

} // namespace trajseek::cli

#endif // TRAJSEEK_CLI_HPP

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "erdy/config.hpp"
#include "erdy/exact_sim.hpp"
#include "erdy/graph.hpp"
#include "erdy/io.hpp"
#include "erdy/ode.hpp"
#include "erdy/rng.hpp"
#include "erdy/study.hpp"

namespace fs = std::filesystem;
using namespace erdy;

namespace {

// Exit contract: 0 success, 1 runtime failure, 2 configuration or usage error.

const run_config::dynamics_section& need_dynamics(const run_config& cfg) {
    if (!cfg.dynamics)
        throw invalid_config("missing required key \"dynamics\" in section \"config\"");
    return *cfg.dynamics;
}

const rate_model& need_model(const run_config& cfg) {
    if (!cfg.model)
        throw invalid_config("missing required key \"model\" in section \"config\"");
    return *cfg.model;
}

solver_options ode_options(const run_config::dynamics_section& dyn) {
    solver_options opts;
    opts.abs_tol = dyn.abs_tol;
    opts.rel_tol = dyn.rel_tol;
    return opts;
}

std::vector<double> need_u0(const run_config::dynamics_section& dyn, const rate_model& model) {
    if (dyn.u0.empty())
        throw invalid_config("missing required key \"u0\" in section \"dynamics\"");
    if (static_cast<int>(dyn.u0.size()) != model.state_count())
        throw invalid_config("dynamics.u0 length does not match the model state count");
    return dyn.u0;
}

int run_graph_gen(const std::string& config_path, std::string out_path) {
    const auto cfg = parse_config_file(config_path);
    const auto params = cfg.graph_parameters();
    const auto g = sample_graph(params);
    if (out_path.empty()) {
        fs::create_directories(cfg.output_directory);
        out_path = (fs::path(cfg.output_directory) / "graph.txt").string();
    }
    save_graph_file(out_path, g);
    std::cout << "n " << g.vertex_count() << "\n"
              << "edges " << g.edge_count() << "\n"
              << "mean_degree " << g17(g.mean_degree()) << "\n"
              << "max_degree_ratio " << g17(g.max_degree_ratio()) << "\n";
    return 0;
}

int run_simulate(const std::string& config_path, const std::string& graph_path,
                 std::string out_dir, int sample_points_override) {
    const auto cfg = parse_config_file(config_path);
    const auto& model = need_model(cfg);
    const auto& dyn = need_dynamics(cfg);

    std::optional<weighted_graph> g;
    if (!graph_path.empty()) g = load_graph_file(graph_path);
    else g = sample_graph(cfg.graph_parameters());

    const std::uint64_t seed = dyn.seed ? *dyn.seed : g->params().seed;
    std::vector<std::uint8_t> init;
    if (!dyn.init.empty()) {
        init = dyn.init;
        if (static_cast<std::int64_t>(init.size()) != g->vertex_count())
            throw invalid_config("dynamics.init length does not match the vertex count");
        for (auto s : init)
            if (s >= model.state_count())
                throw invalid_config("dynamics.init contains an out-of-range state");
    } else {
        init = initial_state(need_u0(dyn, model), g->vertex_count(), dyn.mode, seed);
    }

    sim_options opts;
    opts.sample_points = sample_points_override > 0 ? sample_points_override : dyn.sample_points;
    bool want_k = true, want_h = true;
    if (cfg.study) {
        want_k = cfg.study->diag.k;
        want_h = cfg.study->diag.h;
    }
    opts.track_h = want_h;
    opts.record_log = true;

    const auto res = simulate(*g, model, init, dyn.horizon, seed, opts);

    if (out_dir.empty()) out_dir = cfg.output_directory;
    fs::create_directories(out_dir);
    write_file((fs::path(out_dir) / "trajectory.csv").string(),
               [&](std::ostream& o) { write_trajectory_csv(o, res.traj); });
    write_file((fs::path(out_dir) / "events.txt").string(),
               [&](std::ostream& o) { write_event_log(o, res.log); });
    double sup_k = 0.0;
    if (want_k) sup_k = reconstruct_k(res.log, g->vertex_count()).sup_aggregate_l1;
    write_file((fs::path(out_dir) / "diagnostics.txt").string(), [&](std::ostream& o) {
        write_sim_diagnostics(o, sup_k, res.sup_h_l1, want_k, want_h);
    });
    std::cout << "events " << res.event_count << "\n";
    return 0;
}

int run_solve_mf(const std::string& config_path, std::string out_dir) {
    const auto cfg = parse_config_file(config_path);
    const auto& model = need_model(cfg);
    const auto& dyn = need_dynamics(cfg);
    const auto sol = solve_meanfield(model, need_u0(dyn, model), dyn.horizon, ode_options(dyn),
                                     dyn.sample_points);
    if (out_dir.empty()) out_dir = cfg.output_directory;
    fs::create_directories(out_dir);
    write_file((fs::path(out_dir) / "meanfield.csv").string(),
               [&](std::ostream& o) { write_meanfield_csv(o, sol); });
    std::cout << "steps " << sol.stats.steps << "\n";
    return 0;
}

int run_solve_nimfa(const std::string& config_path, const std::string& graph_path,
                    std::string out_dir, bool dump_z) {
    const auto cfg = parse_config_file(config_path);
    const auto& model = need_model(cfg);
    const auto& dyn = need_dynamics(cfg);
    const auto g = load_graph_file(graph_path);
    const auto sol = solve_nimfa(g, model, need_u0(dyn, model), dyn.horizon, ode_options(dyn),
                                 dyn.sample_points, dump_z);
    if (out_dir.empty()) out_dir = cfg.output_directory;
    fs::create_directories(out_dir);
    write_file((fs::path(out_dir) / "nimfa.csv").string(),
               [&](std::ostream& o) { write_nimfa_csv(o, sol); });
    if (dump_z)
        write_file((fs::path(out_dir) / "nimfa_z.csv").string(),
                   [&](std::ostream& o) { write_nimfa_z_csv(o, sol); });
    std::cout << "steps " << sol.stats.steps << "\n";
    return 0;
}

int run_study(const std::string& config_path, std::string out_dir, int workers) {
    const auto cfg = parse_config_file(config_path);
    if (!cfg.study)
        throw invalid_config("missing required key \"study\" in section \"config\"");
    if (!cfg.graph)
        throw invalid_config("missing required key \"graph\" in section \"config\"");
    const auto& dyn = need_dynamics(cfg);

    study_config sc;
    sc.model = cfg.model;
    if (!sc.model)
        throw invalid_config("missing required key \"model\" in section \"config\"");
    sc.ladder = cfg.study->ladder;
    sc.edge_prob = cfg.graph->edge_prob;
    sc.weights = cfg.graph->weights;
    sc.horizon = dyn.horizon;
    sc.u0 = need_u0(dyn, *sc.model);
    sc.init = dyn.mode;
    sc.master_seed = cfg.study->master_seed;
    sc.replications = cfg.study->replications;
    sc.sample_points = dyn.sample_points;
    sc.diag = cfg.study->diag;
    sc.workers = workers;
    sc.ode_opts = ode_options(dyn);

    const auto result = run_convergence_study(sc);

    if (out_dir.empty()) out_dir = cfg.output_directory;
    fs::create_directories(out_dir);
    write_file((fs::path(out_dir) / "rows.csv").string(),
               [&](std::ostream& o) { write_study_rows_csv(o, result); });
    write_file((fs::path(out_dir) / "aggregates.csv").string(),
               [&](std::ostream& o) { write_study_aggregates_csv(o, result); });
    write_file((fs::path(out_dir) / "slopes.txt").string(),
               [&](std::ostream& o) { write_slope_report(o, result); });

    for (const auto& [metric, fit] : result.slopes)
        std::cout << metric << " slope " << g17(fit.slope) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Weighted Erdos-Renyi interacting-particle simulator and mean-field toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_path, graph_path;
    int workers = 0;
    int sample_points = 0;
    bool dump_z = false;

    auto* gen = app.add_subcommand("graph-gen", "sample a graph and write its edge list");
    gen->add_option("-c,--config", config_path, "JSON config file")->required();
    gen->add_option("-o,--out", out_path, "output edge-list path");

    auto* sim = app.add_subcommand("simulate", "run the exact event-driven process");
    sim->add_option("-c,--config", config_path, "JSON config file")->required();
    sim->add_option("--graph", graph_path, "edge-list file (otherwise sampled from config)");
    sim->add_option("-o,--out", out_path, "output directory");
    sim->add_option("--sample-points", sample_points, "trajectory grid size");

    auto* mf = app.add_subcommand("solve-mf", "solve the homogeneous mean-field dynamics");
    mf->add_option("-c,--config", config_path, "JSON config file")->required();
    mf->add_option("-o,--out", out_path, "output directory");

    auto* nimfa = app.add_subcommand("solve-nimfa", "solve the per-vertex intertwined dynamics");
    nimfa->add_option("-c,--config", config_path, "JSON config file")->required();
    nimfa->add_option("--graph", graph_path, "edge-list file")->required();
    nimfa->add_option("-o,--out", out_path, "output directory");
    nimfa->add_flag("--dump-z", dump_z, "also write the per-vertex solution (large)");

    auto* study = app.add_subcommand("study", "run a seeded convergence study");
    study->add_option("-c,--config", config_path, "JSON config file")->required();
    study->add_option("-o,--out", out_path, "output directory");
    study->add_option("-w,--workers", workers, "concurrent replications")
        ->envname("ERDY_WORKERS");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (gen->parsed()) return run_graph_gen(config_path, out_path);
        if (sim->parsed()) return run_simulate(config_path, graph_path, out_path, sample_points);
        if (mf->parsed()) return run_solve_mf(config_path, out_path);
        if (nimfa->parsed()) return run_solve_nimfa(config_path, graph_path, out_path, dump_z);
        if (study->parsed()) return run_study(config_path, out_path, workers);
    } catch (const invalid_config& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

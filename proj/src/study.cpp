#include "erdy/study.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "erdy/rng.hpp"

namespace erdy {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t n, std::uint64_t replication) {
    return rng::combine(rng::combine(rng::combine(master, rng::tag_study), n), replication);
}

double sup_error(const std::vector<double>& times_a, const std::vector<std::vector<double>>& a,
                 const std::vector<double>& times_b, const std::vector<std::vector<double>>& b) {
    if (times_a.size() != times_b.size() || a.size() != b.size() || a.size() != times_a.size())
        throw invalid_config("sup_error: grid mismatch");
    for (std::size_t i = 0; i < times_a.size(); ++i)
        if (times_a[i] != times_b[i]) throw invalid_config("sup_error: grid mismatch");
    double sup = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sup = std::max(sup, l1_dist(a[i], b[i]));
    return sup;
}

fit_result fit_loglog_slope(std::span<const std::pair<double, double>> points) {
    if (points.size() < 2) throw invalid_config("slope fit needs at least two points");
    for (const auto& [x, y] : points)
        if (!(x > 0.0) || !(y > 0.0))
            throw invalid_config("slope fit needs positive coordinates");
    const double m = static_cast<double>(points.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (const auto& [x, y] : points) {
        const double lx = std::log(x), ly = std::log(y);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        syy += ly * ly;
    }
    fit_result fit;
    const double den = m * sxx - sx * sx;
    fit.slope = (m * sxy - sx * sy) / den;
    fit.intercept = (sy - fit.slope * sx) / m;
    const double ss_tot = syy - sy * sy / m;
    const double ss_res = ss_tot - fit.slope * (sxy - sx * sy / m);
    fit.r2_fit = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

void study_config::validate() const {
    if (!model) throw invalid_config("study needs a model");
    if (ladder.empty()) throw invalid_config("study ladder must be nonempty");
    for (auto n : ladder)
        if (n < 2) throw invalid_config("ladder entries must be at least 2");
    if (!(horizon > 0.0)) throw invalid_config("horizon must be positive");
    if (replications < 1) throw invalid_config("need at least one replication");
    if (sample_points < 2) throw invalid_config("need at least two sample points");
    if (static_cast<int>(u0.size()) != model->state_count())
        throw invalid_config("u0 length does not match the model state count");
    const auto& mode = diag.r2;
    if (mode != "off" && mode != "exact" && mode != "sampled" && mode != "auto")
        throw invalid_config("r2 mode must be one of off, exact, sampled, auto");
}

namespace {

std::string sanitize(std::string msg) {
    for (char& c : msg)
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    return msg;
}

struct row_task {
    std::int64_t n;
    int replication;
};

study_row run_row(const study_config& cfg, const mean_field_solution& u, std::int64_t n,
                  int replication) {
    const auto t0 = std::chrono::steady_clock::now();
    study_row row;
    row.n = n;
    row.seed = derive_seed(cfg.master_seed, static_cast<std::uint64_t>(n),
                           static_cast<std::uint64_t>(replication));
    const double nan = std::numeric_limits<double>::quiet_NaN();
    row.sup_err_x = row.sup_err_y = row.r1 = row.r2 = row.sup_k = row.sup_h =
        row.gronwall_slack = row.lm_ratio = nan;

    try {
        const std::uint64_t graph_seed = rng::combine(row.seed, 1);
        const std::uint64_t init_seed = rng::combine(row.seed, 2);
        const std::uint64_t sim_seed = rng::combine(row.seed, 3);

        graph_params params{n, cfg.edge_prob, cfg.weights, graph_seed};
        const auto g = sample_graph(params);
        row.lm_ratio = g.max_degree_ratio();

        if (cfg.diag.r1) row.r1 = r1(g);
        std::string r2_mode = cfg.diag.r2;
        if (r2_mode == "auto") r2_mode = n <= cfg.diag.r2_cap ? "exact" : "sampled";
        if (r2_mode == "exact") {
            row.r2 = r2_exact(g, cfg.diag.r2_cap).estimate;
            row.r2_mode = "exact";
        } else if (r2_mode == "sampled") {
            row.r2 = r2_sampled(g, cfg.diag.r2_pairs, rng::combine(row.seed, 4)).estimate;
            row.r2_mode = "sampled";
        }

        const auto init = initial_state(cfg.u0, n, cfg.init, init_seed);

        sim_options sopts;
        sopts.sample_points = cfg.sample_points;
        const bool want_k = cfg.diag.k || cfg.diag.gronwall;
        const bool want_h = cfg.diag.h || cfg.diag.gronwall;
        sopts.track_h = want_h;
        sopts.record_log = want_k;
        const auto sim = simulate(g, *cfg.model, init, cfg.horizon, sim_seed, sopts);

        row.sup_err_x = sup_error(sim.traj.times, sim.traj.x, u.times, u.u);
        if (want_h) row.sup_h = sim.sup_h_l1;
        if (want_k) row.sup_k = reconstruct_k(sim.log, n).sup_aggregate_l1;
        if (cfg.diag.gronwall) {
            const double l_f = cfg.model->lipschitz_on(1.0).drift;
            row.gronwall_slack = gronwall_slack(sim.traj, u, row.sup_k, row.sup_h, l_f);
        }

        if (cfg.diag.nimfa) {
            const auto nimfa = solve_nimfa_on_grid(g, *cfg.model, cfg.u0, u.times, cfg.ode_opts);
            row.sup_err_y = sup_error(nimfa.times, nimfa.y, u.times, u.u);
        }
    } catch (const std::exception& e) {
        row.status = sanitize(e.what());
    }

    const auto t1 = std::chrono::steady_clock::now();
    row.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    return row;
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size();
    return m % 2 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
}

} // namespace

study_result run_convergence_study(const study_config& cfg) {
    cfg.validate();

    // the homogeneous solution is shared by the whole ladder
    const auto u = solve_meanfield(*cfg.model, cfg.u0, cfg.horizon, cfg.ode_opts,
                                   cfg.sample_points);

    std::vector<row_task> tasks;
    for (const auto n : cfg.ladder)
        for (int r = 0; r < cfg.replications; ++r) tasks.push_back({n, r});

    study_result result;
    result.rows.resize(tasks.size());

#ifdef _OPENMP
    const int threads = cfg.workers > 0 ? cfg.workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
#endif
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(tasks.size()); ++i) {
        const auto& task = tasks[static_cast<std::size_t>(i)];
        result.rows[static_cast<std::size_t>(i)] = run_row(cfg, u, task.n, task.replication);
    }

    // aggregates per ladder point, rows with failures excluded
    const std::vector<std::pair<std::string, double study_row::*>> metrics = {
        {"sup_err_x", &study_row::sup_err_x}, {"sup_err_y", &study_row::sup_err_y},
        {"r1", &study_row::r1},               {"r2", &study_row::r2},
        {"sup_k", &study_row::sup_k},         {"sup_h", &study_row::sup_h},
        {"gronwall_slack", &study_row::gronwall_slack}, {"lm_ratio", &study_row::lm_ratio}};

    for (const auto n : cfg.ladder) {
        for (const auto& [name, member] : metrics) {
            std::vector<double> vals;
            for (const auto& row : result.rows)
                if (row.n == n && row.status == "ok" && std::isfinite(row.*member))
                    vals.push_back(row.*member);
            if (vals.empty()) continue;
            aggregate_row agg;
            agg.n = n;
            agg.metric = name;
            agg.mean = pairwise_sum(vals) / static_cast<double>(vals.size());
            agg.median = median_of(vals);
            if (vals.size() > 1) {
                const double m = agg.mean;
                double ss = 0.0;
                for (double v : vals) ss += (v - m) * (v - m);
                agg.std_error = std::sqrt(ss / static_cast<double>(vals.size() - 1)) /
                                std::sqrt(static_cast<double>(vals.size()));
            }
            result.aggregates.push_back(std::move(agg));
        }
    }

    // log-log slopes of the ladder means where defined and positive
    for (const auto& [name, member] : metrics) {
        if (name == "gronwall_slack" || name == "lm_ratio") continue;
        std::vector<std::pair<double, double>> points;
        for (const auto& agg : result.aggregates)
            if (agg.metric == name && agg.mean > 0.0)
                points.emplace_back(static_cast<double>(agg.n), agg.mean);
        if (points.size() >= 2)
            result.slopes.emplace_back(name, fit_loglog_slope(points));
    }
    return result;
}

} // namespace erdy

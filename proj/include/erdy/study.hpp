#ifndef ERDY_STUDY_HPP
#define ERDY_STUDY_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "erdy/common.hpp"
#include "erdy/exact_sim.hpp"
#include "erdy/graph.hpp"
#include "erdy/model.hpp"
#include "erdy/ode.hpp"

namespace erdy {

struct diagnostics_toggle {
    bool r1 = true;
    std::string r2 = "auto"; // off | exact | sampled | auto
    std::int64_t r2_pairs = 100'000;
    std::int64_t r2_cap = 2000;
    bool k = true;
    bool h = true;
    bool gronwall = true;
    bool nimfa = true;
};

/// Seeded convergence study: for each ladder size and replication,
/// sample a graph, run the exact process against the shared
/// homogeneous solution, solve the intertwined system per graph, and
/// collect the error statistics.
struct study_config {
    std::shared_ptr<const rate_model> model;
    std::vector<std::int64_t> ladder;
    double edge_prob = 0.1;
    weight_distribution weights = weight_distribution::unit();
    double horizon = 5.0;
    std::vector<double> u0;
    init_mode init = init_mode::deterministic;
    std::uint64_t master_seed = 0;
    int replications = 1;
    int sample_points = 200;
    diagnostics_toggle diag;
    int workers = 0; // 0 = library default
    solver_options ode_opts{};

    void validate() const;
};

struct study_row {
    std::int64_t n = 0;
    std::uint64_t seed = 0;
    std::string status = "ok";
    double sup_err_x = 0.0;
    double sup_err_y = 0.0;
    double r1 = 0.0;
    double r2 = 0.0;
    std::string r2_mode = "off";
    double sup_k = 0.0;
    double sup_h = 0.0;
    double gronwall_slack = 0.0;
    double lm_ratio = 0.0;
    double wall_ms = 0.0;
};

struct aggregate_row {
    std::int64_t n = 0;
    std::string metric;
    double mean = 0.0;
    double median = 0.0;
    double std_error = 0.0;
};

struct fit_result {
    double slope = 0.0;
    double intercept = 0.0;
    double r2_fit = 0.0;
};

struct study_result {
    std::vector<study_row> rows; // ladder-major, replication-minor
    std::vector<aggregate_row> aggregates;
    std::vector<std::pair<std::string, fit_result>> slopes;
};

/// Per-row seed: deterministic mixing of (master, n, replication).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t n, std::uint64_t replication);

/// Discrete sup of the l1 distance of two paths on one grid.
/// Grids must match exactly.
double sup_error(const std::vector<double>& times_a,
                 const std::vector<std::vector<double>>& a,
                 const std::vector<double>& times_b,
                 const std::vector<std::vector<double>>& b);

/// Least squares of log(value) on log(n); values must be positive.
fit_result fit_loglog_slope(std::span<const std::pair<double, double>> points);

study_result run_convergence_study(const study_config& config);

} // namespace erdy

#endif

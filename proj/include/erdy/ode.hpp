#ifndef ERDY_ODE_HPP
#define ERDY_ODE_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "erdy/common.hpp"
#include "erdy/graph.hpp"
#include "erdy/model.hpp"

namespace erdy {

struct solver_options {
    double abs_tol = 1e-9;
    double rel_tol = 1e-8;
    /// When positive, integrate with this fixed step instead of adapting.
    double fixed_step = 0.0;
    std::int64_t max_steps = 50'000'000;
};

struct integrator_stats {
    std::int64_t steps = 0;
    std::int64_t rejected = 0;
    std::int64_t rhs_evals = 0;
    double max_error_estimate = 0.0;
};

/// Solution of the homogeneous dynamics du/dt = Q(u) u on a sample grid.
struct mean_field_solution {
    std::vector<double> times;
    std::vector<std::vector<double>> u;
    integrator_stats stats;
    /// Largest observed distance from the probability simplex over all
    /// accepted steps: max of |sum - 1| and the most negative entry.
    /// Solutions are never projected; a violation is reported, not repaired.
    double max_simplex_violation = 0.0;
};

/// Per-vertex solution z_i of the intertwined dynamics together with the
/// population average y. Full z snapshots are kept only when requested.
struct nimfa_solution {
    std::vector<double> times;
    std::vector<std::vector<double>> y;    // per grid point, length S
    std::vector<std::vector<double>> z;    // per grid point, length N*S when stored
    bool has_z = false;
    std::int64_t n = 0;
    int state_count = 0;
    integrator_stats stats;
    double max_simplex_violation = 0.0;    // worst vertex block
};

mean_field_solution solve_meanfield(const rate_model& model, std::span<const double> u0,
                                    double horizon, const solver_options& opts = {},
                                    int sample_points = 200);

mean_field_solution solve_meanfield_on_grid(const rate_model& model, std::span<const double> u0,
                                            std::vector<double> grid,
                                            const solver_options& opts = {});

/// z0 has either length S (broadcast to every vertex) or length N*S.
nimfa_solution solve_nimfa(const weighted_graph& g, const rate_model& model,
                           std::span<const double> z0, double horizon,
                           const solver_options& opts = {}, int sample_points = 200,
                           bool store_z = false);

nimfa_solution solve_nimfa_on_grid(const weighted_graph& g, const rate_model& model,
                                   std::span<const double> z0, std::vector<double> grid,
                                   const solver_options& opts = {}, bool store_z = false);

/// Recompute the average path from stored per-vertex snapshots.
/// Requires a solution with has_z; matches the stored y bit for bit.
std::vector<std::vector<double>> nimfa_average(const nimfa_solution& sol);

/// One right-hand-side evaluation of the intertwined system (the kernel
/// the solver iterates): a sparse pass fills every environment, then each
/// vertex block gets its rate product. Cost O(S * (N + edges)).
std::vector<double> nimfa_rhs(const weighted_graph& g, const rate_model& model,
                              std::span<const double> z);

} // namespace erdy

#endif

#ifndef ERDY_EXACT_SIM_HPP
#define ERDY_EXACT_SIM_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "erdy/common.hpp"
#include "erdy/graph.hpp"
#include "erdy/model.hpp"
#include "erdy/ode.hpp"

namespace erdy {

enum class init_mode { deterministic, multinomial };

/// Assign initial states to n vertices from the distribution u0.
/// Deterministic mode rounds n*u0 by largest remainder (ties to the lower
/// state index) and shuffles the assignment with the seeded stream;
/// multinomial mode draws i.i.d. from u0.
std::vector<std::uint8_t> initial_state(std::span<const double> u0, std::int64_t n,
                                        init_mode mode, std::uint64_t seed);

/// Global-state path sampled on a uniform grid. Counts are exact integer
/// partitions of n; x stores counts / n.
struct trajectory {
    std::vector<double> times;
    std::vector<std::vector<std::int64_t>> counts;
    std::vector<std::vector<double>> x;
    std::vector<std::uint8_t> initial_states;
    std::vector<std::int64_t> initial_counts;
};

struct event_record {
    double t;
    std::uint32_t vertex;
    std::uint8_t from, to;
};

/// Full jump record. `lambda` holds the cumulative integrated channel
/// intensities at every event boundary (channels are piecewise constant
/// in between, so the integrals are closed-form): row e is the value at
/// events[e].t, with one extra row at t_end. Channel id = from * S + to.
struct event_log {
    std::int64_t n = 0;
    int state_count = 0;
    double t_end = 0.0;
    std::vector<event_record> events;
    std::vector<double> lambda;

    std::span<const double> lambda_at(std::size_t boundary) const {
        const auto ss = static_cast<std::size_t>(state_count) * state_count;
        return std::span<const double>(lambda).subspan(boundary * ss, ss);
    }
    std::size_t boundary_count() const { return events.size() + 1; }
};

struct sim_options {
    int sample_points = 200;
    bool track_h = true;
    bool record_log = true;
    /// Full cache rebuild after this many events (also at every sample
    /// grid point) to bound floating-point drift in the incremental state.
    std::int64_t rebuild_interval = 1'000'000;
};

struct sim_result {
    trajectory traj;
    event_log log;
    std::vector<std::uint8_t> final_states;
    std::vector<std::int64_t> final_counts;
    std::uint64_t event_count = 0;
    double sup_h_l1 = 0.0;      // tracked when track_h is on
    double max_phi_drift = 0.0; // worst cached-vs-recomputed gap seen at rebuilds
};

/// Exact event-driven realization of the interacting process: vertex i
/// in state s jumps to k at rate Q_ks(phi_i). Single-threaded and fully
/// deterministic per (graph, model, init, horizon, seed, options).
sim_result simulate(const weighted_graph& g, const rate_model& model,
                    std::span<const std::uint8_t> init, double horizon, std::uint64_t seed,
                    const sim_options& opts = {});

/// Fluctuation error reconstructed from the log: per channel,
/// K_c(t) = jumps_c(t)/n - lambda_c(t)/n, piecewise linear between event
/// boundaries, so suprema are attained at the boundaries and evaluated
/// there exactly.
struct k_path {
    int state_count = 0;
    std::vector<double> times;                    // 0, event times..., t_end
    std::vector<std::vector<double>> aggregate;   // per boundary, length S (post-event)
    std::vector<double> channel_final;            // K_c(t_end), S*S layout
    double sup_channel_abs = 0.0;
    double sup_aggregate_l1 = 0.0;
};

k_path reconstruct_k(const event_log& log, std::int64_t n);

/// Replay the jump record from an initial assignment; returns final counts.
std::vector<std::int64_t> replay_final_counts(const event_log& log,
                                              std::span<const std::uint8_t> initial_states);

/// Environment mismatch H = (1/n) sum_i Q(phi_i) xi_i - Q(x) x computed
/// from scratch for one state snapshot. Components sum to zero.
std::vector<double> compute_h(const weighted_graph& g, const rate_model& model,
                              std::span<const std::uint8_t> states);

/// Slack of the pathwise comparison bound:
///   (|x(0)-u(0)| + sup_t|K| + T sup_t|H|) e^(l_f T) - sup_t|x - u|,
/// all in l1. Nonnegative whenever l_f is a true Lipschitz constant of
/// the drift on the simplex. Grids of the two paths must match.
double gronwall_slack(const trajectory& traj, const mean_field_solution& mf, double sup_k_l1,
                      double sup_h_l1, double l_f);

} // namespace erdy

#endif

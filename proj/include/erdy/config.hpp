#ifndef ERDY_CONFIG_HPP
#define ERDY_CONFIG_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "erdy/exact_sim.hpp"
#include "erdy/graph.hpp"
#include "erdy/model.hpp"
#include "erdy/study.hpp"

namespace erdy {

/// Parsed run configuration. The schema is strict: unknown keys are
/// rejected, and each subcommand checks that the sections it needs are
/// present with the keys it needs.
struct run_config {
    std::shared_ptr<const rate_model> model; // null when section absent

    struct graph_section {
        std::optional<std::int64_t> n;
        double edge_prob = 1.0;
        weight_distribution weights = weight_distribution::unit();
        std::optional<std::uint64_t> seed;
    };
    std::optional<graph_section> graph;

    struct dynamics_section {
        double horizon = 0.0;
        std::vector<double> u0;                       // empty when init given
        std::vector<std::uint8_t> init;               // explicit per-vertex states
        init_mode mode = init_mode::deterministic;
        int sample_points = 200;
        std::optional<std::uint64_t> seed;            // defaults to the graph seed
        double abs_tol = 1e-9;
        double rel_tol = 1e-8;
    };
    std::optional<dynamics_section> dynamics;

    struct study_section {
        std::vector<std::int64_t> ladder;
        int replications = 1;
        std::uint64_t master_seed = 0;
        diagnostics_toggle diag;
    };
    std::optional<study_section> study;

    std::string output_directory = "out";

    /// Materialize generation parameters; requires n and seed.
    graph_params graph_parameters() const;
};

run_config parse_config_text(const std::string& text);
run_config parse_config_file(const std::string& path);

} // namespace erdy

#endif

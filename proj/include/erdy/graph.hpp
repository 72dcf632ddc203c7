#ifndef ERDY_GRAPH_HPP
#define ERDY_GRAPH_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "erdy/common.hpp"
#include "erdy/rng.hpp"

namespace erdy {

enum class weight_kind { constant, unit, exponential, uniform, lognormal };

/// Edge-weight distribution with analytic moments.
///
/// `unit` is the unweighted graph (every present edge has weight 1, edge
/// presence driven by the Bernoulli link probability alone). `lognormal`
/// is deliberately heavy-tailed: its moment generating function diverges
/// for every positive argument, so it exercises the negative branch of
/// the assumption checks.
struct weight_distribution {
    weight_kind kind = weight_kind::unit;
    double a = 1.0; // constant: value; exponential: mean; uniform: lo; lognormal: log-mean
    double b = 0.0; // uniform: hi; lognormal: log-sd

    static weight_distribution constant(double value);
    static weight_distribution unit();
    static weight_distribution exponential(double mean);
    static weight_distribution uniform(double lo, double hi);
    static weight_distribution lognormal(double logmean, double logsd);

    double mean() const;
    double variance() const;
    /// Whether E exp(s w) is finite for some s > 0.
    bool mgf_finite() const;

    /// Draw one strictly positive weight from the stream.
    double sample(rng::stream& s) const;

    void validate() const;
    std::string describe() const;                       // "<kind>:<a>:<b>"
    static weight_distribution parse(const std::string& text);

    bool operator==(const weight_distribution&) const = default;
};

/// Generation parameters of a weighted Erdos-Renyi graph.
struct graph_params {
    std::int64_t n = 0;        // vertex count
    double edge_prob = 1.0;    // link probability p in (0, 1]
    weight_distribution weights{};
    std::uint64_t seed = 0;

    double mu_tilde() const { return edge_prob * weights.mean(); }
    double sigma_tilde_sq() const {
        const double m = weights.mean();
        return edge_prob * (weights.variance() + m * m) - edge_prob * edge_prob * m * m;
    }
    /// Expected weighted degree (N-1) p mu. Deterministic normalizer for
    /// local environments; never the realized average.
    double mean_degree() const { return static_cast<double>(n - 1) * mu_tilde(); }

    /// Structural validity (explicit graphs, including edgeless ones).
    void validate() const;
    /// Sampling additionally needs n >= 2 and a positive mean degree.
    void validate_for_sampling() const;

    bool operator==(const graph_params&) const = default;
};

/// Immutable symmetric weighted adjacency in CSR form, loop-free,
/// per-vertex neighbour lists sorted by index. Safe to share across
/// threads after construction.
class weighted_graph {
public:
    struct neighbor_range {
        std::span<const std::uint32_t> to;
        std::span<const double> weight;
        std::size_t size() const { return to.size(); }
    };

    /// Build from an undirected edge list (i < j, weights > 0, no duplicates).
    weighted_graph(graph_params params,
                   const std::vector<std::tuple<std::uint32_t, std::uint32_t, double>>& edges);

    std::int64_t vertex_count() const { return params_.n; }
    const graph_params& params() const { return params_; }
    neighbor_range neighbors(std::uint32_t i) const;
    /// d(i): sum of incident weights, cached at construction.
    double degree_sum(std::uint32_t i) const { return degree_sums_[i]; }
    std::span<const double> degree_sums() const { return degree_sums_; }
    double mean_degree() const { return params_.mean_degree(); }
    std::uint64_t edge_count() const { return to_.size() / 2; }
    double max_degree_ratio() const;

    /// Recheck symmetry, zero diagonal and degree sums from scratch.
    void verify() const;

    bool operator==(const weighted_graph&) const = default;

private:
    weighted_graph() = default;
    friend weighted_graph sample_graph(const graph_params&);

    graph_params params_{};
    std::vector<std::uint64_t> offsets_; // n + 1
    std::vector<std::uint32_t> to_;
    std::vector<double> weight_;
    std::vector<double> degree_sums_;

    void finalize_from_upper(std::vector<std::vector<std::uint32_t>>& up_to,
                             std::vector<std::vector<double>>& up_w);
};

/// Sample a graph. Pure function of the parameters: each unordered pair
/// (i, j) draws from its own keyed stream (presence first, then the
/// weight), so any generation order and thread count produce the same
/// graph bit for bit.
weighted_graph sample_graph(const graph_params& params);

/// Expected weighted degree (N-1) p mu.
double mean_degree(const graph_params& params);

// Plain-text edge list: comment lines, then "N <n>", then one line
// "i j w" per undirected edge with i < j and w at 17 significant digits.
void save_graph(std::ostream& out, const weighted_graph& g);
void save_graph_file(const std::string& path, const weighted_graph& g);
weighted_graph load_graph(std::istream& in);
weighted_graph load_graph_file(const std::string& path);

// ---- graph statistics ----

/// Weighted common-neighbour sum d(i,j) = sum_k a_ik a_jk.
double common_weight(const weighted_graph& g, std::uint32_t i, std::uint32_t j);

/// c(i,j) = d(i,j)/N - d(i)d(j)/N^2.
double covariance_c(const weighted_graph& g, std::uint32_t i, std::uint32_t j);

/// Degree-concentration statistic sqrt( sum_j (d(j) - <d>)^2 / (N <d>^2) ).
double r1(const weighted_graph& g);

struct r2_result {
    double estimate = 0.0;
    double std_error = 0.0; // 0 in exact mode
};

/// Full double sum (1/<d>^2) sum_{i,j} |c(i,j)|. Cost grows like
/// N^2 * average degree, so it is capped; use r2_sampled above the cap.
r2_result r2_exact(const weighted_graph& g, std::int64_t cap = 2000);

/// Unbiased estimate: exact diagonal plus off-diagonal part estimated
/// from uniformly sampled unordered pairs, with standard error.
r2_result r2_sampled(const weighted_graph& g, std::int64_t pair_count, std::uint64_t seed);

struct assumption_report {
    double a2_epsilon_star = 0.0; // log<d>/log N - 1/2
    bool b1 = false;              // p == 1
    bool b2 = false;              // weight MGF finite near 0
    bool lm_holds = false;        // max_i d(i)/<d> <= M
    double lm_ratio = 0.0;
    double m = 0.0;               // threshold used
    bool a1 = false;              // model globally Lipschitz
};

assumption_report check_assumptions(const weighted_graph& g,
                                    bool model_globally_lipschitz,
                                    double m = 4.0);

} // namespace erdy

#endif

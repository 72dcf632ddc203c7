#include "erdy/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace erdy {

// ---- weight_distribution ----

weight_distribution weight_distribution::constant(double value) {
    return {weight_kind::constant, value, 0.0};
}
weight_distribution weight_distribution::unit() {
    return {weight_kind::unit, 1.0, 0.0};
}
weight_distribution weight_distribution::exponential(double mean) {
    return {weight_kind::exponential, mean, 0.0};
}
weight_distribution weight_distribution::uniform(double lo, double hi) {
    return {weight_kind::uniform, lo, hi};
}
weight_distribution weight_distribution::lognormal(double logmean, double logsd) {
    return {weight_kind::lognormal, logmean, logsd};
}

double weight_distribution::mean() const {
    switch (kind) {
    case weight_kind::constant: return a;
    case weight_kind::unit: return 1.0;
    case weight_kind::exponential: return a;
    case weight_kind::uniform: return 0.5 * (a + b);
    case weight_kind::lognormal: return std::exp(a + 0.5 * b * b);
    }
    return 0.0;
}

double weight_distribution::variance() const {
    switch (kind) {
    case weight_kind::constant: return 0.0;
    case weight_kind::unit: return 0.0;
    case weight_kind::exponential: return a * a;
    case weight_kind::uniform: return (b - a) * (b - a) / 12.0;
    case weight_kind::lognormal: {
        const double s2 = b * b;
        return (std::exp(s2) - 1.0) * std::exp(2.0 * a + s2);
    }
    }
    return 0.0;
}

bool weight_distribution::mgf_finite() const {
    // Bounded support or exponential tail: finite. Lognormal: divergent
    // for every positive argument.
    return kind != weight_kind::lognormal;
}

double weight_distribution::sample(rng::stream& s) const {
    switch (kind) {
    case weight_kind::constant: return a;
    case weight_kind::unit: return 1.0;
    case weight_kind::exponential: return -a * std::log(s.next_open());
    case weight_kind::uniform: {
        double w;
        do {
            w = a + (b - a) * s.next_double();
        } while (w <= 0.0); // edges carry strictly positive weights
        return w;
    }
    case weight_kind::lognormal: return std::exp(a + b * rng::normal(s));
    }
    return 0.0;
}

void weight_distribution::validate() const {
    switch (kind) {
    case weight_kind::constant:
        if (!(a > 0.0)) throw invalid_config("constant weight must be positive");
        break;
    case weight_kind::unit:
        break;
    case weight_kind::exponential:
        if (!(a > 0.0)) throw invalid_config("exponential weight mean must be positive");
        break;
    case weight_kind::uniform:
        if (!(a >= 0.0) || !(b > a))
            throw invalid_config("uniform weight bounds must satisfy 0 <= lo < hi");
        break;
    case weight_kind::lognormal:
        if (!(b >= 0.0) || !std::isfinite(a))
            throw invalid_config("lognormal weight needs finite logmean and logsd >= 0");
        break;
    }
}

static const char* kind_name(weight_kind k) {
    switch (k) {
    case weight_kind::constant: return "constant";
    case weight_kind::unit: return "unit";
    case weight_kind::exponential: return "exponential";
    case weight_kind::uniform: return "uniform";
    case weight_kind::lognormal: return "lognormal";
    }
    return "?";
}

std::string weight_distribution::describe() const {
    return std::string(kind_name(kind)) + ":" + g17(a) + ":" + g17(b);
}

weight_distribution weight_distribution::parse(const std::string& text) {
    const auto p1 = text.find(':');
    const auto p2 = text.find(':', p1 == std::string::npos ? p1 : p1 + 1);
    if (p1 == std::string::npos || p2 == std::string::npos)
        throw invalid_config("malformed weight distribution: " + text);
    const std::string name = text.substr(0, p1);
    weight_distribution d;
    d.a = std::stod(text.substr(p1 + 1, p2 - p1 - 1));
    d.b = std::stod(text.substr(p2 + 1));
    if (name == "constant") d.kind = weight_kind::constant;
    else if (name == "unit") d.kind = weight_kind::unit;
    else if (name == "exponential") d.kind = weight_kind::exponential;
    else if (name == "uniform") d.kind = weight_kind::uniform;
    else if (name == "lognormal") d.kind = weight_kind::lognormal;
    else throw invalid_config("unknown weight distribution kind: " + name);
    d.validate();
    return d;
}

// ---- graph_params ----

void graph_params::validate() const {
    if (n < 1) throw invalid_config("graph needs at least one vertex");
    if (n > 0xFFFFFFFFll) throw invalid_config("vertex indices are 32-bit");
    if (!(edge_prob > 0.0) || !(edge_prob <= 1.0))
        throw invalid_config("edge probability must lie in (0, 1]");
    weights.validate();
}

void graph_params::validate_for_sampling() const {
    validate();
    if (n < 2) throw invalid_config("sampling needs n >= 2");
    if (!(mean_degree() > 0.0))
        throw invalid_config("degenerate parameters: mean degree (N-1)*p*mu must be positive");
}

double mean_degree(const graph_params& params) {
    return params.mean_degree();
}

// ---- weighted_graph ----

weighted_graph::weighted_graph(
    graph_params params,
    const std::vector<std::tuple<std::uint32_t, std::uint32_t, double>>& edges) {
    params.validate();
    params_ = params;
    const auto n = static_cast<std::uint32_t>(params.n);

    std::vector<std::vector<std::uint32_t>> up_to(n);
    std::vector<std::vector<double>> up_w(n);
    for (const auto& [i, j, w] : edges) {
        if (i >= j) throw invalid_config("edge list must use i < j");
        if (j >= n) throw invalid_config("edge endpoint out of range");
        if (!(w > 0.0)) throw invalid_config("edge weights must be positive");
        up_to[i].push_back(j);
        up_w[i].push_back(w);
    }
    for (std::uint32_t i = 0; i < n; ++i) {
        // sort row i by endpoint, detect duplicates
        std::vector<std::size_t> order(up_to[i].size());
        for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t x, std::size_t y) { return up_to[i][x] < up_to[i][y]; });
        std::vector<std::uint32_t> st(order.size());
        std::vector<double> sw(order.size());
        for (std::size_t k = 0; k < order.size(); ++k) {
            st[k] = up_to[i][order[k]];
            sw[k] = up_w[i][order[k]];
            if (k > 0 && st[k] == st[k - 1])
                throw invalid_config("duplicate edge in edge list");
        }
        up_to[i] = std::move(st);
        up_w[i] = std::move(sw);
    }
    finalize_from_upper(up_to, up_w);
}

void weighted_graph::finalize_from_upper(std::vector<std::vector<std::uint32_t>>& up_to,
                                         std::vector<std::vector<double>>& up_w) {
    const auto n = static_cast<std::uint32_t>(params_.n);
    std::vector<std::uint64_t> deg(n, 0);
    std::uint64_t total = 0;
    for (std::uint32_t i = 0; i < n; ++i) {
        deg[i] += up_to[i].size();
        total += up_to[i].size();
        for (std::uint32_t j : up_to[i]) deg[j] += 1;
    }
    offsets_.assign(n + 1, 0);
    for (std::uint32_t i = 0; i < n; ++i) offsets_[i + 1] = offsets_[i] + deg[i];
    to_.resize(2 * total);
    weight_.resize(2 * total);

    // Mirror pass in ascending row order: each row receives its lower
    // part (from earlier rows) before its own upper part, so rows come
    // out sorted without an extra sort.
    std::vector<std::uint64_t> cursor(offsets_.begin(), offsets_.end() - 1);
    for (std::uint32_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < up_to[i].size(); ++k) {
            const std::uint32_t j = up_to[i][k];
            to_[cursor[j]] = i;
            weight_[cursor[j]] = up_w[i][k];
            ++cursor[j];
        }
        for (std::size_t k = 0; k < up_to[i].size(); ++k) {
            to_[cursor[i]] = up_to[i][k];
            weight_[cursor[i]] = up_w[i][k];
            ++cursor[i];
        }
        up_to[i].clear();
        up_to[i].shrink_to_fit();
        up_w[i].clear();
        up_w[i].shrink_to_fit();
    }

    degree_sums_.assign(n, 0.0);
    for (std::uint32_t i = 0; i < n; ++i) {
        const auto row = neighbors(i);
        degree_sums_[i] = pairwise_sum(row.weight);
    }
}

weighted_graph::neighbor_range weighted_graph::neighbors(std::uint32_t i) const {
    const auto lo = offsets_[i], hi = offsets_[i + 1];
    return {std::span<const std::uint32_t>(to_).subspan(lo, hi - lo),
            std::span<const double>(weight_).subspan(lo, hi - lo)};
}

double weighted_graph::max_degree_ratio() const {
    const double md = mean_degree();
    if (!(md > 0.0)) throw invalid_config("max_degree_ratio needs a positive mean degree");
    double mx = 0.0;
    for (double d : degree_sums_) mx = std::max(mx, d);
    return mx / md;
}

void weighted_graph::verify() const {
    const auto n = static_cast<std::uint32_t>(params_.n);
    for (std::uint32_t i = 0; i < n; ++i) {
        const auto row = neighbors(i);
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (row.to[k] == i) throw std::logic_error("loop edge found");
            if (k > 0 && row.to[k] <= row.to[k - 1])
                throw std::logic_error("row not strictly sorted");
            if (!(row.weight[k] > 0.0)) throw std::logic_error("nonpositive weight");
            // mirrored entry must exist with the identical weight
            const auto other = neighbors(row.to[k]);
            const auto it = std::lower_bound(other.to.begin(), other.to.end(), i);
            if (it == other.to.end() || *it != i)
                throw std::logic_error("asymmetric adjacency");
            const auto pos = static_cast<std::size_t>(it - other.to.begin());
            if (other.weight[pos] != row.weight[k])
                throw std::logic_error("asymmetric weight");
        }
        const double recomputed = pairwise_sum(row.weight);
        if (recomputed != degree_sums_[i])
            throw std::logic_error("stale degree sum");
    }
}

weighted_graph sample_graph(const graph_params& params) {
    params.validate_for_sampling();
    weighted_graph g;
    g.params_ = params;
    const auto n = static_cast<std::uint32_t>(params.n);
    const double p = params.edge_prob;

    std::vector<std::vector<std::uint32_t>> up_to(n);
    std::vector<std::vector<double>> up_w(n);

#pragma omp parallel for schedule(dynamic, 16)
    for (std::int64_t ii = 0; ii < static_cast<std::int64_t>(n) - 1; ++ii) {
        const auto i = static_cast<std::uint32_t>(ii);
        auto& row_to = up_to[i];
        auto& row_w = up_w[i];
        for (std::uint32_t j = i + 1; j < n; ++j) {
            auto s = rng::pair_stream(params.seed, i, j);
            if (s.next_double() < p) {
                row_to.push_back(j);
                row_w.push_back(params.weights.sample(s));
            }
        }
    }

    g.finalize_from_upper(up_to, up_w);
    return g;
}

// ---- serialization ----

void save_graph(std::ostream& out, const weighted_graph& g) {
    const auto& p = g.params();
    out << "# " << format_tag << "\n";
    out << "# graph n=" << p.n << " p=" << g17(p.edge_prob)
        << " weights=" << p.weights.describe() << " seed=" << p.seed << "\n";
    out << "N " << p.n << "\n";
    const auto n = static_cast<std::uint32_t>(p.n);
    for (std::uint32_t i = 0; i < n; ++i) {
        const auto row = g.neighbors(i);
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (row.to[k] > i)
                out << i << " " << row.to[k] << " " << g17(row.weight[k]) << "\n";
        }
    }
}

void save_graph_file(const std::string& path, const weighted_graph& g) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    save_graph(out, g);
}

weighted_graph load_graph(std::istream& in) {
    std::string line;
    graph_params params;
    bool have_params = false;
    std::int64_t n = -1;
    std::vector<std::tuple<std::uint32_t, std::uint32_t, double>> edges;

    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream ls(line.substr(1));
            std::string word;
            ls >> word;
            if (word == "graph") {
                std::string tok;
                while (ls >> tok) {
                    const auto eq = tok.find('=');
                    if (eq == std::string::npos) continue;
                    const std::string key = tok.substr(0, eq);
                    const std::string val = tok.substr(eq + 1);
                    if (key == "n") params.n = std::stoll(val);
                    else if (key == "p") params.edge_prob = std::stod(val);
                    else if (key == "weights") params.weights = weight_distribution::parse(val);
                    else if (key == "seed") params.seed = std::stoull(val);
                }
                have_params = true;
            }
            continue;
        }
        std::istringstream ls(line);
        if (n < 0) {
            std::string tag;
            ls >> tag >> n;
            if (tag != "N" || !ls || n < 1)
                throw invalid_config("edge list must start with a line 'N <count>'");
            continue;
        }
        std::uint64_t i, j;
        double w;
        ls >> i >> j >> w;
        if (!ls) throw invalid_config("malformed edge line: " + line);
        edges.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), w);
    }
    if (n < 1) throw invalid_config("edge list missing the 'N <count>' line");
    if (!have_params) {
        params.edge_prob = 1.0;
        params.weights = weight_distribution::unit();
        params.seed = 0;
    }
    params.n = n;
    return weighted_graph(params, edges);
}

weighted_graph load_graph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open graph file: " + path);
    return load_graph(in);
}

} // namespace erdy

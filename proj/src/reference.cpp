#include "erdy/reference.hpp"

#include <algorithm>
#include <cmath>

namespace erdy::reference {

std::vector<double> dense_adjacency(const weighted_graph& g) {
    const auto n = static_cast<std::size_t>(g.vertex_count());
    std::vector<double> a(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = g.neighbors(static_cast<std::uint32_t>(i));
        for (std::size_t e = 0; e < row.size(); ++e) a[i * n + row.to[e]] = row.weight[e];
    }
    return a;
}

double common_weight_dense(const weighted_graph& g, std::uint32_t i, std::uint32_t j) {
    const auto n = static_cast<std::size_t>(g.vertex_count());
    const auto a = dense_adjacency(g);
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += a[i * n + k] * a[j * n + k];
    return s;
}

double r2_pairwise(const weighted_graph& g) {
    const auto n = static_cast<std::uint32_t>(g.vertex_count());
    const double nn = static_cast<double>(n);
    const double md = g.mean_degree();
    double total = 0.0;
    for (std::uint32_t i = 0; i < n; ++i) {
        for (std::uint32_t j = 0; j < n; ++j) {
            const auto a = g.neighbors(i);
            const auto b = g.neighbors(j);
            double dij = 0.0;
            std::size_t x = 0, y = 0;
            while (x < a.size() && y < b.size()) {
                if (a.to[x] < b.to[y]) ++x;
                else if (a.to[x] > b.to[y]) ++y;
                else {
                    dij += a.weight[x] * b.weight[y];
                    ++x;
                    ++y;
                }
            }
            total += std::abs(dij / nn - g.degree_sum(i) * g.degree_sum(j) / (nn * nn));
        }
    }
    return total / (md * md);
}

std::vector<double> nimfa_rhs_dense(const weighted_graph& g, const rate_model& model,
                                    std::span<const double> z) {
    const auto n = static_cast<std::size_t>(g.vertex_count());
    const auto s = static_cast<std::size_t>(model.state_count());
    const auto a = dense_adjacency(g);
    const double inv_md = 1.0 / g.mean_degree();

    std::vector<double> dz(n * s, 0.0);
    std::vector<double> rho(s);
    std::vector<double> col(s);
    for (std::size_t i = 0; i < n; ++i) {
        std::fill(rho.begin(), rho.end(), 0.0);
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < s; ++k) rho[k] += a[i * n + j] * z[j * s + k];
        for (std::size_t k = 0; k < s; ++k) rho[k] = std::max(0.0, rho[k] * inv_md);
        for (std::size_t from = 0; from < s; ++from) {
            model.rates_from(static_cast<int>(from), rho, col);
            const double zs = z[i * s + from];
            double total = 0.0;
            for (std::size_t k = 0; k < s; ++k) {
                dz[i * s + k] += col[k] * zs;
                total += col[k];
            }
            dz[i * s + from] -= total * zs;
        }
    }
    return dz;
}

std::vector<double> nimfa_rhs_serial(const weighted_graph& g, const rate_model& model,
                                     std::span<const double> z) {
    const auto n = static_cast<std::size_t>(g.vertex_count());
    const auto s = static_cast<std::size_t>(model.state_count());
    const double md = g.mean_degree();
    const double inv_md = md > 0.0 ? 1.0 / md : 0.0;

    std::vector<double> dz(n * s, 0.0);
    std::vector<double> rho(s);
    std::vector<double> col(s);
    for (std::size_t i = 0; i < n; ++i) {
        std::fill(rho.begin(), rho.end(), 0.0);
        const auto row = g.neighbors(static_cast<std::uint32_t>(i));
        for (std::size_t e = 0; e < row.size(); ++e) {
            const double* zj = z.data() + static_cast<std::size_t>(row.to[e]) * s;
            for (std::size_t k = 0; k < s; ++k) rho[k] += row.weight[e] * zj[k];
        }
        for (std::size_t k = 0; k < s; ++k) rho[k] = std::max(0.0, rho[k] * inv_md);
        for (std::size_t from = 0; from < s; ++from) {
            model.rates_from(static_cast<int>(from), rho, col);
            const double zs = z[i * s + from];
            double total = 0.0;
            for (std::size_t k = 0; k < s; ++k) {
                dz[i * s + k] += col[k] * zs;
                total += col[k];
            }
            dz[i * s + from] -= total * zs;
        }
    }
    return dz;
}

weighted_graph sample_graph_serial(const graph_params& params) {
    params.validate_for_sampling();
    const auto n = static_cast<std::uint32_t>(params.n);
    std::vector<std::tuple<std::uint32_t, std::uint32_t, double>> edges;
    for (std::uint32_t i = 0; i + 1 < n; ++i) {
        for (std::uint32_t j = i + 1; j < n; ++j) {
            auto st = rng::pair_stream(params.seed, i, j);
            if (st.next_double() < params.edge_prob)
                edges.emplace_back(i, j, params.weights.sample(st));
        }
    }
    return weighted_graph(params, edges);
}

} // namespace erdy::reference

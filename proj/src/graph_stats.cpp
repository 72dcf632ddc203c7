#include "erdy/graph.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace erdy {

double common_weight(const weighted_graph& g, std::uint32_t i, std::uint32_t j) {
    const auto n = static_cast<std::uint32_t>(g.vertex_count());
    if (i >= n || j >= n) throw invalid_config("vertex index out of range");
    const auto a = g.neighbors(i);
    const auto b = g.neighbors(j);
    // two-pointer intersection over the sorted rows
    double s = 0.0;
    std::size_t x = 0, y = 0;
    while (x < a.size() && y < b.size()) {
        if (a.to[x] < b.to[y]) ++x;
        else if (a.to[x] > b.to[y]) ++y;
        else {
            s += a.weight[x] * b.weight[y];
            ++x;
            ++y;
        }
    }
    return s;
}

double covariance_c(const weighted_graph& g, std::uint32_t i, std::uint32_t j) {
    const auto n = static_cast<double>(g.vertex_count());
    return common_weight(g, i, j) / n - g.degree_sum(i) * g.degree_sum(j) / (n * n);
}

double r1(const weighted_graph& g) {
    const double md = g.mean_degree();
    if (!(md > 0.0)) throw invalid_config("r1 needs a positive mean degree");
    const auto n = static_cast<std::size_t>(g.vertex_count());
    const auto d = g.degree_sums();
    const double ss = pairwise_sum(n, [&](std::size_t i) {
        const double dev = d[i] - md;
        return dev * dev;
    });
    return std::sqrt(ss / (static_cast<double>(n) * md * md));
}

namespace {

// Row term of the full |c| sum: pairs j reachable in two hops get the
// exact value; every other j contributes d(i) d(j) / N^2, handled in
// aggregate through the total degree mass.
double r2_row_term(const weighted_graph& g, std::uint32_t i, double inv_n, double total_degree,
                   std::vector<double>& acc, std::vector<std::uint32_t>& touched) {
    touched.clear();
    const auto row = g.neighbors(i);
    for (std::size_t k = 0; k < row.size(); ++k) {
        const auto mid = row.to[k];
        const double w_ik = row.weight[k];
        const auto mrow = g.neighbors(mid);
        for (std::size_t l = 0; l < mrow.size(); ++l) {
            const auto j = mrow.to[l];
            if (acc[j] == 0.0) touched.push_back(j);
            acc[j] += w_ik * mrow.weight[l];
        }
    }
    std::sort(touched.begin(), touched.end());

    const double di = g.degree_sum(i);
    double term = 0.0;
    double touched_degree = 0.0;
    for (const auto j : touched) {
        const double dij = acc[j];
        acc[j] = 0.0;
        term += std::abs(dij * inv_n - di * g.degree_sum(j) * inv_n * inv_n);
        touched_degree += g.degree_sum(j);
    }
    term += di * inv_n * inv_n * (total_degree - touched_degree);
    return term;
}

} // namespace

r2_result r2_exact(const weighted_graph& g, std::int64_t cap) {
    const std::int64_t n = g.vertex_count();
    if (n > cap)
        throw capacity_error("r2 exact mode capped at n <= " + std::to_string(cap) +
                             " (use sampled mode)");
    const double md = g.mean_degree();
    if (!(md > 0.0)) throw invalid_config("r2 needs a positive mean degree");
    const double inv_n = 1.0 / static_cast<double>(n);
    const double total_degree = pairwise_sum(g.degree_sums());

    // Row terms in parallel, each row accumulated in a fixed order, then a
    // fixed-order reduction: bit-stable for any thread count.
    std::vector<double> row_terms(static_cast<std::size_t>(n), 0.0);
#pragma omp parallel
    {
        std::vector<double> acc(static_cast<std::size_t>(n), 0.0);
        std::vector<std::uint32_t> touched;
#pragma omp for schedule(dynamic, 32)
        for (std::int64_t i = 0; i < n; ++i)
            row_terms[static_cast<std::size_t>(i)] =
                r2_row_term(g, static_cast<std::uint32_t>(i), inv_n, total_degree, acc, touched);
    }
    const double total = pairwise_sum(row_terms);
    return {total / (md * md), 0.0};
}

r2_result r2_sampled(const weighted_graph& g, std::int64_t pair_count, std::uint64_t seed) {
    const std::int64_t n = g.vertex_count();
    if (n < 2) throw invalid_config("r2 sampled mode needs n >= 2");
    if (pair_count < 2) throw invalid_config("r2 sampled mode needs at least 2 pairs");
    const double md = g.mean_degree();
    if (!(md > 0.0)) throw invalid_config("r2 needs a positive mean degree");

    // exact diagonal
    const double diag = pairwise_sum(static_cast<std::size_t>(n), [&](std::size_t i) {
        return std::abs(covariance_c(g, static_cast<std::uint32_t>(i),
                                     static_cast<std::uint32_t>(i)));
    });

    // off-diagonal part from uniform unordered pairs
    auto s = rng::keyed_stream(seed, rng::tag_r2);
    double sum = 0.0, sumsq = 0.0;
    for (std::int64_t k = 0; k < pair_count; ++k) {
        const auto i = static_cast<std::uint32_t>(s.next_below(static_cast<std::uint64_t>(n)));
        auto j = static_cast<std::uint32_t>(s.next_below(static_cast<std::uint64_t>(n) - 1));
        if (j >= i) ++j;
        const double v = std::abs(covariance_c(g, i, j));
        sum += v;
        sumsq += v * v;
    }
    const double m = static_cast<double>(pair_count);
    const double mean = sum / m;
    const double var = std::max(0.0, (sumsq - m * mean * mean) / (m - 1.0));
    const double pairs = static_cast<double>(n) * static_cast<double>(n - 1);
    const double scale = pairs / (md * md);
    return {(diag + pairs * mean) / (md * md), scale * std::sqrt(var / m)};
}

assumption_report check_assumptions(const weighted_graph& g,
                                    bool model_globally_lipschitz,
                                    double m) {
    if (!(m > 1.0)) throw invalid_config("assumption threshold M must exceed 1");
    const auto& p = g.params();
    assumption_report rep;
    rep.m = m;
    rep.a1 = model_globally_lipschitz;
    rep.b1 = p.edge_prob == 1.0;
    rep.b2 = p.weights.mgf_finite();
    const double md = g.mean_degree();
    if (!(md > 0.0)) throw invalid_config("assumption checks need a positive mean degree");
    rep.a2_epsilon_star =
        std::log(md) / std::log(static_cast<double>(p.n)) - 0.5;
    rep.lm_ratio = g.max_degree_ratio();
    rep.lm_holds = rep.lm_ratio <= m;
    return rep;
}

} // namespace erdy

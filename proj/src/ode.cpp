#include "erdy/ode.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace erdy {

namespace {

// Dormand-Prince 5(4), 7 stages, first-same-as-last.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// embedded 4th-order weights
constexpr double e1 = 5179.0 / 57600, e3 = 7571.0 / 16695, e4 = 393.0 / 640,
                 e5 = -92097.0 / 339200, e6 = 187.0 / 2100, e7 = 1.0 / 40;

using rhs_fn = std::function<void(double, std::span<const double>, std::span<double>)>;
using record_fn = std::function<void(std::size_t, std::span<const double>)>;
using violation_fn = std::function<double(std::span<const double>)>;

struct dp_workspace {
    std::vector<double> k1, k2, k3, k4, k5, k6, k7, ytmp, y5;
    explicit dp_workspace(std::size_t n)
        : k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), y5(n) {}
};

/// Integrate y' = rhs(t, y) across the grid, invoking `record` at every
/// grid time (steps are clipped to grid times, so values there are not
/// interpolated). Returns stats; tracks the worst `violation` over
/// accepted steps.
integrator_stats integrate_dp45(const rhs_fn& rhs, std::vector<double>& y,
                                std::span<const double> grid, const solver_options& opts,
                                const record_fn& record, const violation_fn& violation,
                                double& max_violation) {
    const std::size_t dim = y.size();
    dp_workspace w(dim);
    integrator_stats stats;

    double t = grid.front();
    std::size_t next_grid = 0;
    max_violation = std::max(max_violation, violation(y));
    while (next_grid < grid.size() && grid[next_grid] <= t) {
        record(next_grid, y);
        ++next_grid;
    }
    if (next_grid >= grid.size()) return stats;

    const double horizon = grid.back();
    const bool fixed = opts.fixed_step > 0.0;
    double h_next = fixed ? opts.fixed_step
                          : std::min((horizon - t) / 100.0, grid[next_grid] - t);

    rhs(t, y, w.k1); // FSAL seed
    ++stats.rhs_evals;

    while (t < horizon) {
        if (stats.steps + stats.rejected >= opts.max_steps)
            throw integration_error("integration exceeded the step budget");
        double h = fixed ? opts.fixed_step : h_next;
        h = std::min(h, horizon - t);
        // land exactly on the next grid time
        bool hit_grid = false;
        if (grid[next_grid] - t <= h * (1.0 + 1e-12)) {
            h = grid[next_grid] - t;
            hit_grid = true;
        }
        if (!(h > 0.0) || t + h == t) {
            std::ostringstream msg;
            msg << "step size underflow at t=" << t << " (h=" << h
                << "), accepted=" << stats.steps << " rejected=" << stats.rejected;
            throw integration_error(msg.str());
        }

        auto stage = [&](std::span<double> out, auto&&... terms) {
            // ytmp = y + h * (sum of coeff*k terms)
            for (std::size_t i = 0; i < dim; ++i) {
                double acc = 0.0;
                ((acc += terms.first * terms.second[i]), ...);
                out[i] = y[i] + h * acc;
            }
        };
        using P = std::pair<double, const std::vector<double>&>;
        stage(w.ytmp, P{a21, w.k1});
        rhs(t + c2 * h, w.ytmp, w.k2);
        stage(w.ytmp, P{a31, w.k1}, P{a32, w.k2});
        rhs(t + c3 * h, w.ytmp, w.k3);
        stage(w.ytmp, P{a41, w.k1}, P{a42, w.k2}, P{a43, w.k3});
        rhs(t + c4 * h, w.ytmp, w.k4);
        stage(w.ytmp, P{a51, w.k1}, P{a52, w.k2}, P{a53, w.k3}, P{a54, w.k4});
        rhs(t + c5 * h, w.ytmp, w.k5);
        stage(w.ytmp, P{a61, w.k1}, P{a62, w.k2}, P{a63, w.k3}, P{a64, w.k4}, P{a65, w.k5});
        rhs(t + h, w.ytmp, w.k6);
        stage(w.y5, P{b1, w.k1}, P{b3, w.k3}, P{b4, w.k4}, P{b5, w.k5}, P{b6, w.k6});
        rhs(t + h, w.y5, w.k7);
        stats.rhs_evals += 6;

        // scaled RMS error of (5th - 4th); fixed order, bit-stable
        const double err = std::sqrt(pairwise_sum(dim, [&](std::size_t i) {
                               const double y4 = y[i] + h * (e1 * w.k1[i] + e3 * w.k3[i] +
                                                             e4 * w.k4[i] + e5 * w.k5[i] +
                                                             e6 * w.k6[i] + e7 * w.k7[i]);
                               const double scale =
                                   opts.abs_tol +
                                   opts.rel_tol * std::max(std::abs(y[i]), std::abs(w.y5[i]));
                               const double d = (w.y5[i] - y4) / scale;
                               return d * d;
                           }) /
                           static_cast<double>(dim));

        if (fixed || err <= 1.0) {
            t = hit_grid ? grid[next_grid] : t + h;
            y.swap(w.y5);
            w.k1.swap(w.k7); // FSAL
            ++stats.steps;
            stats.max_error_estimate = std::max(stats.max_error_estimate, err);
            max_violation = std::max(max_violation, violation(y));
            while (next_grid < grid.size() && grid[next_grid] <= t) {
                record(next_grid, y);
                ++next_grid;
            }
            if (next_grid >= grid.size()) break;
            if (!fixed) {
                const double factor =
                    err > 0.0 ? std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0) : 5.0;
                // a grid-clipped step must not drag the controller down
                h_next = hit_grid ? std::max(h_next, h * factor) : h * factor;
            }
        } else {
            ++stats.rejected;
            h_next = h * std::clamp(0.9 * std::pow(err, -0.2), 0.2, 1.0);
        }
    }
    return stats;
}

double simplex_violation_blocks(std::span<const double> y, std::size_t block) {
    double worst = 0.0;
    for (std::size_t off = 0; off < y.size(); off += block) {
        double sum = 0.0, neg = 0.0;
        for (std::size_t s = 0; s < block; ++s) {
            sum += y[off + s];
            neg = std::min(neg, y[off + s]);
        }
        worst = std::max(worst, std::max(std::abs(sum - 1.0), -neg));
    }
    return worst;
}

void check_on_simplex(std::span<const double> v, const char* what) {
    double sum = 0.0;
    for (double x : v) {
        if (!(x >= -1e-12))
            throw invalid_config(std::string(what) + " has a negative entry");
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw invalid_config(std::string(what) + " does not sum to 1 (within 1e-12)");
}

void nimfa_rhs_into(const weighted_graph& g, const rate_model& model,
                    std::span<const double> v, std::span<double> rho, std::span<double> dv) {
    const int s = model.state_count();
    const auto n = static_cast<std::int64_t>(g.vertex_count());
    const double md = g.mean_degree();
    const double inv_md = md > 0.0 ? 1.0 / md : 0.0;

    // Both passes write disjoint per-vertex blocks, each accumulated in
    // adjacency order, so any schedule and thread count give the same bits.
#pragma omp parallel for schedule(static)
    for (std::int64_t iv = 0; iv < n; ++iv) {
        const auto i = static_cast<std::size_t>(iv);
        double* r = rho.data() + i * static_cast<std::size_t>(s);
        std::fill(r, r + s, 0.0);
        const auto row = g.neighbors(static_cast<std::uint32_t>(i));
        for (std::size_t e = 0; e < row.size(); ++e) {
            const double* zj = v.data() + static_cast<std::size_t>(row.to[e]) * s;
            const double w = row.weight[e];
            for (int k = 0; k < s; ++k) r[k] += w * zj[k];
        }
        // environment argument clamped at zero; the multiplicand below
        // stays raw so block sums are conserved
        for (int k = 0; k < s; ++k) r[k] = std::max(0.0, r[k] * inv_md);
    }
#pragma omp parallel
    {
        std::vector<double> col(static_cast<std::size_t>(s));
#pragma omp for schedule(static)
        for (std::int64_t iv = 0; iv < n; ++iv) {
            const auto i = static_cast<std::size_t>(iv);
            const double* zi = v.data() + i * static_cast<std::size_t>(s);
            const double* r = rho.data() + i * static_cast<std::size_t>(s);
            double* out = dv.data() + i * static_cast<std::size_t>(s);
            std::fill(out, out + s, 0.0);
            for (int from = 0; from < s; ++from) {
                model.rates_from(from,
                                 std::span<const double>(r, static_cast<std::size_t>(s)), col);
                const double zs = zi[from];
                double total = 0.0;
                for (int k = 0; k < s; ++k) {
                    out[k] += col[static_cast<std::size_t>(k)] * zs;
                    total += col[static_cast<std::size_t>(k)];
                }
                out[from] -= total * zs;
            }
        }
    }
}

} // namespace

std::vector<double> nimfa_rhs(const weighted_graph& g, const rate_model& model,
                              std::span<const double> z) {
    const auto dim = static_cast<std::size_t>(g.vertex_count()) *
                     static_cast<std::size_t>(model.state_count());
    if (z.size() != dim) throw invalid_config("nimfa_rhs: state length must be N*S");
    std::vector<double> rho(dim), dz(dim);
    nimfa_rhs_into(g, model, z, rho, dz);
    return dz;
}

mean_field_solution solve_meanfield(const rate_model& model, std::span<const double> u0,
                                    double horizon, const solver_options& opts,
                                    int sample_points) {
    return solve_meanfield_on_grid(model, u0, uniform_grid(horizon, sample_points), opts);
}

mean_field_solution solve_meanfield_on_grid(const rate_model& model, std::span<const double> u0,
                                            std::vector<double> grid,
                                            const solver_options& opts) {
    const int s = model.state_count();
    if (static_cast<int>(u0.size()) != s)
        throw invalid_config("initial condition length does not match the state count");
    check_on_simplex(u0, "u0");

    mean_field_solution sol;
    sol.times = std::move(grid);
    sol.u.assign(sol.times.size(), std::vector<double>(static_cast<std::size_t>(s), 0.0));

    std::vector<double> y(u0.begin(), u0.end());
    std::vector<double> env(static_cast<std::size_t>(s));
    std::vector<double> col(static_cast<std::size_t>(s));

    auto rhs = [&](double, std::span<const double> v, std::span<double> dv) {
        // environment argument clamped at zero; the multiplicand stays raw
        // so component sums are conserved exactly
        for (int k = 0; k < s; ++k) env[static_cast<std::size_t>(k)] = std::max(0.0, v[static_cast<std::size_t>(k)]);
        std::fill(dv.begin(), dv.end(), 0.0);
        for (int from = 0; from < s; ++from) {
            model.rates_from(from, env, col);
            const double vs = v[static_cast<std::size_t>(from)];
            double total = 0.0;
            for (int k = 0; k < s; ++k) {
                dv[static_cast<std::size_t>(k)] += col[static_cast<std::size_t>(k)] * vs;
                total += col[static_cast<std::size_t>(k)];
            }
            dv[static_cast<std::size_t>(from)] -= total * vs;
        }
    };
    auto record = [&](std::size_t g, std::span<const double> v) {
        std::copy(v.begin(), v.end(), sol.u[g].begin());
    };
    auto violation = [&](std::span<const double> v) {
        return simplex_violation_blocks(v, static_cast<std::size_t>(s));
    };

    sol.stats = integrate_dp45(rhs, y, sol.times, opts, record, violation,
                               sol.max_simplex_violation);
    return sol;
}

nimfa_solution solve_nimfa(const weighted_graph& g, const rate_model& model,
                           std::span<const double> z0, double horizon,
                           const solver_options& opts, int sample_points, bool store_z) {
    return solve_nimfa_on_grid(g, model, z0, uniform_grid(horizon, sample_points), opts, store_z);
}

nimfa_solution solve_nimfa_on_grid(const weighted_graph& g, const rate_model& model,
                                   std::span<const double> z0, std::vector<double> grid,
                                   const solver_options& opts, bool store_z) {
    const int s = model.state_count();
    const auto n = static_cast<std::size_t>(g.vertex_count());
    const std::size_t dim = n * static_cast<std::size_t>(s);

    std::vector<double> y(dim);
    if (z0.size() == static_cast<std::size_t>(s)) {
        check_on_simplex(z0, "z0");
        for (std::size_t i = 0; i < n; ++i)
            std::copy(z0.begin(), z0.end(), y.begin() + static_cast<std::ptrdiff_t>(i * s));
    } else if (z0.size() == dim) {
        for (std::size_t i = 0; i < n; ++i)
            check_on_simplex(z0.subspan(i * s, static_cast<std::size_t>(s)), "z0 block");
        std::copy(z0.begin(), z0.end(), y.begin());
    } else {
        throw invalid_config("z0 must have length S or N*S");
    }

    nimfa_solution sol;
    sol.times = std::move(grid);
    sol.n = g.vertex_count();
    sol.state_count = s;
    sol.has_z = store_z;
    sol.y.assign(sol.times.size(), std::vector<double>(static_cast<std::size_t>(s), 0.0));
    if (store_z) sol.z.assign(sol.times.size(), std::vector<double>(dim, 0.0));

    std::vector<double> rho(dim);
    auto rhs = [&](double, std::span<const double> v, std::span<double> dv) {
        nimfa_rhs_into(g, model, v, rho, dv);
    };

    auto record = [&](std::size_t gp, std::span<const double> v) {
        auto& yout = sol.y[gp];
        for (int k = 0; k < s; ++k) {
            const auto sk = static_cast<std::size_t>(k);
            yout[sk] = pairwise_sum(n, [&](std::size_t i) { return v[i * s + sk]; }) /
                       static_cast<double>(n);
        }
        if (store_z) std::copy(v.begin(), v.end(), sol.z[gp].begin());
    };
    auto violation = [&](std::span<const double> v) {
        return simplex_violation_blocks(v, static_cast<std::size_t>(s));
    };

    sol.stats = integrate_dp45(rhs, y, sol.times, opts, record, violation,
                               sol.max_simplex_violation);
    return sol;
}

std::vector<std::vector<double>> nimfa_average(const nimfa_solution& sol) {
    if (!sol.has_z)
        throw invalid_config("nimfa_average needs a solution with stored per-vertex snapshots");
    const auto n = static_cast<std::size_t>(sol.n);
    const auto s = static_cast<std::size_t>(sol.state_count);
    std::vector<std::vector<double>> y(sol.z.size(), std::vector<double>(s, 0.0));
    for (std::size_t gp = 0; gp < sol.z.size(); ++gp) {
        for (std::size_t k = 0; k < s; ++k)
            y[gp][k] = pairwise_sum(n, [&](std::size_t i) { return sol.z[gp][i * s + k]; }) /
                       static_cast<double>(n);
    }
    return y;
}

} // namespace erdy

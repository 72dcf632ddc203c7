#include "erdy/exact_sim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>

#include "erdy/rng.hpp"

namespace erdy {

namespace {

/// Fenwick tree over per-vertex exit rates: O(log n) updates, prefix
/// search for rate-proportional vertex selection.
class fenwick {
public:
    explicit fenwick(std::size_t n) : n_(n), tree_(n + 1, 0.0) {}

    void add(std::size_t i, double delta) {
        for (std::size_t k = i + 1; k <= n_; k += k & (~k + 1)) tree_[k] += delta;
    }

    double total() const {
        double s = 0.0;
        for (std::size_t k = n_; k > 0; k -= k & (~k + 1)) s += tree_[k];
        return s;
    }

    /// First index whose prefix sum exceeds target.
    std::size_t find(double target) const {
        std::size_t idx = 0;
        std::size_t bit = std::bit_floor(n_);
        for (; bit > 0; bit >>= 1) {
            const std::size_t next = idx + bit;
            if (next <= n_ && tree_[next] <= target) {
                idx = next;
                target -= tree_[next];
            }
        }
        return idx; // in [0, n], n only on fp edge cases
    }

    void reset() { std::fill(tree_.begin(), tree_.end(), 0.0); }

private:
    std::size_t n_;
    std::vector<double> tree_;
};

struct engine {
    const weighted_graph& g;
    const rate_model& model;
    const int s;
    const std::size_t n;
    const double inv_md;

    std::vector<std::uint8_t> xi;
    std::vector<double> phi;     // n * s
    std::vector<double> rates;   // n * s, rates[i*s+k] = rate of i jumping to k
    std::vector<double> exit;    // n
    std::vector<double> channel; // s * s aggregate rates, channel[from*s+to]
    std::vector<std::int64_t> counts;
    fenwick tree;

    std::vector<double> scratch;  // s
    std::vector<double> xbuf;     // s
    std::vector<double> colbuf;   // s
    std::vector<char> env_dep;    // per state: rates vary with phi

    engine(const weighted_graph& graph, const rate_model& m, std::span<const std::uint8_t> init)
        : g(graph),
          model(m),
          s(m.state_count()),
          n(static_cast<std::size_t>(graph.vertex_count())),
          inv_md(graph.mean_degree() > 0.0 ? 1.0 / graph.mean_degree() : 0.0),
          xi(init.begin(), init.end()),
          phi(n * static_cast<std::size_t>(s), 0.0),
          rates(n * static_cast<std::size_t>(s), 0.0),
          exit(n, 0.0),
          channel(static_cast<std::size_t>(s) * s, 0.0),
          counts(static_cast<std::size_t>(s), 0),
          tree(n),
          scratch(static_cast<std::size_t>(s), 0.0),
          xbuf(static_cast<std::size_t>(s), 0.0),
          colbuf(static_cast<std::size_t>(s), 0.0),
          env_dep(static_cast<std::size_t>(s), 1) {
        for (int k = 0; k < s; ++k)
            env_dep[static_cast<std::size_t>(k)] = m.rates_depend_on_env(k) ? 1 : 0;
        for (std::uint8_t st : xi) {
            if (st >= s) throw invalid_config("initial state index out of range");
            ++counts[st];
        }
    }

    /// Rebuild every cache from scratch; returns the worst per-entry gap
    /// between the cached and recomputed environments.
    double rebuild() {
        double drift_seen = 0.0;
        std::vector<double> fresh(n * static_cast<std::size_t>(s), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto row = g.neighbors(static_cast<std::uint32_t>(i));
            double* p = fresh.data() + i * static_cast<std::size_t>(s);
            for (std::size_t e = 0; e < row.size(); ++e)
                p[xi[row.to[e]]] += row.weight[e] * inv_md;
        }
        for (std::size_t i = 0; i < phi.size(); ++i)
            drift_seen = std::max(drift_seen, std::abs(phi[i] - fresh[i]));
        phi.swap(fresh);

        std::fill(channel.begin(), channel.end(), 0.0);
        tree.reset();
        for (std::size_t i = 0; i < n; ++i) {
            const int from = xi[i];
            model.rates_from(from, phi_of(i), row_rates(i));
            double total = 0.0;
            for (int k = 0; k < s; ++k) {
                const double r = rates[i * static_cast<std::size_t>(s) + static_cast<std::size_t>(k)];
                channel[static_cast<std::size_t>(from) * s + static_cast<std::size_t>(k)] += r;
                total += r;
            }
            exit[i] = total;
            tree.add(i, total);
        }
        return drift_seen;
    }

    std::span<const double> phi_of(std::size_t i) const {
        return std::span<const double>(phi).subspan(i * static_cast<std::size_t>(s),
                                                    static_cast<std::size_t>(s));
    }
    std::span<double> row_rates(std::size_t i) {
        return std::span<double>(rates).subspan(i * static_cast<std::size_t>(s),
                                                static_cast<std::size_t>(s));
    }

    /// Recompute the cached rates of vertex v after its state or
    /// environment changed. Exact, not approximate: rates depend only on
    /// the vertex's own state and environment.
    void refresh_vertex(std::size_t v, int old_from) {
        double* rv = rates.data() + v * static_cast<std::size_t>(s);
        for (int k = 0; k < s; ++k)
            channel[static_cast<std::size_t>(old_from) * s + static_cast<std::size_t>(k)] -= rv[k];
        const int from = xi[v];
        model.rates_from(from, phi_of(v), row_rates(v));
        double total = 0.0;
        for (int k = 0; k < s; ++k) {
            channel[static_cast<std::size_t>(from) * s + static_cast<std::size_t>(k)] += rv[k];
            total += rv[k];
        }
        const double delta = total - exit[v];
        if (delta != 0.0) tree.add(v, delta);
        exit[v] = total;
    }

    void apply_event(std::uint32_t v, int from, int to) {
        --counts[static_cast<std::size_t>(from)];
        ++counts[static_cast<std::size_t>(to)];
        xi[v] = static_cast<std::uint8_t>(to);
        refresh_vertex(v, from);
        const auto row = g.neighbors(v);
        for (std::size_t e = 0; e < row.size(); ++e) {
            const std::size_t j = row.to[e];
            const double dw = row.weight[e] * inv_md;
            double* pj = phi.data() + j * static_cast<std::size_t>(s);
            const double lowered = pj[from] - dw;
            pj[from] = lowered < 0.0 ? 0.0 : lowered; // keep environments nonnegative
            pj[to] += dw;
            // constant-rate states need no refresh when only phi moved
            if (env_dep[xi[j]]) refresh_vertex(j, xi[j]);
        }
    }

    /// l1 norm of H at the current state, from the channel aggregates:
    /// H_k = (colsum_k - rowsum_k)/n - f_k(x).
    double h_l1() {
        std::vector<double>& f = scratch;
        std::vector<double>& x = xbuf;
        std::vector<double>& col = colbuf;
        std::fill(f.begin(), f.end(), 0.0);
        for (int k = 0; k < s; ++k)
            x[static_cast<std::size_t>(k)] =
                static_cast<double>(counts[static_cast<std::size_t>(k)]) / static_cast<double>(n);
        for (int from = 0; from < s; ++from) {
            const double xs = x[static_cast<std::size_t>(from)];
            if (xs == 0.0) continue;
            model.rates_from(from, x, col);
            double total = 0.0;
            for (int k = 0; k < s; ++k) {
                f[static_cast<std::size_t>(k)] += col[static_cast<std::size_t>(k)] * xs;
                total += col[static_cast<std::size_t>(k)];
            }
            f[static_cast<std::size_t>(from)] -= total * xs;
        }
        double norm = 0.0;
        for (int k = 0; k < s; ++k) {
            double colsum = 0.0, rowsum = 0.0;
            for (int o = 0; o < s; ++o) {
                colsum += channel[static_cast<std::size_t>(o) * s + static_cast<std::size_t>(k)];
                rowsum += channel[static_cast<std::size_t>(k) * s + static_cast<std::size_t>(o)];
            }
            norm += std::abs((colsum - rowsum) / static_cast<double>(n) -
                             f[static_cast<std::size_t>(k)]);
        }
        return norm;
    }
};

} // namespace

std::vector<std::uint8_t> initial_state(std::span<const double> u0, std::int64_t n,
                                        init_mode mode, std::uint64_t seed) {
    if (n < 1) throw invalid_config("initial_state needs at least one vertex");
    const auto s = u0.size();
    if (s < 2) throw invalid_config("initial distribution needs at least two states");
    double sum = 0.0;
    for (double p : u0) {
        if (!(p >= -1e-12)) throw invalid_config("initial distribution has a negative entry");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw invalid_config("initial distribution does not sum to 1 (within 1e-12)");

    std::vector<std::uint8_t> states(static_cast<std::size_t>(n));
    if (mode == init_mode::multinomial) {
        auto st = rng::keyed_stream(seed, rng::tag_init);
        for (auto& v : states) {
            const double u = st.next_double();
            double cum = 0.0;
            std::uint8_t pick = static_cast<std::uint8_t>(s - 1);
            for (std::size_t k = 0; k < s; ++k) {
                cum += std::max(0.0, u0[k]);
                if (u < cum) {
                    pick = static_cast<std::uint8_t>(k);
                    break;
                }
            }
            v = pick;
        }
        return states;
    }

    // largest-remainder rounding, ties broken toward the lower state index
    std::vector<std::int64_t> count(s, 0);
    std::vector<std::pair<double, std::size_t>> rem(s);
    std::int64_t assigned = 0;
    for (std::size_t k = 0; k < s; ++k) {
        const double target = static_cast<double>(n) * std::max(0.0, u0[k]);
        count[k] = static_cast<std::int64_t>(std::floor(target));
        rem[k] = {target - std::floor(target), k};
        assigned += count[k];
    }
    std::sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (std::int64_t extra = n - assigned; extra > 0; --extra)
        ++count[rem[static_cast<std::size_t>(n - assigned - extra)].second];

    std::size_t pos = 0;
    for (std::size_t k = 0; k < s; ++k)
        for (std::int64_t c = 0; c < count[k]; ++c) states[pos++] = static_cast<std::uint8_t>(k);
    auto st = rng::keyed_stream(seed, rng::tag_init);
    rng::shuffle(st, std::span<std::uint8_t>(states));
    return states;
}

sim_result simulate(const weighted_graph& g, const rate_model& model,
                    std::span<const std::uint8_t> init, double horizon, std::uint64_t seed,
                    const sim_options& opts) {
    if (static_cast<std::int64_t>(init.size()) != g.vertex_count())
        throw invalid_config("initial assignment length does not match the vertex count");
    if (!(horizon > 0.0)) throw invalid_config("horizon must be positive");

    engine eng(g, model, init);
    eng.rebuild();

    const int s = eng.s;
    const auto ss = static_cast<std::size_t>(s) * s;
    const auto n_real = static_cast<double>(eng.n);

    sim_result res;
    res.traj.times = uniform_grid(horizon, opts.sample_points);
    res.traj.initial_states.assign(init.begin(), init.end());
    res.traj.initial_counts = eng.counts;
    res.log.n = g.vertex_count();
    res.log.state_count = s;
    res.log.t_end = horizon;

    std::vector<double> lambda(ss, 0.0); // running channel integrals

    auto st = rng::keyed_stream(seed, rng::tag_sim);
    double t = 0.0;
    std::size_t next_grid = 0;
    std::int64_t since_rebuild = 0;

    auto record_grid = [&](double up_to_exclusive) {
        while (next_grid < res.traj.times.size() && res.traj.times[next_grid] < up_to_exclusive) {
            res.traj.counts.push_back(eng.counts);
            std::vector<double> x(static_cast<std::size_t>(s));
            for (int k = 0; k < s; ++k)
                x[static_cast<std::size_t>(k)] =
                    static_cast<double>(eng.counts[static_cast<std::size_t>(k)]) / n_real;
            res.traj.x.push_back(std::move(x));
            ++next_grid;
        }
    };

    if (opts.track_h) res.sup_h_l1 = eng.h_l1();

    while (true) {
        const double total = eng.tree.total();
        if (!std::isfinite(total))
            throw model_contract_error("total event rate overflowed (non-finite)");
        if (total <= 0.0) break; // absorbing configuration

        const double dt = rng::exponential(st, total);
        const double t_new = t + dt;
        if (t_new > horizon) break; // no event in the remaining window

        // grid points strictly before the event keep the pre-event state
        const std::size_t grid_before = next_grid;
        record_grid(t_new);

        for (std::size_t c = 0; c < ss; ++c) lambda[c] += eng.channel[c] * dt;

        // vertex by rate-proportional search, then channel within vertex
        std::size_t v = eng.tree.find(st.next_double() * total);
        if (v >= eng.n || eng.exit[v] <= 0.0) {
            while (v < eng.n && eng.exit[v] <= 0.0) ++v;
            if (v >= eng.n) {
                v = eng.n;
                while (v > 0 && eng.exit[v - 1] <= 0.0) --v;
                if (v == 0) break;
                --v;
            }
        }
        const int from = eng.xi[v];
        const double* rv = eng.rates.data() + v * static_cast<std::size_t>(s);
        const double target = st.next_double() * eng.exit[v];
        int to = -1;
        double cum = 0.0;
        for (int k = 0; k < s; ++k) {
            if (rv[k] <= 0.0) continue;
            cum += rv[k];
            to = k;
            if (target < cum) break;
        }
        if (to < 0) throw std::logic_error("channel selection failed with a positive exit rate");

        eng.apply_event(static_cast<std::uint32_t>(v), from, to);
        ++res.event_count;
        ++since_rebuild;
        t = t_new;

        if (opts.record_log) {
            res.log.events.push_back(
                {t, static_cast<std::uint32_t>(v), static_cast<std::uint8_t>(from),
                 static_cast<std::uint8_t>(to)});
            res.log.lambda.insert(res.log.lambda.end(), lambda.begin(), lambda.end());
        }
        if (opts.track_h) res.sup_h_l1 = std::max(res.sup_h_l1, eng.h_l1());

        const bool grid_crossed = next_grid != grid_before;
        if (since_rebuild >= opts.rebuild_interval || grid_crossed) {
            res.max_phi_drift = std::max(res.max_phi_drift, eng.rebuild());
            since_rebuild = 0;
        }
    }

    // tail: rates constant to the horizon
    const double tail = horizon - t;
    if (tail > 0.0)
        for (std::size_t c = 0; c < ss; ++c) lambda[c] += eng.channel[c] * tail;
    record_grid(std::nextafter(horizon, horizon + 1.0));
    if (opts.record_log)
        res.log.lambda.insert(res.log.lambda.end(), lambda.begin(), lambda.end());

    res.final_states = eng.xi;
    res.final_counts = eng.counts;
    return res;
}

std::vector<std::int64_t> replay_final_counts(const event_log& log,
                                              std::span<const std::uint8_t> initial_states) {
    std::vector<std::uint8_t> xi(initial_states.begin(), initial_states.end());
    std::vector<std::int64_t> counts(static_cast<std::size_t>(log.state_count), 0);
    for (std::uint8_t st : xi) ++counts[st];
    double prev = 0.0;
    for (const auto& ev : log.events) {
        if (!(ev.t > prev)) throw std::logic_error("event times not strictly increasing");
        prev = ev.t;
        if (xi[ev.vertex] != ev.from) throw std::logic_error("replay mismatch: wrong from-state");
        xi[ev.vertex] = ev.to;
        --counts[ev.from];
        ++counts[ev.to];
    }
    return counts;
}

k_path reconstruct_k(const event_log& log, std::int64_t n) {
    if (n != log.n) throw invalid_config("reconstruct_k: vertex count mismatch");
    const int s = log.state_count;
    const auto ss = static_cast<std::size_t>(s) * s;
    if (log.lambda.size() != log.boundary_count() * ss)
        throw invalid_config("reconstruct_k: log has no channel intensities (was recording off?)");
    const double inv_n = 1.0 / static_cast<double>(n);

    k_path path;
    path.state_count = s;
    path.times.reserve(log.events.size() + 2);
    path.aggregate.reserve(log.events.size() + 2);
    path.channel_final.assign(ss, 0.0);

    std::vector<std::int64_t> jumps(ss, 0);
    std::vector<double> k_ch(ss, 0.0);

    auto eval = [&](std::span<const double> lam) {
        for (std::size_t c = 0; c < ss; ++c) {
            k_ch[c] = (static_cast<double>(jumps[c]) - lam[c]) * inv_n;
            path.sup_channel_abs = std::max(path.sup_channel_abs, std::abs(k_ch[c]));
        }
        std::vector<double> agg(static_cast<std::size_t>(s), 0.0);
        for (int to = 0; to < s; ++to) {
            double v = 0.0;
            for (int o = 0; o < s; ++o) {
                v += k_ch[static_cast<std::size_t>(o) * s + static_cast<std::size_t>(to)]; // inflow
                v -= k_ch[static_cast<std::size_t>(to) * s + static_cast<std::size_t>(o)]; // outflow
            }
            agg[static_cast<std::size_t>(to)] = v;
        }
        path.sup_aggregate_l1 = std::max(path.sup_aggregate_l1, l1_norm(agg));
        return agg;
    };

    path.times.push_back(0.0);
    path.aggregate.push_back(std::vector<double>(static_cast<std::size_t>(s), 0.0));

    for (std::size_t e = 0; e < log.events.size(); ++e) {
        const auto lam = log.lambda_at(e);
        eval(lam); // just before the jump
        const auto& ev = log.events[e];
        ++jumps[static_cast<std::size_t>(ev.from) * s + ev.to];
        path.times.push_back(ev.t);
        path.aggregate.push_back(eval(lam)); // just after
    }
    const auto lam_end = log.lambda_at(log.events.size());
    path.times.push_back(log.t_end);
    path.aggregate.push_back(eval(lam_end));
    for (std::size_t c = 0; c < ss; ++c)
        path.channel_final[c] = (static_cast<double>(jumps[c]) - lam_end[c]) * inv_n;
    return path;
}

std::vector<double> compute_h(const weighted_graph& g, const rate_model& model,
                              std::span<const std::uint8_t> states) {
    const int s = model.state_count();
    const auto n = static_cast<std::size_t>(g.vertex_count());
    if (states.size() != n) throw invalid_config("compute_h: state vector size mismatch");

    std::vector<double> acc(static_cast<std::size_t>(s), 0.0);
    std::vector<double> col(static_cast<std::size_t>(s));
    std::vector<std::int64_t> counts(static_cast<std::size_t>(s), 0);
    for (std::size_t i = 0; i < n; ++i) {
        ++counts[states[i]];
        const auto phi = local_environment(g, states, static_cast<std::uint32_t>(i), s);
        const int from = states[i];
        model.rates_from(from, phi, col);
        double total = 0.0;
        for (int k = 0; k < s; ++k) {
            acc[static_cast<std::size_t>(k)] += col[static_cast<std::size_t>(k)];
            total += col[static_cast<std::size_t>(k)];
        }
        acc[static_cast<std::size_t>(from)] -= total;
    }
    std::vector<double> x(static_cast<std::size_t>(s));
    for (int k = 0; k < s; ++k)
        x[static_cast<std::size_t>(k)] =
            static_cast<double>(counts[static_cast<std::size_t>(k)]) / static_cast<double>(n);
    const auto f = drift(model, x);
    std::vector<double> h(static_cast<std::size_t>(s));
    for (int k = 0; k < s; ++k)
        h[static_cast<std::size_t>(k)] =
            acc[static_cast<std::size_t>(k)] / static_cast<double>(n) -
            f[static_cast<std::size_t>(k)];
    return h;
}

double gronwall_slack(const trajectory& traj, const mean_field_solution& mf, double sup_k_l1,
                      double sup_h_l1, double l_f) {
    if (traj.times.size() != mf.times.size())
        throw invalid_config("gronwall_slack: grid mismatch");
    for (std::size_t i = 0; i < traj.times.size(); ++i)
        if (traj.times[i] != mf.times[i]) throw invalid_config("gronwall_slack: grid mismatch");
    const double horizon = traj.times.back();
    double sup_err = 0.0;
    for (std::size_t i = 0; i < traj.times.size(); ++i)
        sup_err = std::max(sup_err, l1_dist(traj.x[i], mf.u[i]));
    const double initial = l1_dist(traj.x.front(), mf.u.front());
    return (initial + sup_k_l1 + horizon * sup_h_l1) * std::exp(l_f * horizon) - sup_err;
}

} // namespace erdy

#include "erdy/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace erdy {

rate_model::rate_model(std::string name, std::vector<std::string> state_names,
                       bool globally_lipschitz)
    : name_(std::move(name)),
      names_(std::move(state_names)),
      s_(static_cast<int>(names_.size())),
      globally_lipschitz_(globally_lipschitz) {
    if (s_ < 2) throw invalid_config("a rate model needs at least two states");
    if (s_ > 255) throw invalid_config("at most 255 local states are supported");
}

bool rate_model::rates_depend_on_env(int) const { return true; }

void rate_model::rates_from(int from, std::span<const double> phi, std::span<double> out) const {
    eval_rates(from, phi, out);
    out[static_cast<std::size_t>(from)] = 0.0;
    for (int k = 0; k < s_; ++k) {
        const double r = out[static_cast<std::size_t>(k)];
        if (!(r >= 0.0)) {
            std::ostringstream msg;
            msg << "model '" << name_ << "' returned a negative rate " << r << " for "
                << names_[static_cast<std::size_t>(from)] << "->"
                << names_[static_cast<std::size_t>(k)] << " at phi=(";
            for (std::size_t s = 0; s < phi.size(); ++s)
                msg << (s ? "," : "") << phi[s];
            msg << ")";
            throw model_contract_error(msg.str());
        }
    }
}

// ---- SIS ----

sis_model::sis_model(double beta, double gamma)
    : rate_model("sis", {"S", "I"}, true), beta_(beta), gamma_(gamma) {
    if (!(beta >= 0.0) || !(gamma >= 0.0))
        throw invalid_config("sis rates must be nonnegative");
}

void sis_model::eval_rates(int from, std::span<const double> phi, std::span<double> out) const {
    out[0] = out[1] = 0.0;
    if (from == 0) out[1] = beta_ * phi[1];
    else out[0] = gamma_;
}

bool sis_model::rates_depend_on_env(int from) const { return from == 0; }

lipschitz_bounds sis_model::lipschitz_on(double m) const {
    lipschitz_bounds b;
    b.domain_m = m;
    b.entry.assign(4, 0.0);
    b.entry[1 * 2 + 0] = beta_;          // I<-S rate is beta*phi_I
    b.q_norm = 2.0 * beta_;              // one varying column, diagonal mirrors it
    b.drift = 2.0 * (beta_ * m + gamma_); // |d(u_I u_S)| <= m*|du|_1, two components
    return b;
}

// ---- SIR ----

sir_model::sir_model(double beta, double gamma)
    : rate_model("sir", {"S", "I", "R"}, true), beta_(beta), gamma_(gamma) {
    if (!(beta >= 0.0) || !(gamma >= 0.0))
        throw invalid_config("sir rates must be nonnegative");
}

void sir_model::eval_rates(int from, std::span<const double> phi, std::span<double> out) const {
    out[0] = out[1] = out[2] = 0.0;
    if (from == 0) out[1] = beta_ * phi[1];
    else if (from == 1) out[2] = gamma_;
}

bool sir_model::rates_depend_on_env(int from) const { return from == 0; }

lipschitz_bounds sir_model::lipschitz_on(double m) const {
    lipschitz_bounds b;
    b.domain_m = m;
    b.entry.assign(9, 0.0);
    b.entry[1 * 3 + 0] = beta_;
    b.q_norm = 2.0 * beta_;
    b.drift = 2.0 * (beta_ * m + gamma_);
    return b;
}

// ---- voter ----

voter_model::voter_model(double lambda)
    : rate_model("voter", {"0", "1"}, true), lambda_(lambda) {
    if (!(lambda >= 0.0)) throw invalid_config("voter rate must be nonnegative");
}

void voter_model::eval_rates(int from, std::span<const double> phi, std::span<double> out) const {
    out[0] = out[1] = 0.0;
    if (from == 0) out[1] = lambda_ * phi[1];
    else out[0] = lambda_ * phi[0];
}

lipschitz_bounds voter_model::lipschitz_on(double m) const {
    lipschitz_bounds b;
    b.domain_m = m;
    b.entry.assign(4, lambda_);
    b.entry[0] = b.entry[3] = 0.0;
    b.q_norm = 2.0 * lambda_;
    // Q(u)u vanishes identically: the two opposing flows cancel.
    b.drift = 0.0;
    return b;
}

// ---- quadratic ----

quadratic_model::quadratic_model(double beta, double gamma)
    : rate_model("quadratic", {"S", "I"}, false), beta_(beta), gamma_(gamma) {
    if (!(beta >= 0.0) || !(gamma >= 0.0))
        throw invalid_config("quadratic rates must be nonnegative");
}

void quadratic_model::eval_rates(int from, std::span<const double> phi,
                                 std::span<double> out) const {
    out[0] = out[1] = 0.0;
    if (from == 0) out[1] = beta_ * phi[1] * phi[1];
    else out[0] = gamma_;
}

bool quadratic_model::rates_depend_on_env(int from) const { return from == 0; }

lipschitz_bounds quadratic_model::lipschitz_on(double m) const {
    lipschitz_bounds b;
    b.domain_m = m;
    b.entry.assign(4, 0.0);
    b.entry[1 * 2 + 0] = 2.0 * beta_ * m;            // |phi^2 - psi^2| <= 2m |phi-psi|
    b.q_norm = 4.0 * beta_ * m;
    b.drift = 2.0 * (2.0 * beta_ * m * m + gamma_);
    return b;
}

// ---- operations ----

square_matrix rate_matrix(const rate_model& model, std::span<const double> phi) {
    const int s = model.state_count();
    for (double v : phi)
        if (!(v >= 0.0)) throw invalid_config("environment entries must be nonnegative");
    square_matrix q(s);
    std::vector<double> col(static_cast<std::size_t>(s));
    for (int from = 0; from < s; ++from) {
        model.rates_from(from, phi, col);
        double total = 0.0;
        for (int k = 0; k < s; ++k) {
            q(k, from) = col[static_cast<std::size_t>(k)];
            total += col[static_cast<std::size_t>(k)];
        }
        q(from, from) = -total;
    }
    return q;
}

std::vector<double> drift(const rate_model& model, std::span<const double> u) {
    const int s = model.state_count();
    if (static_cast<int>(u.size()) != s) throw invalid_config("drift: state size mismatch");
    for (double v : u)
        if (!(v >= 0.0)) throw invalid_config("drift input entries must be nonnegative");
    std::vector<double> f(static_cast<std::size_t>(s), 0.0);
    std::vector<double> col(static_cast<std::size_t>(s));
    for (int from = 0; from < s; ++from) {
        const double us = u[static_cast<std::size_t>(from)];
        if (us == 0.0) continue;
        model.rates_from(from, u, col);
        double total = 0.0;
        for (int k = 0; k < s; ++k) {
            f[static_cast<std::size_t>(k)] += col[static_cast<std::size_t>(k)] * us;
            total += col[static_cast<std::size_t>(k)];
        }
        f[static_cast<std::size_t>(from)] -= total * us;
    }
    return f;
}

std::vector<double> local_environment(const weighted_graph& g,
                                      std::span<const std::uint8_t> states,
                                      std::uint32_t i, int state_count) {
    if (static_cast<std::int64_t>(states.size()) != g.vertex_count())
        throw invalid_config("local_environment: state vector size mismatch");
    std::vector<double> phi(static_cast<std::size_t>(state_count), 0.0);
    const auto row = g.neighbors(i);
    if (row.size() == 0) return phi;
    const double inv = 1.0 / g.mean_degree();
    for (std::size_t k = 0; k < row.size(); ++k)
        phi[states[row.to[k]]] += row.weight[k] * inv;
    return phi;
}

std::unique_ptr<rate_model> make_model(const std::string& type,
                                       std::span<const std::pair<std::string, double>> params) {
    auto get = [&](const char* key) {
        for (const auto& [k, v] : params)
            if (k == key) return v;
        throw invalid_config("missing required key \"" + std::string(key) +
                             "\" in section \"model.parameters\"");
    };
    auto expect_only = [&](std::initializer_list<const char*> keys) {
        for (const auto& [k, v] : params) {
            bool known = false;
            for (const char* key : keys)
                if (k == key) known = true;
            if (!known)
                throw invalid_config("unknown key \"" + k + "\" in section \"model.parameters\"");
        }
    };
    if (type == "sis") {
        expect_only({"beta", "gamma"});
        return std::make_unique<sis_model>(get("beta"), get("gamma"));
    }
    if (type == "sir") {
        expect_only({"beta", "gamma"});
        return std::make_unique<sir_model>(get("beta"), get("gamma"));
    }
    if (type == "voter") {
        expect_only({"lambda"});
        return std::make_unique<voter_model>(get("lambda"));
    }
    if (type == "quadratic") {
        expect_only({"beta", "gamma"});
        return std::make_unique<quadratic_model>(get("beta"), get("gamma"));
    }
    throw invalid_config("unknown model type: " + type);
}

} // namespace erdy

#ifndef ERDY_MODEL_HPP
#define ERDY_MODEL_HPP

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "erdy/common.hpp"
#include "erdy/graph.hpp"

namespace erdy {

/// Lipschitz constants of a model on the truncated cone Delta_M
/// (nonnegative entries, coordinate sum at most M), l1 norms throughout.
/// `drift` evaluated at M = 1 bounds the drift on the probability simplex.
struct lipschitz_bounds {
    double domain_m = 1.0;
    std::vector<double> entry; // S*S row-major, entry[k*S+s] bounds Q_ks
    double q_norm = 0.0;       // operator-norm constant of phi -> Q(phi)
    double drift = 0.0;        // constant of u -> Q(u) u
};

/// Interaction model: local state space plus the map from an environment
/// vector to transition rates. Implementations supply only the
/// off-diagonal rates; the engine assembles the diagonal as the negated
/// column sum, so columns of Q always sum to zero. Immutable and
/// reentrant; evaluations are pure.
class rate_model {
public:
    virtual ~rate_model() = default;

    int state_count() const { return s_; }
    const std::vector<std::string>& state_names() const { return names_; }
    const std::string& name() const { return name_; }
    /// Whether every rate entry is globally Lipschitz on the orthant.
    bool globally_lipschitz() const { return globally_lipschitz_; }

    /// Rates out of state `from` at environment `phi`: fills out[k] with
    /// the rate from->k for k != from and sets out[from] = 0. Throws
    /// model_contract_error if an implementation produces a negative rate.
    void rates_from(int from, std::span<const double> phi, std::span<double> out) const;

    /// Whether the rates out of `from` vary with the environment. States
    /// answering false (constant-rate states) let the simulator skip
    /// refreshing a vertex whose neighbourhood changed; overriding
    /// implementations must keep eval_rates constant in phi for them.
    virtual bool rates_depend_on_env(int from) const;

    virtual lipschitz_bounds lipschitz_on(double m) const = 0;

protected:
    rate_model(std::string name, std::vector<std::string> state_names, bool globally_lipschitz);
    virtual void eval_rates(int from, std::span<const double> phi, std::span<double> out) const = 0;

private:
    std::string name_;
    std::vector<std::string> names_;
    int s_;
    bool globally_lipschitz_;
};

/// SIS: susceptible -> infected at beta * phi_I, infected -> susceptible
/// at gamma. States {S, I}. Linear rates, globally Lipschitz.
class sis_model final : public rate_model {
public:
    sis_model(double beta, double gamma);
    lipschitz_bounds lipschitz_on(double m) const override;
    bool rates_depend_on_env(int from) const override;
    double beta() const { return beta_; }
    double gamma() const { return gamma_; }

protected:
    void eval_rates(int from, std::span<const double> phi, std::span<double> out) const override;

private:
    double beta_, gamma_;
};

/// SIR: susceptible -> infected at beta * phi_I, infected -> removed at
/// gamma. States {S, I, R}.
class sir_model final : public rate_model {
public:
    sir_model(double beta, double gamma);
    lipschitz_bounds lipschitz_on(double m) const override;
    bool rates_depend_on_env(int from) const override;

protected:
    void eval_rates(int from, std::span<const double> phi, std::span<double> out) const override;

private:
    double beta_, gamma_;
};

/// Voter: 0 -> 1 at lambda * phi_1, 1 -> 0 at lambda * phi_0.
class voter_model final : public rate_model {
public:
    explicit voter_model(double lambda);
    lipschitz_bounds lipschitz_on(double m) const override;

protected:
    void eval_rates(int from, std::span<const double> phi, std::span<double> out) const override;

private:
    double lambda_;
};

/// Quadratic infection: susceptible -> infected at beta * phi_I^2,
/// infected -> susceptible at gamma. Locally but not globally Lipschitz,
/// for exercising the unbounded-rate branches.
class quadratic_model final : public rate_model {
public:
    quadratic_model(double beta, double gamma);
    lipschitz_bounds lipschitz_on(double m) const override;
    bool rates_depend_on_env(int from) const override;

protected:
    void eval_rates(int from, std::span<const double> phi, std::span<double> out) const override;

private:
    double beta_, gamma_;
};

/// Minimal dense S x S matrix, q(k, s) = rate from s to k.
class square_matrix {
public:
    explicit square_matrix(int n) : n_(n), a_(static_cast<std::size_t>(n) * n, 0.0) {}
    int size() const { return n_; }
    double& operator()(int r, int c) { return a_[static_cast<std::size_t>(r) * n_ + c]; }
    double operator()(int r, int c) const { return a_[static_cast<std::size_t>(r) * n_ + c]; }
    std::span<const double> data() const { return a_; }

private:
    int n_;
    std::vector<double> a_;
};

/// Full rate matrix at environment phi. Off-diagonals are the model
/// rates, each diagonal entry is the negated sum of its column.
square_matrix rate_matrix(const rate_model& model, std::span<const double> phi);

/// Drift Q(u) u of the homogeneous dynamics. Components sum to zero.
std::vector<double> drift(const rate_model& model, std::span<const double> u);

/// Local environment of vertex i: weighted average of the neighbour
/// state indicators, normalized by the deterministic mean degree.
std::vector<double> local_environment(const weighted_graph& g,
                                      std::span<const std::uint8_t> states,
                                      std::uint32_t i, int state_count);

/// Built-in model factory ("sis", "sir", "voter", "quadratic").
std::unique_ptr<rate_model> make_model(const std::string& type,
                                       std::span<const std::pair<std::string, double>> params);

} // namespace erdy

#endif

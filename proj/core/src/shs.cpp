#include "aoi/shs.hpp"

#include "aoi/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

namespace aoi {

namespace {

std::string describe(std::size_t index, std::size_t from, std::size_t to) {
    std::ostringstream os;
    os << "transition " << index << " (" << from << " -> " << to << ")";
    return os.str();
}

// Reachability over the transition graph, following edges forward or reversed.
std::vector<bool> reachable_from(std::size_t start, std::size_t num_states,
                                 const std::vector<ShsModel::Transition>& transitions,
                                 bool reversed) {
    std::vector<std::vector<std::size_t>> adjacency(num_states);
    for (const auto& t : transitions) {
        if (reversed) {
            adjacency[t.to_state].push_back(t.from_state);
        } else {
            adjacency[t.from_state].push_back(t.to_state);
        }
    }
    std::vector<bool> seen(num_states, false);
    std::vector<std::size_t> stack{start};
    seen[start] = true;
    while (!stack.empty()) {
        const auto q = stack.back();
        stack.pop_back();
        for (auto next : adjacency[q]) {
            if (!seen[next]) {
                seen[next] = true;
                stack.push_back(next);
            }
        }
    }
    return seen;
}

struct FactorizedSolve {
    Eigen::VectorXd x;
    double condition;
};

FactorizedSolve solve_dense(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double max_condition,
                            const char* what) {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
    const double rcond = lu.rcond();
    const double condition = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
    if (!(condition <= max_condition)) {
        std::ostringstream os;
        os << what << ": system is singular or ill-conditioned (condition estimate " << condition
           << " exceeds " << max_condition << ")";
        throw SolveError(os.str(), condition);
    }
    return {lu.solve(b), condition};
}

}  // namespace

ResetMap ResetMap::from_dense(const DenseMatrix& a) {
    const std::size_t n = a.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i].size() != n) {
            std::ostringstream os;
            os << "reset map is not square: row " << i << " has " << a[i].size()
               << " entries, expected " << n;
            throw ModelError(os.str());
        }
    }
    std::vector<std::optional<std::size_t>> sources(n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            const double entry = a[i][j];
            if (entry == 0.0) {
                continue;
            }
            if (entry != 1.0) {
                std::ostringstream os;
                os << "reset map entry (" << i << ", " << j << ") = " << entry
                   << " is not in {0, 1}";
                throw ModelError(os.str());
            }
            if (sources[j]) {
                std::ostringstream os;
                os << "reset map column " << j << " has multiple nonzero entries (rows "
                   << *sources[j] << " and " << i << ")";
                throw ModelError(os.str());
            }
            sources[j] = i;
        }
    }
    return ResetMap(std::move(sources));
}

ResetMap ResetMap::from_sources(std::vector<std::optional<std::size_t>> sources) {
    for (std::size_t j = 0; j < sources.size(); ++j) {
        if (sources[j] && *sources[j] >= sources.size()) {
            std::ostringstream os;
            os << "reset map column " << j << " copies component " << *sources[j]
               << ", which is out of range";
            throw ModelError(os.str());
        }
    }
    return ResetMap(std::move(sources));
}

DenseMatrix ResetMap::dense() const {
    const std::size_t n = sources_.size();
    DenseMatrix a(n, std::vector<double>(n, 0.0));
    for (std::size_t j = 0; j < n; ++j) {
        if (sources_[j]) {
            a[*sources_[j]][j] = 1.0;
        }
    }
    return a;
}

void ResetMap::apply(std::span<const double> x, std::span<double> out) const {
    for (std::size_t j = 0; j < sources_.size(); ++j) {
        out[j] = sources_[j] ? x[*sources_[j]] : 0.0;
    }
}

double ShsModel::exit_rate(std::size_t state) const {
    double total = 0.0;
    for (const auto& t : transitions_) {
        if (t.from_state == state) {
            total += t.rate;
        }
    }
    return total;
}

ShsModel build_model(std::size_t num_states, std::size_t num_components,
                     std::vector<TransitionSpec> transitions, std::vector<std::vector<int>> slopes) {
    if (num_states == 0) {
        throw ModelError("model must have at least one state");
    }
    if (num_components == 0) {
        throw ModelError("model must have at least one age component");
    }
    if (slopes.size() != num_states) {
        std::ostringstream os;
        os << "expected " << num_states << " slope vectors, got " << slopes.size();
        throw ModelError(os.str());
    }
    for (std::size_t q = 0; q < num_states; ++q) {
        if (slopes[q].size() != num_components) {
            std::ostringstream os;
            os << "state " << q << ": slope vector has " << slopes[q].size()
               << " entries, expected " << num_components;
            throw ModelError(os.str());
        }
        for (std::size_t i = 0; i < num_components; ++i) {
            if (slopes[q][i] != 0 && slopes[q][i] != 1) {
                std::ostringstream os;
                os << "state " << q << ": slope entry " << i << " = " << slopes[q][i]
                   << " is not binary";
                throw ModelError(os.str());
            }
        }
    }

    ShsModel model;
    model.num_states_ = num_states;
    model.num_components_ = num_components;
    model.slopes_ = std::move(slopes);
    model.transitions_.reserve(transitions.size());

    for (std::size_t l = 0; l < transitions.size(); ++l) {
        const auto& spec = transitions[l];
        const auto name = describe(l, spec.from_state, spec.to_state);
        if (spec.from_state >= num_states || spec.to_state >= num_states) {
            throw ModelError(name + ": state index out of range [0, " +
                             std::to_string(num_states) + ")");
        }
        if (!std::isfinite(spec.rate)) {
            throw ModelError(name + ": non-finite rate");
        }
        if (spec.rate <= 0.0) {
            throw ModelError(name + ": nonpositive rate " + std::to_string(spec.rate));
        }
        if (spec.reset_map.size() != num_components) {
            throw ModelError(name + ": reset map has " + std::to_string(spec.reset_map.size()) +
                             " rows, expected " + std::to_string(num_components));
        }
        try {
            model.transitions_.push_back(
                {spec.from_state, spec.to_state, spec.rate, ResetMap::from_dense(spec.reset_map)});
        } catch (const ModelError& e) {
            throw ModelError(name + ": " + e.what());
        }
    }

    // Irreducible iff state 0 reaches every state and every state reaches 0.
    for (bool reversed : {false, true}) {
        const auto seen = reachable_from(0, num_states, model.transitions_, reversed);
        const auto it = std::find(seen.begin(), seen.end(), false);
        if (it != seen.end()) {
            const auto q = static_cast<std::size_t>(it - seen.begin());
            std::ostringstream os;
            os << "chain is not irreducible: state " << q
               << (reversed ? " cannot reach state 0" : " is unreachable from state 0");
            throw ModelError(os.str());
        }
    }
    return model;
}

StationaryDistribution solve_stationary(const ShsModel& model, const SolverTolerances& tol) {
    const auto n = static_cast<Eigen::Index>(model.num_states());

    // Row q: sum_{l into q} rate_l pi_{from(l)} - pi_q exit_rate(q) = 0.
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (const auto& t : model.transitions()) {
        const auto from = static_cast<Eigen::Index>(t.from_state);
        const auto to = static_cast<Eigen::Index>(t.to_state);
        a(to, from) += t.rate;
        a(from, from) -= t.rate;
    }
    // The balance rows sum to zero; the last one is redundant.
    a.row(n - 1).setOnes();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    b(n - 1) = 1.0;

    const auto solved = solve_dense(a, b, tol.max_condition, "stationary solve");

    StationaryDistribution pi;
    pi.probs.resize(model.num_states());
    for (Eigen::Index q = 0; q < n; ++q) {
        double p = solved.x(q);
        if (p < -tol.residual) {
            std::ostringstream os;
            os << "stationary solve: negative probability " << p << " for state " << q;
            throw SolveError(os.str(), solved.condition);
        }
        pi.probs[static_cast<std::size_t>(q)] = std::clamp(p, 0.0, 1.0);
    }

    double total = 0.0;
    for (double p : pi.probs) {
        total += p;
    }
    if (std::abs(total - 1.0) > tol.normalization) {
        std::ostringstream os;
        os << "stationary solve: probabilities sum to " << total;
        throw SolveError(os.str(), solved.condition);
    }

    const auto residuals = balance_residuals(model, pi);
    for (std::size_t q = 0; q < residuals.size(); ++q) {
        const double scale = std::max(1.0, model.exit_rate(q));
        if (residuals[q] > tol.residual * scale) {
            std::ostringstream os;
            os << "stationary solve: balance residual " << residuals[q] << " at state " << q;
            throw SolveError(os.str(), solved.condition);
        }
    }
    return pi;
}

CorrelationVectors solve_correlation(const ShsModel& model, const StationaryDistribution& pi,
                                     const SolverTolerances& tol) {
    const std::size_t states = model.num_states();
    const std::size_t comps = model.num_components();
    if (pi.size() != states) {
        throw ModelError("stationary distribution size does not match the model");
    }
    const auto unknowns = static_cast<Eigen::Index>(states * comps);
    auto index = [comps](std::size_t q, std::size_t i) {
        return static_cast<Eigen::Index>(q * comps + i);
    };

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(unknowns, unknowns);
    Eigen::VectorXd b(unknowns);
    for (std::size_t q = 0; q < states; ++q) {
        const double out = model.exit_rate(q);
        for (std::size_t i = 0; i < comps; ++i) {
            a(index(q, i), index(q, i)) += out;
            b(index(q, i)) = model.slopes()[q][i] * pi[q];
        }
    }
    for (const auto& t : model.transitions()) {
        for (std::size_t j = 0; j < comps; ++j) {
            if (const auto src = t.reset.source(j)) {
                a(index(t.to_state, j), index(t.from_state, *src)) -= t.rate;
            }
        }
    }

    const auto solved = solve_dense(a, b, tol.max_condition, "correlation solve");

    CorrelationVectors v(states, comps);
    double largest = 0.0;
    for (Eigen::Index k = 0; k < unknowns; ++k) {
        largest = std::max(largest, std::abs(solved.x(k)));
    }
    for (std::size_t q = 0; q < states; ++q) {
        for (std::size_t i = 0; i < comps; ++i) {
            const double value = solved.x(index(q, i));
            if (value < -tol.residual * std::max(1.0, largest)) {
                std::ostringstream os;
                os << "correlation solve: negative correlation " << value << " at state " << q
                   << ", component " << i;
                throw SolveError(os.str(), solved.condition);
            }
            v.at(q, i) = std::max(value, 0.0);
        }
    }

    const auto residuals = correlation_residuals(model, pi, v);
    for (std::size_t q = 0; q < states; ++q) {
        const double scale = std::max(1.0, model.exit_rate(q) * std::max(1.0, largest));
        for (std::size_t i = 0; i < comps; ++i) {
            if (residuals[q * comps + i] > tol.residual * scale) {
                std::ostringstream os;
                os << "correlation solve: residual " << residuals[q * comps + i] << " at state "
                   << q << ", component " << i;
                throw SolveError(os.str(), solved.condition);
            }
        }
    }
    return v;
}

double average_age(const CorrelationVectors& v, std::size_t component) {
    if (component >= v.num_components()) {
        throw ModelError("age component " + std::to_string(component) + " out of range [0, " +
                         std::to_string(v.num_components()) + ")");
    }
    double total = 0.0;
    for (std::size_t q = 0; q < v.num_states(); ++q) {
        total += v.at(q, component);
    }
    return total;
}

std::vector<double> balance_residuals(const ShsModel& model, const StationaryDistribution& pi) {
    std::vector<double> net(model.num_states(), 0.0);
    for (const auto& t : model.transitions()) {
        const double flow = t.rate * pi[t.from_state];
        net[t.to_state] += flow;
        net[t.from_state] -= flow;
    }
    for (auto& r : net) {
        r = std::abs(r);
    }
    return net;
}

std::vector<double> correlation_residuals(const ShsModel& model, const StationaryDistribution& pi,
                                          const CorrelationVectors& v) {
    const std::size_t comps = model.num_components();
    std::vector<double> lhs_minus_rhs(model.num_states() * comps, 0.0);
    for (std::size_t q = 0; q < model.num_states(); ++q) {
        const double out = model.exit_rate(q);
        for (std::size_t i = 0; i < comps; ++i) {
            lhs_minus_rhs[q * comps + i] = v.at(q, i) * out - model.slopes()[q][i] * pi[q];
        }
    }
    std::vector<double> mapped(comps);
    for (const auto& t : model.transitions()) {
        t.reset.apply(v.state(t.from_state), mapped);
        for (std::size_t j = 0; j < comps; ++j) {
            lhs_minus_rhs[t.to_state * comps + j] -= t.rate * mapped[j];
        }
    }
    for (auto& r : lhs_minus_rhs) {
        r = std::abs(r);
    }
    return lhs_minus_rhs;
}

}  // namespace aoi

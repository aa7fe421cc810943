#pragma once

// Stochastic hybrid system (SHS) solver for age-of-information models.
//
// A model is a finite continuous-time Markov chain whose transitions carry
// linear reset maps x' = x A_l acting on a row vector of ages, and whose
// states carry binary slope vectors b_q (dx/dt = b_q while in state q).
// The solver computes the stationary distribution pi and the stationary
// correlation vectors v_q = E[x 1{q(t)=q}]; the average of age component i is
// sum_q v_q[i].

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace aoi {

using DenseMatrix = std::vector<std::vector<double>>;

/// Reset map in "copy or zero" form: post-transition component j is either
/// zero or a copy of pre-transition component source(j).
class ResetMap {
public:
    ResetMap() = default;

    /// Validates that every column of `a` has at most one nonzero entry and
    /// that such an entry is exactly 1. Throws ModelError otherwise.
    static ResetMap from_dense(const DenseMatrix& a);
    static ResetMap from_sources(std::vector<std::optional<std::size_t>> sources);

    std::size_t size() const noexcept { return sources_.size(); }
    std::optional<std::size_t> source(std::size_t j) const { return sources_.at(j); }
    DenseMatrix dense() const;

    /// out = x A.
    void apply(std::span<const double> x, std::span<double> out) const;

    friend bool operator==(const ResetMap&, const ResetMap&) = default;

private:
    explicit ResetMap(std::vector<std::optional<std::size_t>> sources)
        : sources_(std::move(sources)) {}

    std::vector<std::optional<std::size_t>> sources_;
};

struct TransitionSpec {
    std::size_t from_state = 0;
    std::size_t to_state = 0;
    double rate = 0.0;
    DenseMatrix reset_map;
};

class ShsModel {
public:
    struct Transition {
        std::size_t from_state;
        std::size_t to_state;
        double rate;
        ResetMap reset;
    };

    std::size_t num_states() const noexcept { return num_states_; }
    std::size_t num_components() const noexcept { return num_components_; }
    const std::vector<Transition>& transitions() const noexcept { return transitions_; }
    const std::vector<std::vector<int>>& slopes() const noexcept { return slopes_; }

    /// Sum of rates of transitions leaving `state` (self-loops included).
    double exit_rate(std::size_t state) const;

private:
    friend ShsModel build_model(std::size_t, std::size_t, std::vector<TransitionSpec>,
                                std::vector<std::vector<int>>);

    std::size_t num_states_ = 0;
    std::size_t num_components_ = 0;
    std::vector<Transition> transitions_;
    std::vector<std::vector<int>> slopes_;
};

/// Validates and assembles a model. Throws ModelError naming the offending
/// transition or state on nonpositive/non-finite rates, out-of-range state
/// indices, malformed reset maps, non-binary slopes, or a reducible chain.
ShsModel build_model(std::size_t num_states, std::size_t num_components,
                     std::vector<TransitionSpec> transitions,
                     std::vector<std::vector<int>> slopes);

struct StationaryDistribution {
    std::vector<double> probs;

    std::size_t size() const noexcept { return probs.size(); }
    double operator[](std::size_t q) const { return probs[q]; }
};

class CorrelationVectors {
public:
    CorrelationVectors() = default;
    CorrelationVectors(std::size_t num_states, std::size_t num_components)
        : num_states_(num_states), num_components_(num_components),
          data_(num_states * num_components, 0.0) {}

    std::size_t num_states() const noexcept { return num_states_; }
    std::size_t num_components() const noexcept { return num_components_; }

    double& at(std::size_t q, std::size_t i) { return data_[q * num_components_ + i]; }
    double at(std::size_t q, std::size_t i) const { return data_[q * num_components_ + i]; }

    std::span<const double> state(std::size_t q) const {
        return {data_.data() + q * num_components_, num_components_};
    }
    std::span<const double> flat() const noexcept { return data_; }

private:
    std::size_t num_states_ = 0;
    std::size_t num_components_ = 0;
    std::vector<double> data_;
};

/// Solver tolerances. Residual checks are relative to the magnitude of the
/// terms in each equation, floored at 1.
struct SolverTolerances {
    double max_condition = 1e12;
    double normalization = 1e-12;
    double residual = 1e-10;
};

/// Global balance + normalization, solved densely with one balance row
/// replaced by the normalization constraint. Throws SolveError when the
/// condition estimate exceeds `tol.max_condition`.
StationaryDistribution solve_stationary(const ShsModel& model, const SolverTolerances& tol = {});

/// Solves v_q * exit_rate(q) = b_q pi_q + sum_{l into q} rate_l v_{from(l)} A_l
/// as a single dense system in num_states * num_components unknowns.
CorrelationVectors solve_correlation(const ShsModel& model, const StationaryDistribution& pi,
                                     const SolverTolerances& tol = {});

/// sum_q v_q[component]. Component 0 is the monitor age by convention.
double average_age(const CorrelationVectors& v, std::size_t component = 0);

/// Absolute per-state residual of the global balance equations.
std::vector<double> balance_residuals(const ShsModel& model, const StationaryDistribution& pi);

/// Absolute residual of every correlation equation, indexed [q * n + i].
std::vector<double> correlation_residuals(const ShsModel& model, const StationaryDistribution& pi,
                                          const CorrelationVectors& v);

}  // namespace aoi

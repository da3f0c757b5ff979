#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mdlnn/network.hpp"

namespace mdlnn {

// Per-unit post-activation values at the previous time step (inputs
// included: recurrent reads of an input unit see the previous input).
struct NetworkState {
    std::vector<double> prev;
};

struct StepTrace {
    int time = 0;
    std::vector<double> unit_values;    // post-activation, all units
    std::vector<double> raw_output;
    std::vector<double> distribution;   // normalized (language-modeling view)
    bool poisoned = false;
};

// Evaluation plan: incoming edges grouped by target, units in forward
// topological order. Built once per genotype; step() then runs without any
// allocation or graph walking.
class CompiledNet {
public:
    explicit CompiledNet(const Network& net);

    uint32_t n_inputs() const { return n_inputs_; }
    uint32_t n_outputs() const { return n_outputs_; }
    uint32_t n_units() const { return n_units_; }

    NetworkState reset_state() const { return NetworkState{std::vector<double>(n_units_, 0.0)}; }

    // Computes one time step. `values` is scratch of size n_units(); on
    // return it holds all current post-activation values (the next state).
    // Returns false when a non-finite value poisoned the step.
    bool step(const NetworkState& state, std::span<const double> input,
              std::vector<double>& values) const;

private:
    struct Edge {
        uint32_t source;
        double weight;
        bool recurrent;
    };
    struct Node {
        uint32_t index;
        Activation activation;
        Aggregation aggregation;
        bool has_bias;
        double bias;
        uint32_t edge_begin, edge_end;
    };

    uint32_t n_inputs_, n_outputs_, n_units_;
    std::vector<Node> plan_;    // non-input units in forward topological order
    std::vector<Edge> edges_;   // incoming edges, grouped per plan node
};

// Zeroes negatives and normalizes to sum 1; all-zero (or any non-finite
// entry) falls back to uniform.
std::vector<double> normalize_distribution(const std::vector<double>& raw);

inline double clamp_probability(double raw) {
    if (raw <= 0.0) return 0.0;
    if (raw >= 1.0) return 1.0;
    return raw;
}

NetworkState reset_state(const Network& net);

std::pair<std::vector<double>, NetworkState> step(const Network& net, const NetworkState& state,
                                                  const std::vector<double>& input);

std::vector<std::vector<double>> run_sequence(const Network& net,
                                              const std::vector<std::vector<double>>& inputs);

std::vector<StepTrace> trace(const Network& net, const std::vector<std::vector<double>>& inputs);

}  // namespace mdlnn

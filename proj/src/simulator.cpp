#include "mdlnn/simulator.hpp"

#include <cmath>
#include <stdexcept>

namespace mdlnn {

CompiledNet::CompiledNet(const Network& net)
    : n_inputs_(net.n_inputs), n_outputs_(net.n_outputs), n_units_(net.n_units()) {
    net.validate();
    auto order = net.forward_topo_order();
    if (order.empty() && n_units_ > 0)
        throw InvalidNetworkError("forward subgraph has a cycle");

    // Incoming edges per target in a fixed (source, kind) order.
    std::vector<std::vector<Edge>> incoming(n_units_);
    for (uint32_t src = 0; src < n_units_; ++src)
        for (const Connection& c : net.units[src].outgoing)
            incoming[c.target].push_back({src, c.weight.value(), c.kind == ConnKind::Recurrent});

    for (uint32_t idx : order) {
        if (net.is_input(idx)) continue;  // inputs are clamped to the fed values
        const Unit& u = net.units[idx];
        Node node;
        node.index = idx;
        node.activation = u.activation;
        node.aggregation = u.aggregation;
        node.has_bias = u.bias.has_value();
        node.bias = u.bias ? u.bias->value() : 0.0;
        node.edge_begin = static_cast<uint32_t>(edges_.size());
        for (const Edge& e : incoming[idx]) edges_.push_back(e);
        node.edge_end = static_cast<uint32_t>(edges_.size());
        plan_.push_back(node);
    }
}

bool CompiledNet::step(const NetworkState& state, std::span<const double> input,
                       std::vector<double>& values) const {
    if (input.size() != n_inputs_) throw std::invalid_argument("step: input arity mismatch");
    if (state.prev.size() != n_units_) throw std::invalid_argument("step: state size mismatch");
    values.resize(n_units_);
    for (uint32_t i = 0; i < n_inputs_; ++i) values[i] = input[i];
    for (uint32_t i = n_inputs_; i < n_units_; ++i) values[i] = 0.0;

    bool finite = true;
    for (const Node& node : plan_) {
        double acc;
        if (node.aggregation == Aggregation::Sum) {
            acc = node.has_bias ? node.bias : 0.0;
            for (uint32_t e = node.edge_begin; e < node.edge_end; ++e) {
                const Edge& edge = edges_[e];
                const double src = edge.recurrent ? state.prev[edge.source] : values[edge.source];
                acc += edge.weight * src;
            }
        } else {
            // Product unit: bias multiplies; no inputs and no bias yields 0.
            if (node.edge_begin == node.edge_end && !node.has_bias) {
                acc = 0.0;
            } else {
                acc = node.has_bias ? node.bias : 1.0;
                for (uint32_t e = node.edge_begin; e < node.edge_end; ++e) {
                    const Edge& edge = edges_[e];
                    const double src = edge.recurrent ? state.prev[edge.source] : values[edge.source];
                    acc *= edge.weight * src;
                }
            }
        }
        const double v = apply_activation(node.activation, acc);
        values[node.index] = v;
        if (!std::isfinite(v)) finite = false;
    }
    return finite;
}

std::vector<double> normalize_distribution(const std::vector<double>& raw) {
    const size_t n = raw.size();
    std::vector<double> out(n, 0.0);
    if (n == 0) return out;
    double sum = 0.0;
    bool finite = true;
    for (size_t i = 0; i < n; ++i) {
        double v = raw[i];
        if (!std::isfinite(v)) { finite = false; break; }
        if (v < 0.0) v = 0.0;
        out[i] = v;
        sum += v;
    }
    if (!finite || !(sum > 0.0) || !std::isfinite(sum)) {
        const double uniform = 1.0 / static_cast<double>(n);
        for (auto& v : out) v = uniform;
        return out;
    }
    for (auto& v : out) v /= sum;
    return out;
}

NetworkState reset_state(const Network& net) {
    return NetworkState{std::vector<double>(net.n_units(), 0.0)};
}

std::pair<std::vector<double>, NetworkState> step(const Network& net, const NetworkState& state,
                                                  const std::vector<double>& input) {
    CompiledNet compiled(net);
    std::vector<double> values;
    compiled.step(state, input, values);
    std::vector<double> raw(values.begin() + net.n_inputs, values.begin() + net.n_inputs + net.n_outputs);
    return {std::move(raw), NetworkState{std::move(values)}};
}

std::vector<std::vector<double>> run_sequence(const Network& net,
                                              const std::vector<std::vector<double>>& inputs) {
    CompiledNet compiled(net);
    NetworkState state = compiled.reset_state();
    std::vector<double> values;
    std::vector<std::vector<double>> outputs;
    outputs.reserve(inputs.size());
    for (const auto& input : inputs) {
        compiled.step(state, input, values);
        outputs.emplace_back(values.begin() + net.n_inputs, values.begin() + net.n_inputs + net.n_outputs);
        state.prev.swap(values);
    }
    return outputs;
}

std::vector<StepTrace> trace(const Network& net, const std::vector<std::vector<double>>& inputs) {
    CompiledNet compiled(net);
    NetworkState state = compiled.reset_state();
    std::vector<double> values;
    std::vector<StepTrace> rows;
    rows.reserve(inputs.size());
    int t = 1;
    for (const auto& input : inputs) {
        StepTrace row;
        row.time = t++;
        row.poisoned = !compiled.step(state, input, values);
        row.unit_values = values;
        row.raw_output.assign(values.begin() + net.n_inputs, values.begin() + net.n_inputs + net.n_outputs);
        if (row.poisoned) {
            // Any non-finite unit value poisons the whole step.
            row.distribution.assign(net.n_outputs, 1.0 / static_cast<double>(net.n_outputs));
        } else {
            row.distribution = normalize_distribution(row.raw_output);
        }
        rows.push_back(std::move(row));
        state.prev.swap(values);
    }
    return rows;
}

}  // namespace mdlnn

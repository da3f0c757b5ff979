#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mdlnn/rational.hpp"

namespace mdlnn {

// Canonical order; encoding ids are indices within the config-enabled subset.
enum class Activation : uint8_t { Linear = 0, Sigmoid, Square, ReLU, Floor, Step, Modulo3 };
constexpr int kActivationCount = 7;

enum class Aggregation : uint8_t { Sum = 0, Product = 1 };

enum class ConnKind : uint8_t { Forward = 0, Recurrent = 1 };

// Unary cost charged at the tail of a unit's encoding. The linear activation
// is free; mod3 is priced in the floor tier.
inline int activation_cost_bits(Activation a) {
    switch (a) {
        case Activation::Linear: return 0;
        case Activation::Square: return 2;
        case Activation::ReLU: return 4;
        case Activation::Sigmoid: return 4;
        case Activation::Floor: return 4;
        case Activation::Step: return 8;
        case Activation::Modulo3: return 4;
    }
    throw std::logic_error("unknown activation");
}

inline const char* activation_name(Activation a) {
    switch (a) {
        case Activation::Linear: return "linear";
        case Activation::Sigmoid: return "sigmoid";
        case Activation::Square: return "square";
        case Activation::ReLU: return "relu";
        case Activation::Floor: return "floor";
        case Activation::Step: return "step";
        case Activation::Modulo3: return "mod3";
    }
    return "?";
}

inline std::optional<Activation> activation_from_name(const std::string& name) {
    for (int i = 0; i < kActivationCount; ++i) {
        auto a = static_cast<Activation>(i);
        if (name == activation_name(a)) return a;
    }
    return std::nullopt;
}

inline double apply_activation(Activation a, double x) {
    switch (a) {
        case Activation::Linear: return x;
        case Activation::Sigmoid: return 1.0 / (1.0 + std::exp(-x));
        case Activation::Square: return x * x;
        case Activation::ReLU: return x > 0.0 ? x : 0.0;
        case Activation::Floor: return std::floor(x);
        case Activation::Step: return x > 0.0 ? 1.0 : 0.0;
        case Activation::Modulo3: return x - 3.0 * std::floor(x / 3.0);
    }
    return x;
}

// Stored on the source unit; the source index is implicit.
struct Connection {
    uint32_t target = 0;  // 0-based unit index
    Rational weight;
    ConnKind kind = ConnKind::Forward;

    bool operator==(const Connection& o) const {
        return target == o.target && weight == o.weight && kind == o.kind;
    }
};

struct Unit {
    Activation activation = Activation::Linear;
    Aggregation aggregation = Aggregation::Sum;
    std::optional<Rational> bias;
    std::vector<Connection> outgoing;  // kept sorted by (target, kind)

    bool operator==(const Unit& o) const {
        return activation == o.activation && aggregation == o.aggregation && bias == o.bias &&
               outgoing == o.outgoing;
    }
};

struct InvalidNetworkError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Genotype. Positional convention: units [0, n_inputs) are inputs, the next
// n_outputs are outputs, anything after is hidden.
struct Network {
    uint32_t n_inputs = 0;
    uint32_t n_outputs = 0;
    std::vector<Unit> units;

    uint32_t n_units() const { return static_cast<uint32_t>(units.size()); }
    uint32_t n_hidden() const { return n_units() - n_inputs - n_outputs; }
    bool is_input(uint32_t i) const { return i < n_inputs; }
    bool is_output(uint32_t i) const { return i >= n_inputs && i < n_inputs + n_outputs; }

    bool operator==(const Network& o) const {
        return n_inputs == o.n_inputs && n_outputs == o.n_outputs && units == o.units;
    }

    static Network empty(uint32_t n_in, uint32_t n_out) {
        Network net;
        net.n_inputs = n_in;
        net.n_outputs = n_out;
        net.units.resize(n_in + n_out);
        return net;
    }

    // Canonical connection order per unit: (target, kind), no duplicates.
    void sort_connections() {
        for (auto& u : units)
            std::sort(u.outgoing.begin(), u.outgoing.end(), [](const Connection& a, const Connection& b) {
                return a.target != b.target ? a.target < b.target : a.kind < b.kind;
            });
    }

    bool has_connection(uint32_t src, uint32_t dst, ConnKind kind) const {
        for (const auto& c : units[src].outgoing)
            if (c.target == dst && c.kind == kind) return true;
        return false;
    }

    size_t connection_count() const {
        size_t n = 0;
        for (const auto& u : units) n += u.outgoing.size();
        return n;
    }

    // Topological order of the forward subgraph, inputs first. Empty result
    // means the forward subgraph has a cycle.
    std::vector<uint32_t> forward_topo_order() const {
        const uint32_t n = n_units();
        std::vector<uint32_t> indegree(n, 0);
        for (const auto& u : units)
            for (const auto& c : u.outgoing)
                if (c.kind == ConnKind::Forward) ++indegree[c.target];
        std::vector<uint32_t> order;
        order.reserve(n);
        std::vector<uint32_t> stack;
        for (uint32_t i = 0; i < n; ++i)
            if (indegree[i] == 0) stack.push_back(i);
        // Deterministic order: pop smallest index first.
        std::sort(stack.begin(), stack.end(), std::greater<>());
        while (!stack.empty()) {
            uint32_t u = stack.back();
            stack.pop_back();
            order.push_back(u);
            bool changed = false;
            for (const auto& c : units[u].outgoing)
                if (c.kind == ConnKind::Forward && --indegree[c.target] == 0) {
                    stack.push_back(c.target);
                    changed = true;
                }
            if (changed) std::sort(stack.begin(), stack.end(), std::greater<>());
        }
        if (order.size() != n) return {};
        return order;
    }

    bool forward_acyclic() const { return !units.empty() ? !forward_topo_order().empty() : true; }

    // Structural invariants that do not depend on the encoding configuration.
    void validate() const {
        if (units.size() < static_cast<size_t>(n_inputs) + n_outputs)
            throw InvalidNetworkError("network has fewer units than inputs + outputs");
        for (uint32_t i = 0; i < n_units(); ++i) {
            const Unit& u = units[i];
            if (is_input(i) && u.activation != Activation::Linear)
                throw InvalidNetworkError("input unit " + std::to_string(i + 1) + " must be linear");
            for (size_t k = 0; k < u.outgoing.size(); ++k) {
                const Connection& c = u.outgoing[k];
                if (c.target >= n_units())
                    throw InvalidNetworkError("connection target out of range on unit " + std::to_string(i + 1));
                if (c.kind == ConnKind::Forward && is_input(c.target))
                    throw InvalidNetworkError("forward connection into input unit " + std::to_string(c.target + 1));
                if (k > 0) {
                    const Connection& prev = u.outgoing[k - 1];
                    if (prev.target > c.target ||
                        (prev.target == c.target && prev.kind >= c.kind))
                        throw InvalidNetworkError("connections not in canonical (target, kind) order on unit " +
                                                  std::to_string(i + 1));
                }
            }
        }
        if (!forward_acyclic()) throw InvalidNetworkError("forward subgraph has a cycle");
    }
};

}  // namespace mdlnn

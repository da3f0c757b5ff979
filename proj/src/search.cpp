#include "mdlnn/search.hpp"

#include <algorithm>

#include "mdlnn/simulator.hpp"

namespace mdlnn {

const char* mutation_op_name(MutationOp op) {
    switch (op) {
        case MutationOp::AddUnit: return "add_unit";
        case MutationOp::RemoveUnit: return "remove_unit";
        case MutationOp::AddForward: return "add_forward";
        case MutationOp::RemoveForward: return "remove_forward";
        case MutationOp::AddRecurrent: return "add_recurrent";
        case MutationOp::RemoveRecurrent: return "remove_recurrent";
        case MutationOp::AddBias: return "add_bias";
        case MutationOp::RemoveBias: return "remove_bias";
        case MutationOp::MutateNumerator: return "mutate_numerator";
        case MutationOp::MutateDenominator: return "mutate_denominator";
        case MutationOp::FlipSign: return "flip_sign";
        case MutationOp::ChangeActivation: return "change_activation";
        case MutationOp::ChangeAggregation: return "change_aggregation";
    }
    return "?";
}

void GAConfig::validate() const {
    enc.check();
    if (tournament_size < 2) throw std::invalid_argument("GA config: tournament size must be >= 2");
    if (population_size < tournament_size)
        throw std::invalid_argument("GA config: population must be >= tournament size");
    if (denominator_max < 1 || init_denominator_max < 1)
        throw std::invalid_argument("GA config: denominator range must start at 1");
    if (!(init_connect_prob >= 0.0 && init_connect_prob <= 1.0))
        throw std::invalid_argument("GA config: init_connect_prob out of [0,1]");
}

namespace {

Rational random_weight(Rng& rng, uint32_t num_max, uint32_t den_max) {
    const int sign = rng.chance(0.5) ? +1 : -1;
    const uint64_t num = rng.below(num_max + 1);
    const uint64_t den = 1 + rng.below(den_max);
    return Rational(num == 0 ? +1 : sign, num, den);
}

Activation random_activation(const EncodingConfig& enc, Rng& rng) {
    return enc.enabled[rng.below(enc.enabled.size())];
}

// True if adding src -> dst keeps the forward subgraph acyclic (i.e. no
// existing forward path dst ~> src).
bool forward_path(const Network& net, uint32_t from, uint32_t to) {
    if (from == to) return true;
    std::vector<uint8_t> seen(net.n_units(), 0);
    std::vector<uint32_t> stack{from};
    seen[from] = 1;
    while (!stack.empty()) {
        uint32_t u = stack.back();
        stack.pop_back();
        for (const Connection& c : net.units[u].outgoing) {
            if (c.kind != ConnKind::Forward) continue;
            if (c.target == to) return true;
            if (!seen[c.target]) {
                seen[c.target] = 1;
                stack.push_back(c.target);
            }
        }
    }
    return false;
}

void insert_sorted(Unit& u, Connection c) {
    auto it = std::lower_bound(u.outgoing.begin(), u.outgoing.end(), c,
                               [](const Connection& a, const Connection& b) {
                                   return a.target != b.target ? a.target < b.target : a.kind < b.kind;
                               });
    u.outgoing.insert(it, c);
}

// Slot addressing for weight mutations: connections first (in unit order),
// then biases.
struct WeightSlot {
    bool is_bias;
    uint32_t unit;
    uint32_t conn;
};

std::vector<WeightSlot> weight_slots(const Network& net) {
    std::vector<WeightSlot> slots;
    for (uint32_t u = 0; u < net.n_units(); ++u)
        for (uint32_t c = 0; c < net.units[u].outgoing.size(); ++c)
            slots.push_back({false, u, c});
    for (uint32_t u = 0; u < net.n_units(); ++u)
        if (net.units[u].bias) slots.push_back({true, u, 0});
    return slots;
}

Rational& slot_ref(Network& net, const WeightSlot& s) {
    return s.is_bias ? *net.units[s.unit].bias : net.units[s.unit].outgoing[s.conn].weight;
}

}  // namespace

Network random_network(uint32_t n_inputs, uint32_t n_outputs, const GAConfig& cfg, Rng& rng) {
    if (n_inputs == 0 || n_outputs == 0)
        throw std::invalid_argument("random_network: arity must be positive");
    Network net = Network::empty(n_inputs, n_outputs);
    for (uint32_t o = 0; o < n_outputs; ++o)
        net.units[n_inputs + o].activation = random_activation(cfg.enc, rng);
    for (uint32_t i = 0; i < n_inputs; ++i) {
        for (uint32_t o = 0; o < n_outputs; ++o) {
            if (!rng.chance(cfg.init_connect_prob)) continue;
            const ConnKind kind = rng.chance(0.5) ? ConnKind::Recurrent : ConnKind::Forward;
            insert_sorted(net.units[i],
                          Connection{n_inputs + o,
                                     random_weight(rng, cfg.init_numerator_max, cfg.init_denominator_max),
                                     kind});
        }
    }
    // Outputs may not start disconnected: force one incoming connection from
    // a uniformly chosen input where needed.
    for (uint32_t o = 0; o < n_outputs; ++o) {
        const uint32_t dst = n_inputs + o;
        bool has_incoming = false;
        for (uint32_t i = 0; i < n_inputs && !has_incoming; ++i)
            for (const Connection& c : net.units[i].outgoing)
                if (c.target == dst) { has_incoming = true; break; }
        if (!has_incoming) {
            const uint32_t i = static_cast<uint32_t>(rng.below(n_inputs));
            const ConnKind kind = rng.chance(0.5) ? ConnKind::Recurrent : ConnKind::Forward;
            insert_sorted(net.units[i],
                          Connection{dst, random_weight(rng, cfg.init_numerator_max, cfg.init_denominator_max),
                                     kind});
        }
    }
    return net;
}

std::optional<Network> mutate_with_op(const Network& parent, MutationOp op, const GAConfig& cfg,
                                      Rng& rng) {
    Network net = parent;
    const uint32_t n = net.n_units();
    const uint32_t first_non_input = net.n_inputs;

    switch (op) {
        case MutationOp::AddUnit: {
            const size_t total = net.connection_count();
            if (total == 0) {
                Unit u;
                u.activation = random_activation(cfg.enc, rng);
                net.units.push_back(u);
                return net;
            }
            // NEAT-style split of a random connection.
            size_t pick = rng.below(total);
            uint32_t src = 0, idx = 0;
            for (uint32_t u = 0; u < n; ++u) {
                if (pick < net.units[u].outgoing.size()) {
                    src = u;
                    idx = static_cast<uint32_t>(pick);
                    break;
                }
                pick -= net.units[u].outgoing.size();
            }
            const Connection old = net.units[src].outgoing[idx];
            if (old.kind == ConnKind::Recurrent && net.is_input(old.target)) return std::nullopt;
            net.units[src].outgoing.erase(net.units[src].outgoing.begin() + idx);
            Unit fresh;
            fresh.activation = random_activation(cfg.enc, rng);
            net.units.push_back(fresh);
            const uint32_t mid = n;  // index of the new hidden unit
            insert_sorted(net.units[src], Connection{mid, Rational(1, 1, 1), old.kind});
            insert_sorted(net.units[mid], Connection{old.target, old.weight, ConnKind::Forward});
            return net;
        }
        case MutationOp::RemoveUnit: {
            const uint32_t hidden = net.n_hidden();
            if (hidden == 0) return std::nullopt;
            const uint32_t victim = first_non_input + net.n_outputs + static_cast<uint32_t>(rng.below(hidden));
            net.units.erase(net.units.begin() + victim);
            for (auto& u : net.units) {
                std::erase_if(u.outgoing, [&](const Connection& c) { return c.target == victim; });
                for (auto& c : u.outgoing)
                    if (c.target > victim) --c.target;
            }
            return net;
        }
        case MutationOp::AddForward: {
            for (int attempt = 0; attempt < 8; ++attempt) {
                const uint32_t src = static_cast<uint32_t>(rng.below(n));
                const uint32_t dst = first_non_input + static_cast<uint32_t>(rng.below(n - first_non_input));
                if (src == dst) continue;
                if (net.has_connection(src, dst, ConnKind::Forward)) continue;
                if (forward_path(net, dst, src)) continue;  // would close a cycle
                insert_sorted(net.units[src],
                              Connection{dst, random_weight(rng, cfg.init_numerator_max, cfg.init_denominator_max),
                                         ConnKind::Forward});
                return net;
            }
            return std::nullopt;
        }
        case MutationOp::AddRecurrent: {
            for (int attempt = 0; attempt < 8; ++attempt) {
                const uint32_t src = static_cast<uint32_t>(rng.below(n));
                const uint32_t dst = first_non_input + static_cast<uint32_t>(rng.below(n - first_non_input));
                if (net.has_connection(src, dst, ConnKind::Recurrent)) continue;
                insert_sorted(net.units[src],
                              Connection{dst, random_weight(rng, cfg.init_numerator_max, cfg.init_denominator_max),
                                         ConnKind::Recurrent});
                return net;
            }
            return std::nullopt;
        }
        case MutationOp::RemoveForward:
        case MutationOp::RemoveRecurrent: {
            const ConnKind kind = op == MutationOp::RemoveForward ? ConnKind::Forward : ConnKind::Recurrent;
            std::vector<std::pair<uint32_t, uint32_t>> candidates;
            for (uint32_t u = 0; u < n; ++u)
                for (uint32_t c = 0; c < net.units[u].outgoing.size(); ++c)
                    if (net.units[u].outgoing[c].kind == kind) candidates.emplace_back(u, c);
            if (candidates.empty()) return std::nullopt;
            const auto [u, c] = candidates[rng.below(candidates.size())];
            net.units[u].outgoing.erase(net.units[u].outgoing.begin() + c);
            return net;
        }
        case MutationOp::AddBias: {
            std::vector<uint32_t> candidates;
            for (uint32_t u = first_non_input; u < n; ++u)
                if (!net.units[u].bias) candidates.push_back(u);
            if (candidates.empty()) return std::nullopt;
            net.units[candidates[rng.below(candidates.size())]].bias =
                random_weight(rng, cfg.init_numerator_max, cfg.init_denominator_max);
            return net;
        }
        case MutationOp::RemoveBias: {
            std::vector<uint32_t> candidates;
            for (uint32_t u = 0; u < n; ++u)
                if (net.units[u].bias) candidates.push_back(u);
            if (candidates.empty()) return std::nullopt;
            net.units[candidates[rng.below(candidates.size())]].bias.reset();
            return net;
        }
        case MutationOp::MutateNumerator: {
            auto slots = weight_slots(net);
            if (slots.empty()) return std::nullopt;
            Rational& w = slot_ref(net, slots[rng.below(slots.size())]);
            const uint64_t num = rng.below(cfg.numerator_max + 1);
            w = Rational(num == 0 ? +1 : w.sign, num, w.den);
            return net;
        }
        case MutationOp::MutateDenominator: {
            auto slots = weight_slots(net);
            if (slots.empty()) return std::nullopt;
            Rational& w = slot_ref(net, slots[rng.below(slots.size())]);
            w = Rational(w.sign, w.num, 1 + rng.below(cfg.denominator_max));
            return net;
        }
        case MutationOp::FlipSign: {
            auto slots = weight_slots(net);
            if (slots.empty()) return std::nullopt;
            Rational& w = slot_ref(net, slots[rng.below(slots.size())]);
            w = w.negated();
            return net;
        }
        case MutationOp::ChangeActivation: {
            const uint32_t u = first_non_input + static_cast<uint32_t>(rng.below(n - first_non_input));
            std::vector<Activation> choices;
            for (Activation a : cfg.enc.enabled)
                if (a != net.units[u].activation) choices.push_back(a);
            if (choices.empty()) return std::nullopt;
            net.units[u].activation = choices[rng.below(choices.size())];
            return net;
        }
        case MutationOp::ChangeAggregation: {
            if (!cfg.enc.extension) return std::nullopt;
            const uint32_t u = first_non_input + static_cast<uint32_t>(rng.below(n - first_non_input));
            net.units[u].aggregation =
                net.units[u].aggregation == Aggregation::Sum ? Aggregation::Product : Aggregation::Sum;
            return net;
        }
    }
    return std::nullopt;
}

Network mutate(const Network& net, const GAConfig& cfg, Rng& rng) {
    uint64_t total_weight = 0;
    std::array<uint32_t, kMutationOpCount> weights = cfg.mutation_weights;
    if (!cfg.enc.extension) weights[static_cast<size_t>(MutationOp::ChangeAggregation)] = 0;
    for (uint32_t w : weights) total_weight += w;
    if (total_weight == 0) throw std::invalid_argument("mutate: all operator weights are zero");

    for (uint32_t attempt = 0; attempt < cfg.mutation_retries; ++attempt) {
        uint64_t pick = rng.below(total_weight);
        int op = 0;
        while (pick >= weights[op]) pick -= weights[op++];
        auto result = mutate_with_op(net, static_cast<MutationOp>(op), cfg, rng);
        if (result) return std::move(*result);
    }
    return net;  // no feasible mutation found: no-op offspring
}

std::pair<size_t, size_t> tournament_selection(const std::vector<Individual>& population,
                                               uint32_t tournament_size, Rng& rng) {
    if (population.size() < tournament_size)
        throw std::invalid_argument("tournament_selection: population smaller than tournament");
    std::vector<size_t> drawn;
    drawn.reserve(tournament_size);
    while (drawn.size() < tournament_size) {
        const size_t r = rng.below(population.size());
        if (std::find(drawn.begin(), drawn.end(), r) == drawn.end()) drawn.push_back(r);
    }
    size_t winner = drawn[0], loser = drawn[0];
    for (size_t i = 1; i < drawn.size(); ++i) {
        if (individual_less(population[drawn[i]], population[winner])) winner = drawn[i];
        if (individual_less(population[loser], population[drawn[i]])) loser = drawn[i];
    }
    return {winner, loser};
}

IslandRunner::IslandRunner(const Corpus* corpus, const GAConfig& cfg)
    : corpus_(corpus), cfg_(cfg), rng_(cfg.seed) {
    cfg_.validate();
    const size_t v = corpus_->addition_mode() ? 0 : corpus_->vocab_size();
    const uint32_t n_in = corpus_->addition_mode() ? 2 : static_cast<uint32_t>(v);
    const uint32_t n_out = corpus_->addition_mode() ? 1 : static_cast<uint32_t>(v);
    population_.reserve(cfg_.population_size);
    while (population_.size() < cfg_.population_size)
        population_.push_back(make_individual(random_network(n_in, n_out, cfg_, rng_)));
    record_log();
}

IslandRunner::IslandRunner(const Corpus* corpus, const GAConfig& cfg,
                           const std::vector<Bits>& population, const std::string& rng_state_hex,
                           uint32_t generation)
    : corpus_(corpus), cfg_(cfg), rng_(cfg.seed), generation_(generation) {
    cfg_.validate();
    if (population.size() != cfg_.population_size)
        throw std::invalid_argument("island restore: population size mismatch");
    const uint32_t n_in = corpus_->addition_mode() ? 2 : static_cast<uint32_t>(corpus_->vocab_size());
    const uint32_t n_out = corpus_->addition_mode() ? 1 : static_cast<uint32_t>(corpus_->vocab_size());
    for (const Bits& bits : population)
        population_.push_back(make_individual(decode_network(bits, n_in, n_out, cfg_.enc)));
    rng_.restore_hex(rng_state_hex);
}

Individual IslandRunner::make_individual(Network net) {
    Individual ind;
    ind.enc = encode_network(net, cfg_.enc);
    ind.score.grammar_bits = ind.enc.size();
    const std::string key = ind.enc.packed_key();
    auto it = data_cache_.find(key);
    if (it != data_cache_.end()) {
        ind.score.data_bits = it->second;
    } else {
        ind.score.data_bits = data_cost(CompiledNet(net), *corpus_);
        if (data_cache_.size() >= 200000) data_cache_.clear();
        data_cache_.emplace(key, ind.score.data_bits);
    }
    ind.net = std::move(net);
    return ind;
}

const Individual& IslandRunner::best() const {
    const Individual* best = &population_.front();
    for (const auto& ind : population_)
        if (individual_less(ind, *best)) best = &ind;
    return *best;
}

void IslandRunner::record_log() {
    GenLog entry;
    entry.generation = generation_;
    entry.best = best().score;
    double mean = 0.0;
    for (const auto& ind : population_) mean += ind.score.total();
    entry.mean_total = mean / static_cast<double>(population_.size());
    log_.push_back(entry);
}

void IslandRunner::run_generations(uint32_t count) {
    for (uint32_t g = 0; g < count; ++g) {
        for (uint32_t step = 0; step < cfg_.population_size; ++step) {
            const auto [winner, loser] = tournament_selection(population_, cfg_.tournament_size, rng_);
            Network offspring = mutate(population_[winner].net, cfg_, rng_);
            population_[loser] = make_individual(std::move(offspring));
        }
        ++generation_;
        record_log();
    }
}

IslandRunner::Exchange IslandRunner::select_migration(uint32_t m_size) {
    if (2ull * m_size + cfg_.tournament_size > population_.size())
        throw std::invalid_argument("migration size too large for the population");
    Exchange ex;
    std::vector<uint8_t> used(population_.size(), 0);
    auto draw_unused = [&]() {
        for (;;) {
            const size_t r = rng_.below(population_.size());
            if (!used[r]) return r;
        }
    };
    for (uint32_t i = 0; i < m_size; ++i) {
        // Disjoint tournament: a genome is never both migrant and loser.
        std::vector<size_t> drawn;
        while (drawn.size() < cfg_.tournament_size) {
            const size_t r = draw_unused();
            if (std::find(drawn.begin(), drawn.end(), r) == drawn.end()) drawn.push_back(r);
        }
        size_t winner = drawn[0], loser = drawn[0];
        for (size_t k = 1; k < drawn.size(); ++k) {
            if (individual_less(population_[drawn[k]], population_[winner])) winner = drawn[k];
            if (individual_less(population_[loser], population_[drawn[k]])) loser = drawn[k];
        }
        if (winner == loser) loser = drawn[winner == drawn[0] ? 1 : 0];
        used[winner] = used[loser] = 1;
        ex.migrants.push_back(population_[winner]);
        ex.loser_indices.push_back(loser);
    }
    return ex;
}

void IslandRunner::apply_migration(const std::vector<size_t>& loser_indices,
                                   std::vector<Individual> incoming) {
    if (loser_indices.size() != incoming.size())
        throw std::invalid_argument("apply_migration: size mismatch");
    for (size_t i = 0; i < incoming.size(); ++i)
        population_[loser_indices[i]] = std::move(incoming[i]);
}

std::pair<Individual, std::vector<IslandRunner::GenLog>> evolve_island(const Corpus& corpus,
                                                                       const GAConfig& cfg) {
    IslandRunner runner(&corpus, cfg);
    runner.run_generations(cfg.generations);
    return {runner.best(), runner.log()};
}

}  // namespace mdlnn

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mdlnn/codec.hpp"
#include "mdlnn/mdl.hpp"
#include "mdlnn/network.hpp"
#include "mdlnn/rng.hpp"
#include "mdlnn/tasks.hpp"

namespace mdlnn {

enum class MutationOp : uint8_t {
    AddUnit = 0,
    RemoveUnit,
    AddForward,
    RemoveForward,
    AddRecurrent,
    RemoveRecurrent,
    AddBias,
    RemoveBias,
    MutateNumerator,
    MutateDenominator,
    FlipSign,
    ChangeActivation,
    ChangeAggregation,  // active only with the extension set
};
constexpr int kMutationOpCount = 13;
const char* mutation_op_name(MutationOp op);

struct GAConfig {
    uint32_t population_size = 100;
    uint32_t generations = 2000;
    uint32_t tournament_size = 2;
    uint64_t seed = 0;
    EncodingConfig enc = EncodingConfig::base_six();

    // Weight-value mutations dominate, structural mutations stay rare
    // (NEAT-style implementations of this mutation set use the same balance).
    // Order: add/remove unit, add/remove forward, add/remove recurrent,
    // add/remove bias, numerator, denominator, sign, activation, aggregation.
    std::array<uint32_t, kMutationOpCount> mutation_weights{1, 1, 1, 1, 1, 1, 1, 1, 6, 6, 3, 1, 1};
    uint32_t numerator_max = 9;        // weight mutation resamples [0..numerator_max]
    uint32_t denominator_max = 9;      // [1..denominator_max]
    uint32_t init_numerator_max = 4;   // initial weights
    uint32_t init_denominator_max = 4;
    double init_connect_prob = 0.5;
    uint32_t mutation_retries = 16;

    void validate() const;
};

struct Individual {
    Network net;
    Bits enc;
    MdlScore score;
};

// Total order used by tournaments: total, grammar bits, canonical encoding.
inline bool individual_less(const Individual& a, const Individual& b) {
    const double ta = a.score.total(), tb = b.score.total();
    if (ta != tb) return ta < tb;
    if (a.score.grammar_bits != b.score.grammar_bits) return a.score.grammar_bits < b.score.grammar_bits;
    return a.enc < b.enc;
}

// Initialization per the search rules: no hidden units, random activations
// and connections, every output wired to at least one input.
Network random_network(uint32_t n_inputs, uint32_t n_outputs, const GAConfig& cfg, Rng& rng);

// Applies exactly one mutation operation; infeasible draws are retried up to
// cfg.mutation_retries times, after which the parent is returned unchanged.
Network mutate(const Network& net, const GAConfig& cfg, Rng& rng);

// Single named operation (test hook); nullopt when infeasible.
std::optional<Network> mutate_with_op(const Network& net, MutationOp op, const GAConfig& cfg, Rng& rng);

// Draws t distinct individuals uniformly; returns (winner index, loser index).
std::pair<size_t, size_t> tournament_selection(const std::vector<Individual>& population,
                                               uint32_t tournament_size, Rng& rng);

// One island running the basic GA.
class IslandRunner {
public:
    struct GenLog {
        uint32_t generation;
        MdlScore best;
        double mean_total;
    };

    IslandRunner(const Corpus* corpus, const GAConfig& cfg);
    IslandRunner(const Corpus* corpus, const GAConfig& cfg, const std::vector<Bits>& population,
                 const std::string& rng_state_hex, uint32_t generation);

    void run_generations(uint32_t count);
    uint32_t generation() const { return generation_; }
    const std::vector<Individual>& population() const { return population_; }
    const Individual& best() const;
    const std::vector<GenLog>& log() const { return log_; }

    struct Exchange {
        std::vector<Individual> migrants;
        std::vector<size_t> loser_indices;
    };
    Exchange select_migration(uint32_t m_size);
    void apply_migration(const std::vector<size_t>& loser_indices, std::vector<Individual> incoming);

    std::string rng_state_hex() const { return rng_.state_hex(); }

private:
    Individual make_individual(Network net);
    void record_log();

    const Corpus* corpus_;
    GAConfig cfg_;
    Rng rng_;
    std::vector<Individual> population_;
    std::vector<GenLog> log_;
    uint32_t generation_ = 0;
    std::unordered_map<std::string, double> data_cache_;
};

// Algorithm-1 entry point: initializes, evolves G generations, returns the
// MDL-argmin of the final population plus the per-generation best history.
std::pair<Individual, std::vector<IslandRunner::GenLog>> evolve_island(const Corpus& corpus,
                                                                       const GAConfig& cfg);

}  // namespace mdlnn

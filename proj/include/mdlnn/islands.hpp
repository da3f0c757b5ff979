#pragma once

#include <string>
#include <vector>

#include "mdlnn/search.hpp"

namespace mdlnn {

struct IslandConfig {
    uint32_t islands = 20;
    GAConfig ga;  // per-island settings; island i runs with seed = base_seed + i
    uint32_t migration_size = 2;
    uint32_t migration_generations = 100;
    double migration_minutes = 0.0;  // 0 disables the wall-clock trigger (default: reproducible)
    uint64_t base_seed = 0;
    int workers = 0;                 // 0 = hardware concurrency
    std::string checkpoint_dir;     // empty = no checkpoints

    void validate() const;
};

struct IslandsResult {
    Individual best;
    std::vector<std::vector<IslandRunner::GenLog>> logs;  // one per island
    bool reproducible = true;  // false when the wall-clock trigger fired
};

// Algorithm 2: islands run the basic GA in parallel and exchange migrants
// around a ring every migration interval. With a single island no migration
// happens and the result equals evolve_island with the same seed.
IslandsResult run_islands(const Corpus& corpus, const IslandConfig& cfg);

// Continues a checkpointed run from cfg.checkpoint_dir, reproducing the
// uninterrupted trajectory in generation-trigger mode.
IslandsResult resume_islands(const Corpus& corpus, const IslandConfig& cfg);

// One island's migration event: draws |incoming| disjoint (migrant, loser)
// tournament pairs, replaces the losers with the incoming genomes, and
// returns the outgoing migrants. Population size is unchanged.
std::vector<Individual> migrate(std::vector<Individual>& population, std::vector<Individual> incoming,
                                uint32_t tournament_size, Rng& rng);

// Island i runs with splitmix64(base_seed) + i. The raw base_seed + i scheme
// makes consecutive base seeds share most of their island trajectories
// (bases 2 and 3 overlap on 19 of 20 islands), so distinct runs would not be
// independent trials; the splitmix64 finalizer decorrelates them.
uint64_t island_seed(uint64_t base_seed, uint32_t island_index);

}  // namespace mdlnn

#include "mdlnn/islands.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <memory>
#include <thread>

namespace mdlnn {

void IslandConfig::validate() const {
    ga.validate();
    if (islands < 1) throw std::invalid_argument("island config: need at least one island");
    if (migration_size < 1) throw std::invalid_argument("island config: migration size must be >= 1");
    if (migration_generations < 1)
        throw std::invalid_argument("island config: migration interval must be >= 1 generation");
    if (2ull * migration_size + ga.tournament_size > ga.population_size)
        throw std::invalid_argument(
            "island config: migration size too large (needs 2*m_size + tournament <= population)");
    if (ga.generations < 1) throw std::invalid_argument("island config: generations must be >= 1");
}

uint64_t island_seed(uint64_t base_seed, uint32_t island_index) {
    uint64_t z = base_seed + 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z = z ^ (z >> 31);
    return z + island_index;
}

std::vector<Individual> migrate(std::vector<Individual>& population, std::vector<Individual> incoming,
                                uint32_t tournament_size, Rng& rng) {
    const uint32_t m_size = static_cast<uint32_t>(incoming.size());
    if (2ull * m_size + tournament_size > population.size())
        throw std::invalid_argument("migrate: migration size too large for the population");
    std::vector<uint8_t> used(population.size(), 0);
    std::vector<Individual> outgoing;
    std::vector<size_t> losers;
    for (uint32_t i = 0; i < m_size; ++i) {
        std::vector<size_t> drawn;
        while (drawn.size() < tournament_size) {
            const size_t r = rng.below(population.size());
            if (used[r]) continue;
            if (std::find(drawn.begin(), drawn.end(), r) == drawn.end()) drawn.push_back(r);
        }
        size_t winner = drawn[0], loser = drawn[0];
        for (size_t k = 1; k < drawn.size(); ++k) {
            if (individual_less(population[drawn[k]], population[winner])) winner = drawn[k];
            if (individual_less(population[loser], population[drawn[k]])) loser = drawn[k];
        }
        if (winner == loser) loser = drawn[1];
        used[winner] = used[loser] = 1;
        outgoing.push_back(population[winner]);
        losers.push_back(loser);
    }
    for (uint32_t i = 0; i < m_size; ++i) population[losers[i]] = std::move(incoming[i]);
    return outgoing;
}

namespace {

void write_checkpoint(const std::string& dir, uint32_t island, const IslandRunner& runner,
                      uint32_t n_in, uint32_t n_out) {
    std::filesystem::create_directories(dir);
    const std::string path = dir + "/island_" + std::to_string(island) + ".checkpoint";
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write checkpoint " + path);
    out << "mdlnn-checkpoint 1\n";
    out << "island " << island << "\n";
    out << "generation " << runner.generation() << "\n";
    out << "rng " << runner.rng_state_hex() << "\n";
    out << "arity " << n_in << " " << n_out << "\n";
    out << "population " << runner.population().size() << "\n";
    for (const auto& ind : runner.population()) out << ind.enc.str() << "\n";
    if (!out) throw std::runtime_error("checkpoint write failed: " + path);
}

struct CheckpointData {
    uint32_t generation = 0;
    std::string rng_hex;
    std::vector<Bits> population;
};

CheckpointData read_checkpoint(const std::string& dir, uint32_t island) {
    const std::string path = dir + "/island_" + std::to_string(island) + ".checkpoint";
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open checkpoint " + path);
    std::string line, key;
    if (!std::getline(in, line) || line != "mdlnn-checkpoint 1")
        throw std::runtime_error(path + ": bad checkpoint magic");
    CheckpointData data;
    uint64_t pop_count = 0, island_id = 0;
    uint32_t n_in = 0, n_out = 0;
    in >> key >> island_id;
    in >> key >> data.generation;
    in >> key >> data.rng_hex;
    in >> key >> n_in >> n_out;
    in >> key >> pop_count;
    if (!in) throw std::runtime_error(path + ": malformed checkpoint header");
    for (uint64_t i = 0; i < pop_count; ++i) {
        std::string bits;
        in >> bits;
        if (!in) throw std::runtime_error(path + ": truncated checkpoint population");
        data.population.push_back(Bits::from_string(bits));
    }
    return data;
}

struct Orchestrator {
    const Corpus& corpus;
    const IslandConfig& cfg;
    std::vector<std::unique_ptr<IslandRunner>> runners;
    bool used_time_trigger = false;

    void advance_all(uint32_t block) {
        const uint32_t island_count = static_cast<uint32_t>(runners.size());
        int workers = cfg.workers > 0 ? cfg.workers
                                      : static_cast<int>(std::thread::hardware_concurrency());
        workers = std::max(1, std::min<int>(workers, static_cast<int>(island_count)));
        if (workers == 1) {
            for (auto& r : runners) r->run_generations(block);
            return;
        }
        std::vector<std::thread> threads;
        for (int w = 0; w < workers; ++w)
            threads.emplace_back([&, w]() {
                for (uint32_t i = static_cast<uint32_t>(w); i < island_count;
                     i += static_cast<uint32_t>(workers))
                    runners[i]->run_generations(block);
            });
        for (auto& t : threads) t.join();
    }

    void exchange() {
        const uint32_t island_count = static_cast<uint32_t>(runners.size());
        if (island_count < 2) return;
        std::vector<IslandRunner::Exchange> picks;
        picks.reserve(island_count);
        for (auto& r : runners) picks.push_back(r->select_migration(cfg.migration_size));
        for (uint32_t i = 0; i < island_count; ++i) {
            const uint32_t from = (i + island_count - 1) % island_count;  // ring: i-1 -> i
            runners[i]->apply_migration(picks[i].loser_indices, picks[from].migrants);
        }
    }

    void checkpoint_all() {
        if (cfg.checkpoint_dir.empty()) return;
        const uint32_t n_in = corpus.addition_mode() ? 2 : static_cast<uint32_t>(corpus.vocab_size());
        const uint32_t n_out = corpus.addition_mode() ? 1 : static_cast<uint32_t>(corpus.vocab_size());
        for (uint32_t i = 0; i < runners.size(); ++i)
            write_checkpoint(cfg.checkpoint_dir, i, *runners[i], n_in, n_out);
    }

    IslandsResult finish() {
        IslandsResult result;
        const Individual* best = &runners.front()->best();
        for (auto& r : runners) {
            const Individual& candidate = r->best();
            if (individual_less(candidate, *best)) best = &candidate;
            result.logs.push_back(r->log());
        }
        result.best = *best;
        result.reproducible = !used_time_trigger;
        return result;
    }

    void run_from(uint32_t start_generation) {
        const uint32_t total = cfg.ga.generations;
        uint32_t done = start_generation;
        uint32_t since_migration = start_generation % cfg.migration_generations;
        auto phase_start = std::chrono::steady_clock::now();
        while (done < total) {
            if (cfg.migration_minutes > 0.0) {
                // Wall-clock trigger: advance one generation at a time so the
                // islands stay bulk-synchronous. Marked non-reproducible.
                advance_all(1);
                ++done;
                ++since_migration;
                const double elapsed =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - phase_start).count() / 60.0;
                const bool fire = since_migration >= cfg.migration_generations ||
                                  elapsed >= cfg.migration_minutes;
                if (fire) {
                    if (elapsed >= cfg.migration_minutes &&
                        since_migration < cfg.migration_generations)
                        used_time_trigger = true;
                    exchange();
                    checkpoint_all();
                    since_migration = 0;
                    phase_start = std::chrono::steady_clock::now();
                }
            } else {
                const uint32_t block =
                    std::min(total - done, cfg.migration_generations - since_migration);
                advance_all(block);
                done += block;
                since_migration += block;
                // Exchanges fire at every boundary, including one that ends
                // the run, so checkpoints always sit on post-migration state
                // and resumed runs share the uninterrupted trajectory.
                if (since_migration == cfg.migration_generations) {
                    exchange();
                    checkpoint_all();
                    since_migration = 0;
                }
            }
        }
        checkpoint_all();
    }
};

}  // namespace

IslandsResult run_islands(const Corpus& corpus, const IslandConfig& cfg) {
    cfg.validate();
    Orchestrator orch{corpus, cfg, {}, false};
    for (uint32_t i = 0; i < cfg.islands; ++i) {
        GAConfig ga = cfg.ga;
        ga.seed = island_seed(cfg.base_seed, i);
        orch.runners.push_back(std::make_unique<IslandRunner>(&corpus, ga));
    }
    orch.run_from(0);
    return orch.finish();
}

IslandsResult resume_islands(const Corpus& corpus, const IslandConfig& cfg) {
    cfg.validate();
    if (cfg.checkpoint_dir.empty())
        throw std::invalid_argument("resume_islands: checkpoint_dir is required");
    Orchestrator orch{corpus, cfg, {}, false};
    uint32_t start = 0;
    for (uint32_t i = 0; i < cfg.islands; ++i) {
        CheckpointData data = read_checkpoint(cfg.checkpoint_dir, i);
        GAConfig ga = cfg.ga;
        ga.seed = island_seed(cfg.base_seed, i);
        orch.runners.push_back(
            std::make_unique<IslandRunner>(&corpus, ga, data.population, data.rng_hex, data.generation));
        if (i == 0) start = data.generation;
        else if (data.generation != start)
            throw std::runtime_error("resume_islands: checkpoints disagree on the generation");
    }
    orch.run_from(start);
    return orch.finish();
}

}  // namespace mdlnn

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <set>

#include "mdlnn/islands.hpp"

using namespace mdlnn;

namespace {

Corpus small_corpus(uint64_t seed = 5) {
    Rng rng(seed);
    return generate_training(TaskKind::AnBn, 20, 0.3, rng);
}

IslandConfig small_island_cfg(uint64_t seed) {
    IslandConfig cfg;
    cfg.islands = 3;
    cfg.ga.population_size = 20;
    cfg.ga.generations = 30;
    cfg.ga.tournament_size = 2;
    cfg.migration_size = 2;
    cfg.migration_generations = 10;
    cfg.base_seed = seed;
    cfg.workers = 2;
    return cfg;
}

}  // namespace

TEST_CASE("a single island equals evolve_island with the same seed") {
    Corpus corpus = small_corpus();
    IslandConfig cfg = small_island_cfg(7);
    cfg.islands = 1;
    cfg.workers = 1;
    GAConfig ga = cfg.ga;
    ga.seed = island_seed(cfg.base_seed, 0);
    auto [plain_best, plain_log] = evolve_island(corpus, ga);
    IslandsResult ringed = run_islands(corpus, cfg);
    CHECK(ringed.best.enc == plain_best.enc);
    REQUIRE(ringed.logs.size() == 1);
    REQUIRE(ringed.logs[0].size() == plain_log.size());
    for (size_t i = 0; i < plain_log.size(); ++i)
        CHECK(ringed.logs[0][i].best.total() == plain_log[i].best.total());
}

TEST_CASE("migration moves genomes around the ring") {
    Corpus corpus = small_corpus();
    // Two islands, migration after generation 10: by the end island 1 has
    // hosted a genome that island 0 held at the migration point. Track via
    // the exchanged individuals themselves.
    IslandConfig cfg = small_island_cfg(3);
    cfg.islands = 2;
    cfg.migration_size = 1;

    GAConfig ga0 = cfg.ga;
    ga0.seed = island_seed(cfg.base_seed, 0);
    GAConfig ga1 = cfg.ga;
    ga1.seed = island_seed(cfg.base_seed, 1);
    IslandRunner island0(&corpus, ga0);
    IslandRunner island1(&corpus, ga1);
    island0.run_generations(10);
    island1.run_generations(10);
    std::set<std::string> island0_members;
    for (const auto& ind : island0.population()) island0_members.insert(ind.enc.str());

    auto ex0 = island0.select_migration(cfg.migration_size);
    auto ex1 = island1.select_migration(cfg.migration_size);
    island0.apply_migration(ex0.loser_indices, ex1.migrants);  // ring: 1 -> 0
    island1.apply_migration(ex1.loser_indices, ex0.migrants);  // ring: 0 -> 1

    bool found = false;
    for (const auto& ind : island1.population())
        if (island0_members.count(ind.enc.str())) found = true;
    CHECK(found);
    CHECK(island0.population().size() == cfg.ga.population_size);
    CHECK(island1.population().size() == cfg.ga.population_size);
}

TEST_CASE("the returned best is the argmin over the union of islands") {
    Corpus corpus = small_corpus();
    IslandConfig cfg = small_island_cfg(11);
    IslandsResult result = run_islands(corpus, cfg);
    for (const auto& log : result.logs) {
        CHECK(result.best.score.total() <= log.back().best.total());
    }
    CHECK(result.reproducible);
}

TEST_CASE("migrate replaces losers and keeps the population size") {
    Corpus corpus = small_corpus();
    GAConfig ga;
    ga.population_size = 12;
    ga.generations = 1;
    ga.seed = 21;
    IslandRunner runner(&corpus, ga);
    std::vector<Individual> population = runner.population();

    // Incoming strictly better than everything resident.
    std::vector<Individual> incoming(2);
    for (auto& ind : incoming) {
        ind.net = population[0].net;
        ind.enc = population[0].enc;
        ind.score = {1, 0.0};
    }
    Rng rng(5);
    const double best_before = 0.0 + population[0].score.total();
    auto outgoing = migrate(population, incoming, 2, rng);
    CHECK(population.size() == 12);
    CHECK(outgoing.size() == 2);
    double best_after = population[0].score.total();
    for (const auto& ind : population) best_after = std::min(best_after, ind.score.total());
    CHECK(best_after <= best_before);
    CHECK(best_after == 1.0);  // the planted migrants dominate

    // Oversized migration is a config error.
    std::vector<Individual> too_many(6, incoming[0]);
    CHECK_THROWS_AS(migrate(population, too_many, 2, rng), std::invalid_argument);
    IslandConfig bad = small_island_cfg(1);
    bad.migration_size = bad.ga.population_size;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("island runs are deterministic regardless of worker count") {
    Corpus corpus = small_corpus();
    IslandConfig cfg = small_island_cfg(13);
    IslandsResult serial = run_islands(corpus, [&] {
        IslandConfig c = cfg;
        c.workers = 1;
        return c;
    }());
    IslandsResult threaded = run_islands(corpus, cfg);
    CHECK(serial.best.enc == threaded.best.enc);
    REQUIRE(serial.logs.size() == threaded.logs.size());
    for (size_t i = 0; i < serial.logs.size(); ++i) {
        REQUIRE(serial.logs[i].size() == threaded.logs[i].size());
        for (size_t g = 0; g < serial.logs[i].size(); ++g)
            CHECK(serial.logs[i][g].best.total() == threaded.logs[i][g].best.total());
    }
}

TEST_CASE("checkpointed runs resume on the uninterrupted trajectory") {
    Corpus corpus = small_corpus();
    const std::string dir =
        (std::filesystem::temp_directory_path() / "mdlnn_ckpt_test").string();
    std::filesystem::remove_all(dir);

    IslandConfig cfg = small_island_cfg(17);
    cfg.checkpoint_dir = dir;

    IslandsResult full = run_islands(corpus, cfg);

    // Run only up to the first migration point, then resume from disk.
    IslandConfig half = cfg;
    half.ga.generations = 10;
    std::filesystem::remove_all(dir);
    run_islands(corpus, half);

    IslandConfig rest = cfg;  // full horizon again
    IslandsResult resumed = resume_islands(corpus, rest);
    CHECK(resumed.best.enc == full.best.enc);
    CHECK(resumed.best.score.total() == full.best.score.total());
    std::filesystem::remove_all(dir);
}

TEST_CASE("total genome count is invariant at every migration point") {
    Corpus corpus = small_corpus();
    IslandConfig cfg = small_island_cfg(19);
    GAConfig ga = cfg.ga;
    std::vector<IslandRunner> runners;
    for (uint32_t i = 0; i < cfg.islands; ++i) {
        ga.seed = island_seed(cfg.base_seed, i);
        runners.emplace_back(&corpus, ga);
    }
    for (int phase = 0; phase < 3; ++phase) {
        for (auto& r : runners) r.run_generations(cfg.migration_generations);
        std::vector<IslandRunner::Exchange> picks;
        for (auto& r : runners) picks.push_back(r.select_migration(cfg.migration_size));
        for (uint32_t i = 0; i < cfg.islands; ++i)
            runners[i].apply_migration(picks[i].loser_indices,
                                       picks[(i + cfg.islands - 1) % cfg.islands].migrants);
        size_t total = 0;
        for (auto& r : runners) total += r.population().size();
        CHECK(total == static_cast<size_t>(cfg.islands) * cfg.ga.population_size);
    }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mdlnn/search.hpp"
#include "mdlnn/simulator.hpp"

using namespace mdlnn;

namespace {

GAConfig small_cfg(uint64_t seed) {
    GAConfig cfg;
    cfg.population_size = 24;
    cfg.generations = 15;
    cfg.tournament_size = 2;
    cfg.seed = seed;
    return cfg;
}

Corpus small_corpus(uint64_t seed = 5) {
    Rng rng(seed);
    return generate_training(TaskKind::AnBn, 20, 0.3, rng);
}

}  // namespace

TEST_CASE("random networks satisfy the initialization contract") {
    GAConfig cfg = small_cfg(1);
    Rng rng(123);
    for (int trial = 0; trial < 500; ++trial) {
        Network net = random_network(3, 3, cfg, rng);
        CHECK(net.n_units() == 6);  // no hidden units
        CHECK(net.n_hidden() == 0);
        for (uint32_t o = 3; o < 6; ++o) {
            bool incoming_from_input = false;
            for (uint32_t i = 0; i < 3; ++i)
                for (const Connection& c : net.units[i].outgoing)
                    if (c.target == o) incoming_from_input = true;
            CHECK(incoming_from_input);
        }
        net.validate();
    }
}

TEST_CASE("random networks round-trip and keep weights in the init range") {
    GAConfig cfg = small_cfg(2);
    Rng rng(321);
    for (int trial = 0; trial < 10000; ++trial) {
        Network net = random_network(2, 2, cfg, rng);
        for (const auto& u : net.units)
            for (const auto& c : u.outgoing) {
                CHECK(c.weight.num <= cfg.init_numerator_max);
                CHECK(c.weight.den >= 1);
                CHECK(c.weight.den <= cfg.init_denominator_max);
            }
        const Bits bits = encode_network(net, cfg.enc);
        CHECK(decode_network(bits, 2, 2, cfg.enc) == net);
    }
}

TEST_CASE("flip-sign mutates exactly one weight and nothing else") {
    GAConfig cfg = small_cfg(3);
    Rng rng(11);
    Network net = Network::empty(1, 1);
    net.units[0].outgoing.push_back(Connection{1, Rational(+1, 2, 5), ConnKind::Forward});
    auto flipped = mutate_with_op(net, MutationOp::FlipSign, cfg, rng);
    REQUIRE(flipped.has_value());
    CHECK(flipped->units[0].outgoing[0].weight == Rational(-1, 2, 5));
    auto again = mutate_with_op(*flipped, MutationOp::FlipSign, cfg, rng);
    REQUIRE(again.has_value());
    CHECK(*again == net);  // bit-identical round trip
    CHECK(encode_network(*again, cfg.enc) == encode_network(net, cfg.enc));
}

TEST_CASE("remove-unit on a hiddenless network is infeasible") {
    GAConfig cfg = small_cfg(4);
    Rng rng(17);
    Network net = random_network(2, 2, cfg, rng);
    CHECK_FALSE(mutate_with_op(net, MutationOp::RemoveUnit, cfg, rng).has_value());
    // mutate() as a whole still returns a valid offspring via other operators.
    Network off = mutate(net, cfg, rng);
    off.validate();
}

TEST_CASE("mutation closure: thousands of offspring stay codec-valid and acyclic") {
    GAConfig cfg = small_cfg(5);
    cfg.enc = EncodingConfig::extended();
    Rng rng(777);
    Network net = random_network(3, 3, cfg, rng);
    for (int i = 0; i < 10000; ++i) {
        net = mutate(net, cfg, rng);
        REQUIRE(net.forward_acyclic());
        const Bits bits = encode_network(net, cfg.enc);
        const Network back = decode_network(bits, 3, 3, cfg.enc);
        REQUIRE(back == net);
        // Keep sizes in check so the walk explores a realistic region.
        if (net.n_hidden() > 12) {
            Rng fresh(i);
            net = random_network(3, 3, cfg, fresh);
        }
    }
}

TEST_CASE("add-unit splits a connection NEAT-style") {
    GAConfig cfg = small_cfg(6);
    Rng rng(19);
    Network net = Network::empty(1, 1);
    net.units[0].outgoing.push_back(Connection{1, Rational(+1, 3, 4), ConnKind::Forward});
    auto split = mutate_with_op(net, MutationOp::AddUnit, cfg, rng);
    REQUIRE(split.has_value());
    CHECK(split->n_units() == 3);
    CHECK(split->units[0].outgoing.size() == 1);
    CHECK(split->units[0].outgoing[0].target == 2);
    CHECK(split->units[0].outgoing[0].weight == Rational(+1, 1, 1));
    CHECK(split->units[2].outgoing[0].target == 1);
    CHECK(split->units[2].outgoing[0].weight == Rational(+1, 3, 4));
    split->validate();
}

TEST_CASE("tournament selection follows the MDL total order") {
    std::vector<Individual> pop(2);
    pop[0].score = {4, 6.0};   // total 10
    pop[1].score = {4, 16.0};  // total 20
    Rng rng(23);
    auto [w, l] = tournament_selection(pop, 2, rng);
    CHECK(pop[w].score.total() == 10.0);
    CHECK(pop[l].score.total() == 20.0);

    // Equal totals: fewer grammar bits win. Verify over every draw order.
    pop[0].score = {7, 13.0};
    pop[1].score = {5, 15.0};
    for (uint64_t seed = 0; seed < 32; ++seed) {
        Rng r(seed);
        auto [winner, loser] = tournament_selection(pop, 2, r);
        CHECK(pop[winner].score.grammar_bits == 5);
        CHECK(pop[loser].score.grammar_bits == 7);
    }
}

TEST_CASE("a full-population tournament finds the global best") {
    std::vector<Individual> pop(9);
    for (size_t i = 0; i < pop.size(); ++i) pop[i].score = {10, static_cast<double>(20 - i)};
    Rng rng(29);
    auto [w, l] = tournament_selection(pop, static_cast<uint32_t>(pop.size()), rng);
    CHECK(w == pop.size() - 1);
    CHECK(l == 0);
}

TEST_CASE("evolution history is non-increasing and the population stays fixed") {
    Corpus corpus = small_corpus();
    for (uint64_t seed = 0; seed < 20; ++seed) {
        GAConfig cfg = small_cfg(seed);
        IslandRunner runner(&corpus, cfg);
        CHECK(runner.population().size() == cfg.population_size);
        runner.run_generations(cfg.generations);
        CHECK(runner.population().size() == cfg.population_size);
        const auto& log = runner.log();
        REQUIRE(log.size() == cfg.generations + 1);
        for (size_t g = 1; g < log.size(); ++g)
            CHECK(log[g].best.total() <= log[g - 1].best.total());
    }
}

TEST_CASE("zero generations returns the best of the initial population") {
    Corpus corpus = small_corpus();
    GAConfig cfg = small_cfg(8);
    cfg.generations = 0;
    auto [best, log] = evolve_island(corpus, cfg);
    CHECK(log.size() == 1);
    CHECK(best.score.total() == log[0].best.total());
}

TEST_CASE("seeded runs are bit-identical") {
    Corpus corpus = small_corpus();
    GAConfig cfg = small_cfg(99);
    auto [best_a, log_a] = evolve_island(corpus, cfg);
    auto [best_b, log_b] = evolve_island(corpus, cfg);
    CHECK(best_a.enc == best_b.enc);
    REQUIRE(log_a.size() == log_b.size());
    for (size_t i = 0; i < log_a.size(); ++i) {
        CHECK(log_a[i].best.total() == log_b[i].best.total());
        CHECK(log_a[i].mean_total == log_b[i].mean_total);
    }
}

TEST_CASE("every individual in an evolved population decodes from its encoding") {
    Corpus corpus = small_corpus();
    GAConfig cfg = small_cfg(12);
    IslandRunner runner(&corpus, cfg);
    runner.run_generations(10);
    for (const auto& ind : runner.population()) {
        const Network back = decode_network(ind.enc, ind.net.n_inputs, ind.net.n_outputs, cfg.enc);
        CHECK(back == ind.net);
        CHECK(ind.score.grammar_bits == ind.enc.size());
    }
}

TEST_CASE("config validation catches bad parameters") {
    GAConfig cfg = small_cfg(1);
    cfg.tournament_size = 1;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = small_cfg(1);
    cfg.population_size = 1;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <set>

#include "mdlnn/tasks.hpp"

using namespace mdlnn;

TEST_CASE("geometric sampling matches its definition") {
    Rng rng(42);
    const int draws = 1000000;
    int ones = 0;
    double sum = 0.0;
    int min_seen = 1 << 30;
    for (int i = 0; i < draws; ++i) {
        const int k = sample_geometric(0.3, rng);
        if (k == 1) ++ones;
        sum += k;
        min_seen = std::min(min_seen, k);
    }
    CHECK(static_cast<double>(ones) / draws == doctest::Approx(0.3).epsilon(0.0067));
    CHECK(sum / draws == doctest::Approx(1.0 / 0.3).epsilon(0.006));
    CHECK(min_seen >= 1);
}

TEST_CASE("anbn sequences follow the start/end convention") {
    Rng rng(1);
    Corpus c = generate_training(TaskKind::AnBn, 50, 0.3, rng);
    REQUIRE(c.sequences.size() == 50);
    for (const auto& body : c.sequences) {
        CHECK(is_in_language(TaskKind::AnBn, body));
        CHECK(body.find('a') == 0);
    }
    // n = 2 gives inputs "#aabb" and targets "aabb#": check via masks below.
    CHECK(is_in_language(TaskKind::AnBn, "aabb"));
    CHECK_FALSE(is_in_language(TaskKind::AnBn, "aab"));
    CHECK_FALSE(is_in_language(TaskKind::AnBn, "abb"));
    CHECK_FALSE(is_in_language(TaskKind::AnBn, ""));  // n > 0
    CHECK_FALSE(is_in_language(TaskKind::AnBn, "ba"));
}

TEST_CASE("membership checkers accept every generated sequence") {
    Rng rng(7);
    for (TaskKind task : {TaskKind::AnBn, TaskKind::AnBnCn, TaskKind::AnBnCnDn, TaskKind::AnB2n,
                          TaskKind::AnBmCnm, TaskKind::Dyck1, TaskKind::Dyck2}) {
        Corpus c = generate_training(task, 200, 0.3, rng);
        for (const auto& body : c.sequences) CHECK(is_in_language(task, body));
    }
}

TEST_CASE("addition corpora enumerate pair squares LSB first") {
    Rng rng(3);
    Corpus c = generate_training(TaskKind::Addition, 10, 0.3, rng);
    CHECK(c.pairs.size() == 100);  // [0..9]^2 by default
    GenOptions inclusive;
    inclusive.addition_inclusive = true;
    Rng rng2(3);
    Corpus c2 = generate_training(TaskKind::Addition, 10, 0.3, rng2, inclusive);
    CHECK(c2.pairs.size() == 121);  // [0..10]^2 behind the flag

    // Pair (3, 2): inputs ((1,0),(1,1),(0,0)), targets 1,0,1 (3 + 2 = 101b).
    CHECK(Corpus::addition_steps(3, 2) == 3);
    const uint32_t n = 3, m = 2;
    const uint64_t sum = n + m;
    std::vector<std::pair<int, int>> inputs;
    std::vector<int> targets;
    for (size_t i = 0; i < Corpus::addition_steps(n, m); ++i) {
        inputs.emplace_back((n >> i) & 1, (m >> i) & 1);
        targets.push_back(static_cast<int>((sum >> i) & 1));
    }
    CHECK(inputs == std::vector<std::pair<int, int>>{{1, 0}, {1, 1}, {0, 0}});
    CHECK(targets == std::vector<int>{1, 0, 1});
    CHECK(Corpus::addition_steps(0, 0) == 1);  // single zero step
}

TEST_CASE("test corpora have the expected sizes") {
    Rng rng(5);
    Corpus anbn = generate_test(TaskKind::AnBn, 20, rng);
    CHECK(anbn.sequences.size() == 1001);
    CHECK(anbn.sequences.front() == std::string(21, 'a') + std::string(21, 'b'));
    CHECK(anbn.sequences.back() == std::string(1021, 'a') + std::string(1021, 'b'));

    Corpus pairs = generate_test(TaskKind::AnBmCnm, 20, rng);
    CHECK(pairs.sequences.size() == 2500);

    Corpus add = generate_test(TaskKind::Addition, 20, rng);
    CHECK(add.pairs.size() == 62500);
    CHECK(add.pairs.front() == std::pair<uint32_t, uint32_t>{21, 21});
    CHECK(add.pairs.back() == std::pair<uint32_t, uint32_t>{270, 270});
}

TEST_CASE("dyck test sets avoid training duplicates") {
    Rng rng(11);
    Corpus train = generate_training(TaskKind::Dyck1, 500, 0.3, rng);
    GenOptions opts;
    opts.dyck_test_count = 2000;
    Corpus test = generate_test(TaskKind::Dyck1, train.realized_K, rng, &train, opts);
    CHECK(test.sequences.size() == 2000);
    std::set<std::string> train_set(train.sequences.begin(), train.sequences.end());
    for (const auto& body : test.sequences) CHECK(train_set.count(body) == 0);
}

TEST_CASE("oracle distributions match the generative process") {
    auto d = oracle_next(TaskKind::AnBn, "#a");
    CHECK(d[1] == doctest::Approx(0.7));
    CHECK(d[2] == doctest::Approx(0.3));

    d = oracle_next(TaskKind::AnBn, "#aab");
    CHECK(d[2] == 1.0);

    d = oracle_next(TaskKind::AnBn, "#");
    CHECK(d[1] == 1.0);  // first a is forced

    d = oracle_next(TaskKind::Dyck1, "#[]");
    CHECK(d[1] == doctest::Approx(0.3));
    CHECK(d[0] == doctest::Approx(0.7));

    d = oracle_next(TaskKind::Dyck2, "#[");
    CHECK(d[1] == doctest::Approx(0.15));
    CHECK(d[3] == doctest::Approx(0.15));
    CHECK(d[2] == doctest::Approx(0.7));
    CHECK(d[4] == 0.0);

    CHECK_THROWS_AS(oracle_next(TaskKind::AnBn, "#b"), InvalidPrefixError);
    CHECK_THROWS_AS(oracle_next(TaskKind::Dyck1, "#]"), InvalidPrefixError);
}

TEST_CASE("oracle rows sum to one over many prefixes") {
    Rng rng(13);
    for (TaskKind task : {TaskKind::AnBn, TaskKind::AnBmCnm, TaskKind::Dyck2}) {
        Corpus c = generate_training(task, 100, 0.3, rng);
        OracleState oracle(task, 0.3);
        const std::string vocab = task_vocab(task);
        for (const auto& body : c.sequences) {
            oracle.reset();
            std::vector<double> d;
            for (size_t i = 0; i <= body.size(); ++i) {
                oracle.next_dist(d);
                double sum = 0.0;
                for (double x : d) sum += x;
                REQUIRE(sum == doctest::Approx(1.0).epsilon(1e-12));
                const uint8_t target =
                    i < body.size() ? static_cast<uint8_t>(vocab.find(body[i])) : uint8_t{0};
                oracle.advance(target);
            }
        }
    }
}

TEST_CASE("deterministic masks match the point-mass definition") {
    auto mask = deterministic_mask(TaskKind::AnBn, "aabb");
    CHECK(mask == std::vector<bool>{true, false, false, true, true});

    mask = deterministic_mask(TaskKind::AnB2n, "abb");
    CHECK(mask == std::vector<bool>{true, false, true, true});

    mask = deterministic_mask(TaskKind::Dyck1, "[][[]]");
    for (bool b : mask) CHECK_FALSE(b);

    // Definitional consistency: mask true iff max oracle probability is 1.
    Rng rng(17);
    for (TaskKind task : {TaskKind::AnBnCn, TaskKind::AnBmCnm}) {
        Corpus c = generate_training(task, 50, 0.3, rng);
        OracleState oracle(task, 0.3);
        const std::string vocab = task_vocab(task);
        for (const auto& body : c.sequences) {
            auto m = deterministic_mask(task, body);
            oracle.reset();
            std::vector<double> d;
            for (size_t i = 0; i <= body.size(); ++i) {
                oracle.next_dist(d);
                double top = 0.0;
                for (double x : d) top = std::max(top, x);
                CHECK(m[i] == (top == 1.0));
                oracle.advance(i < body.size() ? static_cast<uint8_t>(vocab.find(body[i]))
                                               : uint8_t{0});
            }
        }
    }
}

TEST_CASE("corpus generation is seed-deterministic and files round-trip") {
    Rng a(99), b(99);
    Corpus c1 = generate_training(TaskKind::Dyck2, 300, 0.3, a);
    Corpus c2 = generate_training(TaskKind::Dyck2, 300, 0.3, b);
    CHECK(c1.sequences == c2.sequences);

    c1.seed = 99;
    const std::string path = std::filesystem::temp_directory_path() / "mdlnn_test_corpus.txt";
    save_corpus(c1, path);
    Corpus loaded = load_corpus(path);
    CHECK(loaded.task == c1.task);
    CHECK(loaded.sequences == c1.sequences);
    CHECK(loaded.p == c1.p);
    CHECK(loaded.realized_K == c1.realized_K);
    std::remove(path.c_str());
}

TEST_CASE("realized K anchors the test set") {
    Rng rng(23);
    Corpus train = generate_training(TaskKind::AnBn, 500, 0.3, rng);
    CHECK(train.realized_K >= 1);
    uint64_t max_n = 0;
    for (const auto& body : train.sequences) max_n = std::max<uint64_t>(max_n, body.find('b'));
    CHECK(train.realized_K == max_n);
}

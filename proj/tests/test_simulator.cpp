#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mdlnn/simulator.hpp"

using namespace mdlnn;

namespace {

Network single_link_net() {
    // One linear output fed by the input with weight +1/2.
    Network net = Network::empty(1, 1);
    net.units[0].outgoing.push_back(Connection{1, Rational(+1, 1, 2), ConnKind::Forward});
    return net;
}

}  // namespace

TEST_CASE("reset state is all zeros and idempotent") {
    Network net = single_link_net();
    NetworkState a = reset_state(net);
    CHECK(a.prev == std::vector<double>{0.0, 0.0});
    NetworkState b = reset_state(net);
    CHECK(a.prev == b.prev);
}

TEST_CASE("a weighted linear link halves its input") {
    Network net = single_link_net();
    auto [raw, next] = step(net, reset_state(net), {3.0});
    CHECK(raw == std::vector<double>{1.5});
    CHECK(next.prev == std::vector<double>{3.0, 1.5});
}

TEST_CASE("recurrent connections deliver the previous step's value") {
    // Output reads the input recurrently: an impulse shows up one step late.
    Network net = Network::empty(1, 1);
    net.units[0].outgoing.push_back(Connection{1, Rational(+1, 1, 1), ConnKind::Recurrent});
    auto outs = run_sequence(net, {{1.0}, {0.0}, {0.0}});
    CHECK(outs[0][0] == 0.0);
    CHECK(outs[1][0] == 1.0);
    CHECK(outs[2][0] == 0.0);
}

TEST_CASE("run_sequence of nothing is nothing") {
    Network net = single_link_net();
    CHECK(run_sequence(net, {}).empty());
}

TEST_CASE("normalization zeroes negatives and renormalizes") {
    const double sg = 1.0 / (1.0 + std::exp(15.0));
    auto dist = normalize_distribution({7.0 / 3.0, 0.0, sg});
    CHECK(dist[0] == doctest::Approx(0.99999987).epsilon(1e-7));
    CHECK(dist[1] == 0.0);
    CHECK(dist[2] == doctest::Approx(1.3e-7).epsilon(0.05));
    CHECK(dist[0] + dist[1] + dist[2] == doctest::Approx(1.0).epsilon(1e-12));

    CHECK(normalize_distribution({0.0, 0.0, 0.0}) ==
          std::vector<double>{1.0 / 3, 1.0 / 3, 1.0 / 3});
    CHECK(normalize_distribution({-5.0, 2.0, 2.0}) == std::vector<double>{0.0, 0.5, 0.5});
}

TEST_CASE("probability clamp") {
    CHECK(clamp_probability(15.0 * 15.0) == 1.0);
    CHECK(clamp_probability(-0.3) == 0.0);
    CHECK(clamp_probability(0.42) == 0.42);
}

TEST_CASE("trace agrees with run_sequence and records unit values") {
    Network net = Network::empty(1, 1);
    net.units[1].activation = Activation::Square;
    net.units[0].outgoing.push_back(Connection{1, Rational(+1, 2, 1), ConnKind::Forward});
    std::vector<std::vector<double>> inputs{{1.0}, {2.0}, {3.0}};
    auto rows = trace(net, inputs);
    auto outs = run_sequence(net, inputs);
    REQUIRE(rows.size() == outs.size());
    for (size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].raw_output == outs[i]);
        CHECK(rows[i].time == static_cast<int>(i + 1));
        CHECK(rows[i].unit_values.size() == 2);
    }
    CHECK(rows[2].raw_output[0] == 36.0);
}

TEST_CASE("identical runs are bit-identical") {
    Network net = single_link_net();
    net.units[1].activation = Activation::Sigmoid;
    std::vector<std::vector<double>> inputs{{0.3}, {1.7}, {-2.0}};
    auto a = trace(net, inputs);
    auto b = trace(net, inputs);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].unit_values == b[i].unit_values);
        CHECK(a[i].distribution == b[i].distribution);
    }
}

TEST_CASE("square chains overflow to a poisoned uniform step") {
    // x -> x^2 repeatedly via a recurrent self-loop on a square unit.
    Network net = Network::empty(1, 1);
    net.units[1].activation = Activation::Square;
    net.units[0].outgoing.push_back(Connection{1, Rational(+1, 9, 1), ConnKind::Forward});
    net.units[1].outgoing.push_back(Connection{1, Rational(+1, 9, 1), ConnKind::Recurrent});
    std::vector<std::vector<double>> inputs(64, std::vector<double>{1.0});
    auto rows = trace(net, inputs);
    bool saw_poison = false;
    for (const auto& row : rows)
        if (row.poisoned) {
            saw_poison = true;
            CHECK(row.distribution == std::vector<double>{1.0});
        }
    CHECK(saw_poison);
}

TEST_CASE("product units multiply weighted inputs and bias") {
    Network net = Network::empty(2, 1);
    net.units[2].aggregation = Aggregation::Product;
    net.units[2].bias = Rational(+1, 2, 1);
    net.units[0].outgoing.push_back(Connection{2, Rational(+1, 3, 1), ConnKind::Forward});
    net.units[1].outgoing.push_back(Connection{2, Rational(+1, 1, 2), ConnKind::Forward});
    auto [raw, st] = step(net, reset_state(net), {2.0, 4.0});
    CHECK(raw[0] == 2.0 * (3.0 * 2.0) * (0.5 * 4.0));  // bias * w1 x1 * w2 x2

    Network empty_prod = Network::empty(1, 1);
    empty_prod.units[1].aggregation = Aggregation::Product;
    auto [raw2, st2] = step(empty_prod, reset_state(empty_prod), {5.0});
    CHECK(raw2[0] == 0.0);  // no inputs, no bias
}

TEST_CASE("arity mismatches are rejected") {
    Network net = single_link_net();
    CHECK_THROWS_AS(step(net, reset_state(net), {1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("forward cycles are rejected at plan time") {
    Network net = Network::empty(1, 2);
    net.units[1].outgoing.push_back(Connection{2, Rational(+1, 1, 1), ConnKind::Forward});
    net.units[2].outgoing.push_back(Connection{1, Rational(+1, 1, 1), ConnKind::Forward});
    CHECK_THROWS_AS(CompiledNet{net}, InvalidNetworkError);
}

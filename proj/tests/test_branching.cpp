#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "branchsim/branching.hpp"
#include "branchsim/ensemble.hpp"
#include "branchsim/experiments.hpp"
#include "branchsim/random_models.hpp"
#include "branchsim/rng.hpp"

using namespace branchsim;

namespace {

// No-event schedule on two qubits with one free record.
Model no_event_model() {
    Model m;
    m.initial_state = normalized(add(StateVector::basis("00"), StateVector::basis("11")));
    SystemSpec spec;
    spec.n_qubits = 2;
    spec.record_qubits.push_back({1, 1.0});
    m.schedule = EventSchedule{spec, {}, 1.0};
    return m;
}

}  // namespace

TEST_CASE("history enumeration counts candidate record patterns", "[branching]") {
    CHECK(enumerate_histories(build_toy().schedule).size() == 16);

    // Single event on one record qubit: candidates (0) and (1).
    SplitMix64 rng(31);
    const Model m = random_model(2, 1, rng);
    REQUIRE(m.schedule.events[0].record_set.size() == 1);
    const auto histories = enumerate_histories(m.schedule);
    REQUIRE(histories.size() == 2);
    CHECK(histories[0].flat_bits() == std::vector<int>{0});
    CHECK(histories[1].flat_bits() == std::vector<int>{1});

    CHECK_THROWS_AS(enumerate_histories(build_toy().schedule, 8), std::runtime_error);
}

TEST_CASE("Bell subsystem has 16 candidates and 4 carried branches", "[branching]") {
    const Model m = build_bell_subsystem(kPi / 3.0);
    CHECK(enumerate_histories(m.schedule).size() == 16);
    CHECK(decompose(m.initial_state, m.schedule).size() == 4);
}

TEST_CASE("the toy model decomposes into two equal branches", "[branching]") {
    const Model m = build_toy();
    const auto branches = decompose(m.initial_state, m.schedule);
    REQUIRE(branches.size() == 2);
    CHECK(branches[0].history.label() == "(0,1,0,1)");
    CHECK(branches[1].history.label() == "(0,1,1,0)");
    CHECK(std::abs(branches[0].weight - 0.5) < 1e-10);
    CHECK(std::abs(branches[1].weight - 0.5) < 1e-10);
}

TEST_CASE("a schedule without events yields one full-weight branch", "[branching]") {
    const Model m = no_event_model();
    const auto branches = decompose(m.initial_state, m.schedule);
    REQUIRE(branches.size() == 1);
    CHECK(branches[0].history.results.empty());
    CHECK(std::abs(branches[0].weight - 1.0) < 1e-12);
    const StateVector evolved = evolve_window(m.initial_state, 0.0, m.schedule.horizon, m.schedule);
    CHECK(max_abs_diff(branches[0].vector, evolved) == 0.0);
}

TEST_CASE("Bell branches at theta = pi/2 all weigh 1/4", "[branching]") {
    const auto m = build_bell_subsystem(kPi / 2.0);
    const auto branches = decompose(m.initial_state, m.schedule);
    REQUIRE(branches.size() == 4);
    for (const auto& b : branches) CHECK(std::abs(b.weight - 0.25) < 1e-10);
}

TEST_CASE("the history operator reproduces toy branch weights", "[branching]") {
    const Model m = build_toy();
    const auto histories = enumerate_histories(m.schedule);

    History observed{{BitAssignment{{1, 2}, {0, 1}}, BitAssignment{{3, 4}, {0, 1}}}};
    CHECK(std::abs(history_operator_apply(m.initial_state, m.schedule, observed).norm2() - 0.5) < 1e-10);

    // A first-event pattern with no amplitude annihilates the chain.
    History impossible{{BitAssignment{{1, 2}, {1, 1}}, BitAssignment{{3, 4}, {0, 1}}}};
    CHECK(history_operator_apply(m.initial_state, m.schedule, impossible).norm2() == 0.0);
}

TEST_CASE("projector chains never grow the norm", "[branching]") {
    SplitMix64 rng(32);
    for (int trial = 0; trial < 20; ++trial) {
        SplitMix64 sub = rng.substream(trial);
        const Model m = random_model(4, 2, sub);
        for (const History& h : enumerate_histories(m.schedule)) {
            REQUIRE(history_operator_apply(m.initial_state, m.schedule, h).norm2() <=
                    m.initial_state.norm2() + 1e-12);
        }
    }
}

TEST_CASE("born weights match the stated closed forms", "[branching]") {
    const Model toy = build_toy();
    History minus{{BitAssignment{{1, 2}, {0, 1}}, BitAssignment{{3, 4}, {1, 0}}}};
    CHECK(std::abs(born_weight(toy.initial_state, toy.schedule, minus) - 0.5) < 1e-10);

    const double theta = 2.0 * kPi / 5.0;
    const Model bell = build_bell_subsystem(theta);
    History up_up{{BitAssignment{{2, 3, 4, 5}, {0, 1, 0, 1}}}};
    const double expected = 0.5 * std::sin(theta / 2.0) * std::sin(theta / 2.0);
    CHECK(std::abs(born_weight(bell.initial_state, bell.schedule, up_up) - expected) < 1e-10);

    History impossible{{BitAssignment{{2, 3, 4, 5}, {0, 0, 0, 0}}}};
    CHECK(born_weight(bell.initial_state, bell.schedule, impossible) < 1e-24);
}

TEST_CASE("born weights sum to one for normalized initial states", "[branching]") {
    SplitMix64 rng(33);
    for (int trial = 0; trial < 10; ++trial) {
        SplitMix64 sub = rng.substream(trial);
        const Model m = random_model(4, 2, sub);
        double total = 0.0;
        for (const History& h : enumerate_histories(m.schedule)) {
            total += born_weight(m.initial_state, m.schedule, h);
        }
        REQUIRE(std::abs(total - 1.0) < 1e-10);
    }
}

TEST_CASE("branches recompose the horizon state and are orthogonal", "[branching]") {
    SplitMix64 rng(34);
    for (int trial = 0; trial < 10; ++trial) {
        SplitMix64 sub = rng.substream(trial);
        const Model m = random_model(4, 2, sub);
        const auto branches = decompose(m.initial_state, m.schedule);

        StateVector sum = StateVector::zero(4);
        for (const auto& b : branches) sum = add(sum, b.vector);
        const StateVector horizon = evolve_window(m.initial_state, 0.0, m.schedule.horizon, m.schedule);
        REQUIRE(max_abs_diff(sum, horizon) < 1e-10);

        for (std::size_t i = 0; i < branches.size(); ++i)
            for (std::size_t j = i + 1; j < branches.size(); ++j)
                REQUIRE(std::abs(inner(branches[i].vector, branches[j].vector)) < 1e-10);
    }
}

TEST_CASE("joint projection and the interleaved chain agree branch by branch", "[branching]") {
    // Two independent code paths to the same branch vector: decompose's
    // single joint projection at the horizon vs the alternating Q(h) chain
    // evolved up from the last event.
    SplitMix64 rng(35);
    for (int trial = 0; trial < 10; ++trial) {
        SplitMix64 sub = rng.substream(trial);
        const Model m = random_model(4, 2, sub);
        const double t_last = m.schedule.events.back().time;
        for (const Branch& b : decompose(m.initial_state, m.schedule)) {
            const StateVector chained =
                evolve_window(history_operator_apply(m.initial_state, m.schedule, b.history), t_last,
                              m.schedule.horizon, m.schedule);
            REQUIRE(max_abs_diff(b.vector, chained) < 1e-10);
        }
    }
}

TEST_CASE("ensemble weights agree with born weights path-independently", "[branching]") {
    SplitMix64 rng(36);
    for (int trial = 0; trial < 10; ++trial) {
        SplitMix64 sub = rng.substream(trial);
        const Model m = random_model(4, 2, sub);
        for (const auto& e : build_ensemble(m.initial_state, m.schedule)) {
            REQUIRE(std::abs(e.weight - born_weight(m.initial_state, m.schedule, e.history)) < 1e-10);
        }
    }
}

TEST_CASE("Q(h) annihilates every other history's initial state", "[branching]") {
    const Model toy = build_toy();
    CHECK(check_annihilation(toy.schedule, build_ensemble(toy.initial_state, toy.schedule)) < 1e-10);

    // Single-history ensembles have no cross pairs.
    const Model single = no_event_model();
    CHECK(check_annihilation(single.schedule, build_ensemble(single.initial_state, single.schedule)) == 0.0);

    // Brute force over all history pairs of random 3-qubit fresh-record models.
    SplitMix64 rng(37);
    for (int trial = 0; trial < 10; ++trial) {
        SplitMix64 sub = rng.substream(trial);
        const Model m = random_model(3, 2, sub);
        REQUIRE(check_annihilation(m.schedule, build_ensemble(m.initial_state, m.schedule)) < 1e-10);
    }
}

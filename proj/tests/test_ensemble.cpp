#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <vector>

#include "branchsim/ensemble.hpp"
#include "branchsim/experiments.hpp"
#include "branchsim/random_models.hpp"
#include "branchsim/rng.hpp"

using namespace branchsim;

namespace {

Model no_event_model() {
    Model m;
    m.initial_state = normalized(add(StateVector::basis("00"), StateVector::basis("01")));
    SystemSpec spec;
    spec.n_qubits = 2;
    spec.record_qubits.push_back({0, 1.3});
    m.schedule = EventSchedule{spec, {}, 0.9};
    return m;
}

}  // namespace

TEST_CASE("the toy ensemble reproduces the two time-0 states", "[ensemble]") {
    const Model m = build_toy();
    const auto entries = build_ensemble(m.initial_state, m.schedule);
    REQUIRE(entries.size() == 2);

    // Sub-normalized entries (|up>|0000> +- |down>|1100>)/2: amplitude 1/2 at
    // index 0 and +-1/2 at index 28, nothing else.
    for (std::size_t i = 0; i < 2; ++i) {
        StateVector expected = StateVector::zero(5);
        expected.amplitudes[0] = cplx{0.5, 0.0};
        expected.amplitudes[28] = cplx{i == 0 ? 0.5 : -0.5, 0.0};
        CHECK(max_abs_diff(entries[i].initial_state, expected) < 1e-10);
        CHECK(std::abs(entries[i].weight - 0.5) < 1e-10);
        CHECK(std::abs(entries[i].initial_state.norm2() - entries[i].weight) < 1e-12);
    }
    CHECK(entries[0].history.label() == "(0,1,0,1)");
    CHECK(entries[1].history.label() == "(0,1,1,0)");
}

TEST_CASE("a no-event schedule yields the initial state as its only entry", "[ensemble]") {
    const Model m = no_event_model();
    const auto entries = build_ensemble(m.initial_state, m.schedule);
    REQUIRE(entries.size() == 1);
    CHECK(entries[0].history.results.empty());
    CHECK(std::abs(entries[0].weight - 1.0) < 1e-12);
    CHECK(max_abs_diff(entries[0].initial_state, m.initial_state) < 1e-10);
}

TEST_CASE("ensemble entries sum back to the initial state", "[ensemble]") {
    SplitMix64 rng(41);
    for (int trial = 0; trial < 10; ++trial) {
        SplitMix64 sub = rng.substream(trial);
        const Model m = random_model(4, 2, sub);
        StateVector sum = StateVector::zero(4);
        for (const auto& e : build_ensemble(m.initial_state, m.schedule)) sum = add(sum, e.initial_state);
        REQUIRE(max_abs_diff(sum, m.initial_state) < 1e-10);
    }
}

TEST_CASE("forward evolution of an entry recovers its branch vector", "[ensemble]") {
    const Model m = build_toy();
    const auto branches = decompose(m.initial_state, m.schedule);
    const auto entries = build_ensemble(m.initial_state, m.schedule);
    REQUIRE(branches.size() == entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const StateVector forward =
            evolve_window(entries[i].initial_state, 0.0, m.schedule.horizon, m.schedule);
        REQUIRE(max_abs_diff(forward, branches[i].vector) < 1e-10);
    }
}

TEST_CASE("sampling a single-entry ensemble returns it for any seed", "[ensemble]") {
    const Model m = no_event_model();
    const auto entries = build_ensemble(m.initial_state, m.schedule);
    for (std::uint64_t seed : {0ull, 7ull, 123456789ull}) {
        const EnsembleEntry pick = sample(entries, seed);
        CHECK(pick.history == entries[0].history);
        CHECK(std::abs(pick.initial_state.norm2() - 1.0) < 1e-12);  // renormalized copy
        CHECK(pick.weight == entries[0].weight);
    }
}

TEST_CASE("toy sampling frequencies sit within the CLT band", "[ensemble]") {
    const Model m = build_toy();
    const auto entries = build_ensemble(m.initial_state, m.schedule);

    const std::uint64_t draws = 100000;
    std::map<std::string, std::uint64_t> counts;
    for (std::uint64_t i = 0; i < draws; ++i) {
        counts[sample(entries, SplitMix64::derive_seed(99, i)).history.label()] += 1;
    }
    REQUIRE(counts.size() == 2);
    // Binomial CLT: 0.5 +- 3 sigma with sigma = 0.5/sqrt(n).
    for (const auto& [label, count] : counts) {
        const double freq = static_cast<double>(count) / static_cast<double>(draws);
        CHECK(std::abs(freq - 0.5) < 0.005);
    }
}

TEST_CASE("sampling is a pure function of entries and seed", "[ensemble]") {
    const Model m = build_toy();
    const auto entries = build_ensemble(m.initial_state, m.schedule);
    const EnsembleEntry a = sample(entries, 42);
    const EnsembleEntry b = sample(entries, 42);
    CHECK(a.history == b.history);
    CHECK(max_abs_diff(a.initial_state, b.initial_state) == 0.0);
}

TEST_CASE("sampling rejects empty or unnormalized ensembles", "[ensemble]") {
    CHECK_THROWS_AS(sample({}, 0), std::invalid_argument);

    const Model m = build_toy();
    auto entries = build_ensemble(m.initial_state, m.schedule);
    entries.pop_back();  // weights now sum to 1/2
    CHECK_THROWS_AS(sample(entries, 0), std::invalid_argument);
}

TEST_CASE("both toy entries replay their own histories with no leakage", "[ensemble]") {
    const Model m = build_toy();
    const auto entries = build_ensemble(m.initial_state, m.schedule);
    REQUIRE(entries.size() == 2);

    const std::vector<std::string> expected = {"(0,1,0,1)", "(0,1,1,0)"};
    for (std::size_t i = 0; i < 2; ++i) {
        EnsembleEntry unit = entries[i];
        unit.initial_state = normalized(unit.initial_state);
        const ReplayReport r = replay(unit, m.schedule);
        CHECK(r.observed_history.label() == expected[i]);
        CHECK(r.max_leakage < 1e-10);
    }
}

TEST_CASE("replaying a no-event entry reports an empty history", "[ensemble]") {
    const Model m = no_event_model();
    const auto entries = build_ensemble(m.initial_state, m.schedule);
    const ReplayReport r = replay(entries[0], m.schedule);
    CHECK(r.observed_history.results.empty());
    CHECK(r.max_leakage == 0.0);
}

TEST_CASE("every entry of random models replays deterministically", "[ensemble]") {
    SplitMix64 rng(42);
    for (int trial = 0; trial < 10; ++trial) {
        SplitMix64 sub = rng.substream(trial);
        const Model m = random_model(4, 2, sub);
        for (const auto& e : build_ensemble(m.initial_state, m.schedule)) {
            const ReplayReport r = replay(e, m.schedule);  // sub-normalized input is fine
            REQUIRE(r.observed_history == e.history);
            REQUIRE(r.max_leakage < 1e-10);
        }
    }
}

#pragma once

// The random ensemble of initial states: backward evolution of horizon
// branches to time 0, seeded sampling from it, and forward replay that
// verifies deterministic single-branch tracking.
//
// build_ensemble and replay are pure; sample is a pure function of
// (entries, seed). Parallel sampling should key substreams by draw index
// (see rng.hpp) so results are independent of worker count.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "branching.hpp"
#include "rng.hpp"
#include "schedule.hpp"
#include "statevec.hpp"

namespace branchsim {

struct EnsembleEntry {
    History history;
    StateVector initial_state;  // sub-normalized: norm^2 == weight
    double weight = 0.0;
};

struct ReplayReport {
    History observed_history;
    std::vector<double> per_event_leakage;  // norm^2 off the specified pattern at each event
    double max_leakage = 0.0;
};

// Backward-evolves each nonzero branch from the horizon to time 0. The
// entries sum, as vectors, to |psi0>. Weights are the time-0 norms, so the
// route to an entry's weight (horizon projection, backward evolution, norm)
// shares no step with the projector-chain route of born_weight.
inline std::vector<EnsembleEntry> build_ensemble(const StateVector& psi0, const EventSchedule& schedule,
                                                 double prune_threshold = kPruneThreshold,
                                                 std::uint64_t max_histories = kMaxHistories) {
    std::vector<EnsembleEntry> out;
    for (Branch& b : decompose(psi0, schedule, prune_threshold, max_histories)) {
        StateVector initial = evolve_window(b.vector, schedule.horizon, 0.0, schedule);
        const double weight = initial.norm2();
        out.push_back(EnsembleEntry{std::move(b.history), std::move(initial), weight});
    }
    return out;
}

// Draws one entry with probability equal to its weight. Pure function of
// (entries, seed); the returned copy is renormalized to unit norm for forward
// use, with `weight` still carrying the ensemble probability.
inline EnsembleEntry sample(const std::vector<EnsembleEntry>& entries, std::uint64_t seed) {
    if (entries.empty()) throw std::invalid_argument("sample: empty ensemble");
    double total = 0.0;
    for (const auto& e : entries) total += e.weight;
    if (std::abs(total - 1.0) > 1e-8) {
        throw std::invalid_argument("sample: ensemble weights do not sum to 1");
    }

    SplitMix64 rng(seed);
    const double u = rng.next_double() * total;
    double acc = 0.0;
    std::size_t pick = entries.size() - 1;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        acc += entries[i].weight;
        if (u < acc) {
            pick = i;
            break;
        }
    }

    EnsembleEntry out = entries[pick];
    out.initial_state = normalized(out.initial_state);
    return out;
}

// Evolves the entry forward; immediately after each event, reads the norm^2
// on every record pattern. The observed result is the argmax pattern, and the
// leakage is the mass found off the entry's specified pattern (relative to
// the state's norm^2, so sub-normalized entries replay identically).
inline ReplayReport replay(const EnsembleEntry& entry, const EventSchedule& schedule) {
    if (entry.history.results.size() != schedule.events.size()) {
        throw std::invalid_argument("replay: entry history length does not match event count");
    }
    ReplayReport report;
    StateVector cur = entry.initial_state;
    const double total = cur.norm2();
    if (total < 1e-300) throw std::invalid_argument("replay: zero entry state");

    double t = 0.0;
    for (std::size_t k = 0; k < schedule.events.size(); ++k) {
        const SplittingEvent& ev = schedule.events[k];
        cur = evolve_window(cur, t, ev.time, schedule);
        t = ev.time;

        const BitAssignment& specified = entry.history.results[k];
        double on_pattern = 0.0;
        double best = -1.0;
        BitAssignment observed;
        for (const auto& [pattern, component] : event_unitary_record(ev, cur)) {
            const double mass = component.norm2();
            if (mass > best) {
                best = mass;
                observed = pattern;
            }
            if (pattern.bits == specified.bits) on_pattern = mass;
        }
        report.observed_history.results.push_back(observed);
        report.per_event_leakage.push_back((total - on_pattern) / total);
    }

    report.max_leakage = 0.0;
    for (double l : report.per_event_leakage) report.max_leakage = std::max(report.max_leakage, l);
    return report;
}

}  // namespace branchsim

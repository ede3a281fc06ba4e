#pragma once

// History enumeration, branch decomposition of the state at the horizon, the
// history operator Q(h) (alternating projections and time evolution), Born
// weights, and the annihilation check across distinct histories.
//
// Everything here is a pure function over immutable inputs; per-history work
// is independent, and results are returned in lexicographic history order.

#include <cstdint>
#include <string>
#include <vector>

#include "schedule.hpp"
#include "statevec.hpp"

namespace branchsim {

// Branches lighter than this are dropped: they are the structurally
// zero-weight record patterns, not physical branches.
inline constexpr double kPruneThreshold = 1e-12;

// One result r_k per event, each a bit assignment on that event's record set.
struct History {
    std::vector<BitAssignment> results;

    std::vector<int> flat_bits() const {
        std::vector<int> out;
        for (const auto& r : results) out.insert(out.end(), r.bits.begin(), r.bits.end());
        return out;
    }

    // Flat tuple over all events' record bits, e.g. "(0,1,0,1)".
    std::string label() const {
        BitAssignment joint;
        for (const auto& r : results) joint = concat(joint, r);
        return joint.label();
    }

    BitAssignment joint_assignment() const {
        BitAssignment joint;
        for (const auto& r : results) joint = concat(joint, r);
        return joint;
    }

    bool operator==(const History& other) const {
        return flat_bits() == other.flat_bits();
    }
};

struct Branch {
    History history;
    StateVector vector;  // sub-normalized component at the horizon
    double weight = 0.0;
};

// Cartesian product of per-event record patterns, lexicographic: the last
// event's pattern varies fastest, bits within an event ordered by qubit index.
inline std::vector<History> enumerate_histories(const EventSchedule& schedule,
                                                std::uint64_t max_histories = kMaxHistories) {
    std::uint64_t count = 1;
    for (const SplittingEvent& ev : schedule.events) {
        const std::uint64_t per_event = std::uint64_t{1} << ev.record_set.size();
        if (count > max_histories / per_event) {
            throw std::runtime_error("enumerate_histories: candidate count exceeds " +
                                     std::to_string(max_histories));
        }
        count *= per_event;
    }

    std::vector<History> out{History{}};
    for (const SplittingEvent& ev : schedule.events) {
        const auto patterns = BitAssignment::all_patterns(ev.record_set);
        std::vector<History> next;
        next.reserve(out.size() * patterns.size());
        for (const History& h : out) {
            for (const BitAssignment& r : patterns) {
                History extended = h;
                extended.results.push_back(r);
                next.push_back(std::move(extended));
            }
        }
        out = std::move(next);
    }
    return out;
}

// Evolves |psi0> to the horizon and splits it over the joint record patterns.
// Branch vectors of the returned list sum to the evolved state (up to pruned,
// structurally zero components).
inline std::vector<Branch> decompose(const StateVector& psi0, const EventSchedule& schedule,
                                     double prune_threshold = kPruneThreshold,
                                     std::uint64_t max_histories = kMaxHistories) {
    const StateVector at_horizon = evolve_window(psi0, 0.0, schedule.horizon, schedule);
    std::vector<Branch> out;
    for (History& h : enumerate_histories(schedule, max_histories)) {
        StateVector component = project(at_horizon, h.joint_assignment());
        const double weight = component.norm2();
        if (weight <= prune_threshold) continue;
        out.push_back(Branch{std::move(h), std::move(component), weight});
    }
    return out;
}

// Q(h)|psi0>: alternating time evolution and projection,
// P(r_N) exp[-iH(t_N - t_{N-1})] ... P(r_0) exp(-iH t_0) |psi0>.
// The result lives at the last event's time.
inline StateVector history_operator_apply(const StateVector& psi0, const EventSchedule& schedule,
                                          const History& h) {
    if (h.results.size() != schedule.events.size()) {
        throw std::invalid_argument("history_operator_apply: history length does not match event count");
    }
    StateVector cur = psi0;
    double t = 0.0;
    for (std::size_t k = 0; k < schedule.events.size(); ++k) {
        const SplittingEvent& ev = schedule.events[k];
        cur = evolve_window(cur, t, ev.time, schedule);  // includes the event's unitary
        cur = project(cur, h.results[k]);
        t = ev.time;
    }
    return cur;
}

// ||Q(h)|psi0>||^2, the Born probability of observation sequence h.
inline double born_weight(const StateVector& psi0, const EventSchedule& schedule, const History& h) {
    return history_operator_apply(psi0, schedule, h).norm2();
}

// Max over h != h' of ||Q(h) |Psi(h',0)>||. Entries must expose `.history`
// and `.initial_state` (see ensemble.hpp); the contract for fresh-record
// models is a result at rounding level.
template <class Entries>
double check_annihilation(const EventSchedule& schedule, const Entries& entries) {
    double worst = 0.0;
    for (const auto& target : entries) {
        for (const auto& source : entries) {
            if (target.history == source.history) continue;
            const double cross = std::sqrt(born_weight(source.initial_state, schedule, target.history));
            worst = std::max(worst, cross);
        }
    }
    return worst;
}

}  // namespace branchsim

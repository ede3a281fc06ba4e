#pragma once

// System specification (qubit roles, record frequencies) and the ordered
// timeline of splitting events. Free evolution is diagonal in the
// computational basis; event unitaries are instantaneous, with free evolution
// running on half-open intervals [t_{k-1}, t_k) and U_k applied at t_k.
//
// Event unitaries are specified in the memory basis |e, t> selected by the
// diagonal Hamiltonian. Since |e, t> = exp(-i t omega e)|e>, applying an event
// at time t in the static computational basis means conjugating its matrix by
// the accumulated diagonal phases on its targets.
//
// Schedules are plain values, immutable once validated; evolution calls are
// pure and safe to run concurrently.

#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "statevec.hpp"

namespace branchsim {

// Largest record-pattern family that validation/enumeration will expand.
inline constexpr std::uint64_t kMaxHistories = std::uint64_t{1} << 20;

// Phase sums closer than this count as degenerate record energies.
inline constexpr double kDegeneracyTol = 1e-9;

struct SystemSpec {
    int n_qubits = 0;
    std::vector<QubitFrequency> record_qubits;

    bool is_record(int q) const {
        for (const auto& f : record_qubits)
            if (f.qubit == q) return true;
        return false;
    }

    double omega_of(int q) const {
        for (const auto& f : record_qubits)
            if (f.qubit == q) return f.omega;
        return 0.0;
    }

    std::vector<int> system_qubits() const {
        std::vector<int> out;
        for (int q = 0; q < n_qubits; ++q)
            if (!is_record(q)) out.push_back(q);
        return out;
    }
};

struct SplittingEvent {
    double time = 0.0;
    UnitaryMatrix unitary;             // memory-basis matrix, first target = MSB
    std::vector<int> unitary_targets;
    std::vector<int> record_set;       // subset of targets written as this event's record
};

struct EventSchedule {
    SystemSpec spec;
    std::vector<SplittingEvent> events;
    double horizon = 0.0;
};

// A schedule together with the initial state it evolves.
struct Model {
    StateVector initial_state;
    EventSchedule schedule;
};

// Returns all invariant violations; empty means the schedule is valid.
// Violations are data, not failures.
inline std::vector<std::string> validate(const EventSchedule& schedule) {
    std::vector<std::string> out;
    const SystemSpec& spec = schedule.spec;

    if (spec.n_qubits < 1 || spec.n_qubits > kMaxQubits) {
        out.push_back("qubit count " + std::to_string(spec.n_qubits) + " outside [1, " +
                      std::to_string(kMaxQubits) + "]");
        return out;  // nothing downstream is meaningful
    }

    std::set<int> record_qubits;
    for (const auto& f : spec.record_qubits) {
        if (f.qubit < 0 || f.qubit >= spec.n_qubits) {
            out.push_back("record qubit " + std::to_string(f.qubit) + " out of range");
        } else if (!record_qubits.insert(f.qubit).second) {
            out.push_back("record qubit " + std::to_string(f.qubit) + " listed twice");
        }
    }

    // Non-degeneracy: the achievable phase sums over record-bit patterns must
    // be pairwise distinct, or the |e, t> states fail as a memory basis.
    const std::size_t n_rec = spec.record_qubits.size();
    if (out.empty()) {
        if ((std::uint64_t{1} << n_rec) > kMaxHistories) {
            out.push_back("record set too large to verify phase-sum non-degeneracy");
        } else {
            std::vector<double> sums(std::size_t{1} << n_rec, 0.0);
            for (std::uint64_t p = 0; p < sums.size(); ++p) {
                double acc = 0.0;
                for (std::size_t j = 0; j < n_rec; ++j) {
                    if ((p >> j) & 1ull) acc += spec.record_qubits[j].omega;
                }
                sums[p] = acc;
            }
            std::sort(sums.begin(), sums.end());
            for (std::size_t i = 1; i < sums.size(); ++i) {
                if (sums[i] - sums[i - 1] < kDegeneracyTol) {
                    out.push_back("degenerate phase sums: two record patterns within " +
                                  std::to_string(kDegeneracyTol));
                    break;
                }
            }
        }
    }

    double prev_time = 0.0;
    std::set<int> used_records;
    for (std::size_t k = 0; k < schedule.events.size(); ++k) {
        const SplittingEvent& ev = schedule.events[k];
        const std::string tag = "event " + std::to_string(k) + ": ";

        // t = 0 is the initial-state boundary, so event times are strictly
        // positive and strictly increasing.
        if (!(ev.time > prev_time)) {
            out.push_back(tag + "time must exceed " + (k == 0 ? std::string("0") : "previous event time"));
        }
        prev_time = ev.time;

        std::set<int> targets;
        for (int q : ev.unitary_targets) {
            if (q < 0 || q >= spec.n_qubits) {
                out.push_back(tag + "target qubit " + std::to_string(q) + " out of range");
            } else if (!targets.insert(q).second) {
                out.push_back(tag + "duplicate target qubit " + std::to_string(q));
            }
        }
        if (ev.unitary.dim != (1 << ev.unitary_targets.size())) {
            out.push_back(tag + "unitary dimension does not match target count");
        } else if (!ev.unitary.is_unitary(kTolUnitary)) {
            out.push_back(tag + "matrix is not unitary within tolerance");
        }
        for (int q : ev.record_set) {
            if (targets.find(q) == targets.end()) {
                out.push_back(tag + "record qubit " + std::to_string(q) + " is not a unitary target");
            }
            if (record_qubits.find(q) == record_qubits.end()) {
                out.push_back(tag + "record qubit " + std::to_string(q) + " has no frequency entry");
            }
            if (!used_records.insert(q).second) {
                out.push_back(tag + "record sets not disjoint: qubit " + std::to_string(q) +
                              " already recorded by an earlier event");
            }
        }
    }

    if (!schedule.events.empty() && !(schedule.horizon > schedule.events.back().time)) {
        out.push_back("horizon must lie strictly after the last event");
    }
    if (schedule.events.empty() && !(schedule.horizon > 0.0)) {
        out.push_back("horizon must be positive");
    }
    return out;
}

inline void ensure_valid(const EventSchedule& schedule) {
    const auto violations = validate(schedule);
    if (!violations.empty()) {
        throw std::invalid_argument("invalid schedule: " + violations.front());
    }
}

// Event unitary in the static computational basis at the event's time:
// D(t) U D(t)^dag, with D(t) the diagonal free-evolution phases on the
// event's targets. `inverse` yields the adjoint (for backward evolution).
inline UnitaryMatrix dressed_event_unitary(const SplittingEvent& ev, const SystemSpec& spec, bool inverse) {
    const int m = static_cast<int>(ev.unitary_targets.size());
    std::vector<double> target_omega(m, 0.0);
    for (int j = 0; j < m; ++j) target_omega[j] = spec.omega_of(ev.unitary_targets[j]);

    const int gdim = 1 << m;
    std::vector<cplx> phase(gdim);
    for (int g = 0; g < gdim; ++g) {
        double sum = 0.0;
        for (int j = 0; j < m; ++j) {
            if ((g >> (m - 1 - j)) & 1) sum += target_omega[j];
        }
        phase[g] = std::polar(1.0, -ev.time * sum);
    }

    const UnitaryMatrix base = inverse ? ev.unitary.adjoint() : ev.unitary;
    UnitaryMatrix out(gdim);
    for (int r = 0; r < gdim; ++r)
        for (int c = 0; c < gdim; ++c) out.at(r, c) = phase[r] * base.at(r, c) * std::conj(phase[c]);
    return out;
}

// Evolves `s` from t_from to t_to under the schedule. A forward window
// (a, b] applies free evolution between event times and each event's dressed
// unitary exactly at its time; t_from > t_to runs the inverse sequence in
// reverse order, so evolve_window(evolve_window(s, a, b), b, a) == s.
inline StateVector evolve_window(const StateVector& s, double t_from, double t_to,
                                 const EventSchedule& schedule) {
    // Cheap structural checks; full validation is the caller's front door.
    double prev = 0.0;
    for (const SplittingEvent& ev : schedule.events) {
        if (!(ev.time > prev)) throw std::invalid_argument("evolve_window: event times not strictly increasing");
        prev = ev.time;
    }
    if (s.n_qubits != schedule.spec.n_qubits) {
        throw std::invalid_argument("evolve_window: state size does not match schedule");
    }

    const std::span<const QubitFrequency> omegas(schedule.spec.record_qubits);
    StateVector cur = s;
    double t = t_from;

    if (t_from <= t_to) {
        for (const SplittingEvent& ev : schedule.events) {
            if (!(ev.time > t_from && ev.time <= t_to)) continue;
            cur = evolve_diagonal(cur, omegas, ev.time - t);
            cur = apply_local_unitary(cur, dressed_event_unitary(ev, schedule.spec, false), ev.unitary_targets);
            t = ev.time;
        }
        cur = evolve_diagonal(cur, omegas, t_to - t);
    } else {
        for (auto it = schedule.events.rbegin(); it != schedule.events.rend(); ++it) {
            const SplittingEvent& ev = *it;
            if (!(ev.time > t_to && ev.time <= t_from)) continue;
            cur = evolve_diagonal(cur, omegas, ev.time - t);  // negative dt
            cur = apply_local_unitary(cur, dressed_event_unitary(ev, schedule.spec, true), ev.unitary_targets);
            t = ev.time;
        }
        cur = evolve_diagonal(cur, omegas, t_to - t);
    }
    return cur;
}

// Projections of `s` onto every bit pattern of the event's record set, in
// lexicographic pattern order. Norms-squared sum to |s|^2 (completeness).
inline std::vector<std::pair<BitAssignment, StateVector>> event_unitary_record(const SplittingEvent& ev,
                                                                               const StateVector& s) {
    std::vector<std::pair<BitAssignment, StateVector>> out;
    for (BitAssignment& r : BitAssignment::all_patterns(ev.record_set)) {
        StateVector p = project(s, r);
        out.emplace_back(std::move(r), std::move(p));
    }
    return out;
}

}  // namespace branchsim

#pragma once

// Seeded random schedules, unitaries, and states for the randomized
// verification suite: fresh disjoint record sets, non-degenerate frequencies,
// Haar-style unitaries from Gram-Schmidt on Gaussian columns.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "rng.hpp"
#include "schedule.hpp"
#include "statevec.hpp"

namespace branchsim {

// Gram-Schmidt on a complex Gaussian matrix, orthogonalized twice to reach
// rounding-level unitarity.
inline UnitaryMatrix random_unitary(int dim, SplitMix64& rng) {
    UnitaryMatrix u(dim);
    for (int c = 0; c < dim; ++c)
        for (int r = 0; r < dim; ++r) u.at(r, c) = cplx{rng.next_normal(), rng.next_normal()};

    for (int pass = 0; pass < 2; ++pass) {
        for (int c = 0; c < dim; ++c) {
            for (int prev = 0; prev < c; ++prev) {
                cplx overlap{0.0, 0.0};
                for (int r = 0; r < dim; ++r) overlap += std::conj(u.at(r, prev)) * u.at(r, c);
                for (int r = 0; r < dim; ++r) u.at(r, c) -= overlap * u.at(r, prev);
            }
            double n2 = 0.0;
            for (int r = 0; r < dim; ++r) n2 += std::norm(u.at(r, c));
            if (n2 < 1e-24) throw std::runtime_error("random_unitary: degenerate column");
            const double inv = 1.0 / std::sqrt(n2);
            for (int r = 0; r < dim; ++r) u.at(r, c) *= inv;
        }
    }
    return u;
}

inline StateVector random_state(int n_qubits, SplitMix64& rng) {
    StateVector s = StateVector::zero(n_qubits);
    for (cplx& a : s.amplitudes) a = cplx{rng.next_normal(), rng.next_normal()};
    return normalized(s);
}

// Random valid schedule plus random normalized initial state. Each event
// writes at least one fresh record qubit; unitaries act on every system qubit
// together with the event's records, so earlier records are never revisited.
inline Model random_model(int n_qubits, int n_events, SplitMix64& rng) {
    if (n_qubits < 1 || n_qubits > kMaxQubits) throw std::invalid_argument("random_model: bad qubit count");
    if (n_events < 0 || (n_events > 0 && n_qubits < n_events + 1)) {
        throw std::invalid_argument("random_model: need one system qubit plus one record per event");
    }

    for (int attempt = 0; attempt < 64; ++attempt) {
        // Shuffled qubit roles: first n_sys are system, the rest records.
        std::vector<int> order(n_qubits);
        for (int i = 0; i < n_qubits; ++i) order[i] = i;
        for (int i = n_qubits - 1; i > 0; --i) {
            const int j = static_cast<int>(rng.next() % static_cast<std::uint64_t>(i + 1));
            std::swap(order[i], order[j]);
        }
        const int max_sys = n_qubits - n_events;
        const int n_sys = 1 + static_cast<int>(rng.next() % static_cast<std::uint64_t>(max_sys));
        std::vector<int> system(order.begin(), order.begin() + n_sys);
        std::vector<int> records(order.begin() + n_sys, order.end());

        SystemSpec spec;
        spec.n_qubits = n_qubits;
        for (int q : records) spec.record_qubits.push_back({q, 0.25 + 2.75 * rng.next_double()});
        std::sort(spec.record_qubits.begin(), spec.record_qubits.end(),
                  [](const QubitFrequency& a, const QubitFrequency& b) { return a.qubit < b.qubit; });

        // Distribute record qubits over events, at least one each.
        std::vector<int> sizes(static_cast<std::size_t>(n_events), n_events > 0 ? 1 : 0);
        for (std::size_t extra = static_cast<std::size_t>(n_events); extra < records.size(); ++extra) {
            if (n_events == 0) break;
            sizes[rng.next() % static_cast<std::uint64_t>(n_events)] += 1;
        }

        std::vector<SplittingEvent> events;
        std::size_t next_record = 0;
        double t = 0.0;
        for (int k = 0; k < n_events; ++k) {
            SplittingEvent ev;
            t += 0.2 + 0.8 * rng.next_double();
            ev.time = t;
            ev.record_set.assign(records.begin() + next_record, records.begin() + next_record + sizes[k]);
            next_record += sizes[k];
            std::sort(ev.record_set.begin(), ev.record_set.end());

            ev.unitary_targets = system;
            ev.unitary_targets.insert(ev.unitary_targets.end(), ev.record_set.begin(), ev.record_set.end());
            std::sort(ev.unitary_targets.begin(), ev.unitary_targets.end());
            ev.unitary = random_unitary(1 << ev.unitary_targets.size(), rng);
            events.push_back(std::move(ev));
        }

        Model m;
        m.schedule = EventSchedule{std::move(spec), std::move(events), t + 0.2 + 0.8 * rng.next_double()};
        m.initial_state = random_state(n_qubits, rng);
        if (validate(m.schedule).empty()) return m;
        // Frequency collision (vanishingly rare); redraw.
    }
    throw std::runtime_error("random_model: could not draw a valid schedule");
}

}  // namespace branchsim

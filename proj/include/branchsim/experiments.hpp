#pragma once

// Builders and analyzers for the two concrete models: the single-spin toy
// model (z-recording then x-recording) and the two-spin Bell correlation
// experiment with a theta-rotated second apparatus.
//
// Gate catalog. Each named recording gate is an 8x8 memory-basis unitary on
// targets (spin, rec_a, rec_b): when the spin is "up" in the gate's basis it
// flips rec_b, when "down" it flips rec_a. The theta basis is
//   |up_theta>   =  cos(theta/2)|0> + sin(theta/2)|1>
//   |down_theta> = -sin(theta/2)|0> + cos(theta/2)|1>
// with |0> = spin up along z. U2_x is U2_theta at theta = pi/2.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ensemble.hpp"
#include "rng.hpp"
#include "schedule.hpp"
#include "statevec.hpp"

namespace branchsim {

inline constexpr double kPi = 3.14159265358979323846;

// Record frequencies for e_0..e_3: pairwise-irrational ratios keep every
// record phase sum distinct.
inline std::vector<double> default_record_omegas() {
    return {1.0, std::sqrt(2.0), std::sqrt(3.0), std::sqrt(5.0)};
}

// z-basis recording gate on (spin, rec_a, rec_b): spin |0> flips rec_b,
// spin |1> flips rec_a. A permutation matrix.
inline UnitaryMatrix u1_z_gate() {
    UnitaryMatrix u(8);
    for (int s = 0; s < 2; ++s) {
        for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
                const int in = (s << 2) | (a << 1) | b;
                const int out = (s == 0) ? ((s << 2) | (a << 1) | (b ^ 1)) : ((s << 2) | ((a ^ 1) << 1) | b);
                u.at(out, in) = cplx{1.0, 0.0};
            }
        }
    }
    return u;
}

// Recording gate in the theta-rotated spin basis: conjugate of u1_z_gate by
// the basis rotation on the spin qubit.
inline UnitaryMatrix u2_theta_gate(double theta) {
    UnitaryMatrix rot(2);
    rot.at(0, 0) = cplx{std::cos(theta / 2.0), 0.0};
    rot.at(0, 1) = cplx{-std::sin(theta / 2.0), 0.0};
    rot.at(1, 0) = cplx{std::sin(theta / 2.0), 0.0};
    rot.at(1, 1) = cplx{std::cos(theta / 2.0), 0.0};
    const UnitaryMatrix lift = kron(rot, UnitaryMatrix::identity(4));
    return lift * u1_z_gate() * lift.adjoint();
}

inline UnitaryMatrix u2_x_gate() { return u2_theta_gate(kPi / 2.0); }

// Toy model: qubit 0 is the spin, qubits 1..4 the records e_0..e_3.
// |Psi(0)> = |up>|0000>; z-recording on (e_0, e_1) at t = 1, x-recording on
// (e_2, e_3) at t = 2, horizon 3.
inline Model build_toy() {
    Model m;
    m.initial_state = StateVector::basis("00000");

    SystemSpec spec;
    spec.n_qubits = 5;
    const auto omegas = default_record_omegas();
    for (int i = 0; i < 4; ++i) spec.record_qubits.push_back({i + 1, omegas[i]});

    SplittingEvent first;
    first.time = 1.0;
    first.unitary = u1_z_gate();
    first.unitary_targets = {0, 1, 2};
    first.record_set = {1, 2};

    SplittingEvent second;
    second.time = 2.0;
    second.unitary = u2_x_gate();
    second.unitary_targets = {0, 3, 4};
    second.record_set = {3, 4};

    m.schedule = EventSchedule{spec, {first, second}, 3.0};
    return m;
}

// Singlet pair on qubits (0, 1): (|01> - |10>)/sqrt(2).
inline StateVector singlet_state() {
    StateVector s = StateVector::zero(2);
    s.amplitudes[1] = cplx{1.0 / std::sqrt(2.0), 0.0};
    s.amplitudes[2] = cplx{-1.0 / std::sqrt(2.0), 0.0};
    return s;
}

// One Bell subsystem: spins s_0, s_1 on qubits 0, 1 and records e_0..e_3 on
// qubits 2..5. A single composite event at t = 1 applies the z-recording of
// s_0 on (e_0, e_1) and the theta-recording of s_1 on (e_2, e_3); the two
// parts commute (disjoint targets) and the composite record is 4 bits.
inline Model build_bell_subsystem(double theta) {
    Model m;
    m.initial_state = tensor(singlet_state(), StateVector::basis("0000"));

    SystemSpec spec;
    spec.n_qubits = 6;
    const auto omegas = default_record_omegas();
    for (int i = 0; i < 4; ++i) spec.record_qubits.push_back({i + 2, omegas[i]});

    SplittingEvent ev;
    ev.time = 1.0;
    ev.unitary = kron(u1_z_gate(), u2_theta_gate(theta));
    ev.unitary_targets = {0, 2, 3, 1, 4, 5};  // (s_0, e_0, e_1) then (s_1, e_2, e_3)
    ev.record_set = {2, 3, 4, 5};

    m.schedule = EventSchedule{spec, {ev}, 2.0};
    return m;
}

// Two explicitly materialized subsystems (12 qubits), used to validate that
// joint history weights factorize over subsystems. Events must carry strictly
// increasing times, so the second subsystem records at t = 1.5; weights are
// time-independent. The second block's record frequencies continue the
// square-root sequence to keep all 8 record phase sums non-degenerate.
inline Model build_bell_pair(double theta) {
    const Model sub = build_bell_subsystem(theta);

    Model m;
    m.initial_state = tensor(sub.initial_state, sub.initial_state);

    SystemSpec spec;
    spec.n_qubits = 12;
    const auto omegas = default_record_omegas();
    for (int i = 0; i < 4; ++i) spec.record_qubits.push_back({i + 2, omegas[i]});
    const std::vector<double> more = {std::sqrt(7.0), std::sqrt(11.0), std::sqrt(13.0), std::sqrt(17.0)};
    for (int i = 0; i < 4; ++i) spec.record_qubits.push_back({i + 8, more[i]});

    SplittingEvent first = sub.schedule.events[0];  // qubits 0..5, t = 1

    SplittingEvent second = sub.schedule.events[0];
    second.time = 1.5;
    second.unitary_targets = {6, 8, 9, 7, 10, 11};
    second.record_set = {8, 9, 10, 11};

    m.schedule = EventSchedule{spec, {first, second}, 2.0};
    return m;
}

// Spin outcome recorded by one 4-bit subhistory: (e_1 - e_0)(e_3 - e_2).
inline int bell_outcome(const std::vector<int>& bits) {
    if (bits.size() != 4) throw std::invalid_argument("bell_outcome: expected 4 record bits");
    return (bits[1] - bits[0]) * (bits[3] - bits[2]);
}

// Exact per-subsystem expectation of (e_1 - e_0)(e_3 - e_2): the Born-weighted
// sum over all candidate subhistories, which equals -cos(theta).
inline double bell_exact(double theta) {
    const Model m = build_bell_subsystem(theta);
    double acc = 0.0;
    for (const History& h : enumerate_histories(m.schedule)) {
        const double w = born_weight(m.initial_state, m.schedule, h);
        if (w == 0.0) continue;
        acc += w * static_cast<double>(bell_outcome(h.flat_bits()));
    }
    return acc;
}

struct BellConfig {
    double theta = 0.0;
    std::uint64_t n_subsystems = 1;
    std::uint64_t seed = 0;
};

struct CorrelationResult {
    double estimate = 0.0;
    double std_error = 0.0;
    double exact = 0.0;
    std::uint64_t n = 0;
};

// Sampled correlation over n_subsystems independent draws. Subsystems are
// non-interacting, so the N-subsystem ensemble factorizes into independent
// single-subsystem draws; draw i uses the seed substream keyed by i and the
// result is identical for any partitioning of draws across workers.
inline CorrelationResult bell_correlation(const BellConfig& config) {
    if (config.n_subsystems < 1) throw std::invalid_argument("bell_correlation: need at least one subsystem");
    if (!(config.theta >= 0.0 && config.theta < 2.0 * kPi)) {
        throw std::invalid_argument("bell_correlation: theta must lie in [0, 2*pi)");
    }
    const Model m = build_bell_subsystem(config.theta);
    const auto entries = build_ensemble(m.initial_state, m.schedule);

    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::uint64_t i = 0; i < config.n_subsystems; ++i) {
        const EnsembleEntry pick = sample(entries, SplitMix64::derive_seed(config.seed, i));
        const double outcome = static_cast<double>(bell_outcome(pick.history.flat_bits()));
        sum += outcome;
        sum_sq += outcome * outcome;
    }

    CorrelationResult out;
    out.n = config.n_subsystems;
    out.exact = -std::cos(config.theta);
    out.estimate = sum / static_cast<double>(out.n);

    // Exact-variance standard error, with the empirical variance as fallback
    // when the analytic value is unusable.
    double variance = 1.0 - out.exact * out.exact;
    if (!(variance >= 0.0)) {
        const double mean = out.estimate;
        variance = sum_sq / static_cast<double>(out.n) - mean * mean;
        if (variance < 0.0) variance = 0.0;
    }
    out.std_error = std::sqrt(variance / static_cast<double>(out.n));
    return out;
}

}  // namespace branchsim

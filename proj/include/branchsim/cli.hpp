#pragma once

// Command implementations behind the CLI: each returns a machine-readable
// JSON report plus the process exit code, so both the binary and the test
// suites drive the same code. Reports embed the seed, the tolerances, and
// the model hash; they carry no timestamps, so identical inputs produce
// byte-identical payloads.

#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "branching.hpp"
#include "config.hpp"
#include "ensemble.hpp"
#include "experiments.hpp"
#include "random_models.hpp"
#include "rng.hpp"
#include "schedule.hpp"
#include "statevec.hpp"

namespace branchsim {

inline constexpr double kTolCheck = 1e-10;  // deviation bound for the verified identities

struct CommandResult {
    json report;
    int exit_code = 0;
};

inline json tolerances_json() {
    return json{{"tol_norm", kTolNorm},
                {"tol_unitary", kTolUnitary},
                {"tol_check", kTolCheck},
                {"prune_threshold", kPruneThreshold}};
}

inline json branch_table_json(const std::vector<Branch>& branches) {
    json out = json::array();
    for (const auto& b : branches) out.push_back({{"history", b.history.label()}, {"weight", b.weight}});
    return out;
}

inline json ensemble_json(const std::vector<EnsembleEntry>& entries, bool with_amplitudes) {
    json out = json::array();
    for (const auto& e : entries) {
        json row{{"history", e.history.label()}, {"weight", e.weight}};
        if (with_amplitudes) row["initial_state"] = amplitudes_to_json(e.initial_state);
        out.push_back(std::move(row));
    }
    return out;
}

inline json replay_json(const History& expected, const ReplayReport& r) {
    return json{{"history", expected.label()},
                {"observed", r.observed_history.label()},
                {"per_event_leakage", r.per_event_leakage},
                {"max_leakage", r.max_leakage}};
}

// Runs the toy model end to end: branch table, ensemble states, replays.
// Exit code 0 iff every checked invariant holds.
inline CommandResult run_toy(std::uint64_t seed = 0) {
    const Model m = build_toy();
    std::vector<std::string> failed;

    const auto branches = decompose(m.initial_state, m.schedule);
    const auto entries = build_ensemble(m.initial_state, m.schedule);

    if (branches.size() != 2) failed.push_back("branch_count");
    const std::vector<std::string> expected_labels = {"(0,1,0,1)", "(0,1,1,0)"};
    for (std::size_t i = 0; i < branches.size() && i < 2; ++i) {
        if (branches[i].history.label() != expected_labels[i]) failed.push_back("branch_histories");
        if (std::abs(branches[i].weight - 0.5) > kTolCheck) failed.push_back("branch_weights");
    }

    // Expected time-0 ensemble states: (|up>|0000> +- |down>|1100>)/sqrt(2),
    // unit-normalized form of the sub-normalized entries.
    if (entries.size() == 2) {
        const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
        for (std::size_t i = 0; i < 2; ++i) {
            StateVector expect = StateVector::zero(5);
            expect.amplitudes[0] = cplx{inv_sqrt2, 0.0};
            expect.amplitudes[0b11100] = cplx{i == 0 ? inv_sqrt2 : -inv_sqrt2, 0.0};
            if (phase_aligned_max_diff(normalized(entries[i].initial_state), expect) > kTolCheck) {
                failed.push_back("ensemble_states");
            }
        }
    } else {
        failed.push_back("ensemble_states");
    }

    // Entries sum back to |Psi(0)>.
    StateVector total = StateVector::zero(5);
    for (const auto& e : entries) total = add(total, e.initial_state);
    if (max_abs_diff(total, m.initial_state) > kTolCheck) failed.push_back("ensemble_completeness");

    // Ensemble weight vs Born weight, independent code paths.
    for (const auto& e : entries) {
        if (std::abs(e.weight - born_weight(m.initial_state, m.schedule, e.history)) > kTolCheck) {
            failed.push_back("born_agreement");
        }
    }

    json replays = json::array();
    for (const auto& e : entries) {
        EnsembleEntry unit = e;
        unit.initial_state = normalized(unit.initial_state);
        const ReplayReport r = replay(unit, m.schedule);
        replays.push_back(replay_json(e.history, r));
        if (!(r.observed_history == e.history)) failed.push_back("replay_history");
        if (r.max_leakage >= kTolCheck) failed.push_back("replay_leakage");
    }

    json report{{"command", "toy"},
                {"seed", seed},
                {"tolerances", tolerances_json()},
                {"model_hash", model_hash(m)},
                {"branches", branch_table_json(branches)},
                {"ensemble", ensemble_json(entries, true)},
                {"replays", replays},
                {"failed_invariants", failed},
                {"pass", failed.empty()}};
    return CommandResult{std::move(report), failed.empty() ? 0 : 1};
}

// Sampled Bell correlation across a theta grid. Exit code 0 iff every
// estimate sits within four standard errors of -cos(theta).
inline CommandResult run_bell(const std::vector<double>& theta_grid, std::uint64_t n, std::uint64_t seed) {
    if (theta_grid.empty()) throw std::invalid_argument("run_bell: empty theta grid");
    if (n < 1) throw std::invalid_argument("run_bell: need at least one draw");

    std::vector<std::string> failed;
    json rows = json::array();
    for (std::size_t i = 0; i < theta_grid.size(); ++i) {
        const double theta = theta_grid[i];
        // Each grid point gets its own substream of the report seed.
        const CorrelationResult r =
            bell_correlation(BellConfig{theta, n, SplitMix64::derive_seed(seed, i)});
        const bool ok = std::abs(r.estimate - r.exact) <= 4.0 * r.std_error;
        if (!ok) {
            std::ostringstream os;
            os << "theta=" << theta;
            failed.push_back(os.str());
        }
        rows.push_back({{"theta", theta},
                        {"n", r.n},
                        {"estimate", r.estimate},
                        {"stderr", r.std_error},
                        {"exact", r.exact},
                        {"seed", seed},
                        {"model_hash", model_hash(build_bell_subsystem(theta))},
                        {"within_4_sigma", ok}});
    }

    json report{{"command", "bell"},
                {"seed", seed},
                {"n", n},
                {"tolerances", tolerances_json()},
                {"rows", rows},
                {"failed_thetas", failed},
                {"pass", failed.empty()}};
    return CommandResult{std::move(report), failed.empty() ? 0 : 1};
}

// Fixed column order (theta, n, estimate, stderr, exact, seed).
inline std::string bell_csv(const json& report) {
    std::ostringstream os;
    os.precision(17);
    os << "theta,n,estimate,stderr,exact,seed\n";
    for (const auto& row : report.at("rows")) {
        os << row.at("theta").get<double>() << ',' << row.at("n").get<std::uint64_t>() << ','
           << row.at("estimate").get<double>() << ',' << row.at("stderr").get<double>() << ','
           << row.at("exact").get<double>() << ',' << row.at("seed").get<std::uint64_t>() << '\n';
    }
    return os.str();
}

// Randomized verification of the Born-weight identity, annihilation,
// completeness, and the two-path branch equivalence. On failure the
// counterexample model is embedded in the report.
inline CommandResult run_verify_born(int n_qubits, int n_events, std::uint64_t trials, std::uint64_t seed) {
    if (n_qubits < 1 || n_qubits > 6) throw std::invalid_argument("verify-born: qubits must be in [1, 6]");
    if (n_events < 0 || n_events > 3) throw std::invalid_argument("verify-born: events must be in [0, 3]");
    if (trials < 1) throw std::invalid_argument("verify-born: need at least one trial");

    double max_born_dev = 0.0;
    double max_annihilation = 0.0;
    double max_completeness_dev = 0.0;
    double max_path_dev = 0.0;
    std::string failed_property;
    json counterexample;

    SplitMix64 root(seed);
    for (std::uint64_t trial = 0; trial < trials && failed_property.empty(); ++trial) {
        SplitMix64 rng = root.substream(trial);
        const Model m = random_model(n_qubits, n_events, rng);
        const auto entries = build_ensemble(m.initial_state, m.schedule);

        // Born agreement over every candidate history; pruned entries carry
        // weight 0.
        std::map<std::string, double> entry_weight;
        for (const auto& e : entries) entry_weight[e.history.label()] = e.weight;
        for (const History& h : enumerate_histories(m.schedule)) {
            const double born = born_weight(m.initial_state, m.schedule, h);
            const auto it = entry_weight.find(h.label());
            const double ensemble_w = it == entry_weight.end() ? 0.0 : it->second;
            max_born_dev = std::max(max_born_dev, std::abs(born - ensemble_w));
        }

        max_annihilation = std::max(max_annihilation, check_annihilation(m.schedule, entries));

        StateVector total = StateVector::zero(n_qubits);
        for (const auto& e : entries) total = add(total, e.initial_state);
        max_completeness_dev = std::max(max_completeness_dev, max_abs_diff(total, m.initial_state));

        // Horizon branch from joint projection vs the interleaved Q(h) chain.
        const double t_last = m.schedule.events.empty() ? 0.0 : m.schedule.events.back().time;
        for (const Branch& b : decompose(m.initial_state, m.schedule)) {
            const StateVector chained = evolve_window(
                history_operator_apply(m.initial_state, m.schedule, b.history), t_last,
                m.schedule.horizon, m.schedule);
            max_path_dev = std::max(max_path_dev, max_abs_diff(b.vector, chained));
        }

        if (max_born_dev >= kTolCheck) failed_property = "born_agreement";
        else if (max_annihilation >= kTolCheck) failed_property = "annihilation";
        else if (max_completeness_dev >= kTolCheck) failed_property = "completeness";
        else if (max_path_dev >= kTolCheck) failed_property = "path_equivalence";
        if (!failed_property.empty()) counterexample = serialize_model(m);
    }

    json report{{"command", "verify-born"},
                {"seed", seed},
                {"qubits", n_qubits},
                {"events", n_events},
                {"trials", trials},
                {"tolerances", tolerances_json()},
                {"max_deviation",
                 {{"born_agreement", max_born_dev},
                  {"annihilation", max_annihilation},
                  {"completeness", max_completeness_dev},
                  {"path_equivalence", max_path_dev}}},
                {"pass", failed_property.empty()}};
    if (!failed_property.empty()) {
        report["failed_property"] = failed_property;
        report["counterexample"] = std::move(counterexample);
    }
    return CommandResult{std::move(report), failed_property.empty() ? 0 : 1};
}

// Branch table plus ensemble dump for a user-supplied model.
inline CommandResult run_decompose(const Model& m, std::uint64_t seed = 0, bool with_amplitudes = true) {
    const auto violations = validate(m.schedule);
    if (!violations.empty()) {
        json report{{"command", "decompose"},
                    {"seed", seed},
                    {"violations", violations},
                    {"pass", false}};
        return CommandResult{std::move(report), 2};
    }

    const auto branches = decompose(m.initial_state, m.schedule);
    const auto entries = build_ensemble(m.initial_state, m.schedule);
    json report{{"command", "decompose"},
                {"seed", seed},
                {"tolerances", tolerances_json()},
                {"model_hash", model_hash(m)},
                {"branches", branch_table_json(branches)},
                {"ensemble", ensemble_json(entries, with_amplitudes)},
                {"pass", true}};
    return CommandResult{std::move(report), 0};
}

// Draws n entries from the model's ensemble and replays each one forward.
// Exit code 0 iff every replay reproduces its drawn history with leakage
// under tolerance.
inline CommandResult run_sample_replay(const Model& m, std::uint64_t n, std::uint64_t seed) {
    const auto violations = validate(m.schedule);
    if (!violations.empty()) {
        json report{{"command", "sample-replay"},
                    {"seed", seed},
                    {"violations", violations},
                    {"pass", false}};
        return CommandResult{std::move(report), 2};
    }
    if (n < 1) throw std::invalid_argument("sample-replay: need at least one draw");

    const auto entries = build_ensemble(m.initial_state, m.schedule);
    bool all_ok = true;
    json draws = json::array();
    for (std::uint64_t i = 0; i < n; ++i) {
        const EnsembleEntry pick = sample(entries, SplitMix64::derive_seed(seed, i));
        const ReplayReport r = replay(pick, m.schedule);
        const bool ok = (r.observed_history == pick.history) && r.max_leakage < kTolCheck;
        all_ok = all_ok && ok;
        json row = replay_json(pick.history, r);
        row["draw"] = i;
        row["weight"] = pick.weight;
        row["deterministic"] = ok;
        draws.push_back(std::move(row));
    }

    json report{{"command", "sample-replay"},
                {"seed", seed},
                {"n", n},
                {"tolerances", tolerances_json()},
                {"model_hash", model_hash(m)},
                {"draws", draws},
                {"pass", all_ok}};
    return CommandResult{std::move(report), all_ok ? 0 : 1};
}

}  // namespace branchsim

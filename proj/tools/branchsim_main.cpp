// Command-line front end: loads schedule configs, runs the toy / Bell /
// verification experiments, and emits machine-readable JSON or CSV results.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "branchsim/cli.hpp"
#include "branchsim/config.hpp"
#include "branchsim/experiments.hpp"

namespace {

std::vector<double> default_theta_grid() {
    std::vector<double> grid;
    for (int k = 0; k <= 12; ++k) grid.push_back(k * branchsim::kPi / 12.0);
    return grid;
}

void emit(const std::string& payload, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << payload;
        if (!payload.empty() && payload.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + out_path);
    out << payload;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"deterministic single-branch state-vector simulator"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    std::string config_path;
    std::string out_path;
    std::string format = "json";
    std::uint64_t seed = 0;
    std::vector<double> theta_grid;
    std::uint64_t n = 100000;
    int qubits = 4;
    int events = 2;
    std::uint64_t trials = 100;

    app.add_option("--out", out_path, "write the result payload to this path (default: stdout)");
    app.add_option("--seed", seed, "64-bit seed recorded in every report");
    app.add_option("--format", format, "output format")->check(CLI::IsMember({"json", "csv"}));

    auto* toy = app.add_subcommand("toy", "run the built-in toy model and check its invariants");

    auto* bell = app.add_subcommand("bell", "sampled Bell correlation over a theta grid");
    bell->add_option("--theta", theta_grid, "theta grid in radians (default: k*pi/12, k = 0..12)")
        ->delimiter(',');
    bell->add_option("--n", n, "draws per theta (default 100000)");

    auto* verify = app.add_subcommand("verify-born", "randomized verification of the weight identities");
    verify->add_option("--qubits", qubits, "qubits per random schedule (max 6)");
    verify->add_option("--events", events, "events per random schedule (max 3)");
    verify->add_option("--trials", trials, "number of random schedules (default 100)");

    auto* decomp = app.add_subcommand("decompose", "branch table and ensemble dump for a config file");
    decomp->add_option("--config", config_path, "schedule config file")->required();
    bool no_amplitudes = false;
    decomp->add_flag("--no-amplitudes", no_amplitudes, "omit initial-state amplitude lists");

    auto* sample = app.add_subcommand("sample-replay", "draw from the ensemble and replay forward");
    sample->add_option("--config", config_path, "schedule config file (default: built-in toy model)");
    sample->add_option("--n", n, "number of draws")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        branchsim::CommandResult result;
        if (app.got_subcommand(toy)) {
            result = branchsim::run_toy(seed);
        } else if (app.got_subcommand(bell)) {
            if (theta_grid.empty()) theta_grid = default_theta_grid();
            if (app.count("--format") == 0) format = "csv";
            result = branchsim::run_bell(theta_grid, n, seed);
        } else if (app.got_subcommand(verify)) {
            result = branchsim::run_verify_born(qubits, events, trials, seed);
        } else if (app.got_subcommand(decomp)) {
            const branchsim::Model m = branchsim::load_model(config_path);
            result = branchsim::run_decompose(m, seed, !no_amplitudes);
        } else if (app.got_subcommand(sample)) {
            branchsim::Model m =
                config_path.empty() ? branchsim::build_toy() : branchsim::load_model(config_path);
            if (sample->count("--n") == 0) n = 1;
            result = branchsim::run_sample_replay(m, n, seed);
        }

        std::string payload;
        if (format == "csv" && result.report.contains("rows")) {
            payload = branchsim::bell_csv(result.report);
        } else {
            payload = result.report.dump(2);
        }
        emit(payload, out_path);

        if (result.exit_code != 0) {
            if (result.report.contains("failed_invariants")) {
                for (const auto& name : result.report["failed_invariants"]) {
                    std::cerr << "failed invariant: " << name.get<std::string>() << '\n';
                }
            }
            if (result.report.contains("failed_thetas")) {
                for (const auto& name : result.report["failed_thetas"]) {
                    std::cerr << "outside 4 sigma at " << name.get<std::string>() << '\n';
                }
            }
            if (result.report.contains("failed_property")) {
                std::cerr << "failed property: " << result.report["failed_property"].get<std::string>()
                          << '\n';
            }
            if (result.report.contains("violations")) {
                for (const auto& v : result.report["violations"]) {
                    std::cerr << "schedule violation: " << v.get<std::string>() << '\n';
                }
            }
        }
        return result.exit_code;
    } catch (const branchsim::ConfigError& err) {
        std::cerr << err.what() << '\n';
        return 2;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 2;
    }
}

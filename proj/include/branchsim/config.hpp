#pragma once

// Schedule config files: a single JSON document holding the system spec, the
// event list, the horizon, and the initial state.
//
//   {
//     "n_qubits": 5,
//     "record_qubits": [{"qubit": 1, "omega": 1.0}, ...],
//     "initial_state": "00000",                  // basis bits, or [[re, im], ...]
//     "events": [
//       {"time": 1.0, "gate": "U1_z", "targets": [0, 1, 2], "records": [1, 2]},
//       {"time": 2.0, "gate": "U2_theta", "theta": 0.5, "targets": [0, 3, 4], "records": [3, 4]},
//       {"time": 2.5, "gate": "explicit", "matrix": [[re, im], ...], "targets": [3], "records": [3]}
//     ],
//     "horizon": 3.0
//   }
//
// Complex numbers are [re, im] pairs; explicit matrices are row-major with
// the first target as the most significant index bit. Named gates come from
// the fixed catalog {U1_z, U2_x, U2_theta, explicit} and, like all event
// unitaries, are interpreted in the memory basis at the event time.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "experiments.hpp"
#include "schedule.hpp"
#include "statevec.hpp"

namespace branchsim {

using json = nlohmann::json;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline cplx parse_complex(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw ConfigError(where + ": complex numbers must be [re, im] pairs");
    }
    return cplx{j[0].get<double>(), j[1].get<double>()};
}

inline std::vector<int> parse_qubit_list(const json& j, const std::string& where) {
    if (!j.is_array()) throw ConfigError(where + ": expected an array of qubit indices");
    std::vector<int> out;
    for (const auto& e : j) {
        if (!e.is_number_integer()) throw ConfigError(where + ": qubit indices must be integers");
        out.push_back(e.get<int>());
    }
    return out;
}

}  // namespace detail

inline Model parse_model(const json& doc) {
    if (!doc.is_object()) throw ConfigError("config root must be an object");
    for (const char* key : {"n_qubits", "record_qubits", "initial_state", "events", "horizon"}) {
        if (!doc.contains(key)) throw ConfigError(std::string("config missing required key \"") + key + "\"");
    }

    Model m;
    SystemSpec spec;
    spec.n_qubits = doc.at("n_qubits").get<int>();
    if (spec.n_qubits < 1 || spec.n_qubits > kMaxQubits) {
        throw ConfigError("n_qubits outside [1, " + std::to_string(kMaxQubits) + "]");
    }

    for (const auto& r : doc.at("record_qubits")) {
        if (!r.is_object() || !r.contains("qubit") || !r.contains("omega")) {
            throw ConfigError("record_qubits entries must be {\"qubit\": int, \"omega\": real}");
        }
        spec.record_qubits.push_back({r.at("qubit").get<int>(), r.at("omega").get<double>()});
    }

    const json& init = doc.at("initial_state");
    if (init.is_string()) {
        const std::string bits = init.get<std::string>();
        if (static_cast<int>(bits.size()) != spec.n_qubits) {
            throw ConfigError("initial_state bit string length must equal n_qubits");
        }
        m.initial_state = StateVector::basis(bits);
    } else if (init.is_array()) {
        if (init.size() != (std::size_t{1} << spec.n_qubits)) {
            throw ConfigError("initial_state must list 2^n_qubits amplitudes");
        }
        std::vector<cplx> amps;
        amps.reserve(init.size());
        for (std::size_t i = 0; i < init.size(); ++i) {
            amps.push_back(detail::parse_complex(init[i], "initial_state[" + std::to_string(i) + "]"));
        }
        m.initial_state = StateVector(spec.n_qubits, std::move(amps));
    } else {
        throw ConfigError("initial_state must be a bit string or an amplitude array");
    }

    std::vector<SplittingEvent> events;
    const json& evs = doc.at("events");
    if (!evs.is_array()) throw ConfigError("events must be an array");
    for (std::size_t k = 0; k < evs.size(); ++k) {
        const json& e = evs[k];
        const std::string where = "event " + std::to_string(k);
        for (const char* key : {"time", "gate", "targets", "records"}) {
            if (!e.contains(key)) throw ConfigError(where + ": missing key \"" + key + "\"");
        }

        SplittingEvent ev;
        ev.time = e.at("time").get<double>();
        ev.unitary_targets = detail::parse_qubit_list(e.at("targets"), where + " targets");
        ev.record_set = detail::parse_qubit_list(e.at("records"), where + " records");

        const std::string gate = e.at("gate").get<std::string>();
        if (gate == "U1_z" || gate == "U2_x" || gate == "U2_theta") {
            if (ev.unitary_targets.size() != 3) {
                throw ConfigError(where + ": gate " + gate + " needs exactly 3 targets (spin, rec_a, rec_b)");
            }
            if (gate == "U1_z") {
                ev.unitary = u1_z_gate();
            } else if (gate == "U2_x") {
                ev.unitary = u2_x_gate();
            } else {
                if (!e.contains("theta")) throw ConfigError(where + ": gate U2_theta needs \"theta\"");
                ev.unitary = u2_theta_gate(e.at("theta").get<double>());
            }
        } else if (gate == "explicit") {
            if (!e.contains("matrix")) throw ConfigError(where + ": explicit gate needs \"matrix\"");
            const json& mat = e.at("matrix");
            const std::size_t dim = std::size_t{1} << ev.unitary_targets.size();
            if (!mat.is_array() || mat.size() != dim * dim) {
                throw ConfigError(where + ": matrix must list dim^2 = " + std::to_string(dim * dim) +
                                  " row-major [re, im] entries");
            }
            UnitaryMatrix u(static_cast<int>(dim));
            for (std::size_t i = 0; i < mat.size(); ++i) {
                u.entries[i] = detail::parse_complex(mat[i], where + " matrix[" + std::to_string(i) + "]");
            }
            ev.unitary = std::move(u);
        } else {
            throw ConfigError(where + ": unknown gate \"" + gate +
                              "\" (catalog: U1_z, U2_x, U2_theta, explicit)");
        }
        events.push_back(std::move(ev));
    }

    m.schedule = EventSchedule{std::move(spec), std::move(events), doc.at("horizon").get<double>()};
    return m;
}

inline Model load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& err) {
        throw ConfigError("config parse error in " + path + ": " + err.what());
    }
    return parse_model(doc);
}

inline json complex_to_json(const cplx& z) { return json::array({z.real(), z.imag()}); }

inline json amplitudes_to_json(const StateVector& s) {
    json out = json::array();
    for (const cplx& a : s.amplitudes) out.push_back(complex_to_json(a));
    return out;
}

// Round-trippable document; gates are emitted in explicit matrix form.
inline json serialize_model(const Model& m) {
    json doc;
    doc["n_qubits"] = m.schedule.spec.n_qubits;
    doc["record_qubits"] = json::array();
    for (const auto& f : m.schedule.spec.record_qubits) {
        doc["record_qubits"].push_back({{"qubit", f.qubit}, {"omega", f.omega}});
    }
    doc["initial_state"] = amplitudes_to_json(m.initial_state);
    doc["events"] = json::array();
    for (const auto& ev : m.schedule.events) {
        json mat = json::array();
        for (const cplx& z : ev.unitary.entries) mat.push_back(complex_to_json(z));
        doc["events"].push_back({{"time", ev.time},
                                 {"gate", "explicit"},
                                 {"matrix", std::move(mat)},
                                 {"targets", ev.unitary_targets},
                                 {"records", ev.record_set}});
    }
    doc["horizon"] = m.schedule.horizon;
    return doc;
}

namespace detail {

inline void fnv1a(std::uint64_t& h, const void* data, std::size_t len) {
    const unsigned char* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= bytes[i];
        h *= 1099511628211ull;
    }
}

template <class T>
void fnv1a_value(std::uint64_t& h, const T& v) {
    fnv1a(h, &v, sizeof(v));
}

}  // namespace detail

// FNV-1a over a canonical byte rendering of the model, for reproducibility
// metadata in reports.
inline std::string model_hash(const Model& m) {
    std::uint64_t h = 1469598103934665603ull;
    detail::fnv1a_value(h, m.schedule.spec.n_qubits);
    for (const auto& f : m.schedule.spec.record_qubits) {
        detail::fnv1a_value(h, f.qubit);
        detail::fnv1a_value(h, f.omega);
    }
    for (const auto& ev : m.schedule.events) {
        detail::fnv1a_value(h, ev.time);
        detail::fnv1a_value(h, ev.unitary.dim);
        for (const cplx& z : ev.unitary.entries) {
            detail::fnv1a_value(h, z.real());
            detail::fnv1a_value(h, z.imag());
        }
        for (int q : ev.unitary_targets) detail::fnv1a_value(h, q);
        for (int q : ev.record_set) detail::fnv1a_value(h, q);
    }
    detail::fnv1a_value(h, m.schedule.horizon);
    for (const cplx& a : m.initial_state.amplitudes) {
        detail::fnv1a_value(h, a.real());
        detail::fnv1a_value(h, a.imag());
    }

    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

}  // namespace branchsim

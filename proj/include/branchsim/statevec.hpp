#pragma once

// Dense complex state vectors over n qubits and the primitive linear-algebra
// operations on them: tensor products, local unitaries, diagonal phase
// evolution, projections, inner products.
//
// Conventions, fixed project-wide:
//   * qubit 0 is the most significant bit of the amplitude index, so the
//     2-qubit basis state |q0 q1> = |10> sits at index 2
//   * hbar = 1; times and frequencies are dimensionless
//   * all operations are pure: inputs are never mutated

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace branchsim {

using cplx = std::complex<double>;

inline constexpr double kTolNorm = 1e-10;     // |norm^2 - 1| bound for "normalized"
inline constexpr double kTolUnitary = 1e-12;  // per-entry bound on U^dag U - I
inline constexpr int kMaxQubits = 24;         // dense amplitude capacity

// Bit carried by `qubit` inside amplitude index `index` of an n-qubit register.
inline int bit_of(std::uint64_t index, int qubit, int n_qubits) {
    return static_cast<int>((index >> (n_qubits - 1 - qubit)) & 1ull);
}

// A record qubit together with its free-evolution frequency omega.
struct QubitFrequency {
    int qubit = 0;
    double omega = 0.0;
};

struct StateVector {
    int n_qubits = 0;
    std::vector<cplx> amplitudes;

    StateVector() = default;

    StateVector(int n, std::vector<cplx> amps) : n_qubits(n), amplitudes(std::move(amps)) {
        if (n < 1 || n > kMaxQubits) {
            throw std::invalid_argument("StateVector: qubit count " + std::to_string(n) +
                                        " outside [1, " + std::to_string(kMaxQubits) + "]");
        }
        if (amplitudes.size() != (std::size_t{1} << n)) {
            throw std::invalid_argument("StateVector: amplitude count does not equal 2^n_qubits");
        }
    }

    static StateVector zero(int n) {
        if (n < 1 || n > kMaxQubits) {
            throw std::invalid_argument("StateVector: qubit count outside capacity");
        }
        return StateVector(n, std::vector<cplx>(std::size_t{1} << n, cplx{0.0, 0.0}));
    }

    static StateVector basis(int n, std::uint64_t index) {
        StateVector s = zero(n);
        if (index >= s.dim()) throw std::invalid_argument("StateVector::basis: index out of range");
        s.amplitudes[index] = cplx{1.0, 0.0};
        return s;
    }

    // Basis state from a bit string, qubit 0 first: basis("10") == |10>.
    static StateVector basis(const std::string& bits) {
        std::uint64_t index = 0;
        for (char c : bits) {
            if (c != '0' && c != '1') {
                throw std::invalid_argument("StateVector::basis: bit string must contain only 0/1");
            }
            index = (index << 1) | static_cast<std::uint64_t>(c - '0');
        }
        return basis(static_cast<int>(bits.size()), index);
    }

    std::size_t dim() const { return amplitudes.size(); }

    double norm2() const {
        double acc = 0.0;
        for (const cplx& a : amplitudes) acc += std::norm(a);
        return acc;
    }

    bool is_normalized(double tol = kTolNorm) const { return std::abs(norm2() - 1.0) < tol; }
};

inline StateVector add(const StateVector& a, const StateVector& b) {
    if (a.n_qubits != b.n_qubits) throw std::invalid_argument("add: qubit count mismatch");
    StateVector out = a;
    for (std::size_t i = 0; i < out.dim(); ++i) out.amplitudes[i] += b.amplitudes[i];
    return out;
}

inline StateVector scaled(const StateVector& s, cplx factor) {
    StateVector out = s;
    for (cplx& a : out.amplitudes) a *= factor;
    return out;
}

// Unit-norm copy; rejects (numerically) zero vectors.
inline StateVector normalized(const StateVector& s) {
    const double n2 = s.norm2();
    if (n2 < 1e-300) throw std::invalid_argument("normalized: zero vector");
    return scaled(s, cplx{1.0 / std::sqrt(n2), 0.0});
}

inline double max_abs_diff(const StateVector& a, const StateVector& b) {
    if (a.n_qubits != b.n_qubits) throw std::invalid_argument("max_abs_diff: qubit count mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) m = std::max(m, std::abs(a.amplitudes[i] - b.amplitudes[i]));
    return m;
}

// Max per-amplitude deviation after rotating `a` by the global phase that best
// aligns it with `b` (phase read off the largest component of `a`).
inline double phase_aligned_max_diff(const StateVector& a, const StateVector& b) {
    if (a.n_qubits != b.n_qubits) throw std::invalid_argument("phase_aligned_max_diff: qubit count mismatch");
    std::size_t pivot = 0;
    double best = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        if (std::abs(a.amplitudes[i]) > best) {
            best = std::abs(a.amplitudes[i]);
            pivot = i;
        }
    }
    cplx phase{1.0, 0.0};
    if (best > 0.0 && std::abs(b.amplitudes[pivot]) > 0.0) {
        phase = (b.amplitudes[pivot] / a.amplitudes[pivot]);
        phase /= std::abs(phase);
    }
    return max_abs_diff(scaled(a, phase), b);
}

// Dense square complex matrix, row-major, dimension a power of two.
struct UnitaryMatrix {
    int dim = 0;
    std::vector<cplx> entries;  // row-major

    UnitaryMatrix() = default;

    explicit UnitaryMatrix(int d) : dim(d), entries(static_cast<std::size_t>(d) * d, cplx{0.0, 0.0}) {
        if (d < 1 || (d & (d - 1)) != 0) {
            throw std::invalid_argument("UnitaryMatrix: dimension must be a positive power of two");
        }
    }

    static UnitaryMatrix identity(int d) {
        UnitaryMatrix u(d);
        for (int i = 0; i < d; ++i) u.at(i, i) = cplx{1.0, 0.0};
        return u;
    }

    cplx& at(int r, int c) { return entries[static_cast<std::size_t>(r) * dim + c]; }
    const cplx& at(int r, int c) const { return entries[static_cast<std::size_t>(r) * dim + c]; }

    UnitaryMatrix adjoint() const {
        UnitaryMatrix out(dim);
        for (int r = 0; r < dim; ++r)
            for (int c = 0; c < dim; ++c) out.at(r, c) = std::conj(at(c, r));
        return out;
    }

    // Max entry of |U^dag U - I|.
    double unitarity_defect() const {
        double worst = 0.0;
        for (int r = 0; r < dim; ++r) {
            for (int c = 0; c < dim; ++c) {
                cplx acc{0.0, 0.0};
                for (int k = 0; k < dim; ++k) acc += std::conj(at(k, r)) * at(k, c);
                if (r == c) acc -= cplx{1.0, 0.0};
                worst = std::max(worst, std::abs(acc));
            }
        }
        return worst;
    }

    bool is_unitary(double tol = kTolUnitary) const { return unitarity_defect() < tol; }
};

inline UnitaryMatrix operator*(const UnitaryMatrix& a, const UnitaryMatrix& b) {
    if (a.dim != b.dim) throw std::invalid_argument("UnitaryMatrix multiply: dimension mismatch");
    UnitaryMatrix out(a.dim);
    for (int r = 0; r < a.dim; ++r) {
        for (int k = 0; k < a.dim; ++k) {
            const cplx ark = a.at(r, k);
            if (ark == cplx{0.0, 0.0}) continue;
            for (int c = 0; c < a.dim; ++c) out.at(r, c) += ark * b.at(k, c);
        }
    }
    return out;
}

inline UnitaryMatrix kron(const UnitaryMatrix& a, const UnitaryMatrix& b) {
    UnitaryMatrix out(a.dim * b.dim);
    for (int ra = 0; ra < a.dim; ++ra)
        for (int ca = 0; ca < a.dim; ++ca)
            for (int rb = 0; rb < b.dim; ++rb)
                for (int cb = 0; cb < b.dim; ++cb)
                    out.at(ra * b.dim + rb, ca * b.dim + cb) = a.at(ra, ca) * b.at(rb, cb);
    return out;
}

// Bit values pinned on a set of qubits: the subspace label of a projector, and
// the result r_k read off one event's record qubits.
struct BitAssignment {
    std::vector<int> qubit_indices;
    std::vector<int> bits;

    void check(int n_qubits) const {
        if (qubit_indices.size() != bits.size()) {
            throw std::invalid_argument("BitAssignment: index/bit count mismatch");
        }
        std::vector<int> seen;
        for (std::size_t i = 0; i < qubit_indices.size(); ++i) {
            const int q = qubit_indices[i];
            if (q < 0 || q >= n_qubits) {
                throw std::invalid_argument("BitAssignment: qubit index " + std::to_string(q) + " out of range");
            }
            if (std::find(seen.begin(), seen.end(), q) != seen.end()) {
                throw std::invalid_argument("BitAssignment: duplicate qubit index " + std::to_string(q));
            }
            seen.push_back(q);
            if (bits[i] != 0 && bits[i] != 1) throw std::invalid_argument("BitAssignment: bits must be 0 or 1");
        }
    }

    bool matches(std::uint64_t index, int n_qubits) const {
        for (std::size_t i = 0; i < qubit_indices.size(); ++i) {
            if (bit_of(index, qubit_indices[i], n_qubits) != bits[i]) return false;
        }
        return true;
    }

    std::string label() const {
        std::ostringstream os;
        os << '(';
        for (std::size_t i = 0; i < bits.size(); ++i) {
            if (i) os << ',';
            os << bits[i];
        }
        os << ')';
        return os.str();
    }

    // All 2^k assignments on `qubits`, lexicographic with the first qubit as
    // the most significant position.
    static std::vector<BitAssignment> all_patterns(const std::vector<int>& qubits) {
        const std::size_t k = qubits.size();
        std::vector<BitAssignment> out;
        out.reserve(std::size_t{1} << k);
        for (std::uint64_t p = 0; p < (std::uint64_t{1} << k); ++p) {
            BitAssignment r;
            r.qubit_indices = qubits;
            r.bits.resize(k);
            for (std::size_t j = 0; j < k; ++j) {
                r.bits[j] = static_cast<int>((p >> (k - 1 - j)) & 1ull);
            }
            out.push_back(std::move(r));
        }
        return out;
    }
};

inline BitAssignment concat(const BitAssignment& a, const BitAssignment& b) {
    BitAssignment out = a;
    out.qubit_indices.insert(out.qubit_indices.end(), b.qubit_indices.begin(), b.qubit_indices.end());
    out.bits.insert(out.bits.end(), b.bits.begin(), b.bits.end());
    return out;
}

// |a> (x) |b>; the first factor holds the high-order qubits.
inline StateVector tensor(const StateVector& a, const StateVector& b, int max_qubits = kMaxQubits) {
    const int n = a.n_qubits + b.n_qubits;
    if (n > max_qubits) {
        throw std::runtime_error("tensor: combined qubit count " + std::to_string(n) +
                                 " exceeds capacity " + std::to_string(max_qubits));
    }
    StateVector out = StateVector::zero(n);
    for (std::size_t i = 0; i < a.dim(); ++i) {
        if (a.amplitudes[i] == cplx{0.0, 0.0}) continue;
        for (std::size_t j = 0; j < b.dim(); ++j) {
            out.amplitudes[(i << b.n_qubits) | j] = a.amplitudes[i] * b.amplitudes[j];
        }
    }
    return out;
}

// (I (x) u (x) I)|s> with u acting on the listed target qubits. The first
// target supplies the most significant bit of u's row/column index.
inline StateVector apply_local_unitary(const StateVector& s, const UnitaryMatrix& u,
                                       const std::vector<int>& targets) {
    const int m = static_cast<int>(targets.size());
    if (u.dim != (1 << m)) {
        throw std::invalid_argument("apply_local_unitary: matrix dimension " + std::to_string(u.dim) +
                                    " does not match " + std::to_string(m) + " target qubits");
    }
    {
        BitAssignment probe;
        probe.qubit_indices = targets;
        probe.bits.assign(targets.size(), 0);
        probe.check(s.n_qubits);  // validates range and distinctness
    }

    // Bit position of each target inside the amplitude index.
    std::vector<int> shift(m);
    std::uint64_t target_mask = 0;
    for (int j = 0; j < m; ++j) {
        shift[j] = s.n_qubits - 1 - targets[j];
        target_mask |= std::uint64_t{1} << shift[j];
    }

    const std::uint64_t gdim = std::uint64_t{1} << m;
    std::vector<std::uint64_t> offset(gdim, 0);  // gate-local index -> index bits
    for (std::uint64_t g = 0; g < gdim; ++g) {
        for (int j = 0; j < m; ++j) {
            if ((g >> (m - 1 - j)) & 1ull) offset[g] |= std::uint64_t{1} << shift[j];
        }
    }

    StateVector out = StateVector::zero(s.n_qubits);
    std::vector<cplx> in(gdim);
    for (std::uint64_t base = 0; base < s.dim(); ++base) {
        if (base & target_mask) continue;  // visit each group once, at its all-zero member
        for (std::uint64_t g = 0; g < gdim; ++g) in[g] = s.amplitudes[base | offset[g]];
        for (std::uint64_t r = 0; r < gdim; ++r) {
            cplx acc{0.0, 0.0};
            for (std::uint64_t c = 0; c < gdim; ++c) {
                acc += u.entries[r * gdim + c] * in[c];
            }
            out.amplitudes[base | offset[r]] = acc;
        }
    }
    return out;
}

// Multiplies each basis amplitude by exp(-i dt * sum_i omega_i e_i), where e_i
// is that basis state's bit on record qubit i. Negative dt runs the inverse.
inline StateVector evolve_diagonal(const StateVector& s, std::span<const QubitFrequency> omegas, double dt) {
    for (const QubitFrequency& f : omegas) {
        if (f.qubit < 0 || f.qubit >= s.n_qubits) {
            throw std::invalid_argument("evolve_diagonal: record qubit index out of range");
        }
    }
    if (dt == 0.0) return s;
    StateVector out = s;
    for (std::uint64_t i = 0; i < s.dim(); ++i) {
        double phase_sum = 0.0;
        for (const QubitFrequency& f : omegas) {
            if (bit_of(i, f.qubit, s.n_qubits)) phase_sum += f.omega;
        }
        out.amplitudes[i] *= std::polar(1.0, -dt * phase_sum);
    }
    return out;
}

// Keeps amplitudes whose bits match the assignment, zeroes the rest.
inline StateVector project(const StateVector& s, const BitAssignment& r) {
    r.check(s.n_qubits);
    StateVector out = s;
    for (std::uint64_t i = 0; i < s.dim(); ++i) {
        if (!r.matches(i, s.n_qubits)) out.amplitudes[i] = cplx{0.0, 0.0};
    }
    return out;
}

inline cplx inner(const StateVector& a, const StateVector& b) {
    if (a.n_qubits != b.n_qubits) throw std::invalid_argument("inner: qubit count mismatch");
    cplx acc{0.0, 0.0};
    for (std::size_t i = 0; i < a.dim(); ++i) acc += std::conj(a.amplitudes[i]) * b.amplitudes[i];
    return acc;
}

}  // namespace branchsim

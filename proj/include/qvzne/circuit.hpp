#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace qvzne {

using Complex = std::complex<double>;
using Matrix2cd = Eigen::Matrix2cd;
using Matrix4cd = Eigen::Matrix4cd;

enum class GateKind {
    X,
    SX,
    RZ,
    CX,
    SU4,
    SWAP,
    Barrier,
    Measure,
};

std::string gate_kind_name(GateKind kind);

/// A single circuit operation. Qubit index 0 is the least significant bit of
/// basis-state indices everywhere in this library; bitstrings print qubit 0
/// rightmost.
struct Gate {
    GateKind kind;
    std::vector<uint32_t> qubits;
    double angle = 0.0;                          // RZ only
    std::shared_ptr<const Matrix4cd> su4;        // SU4 only
    uint32_t cbit = 0;                           // Measure only

    static Gate x(uint32_t q);
    static Gate sx(uint32_t q);
    static Gate rz(double angle, uint32_t q);
    static Gate cx(uint32_t control, uint32_t target);
    static Gate su4_block(const Matrix4cd &m, uint32_t a, uint32_t b);
    static Gate swap(uint32_t a, uint32_t b);
    static Gate barrier(std::vector<uint32_t> qs);
    static Gate measure(uint32_t q, uint32_t cbit);

    bool is_unitary_op() const { return kind != GateKind::Barrier && kind != GateKind::Measure; }

    /// Checks per-gate invariants (distinct qubits, finite angle, SU4 unitarity).
    void validate() const;

    bool operator==(const Gate &other) const;
};

/// Ordered gate list over n qubits. layer_marks, when nonempty, hold the
/// end index (exclusive) of each logical layer and must partition the gate
/// list; the number of marks is the layer count d used by global folding.
struct Circuit {
    uint32_t n_qubits = 0;
    std::vector<Gate> gates;
    std::vector<size_t> layer_marks;

    Circuit() = default;
    explicit Circuit(uint32_t n) : n_qubits(n) {}

    size_t layer_count() const { return layer_marks.size(); }
    bool has_measurements() const;

    void push(Gate g) { gates.push_back(std::move(g)); }
    void mark_layer() { layer_marks.push_back(gates.size()); }

    /// Checks structural invariants: qubit ranges, layer partition,
    /// measurements only after all unitary gates, per-gate invariants.
    void validate() const;

    bool operator==(const Circuit &other) const;
};

/// Exact multiset of gate kinds. The CX entry is the t counted by local folding.
std::map<GateKind, size_t> gate_counts(const Circuit &circuit);

/// Inverse of a native gate as a native sequence (SX inverts to [SX, X]).
std::vector<Gate> native_inverse(const Gate &g);

}  // namespace qvzne

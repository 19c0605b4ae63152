#include "qvzne/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace qvzne {

std::string gate_kind_name(GateKind kind) {
    switch (kind) {
        case GateKind::X: return "x";
        case GateKind::SX: return "sx";
        case GateKind::RZ: return "rz";
        case GateKind::CX: return "cx";
        case GateKind::SU4: return "su4";
        case GateKind::SWAP: return "swap";
        case GateKind::Barrier: return "barrier";
        case GateKind::Measure: return "measure";
    }
    return "?";
}

Gate Gate::x(uint32_t q) { return Gate{GateKind::X, {q}}; }
Gate Gate::sx(uint32_t q) { return Gate{GateKind::SX, {q}}; }

Gate Gate::rz(double angle, uint32_t q) {
    Gate g{GateKind::RZ, {q}};
    g.angle = angle;
    return g;
}

Gate Gate::cx(uint32_t control, uint32_t target) { return Gate{GateKind::CX, {control, target}}; }

Gate Gate::su4_block(const Matrix4cd &m, uint32_t a, uint32_t b) {
    Gate g{GateKind::SU4, {a, b}};
    g.su4 = std::make_shared<const Matrix4cd>(m);
    return g;
}

Gate Gate::swap(uint32_t a, uint32_t b) { return Gate{GateKind::SWAP, {a, b}}; }

Gate Gate::barrier(std::vector<uint32_t> qs) {
    Gate g{GateKind::Barrier, std::move(qs)};
    return g;
}

Gate Gate::measure(uint32_t q, uint32_t cbit) {
    Gate g{GateKind::Measure, {q}};
    g.cbit = cbit;
    return g;
}

void Gate::validate() const {
    std::set<uint32_t> distinct(qubits.begin(), qubits.end());
    if (distinct.size() != qubits.size()) {
        throw std::invalid_argument("gate has repeated qubit indices");
    }
    size_t expect = 0;
    switch (kind) {
        case GateKind::X:
        case GateKind::SX:
        case GateKind::RZ:
        case GateKind::Measure: expect = 1; break;
        case GateKind::CX:
        case GateKind::SU4:
        case GateKind::SWAP: expect = 2; break;
        case GateKind::Barrier: expect = qubits.size(); break;
    }
    if (qubits.size() != expect) {
        throw std::invalid_argument("gate " + gate_kind_name(kind) + " has wrong qubit count");
    }
    if (kind == GateKind::Barrier && qubits.empty()) {
        throw std::invalid_argument("barrier needs at least one qubit");
    }
    if (kind == GateKind::RZ && !std::isfinite(angle)) {
        throw std::invalid_argument("rz angle is not finite");
    }
    if (kind == GateKind::SU4) {
        if (!su4) throw std::invalid_argument("su4 gate has no matrix");
        Matrix4cd residue = su4->adjoint() * (*su4) - Matrix4cd::Identity();
        if (residue.cwiseAbs().maxCoeff() >= 1e-10) {
            throw std::invalid_argument("su4 matrix is not unitary to 1e-10");
        }
    }
}

bool Gate::operator==(const Gate &other) const {
    if (kind != other.kind || qubits != other.qubits) return false;
    if (kind == GateKind::RZ && angle != other.angle) return false;
    if (kind == GateKind::Measure && cbit != other.cbit) return false;
    if (kind == GateKind::SU4) {
        if (!su4 || !other.su4) return su4 == other.su4;
        return (*su4 - *other.su4).cwiseAbs().maxCoeff() == 0.0;
    }
    return true;
}

bool Circuit::has_measurements() const {
    return std::any_of(gates.begin(), gates.end(),
                       [](const Gate &g) { return g.kind == GateKind::Measure; });
}

void Circuit::validate() const {
    bool seen_measure = false;
    for (const Gate &g : gates) {
        g.validate();
        for (uint32_t q : g.qubits) {
            if (q >= n_qubits) {
                throw std::invalid_argument("gate qubit index " + std::to_string(q) +
                                            " out of range for n=" + std::to_string(n_qubits));
            }
        }
        if (g.kind == GateKind::Measure) {
            seen_measure = true;
        } else if (seen_measure && g.is_unitary_op()) {
            throw std::invalid_argument("unitary gate appears after a measurement");
        }
    }
    if (!layer_marks.empty()) {
        size_t prev = 0;
        for (size_t m : layer_marks) {
            if (m <= prev && !(m == 0 && prev == 0)) {
                throw std::invalid_argument("layer_marks are not strictly increasing");
            }
            if (m > gates.size()) throw std::invalid_argument("layer mark beyond gate list");
            prev = m;
        }
        if (layer_marks.back() != gates.size()) {
            throw std::invalid_argument("layer_marks do not partition the gate list");
        }
    }
}

bool Circuit::operator==(const Circuit &other) const {
    return n_qubits == other.n_qubits && gates == other.gates && layer_marks == other.layer_marks;
}

std::map<GateKind, size_t> gate_counts(const Circuit &circuit) {
    std::map<GateKind, size_t> counts;
    for (const Gate &g : circuit.gates) counts[g.kind]++;
    return counts;
}

std::vector<Gate> native_inverse(const Gate &g) {
    switch (g.kind) {
        case GateKind::X:
        case GateKind::CX:
        case GateKind::SWAP:
        case GateKind::Barrier: return {g};
        case GateKind::RZ: return {Gate::rz(-g.angle, g.qubits[0])};
        case GateKind::SX:
            // SX^4 = I, so SX^dag = SX^3 = SX . X (X and SX commute).
            return {Gate::sx(g.qubits[0]), Gate::x(g.qubits[0])};
        case GateKind::SU4:
            return {Gate::su4_block(g.su4->adjoint(), g.qubits[0], g.qubits[1])};
        case GateKind::Measure: throw std::invalid_argument("measurement has no inverse");
    }
    throw std::invalid_argument("unknown gate kind");
}

}  // namespace qvzne

#include "qvzne/unitary.hpp"

#include <cmath>
#include <stdexcept>

namespace qvzne {

namespace {
constexpr Complex kI{0.0, 1.0};
}

Matrix2cd x_matrix() {
    Matrix2cd m;
    m << 0, 1, 1, 0;
    return m;
}

Matrix2cd sx_matrix() {
    Matrix2cd m;
    m << Complex(0.5, 0.5), Complex(0.5, -0.5), Complex(0.5, -0.5), Complex(0.5, 0.5);
    return m;
}

Matrix2cd rz_matrix(double angle) {
    Matrix2cd m = Matrix2cd::Zero();
    m(0, 0) = std::exp(-kI * (angle / 2.0));
    m(1, 1) = std::exp(kI * (angle / 2.0));
    return m;
}

Matrix4cd cx_matrix() {
    // Local bit 0 = control, local bit 1 = target.
    Matrix4cd m = Matrix4cd::Zero();
    m(0, 0) = 1;
    m(3, 1) = 1;
    m(2, 2) = 1;
    m(1, 3) = 1;
    return m;
}

Matrix4cd swap_matrix() {
    Matrix4cd m = Matrix4cd::Zero();
    m(0, 0) = 1;
    m(2, 1) = 1;
    m(1, 2) = 1;
    m(3, 3) = 1;
    return m;
}

Matrix2cd one_qubit_matrix(const Gate &g) {
    switch (g.kind) {
        case GateKind::X: return x_matrix();
        case GateKind::SX: return sx_matrix();
        case GateKind::RZ: return rz_matrix(g.angle);
        default: throw std::invalid_argument("not a one-qubit unitary gate");
    }
}

Matrix4cd two_qubit_matrix(const Gate &g) {
    switch (g.kind) {
        case GateKind::CX: return cx_matrix();
        case GateKind::SWAP: return swap_matrix();
        case GateKind::SU4: return *g.su4;
        default: throw std::invalid_argument("not a two-qubit gate");
    }
}

void apply_1q(std::span<Complex> state, const Matrix2cd &m, uint32_t q) {
    const size_t dim = state.size();
    const size_t stride = size_t{1} << q;
    for (size_t base = 0; base < dim; base += 2 * stride) {
        for (size_t off = 0; off < stride; ++off) {
            Complex &a0 = state[base + off];
            Complex &a1 = state[base + off + stride];
            const Complex t0 = m(0, 0) * a0 + m(0, 1) * a1;
            const Complex t1 = m(1, 0) * a0 + m(1, 1) * a1;
            a0 = t0;
            a1 = t1;
        }
    }
}

void apply_2q(std::span<Complex> state, const Matrix4cd &m, uint32_t qa, uint32_t qb) {
    const size_t dim = state.size();
    const size_t sa = size_t{1} << qa;
    const size_t sb = size_t{1} << qb;
    const size_t mask = sa | sb;
    for (size_t i = 0; i < dim; ++i) {
        if (i & mask) continue;  // visit each group once via its 00 member
        Complex v[4] = {state[i], state[i | sa], state[i | sb], state[i | sa | sb]};
        for (int r = 0; r < 4; ++r) {
            Complex acc = 0;
            for (int c = 0; c < 4; ++c) acc += m(r, c) * v[c];
            state[i | (r & 1 ? sa : 0) | (r & 2 ? sb : 0)] = acc;
        }
    }
}

void apply_gate(std::span<Complex> state, const Gate &g) {
    switch (g.kind) {
        case GateKind::X:
        case GateKind::SX:
        case GateKind::RZ: apply_1q(state, one_qubit_matrix(g), g.qubits[0]); return;
        case GateKind::CX:
        case GateKind::SWAP:
        case GateKind::SU4:
            apply_2q(state, two_qubit_matrix(g), g.qubits[0], g.qubits[1]);
            return;
        case GateKind::Barrier: return;
        case GateKind::Measure: throw std::invalid_argument("cannot apply a measurement as a unitary");
    }
}

VectorXcd run_statevector(const Circuit &circuit) {
    if (circuit.has_measurements()) {
        throw std::invalid_argument("run_statevector: circuit contains measurements");
    }
    const size_t dim = size_t{1} << circuit.n_qubits;
    VectorXcd state = VectorXcd::Zero(dim);
    state(0) = 1.0;
    std::span<Complex> view(state.data(), dim);
    for (const Gate &g : circuit.gates) apply_gate(view, g);
    return state;
}

MatrixXcd compose_unitary(const Circuit &circuit) {
    if (circuit.has_measurements()) {
        throw std::invalid_argument("compose_unitary: circuit contains measurements");
    }
    if (circuit.n_qubits > 12) {
        throw std::invalid_argument("compose_unitary: n_qubits > 12 exceeds the memory guard");
    }
    const size_t dim = size_t{1} << circuit.n_qubits;
    MatrixXcd u = MatrixXcd::Identity(dim, dim);
    for (const Gate &g : circuit.gates) {
        if (g.kind == GateKind::Barrier) continue;
        for (size_t col = 0; col < dim; ++col) {
            std::span<Complex> view(u.col(col).data(), dim);
            apply_gate(view, g);
        }
    }
    return u;
}

double phase_aligned_distance(const MatrixXcd &a, const MatrixXcd &b) {
    Eigen::Index r = 0, c = 0;
    b.cwiseAbs().maxCoeff(&r, &c);
    if (std::abs(b(r, c)) < 1e-12) return (a - b).cwiseAbs().maxCoeff();
    Complex phase = a(r, c) / b(r, c);
    const double mag = std::abs(phase);
    if (mag < 1e-12) return (a - b).cwiseAbs().maxCoeff();
    phase /= mag;
    return (a - phase * b).cwiseAbs().maxCoeff();
}

}  // namespace qvzne

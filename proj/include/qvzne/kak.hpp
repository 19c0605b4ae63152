#pragma once

#include <array>
#include <vector>

#include "qvzne/circuit.hpp"
#include "qvzne/unitary.hpp"

namespace qvzne {

/// Cartan decomposition of a two-qubit unitary:
///   U = phase * kron(a1, a0) * exp(i(x XX + y YY + z ZZ)) * kron(b1, b0)
/// with canonical coordinates in the Weyl chamber
///   pi/4 >= x >= y >= |z|, and z >= 0 when x = pi/4.
struct KakDecomposition {
    Complex phase;
    Matrix2cd a0, a1;  // outer local gates (applied last)
    Matrix2cd b0, b1;  // inner local gates (applied first)
    double x = 0.0, y = 0.0, z = 0.0;
};

/// Canonical interaction exp(i(x XX + y YY + z ZZ)).
Matrix4cd canonical_gate(double x, double y, double z);

/// kron with qubit 1 as the high factor: two_qubit op = kron2(m_q1, m_q0).
Matrix4cd kron2(const Matrix2cd &hi, const Matrix2cd &lo);

/// Decomposes any 4x4 unitary via magic-basis diagonalization. Throws if m is
/// not unitary to 1e-8 or if the numerics fail to reconstruct to 1e-9.
KakDecomposition kak_decompose(const Matrix4cd &m);

/// Number of CX gates required for the local-equivalence class of m
/// (Makhlin-invariant classification via canonical coordinates): 0, 1, 2 or 3.
int cx_cost(const Matrix4cd &m, double tol = 1e-7);

/// Rewrites a 2x2 unitary as native gates on the given wire: empty for
/// identity, single RZ/X/SX where possible, else the RZ.SX.RZ.SX.RZ Euler
/// form. Matches the input up to global phase within 1e-9.
std::vector<Gate> rebase_1q(const Matrix2cd &u, uint32_t wire);

/// Merges a run of native one-qubit gates and rebases it.
std::vector<Gate> rebase_1q(const std::vector<Gate> &run, uint32_t wire);

/// Decomposes a two-qubit unitary into at most 3 CX plus single-qubit
/// natives acting on wires (qa, qb). The sequence reproduces m up to global
/// phase with max-norm error below 1e-7.
std::vector<Gate> decompose_su4(const Matrix4cd &m, uint32_t qa, uint32_t qb);

}  // namespace qvzne

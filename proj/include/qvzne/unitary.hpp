#pragma once

#include <Eigen/Dense>
#include <span>

#include "qvzne/circuit.hpp"

namespace qvzne {

using VectorXcd = Eigen::VectorXcd;
using MatrixXcd = Eigen::MatrixXcd;

/// Fixed 2x2 / 4x4 matrices for the native kinds. Two-qubit matrices use the
/// local convention: bit 0 of the local index is gate.qubits[0].
Matrix2cd x_matrix();
Matrix2cd sx_matrix();
Matrix2cd rz_matrix(double angle);
Matrix4cd cx_matrix();
Matrix4cd swap_matrix();

/// 4x4 matrix of any two-qubit unitary gate in the local convention above.
Matrix4cd two_qubit_matrix(const Gate &g);

/// Unitary matrix of a single gate (barrier excluded).
Matrix2cd one_qubit_matrix(const Gate &g);

/// In-place statevector application, qubit 0 = least significant bit.
void apply_1q(std::span<Complex> state, const Matrix2cd &m, uint32_t q);
void apply_2q(std::span<Complex> state, const Matrix4cd &m, uint32_t qa, uint32_t qb);
void apply_gate(std::span<Complex> state, const Gate &g);

/// Statevector of circuit applied to |0...0>. Rejects measurements.
VectorXcd run_statevector(const Circuit &circuit);

/// Full 2^n x 2^n unitary of a measurement-free circuit, gates in application
/// order (later gates multiply from the left). Guarded to n <= 12.
MatrixXcd compose_unitary(const Circuit &circuit);

/// Max-norm distance between two matrices after aligning global phase.
double phase_aligned_distance(const MatrixXcd &a, const MatrixXcd &b);

}  // namespace qvzne

#pragma once

#include "qvzne/circuit.hpp"
#include "qvzne/coupling.hpp"
#include "qvzne/qv.hpp"

namespace qvzne {

/// Result of lowering a logical circuit onto hardware wires with SWAP
/// routing. Wires are contiguous indices 0..n-1 into the sorted subgraph
/// vertex list; wire_of_logical records the final relabeling so measured
/// bitstrings can be mapped back to the logical order.
struct RoutedCircuit {
    Circuit circuit;  // native gates, layer_marks at scheduling moments
    std::vector<uint32_t> wire_of_logical;
    std::vector<uint32_t> device_vertex_of_wire;

    /// Circuit with a full-width barrier and measurements appended; wire w is
    /// measured into classical bit = the logical qubit it carries, so count
    /// bitstrings come out in logical order.
    Circuit measured_circuit() const;
};

/// Lowers a QV circuit to the native set on the layout's subgraph: SU(4)
/// blocks via the KAK decomposition, greedy shortest-path SWAP insertion
/// (lowest-index tie break, SWAPs emitted as 3 CX), adjacent one-qubit gates
/// merged. The output unitary equals the logical one up to global phase and
/// the recorded relabeling.
RoutedCircuit route(const QvCircuit &qv, const Layout &layout);

/// Same routing for an already-native circuit (imported QASM).
RoutedCircuit route_native(const Circuit &circuit, const Layout &layout);

/// Converts residual SU4/SWAP gates to natives without touching anything
/// else; no cancellation across gates, CX count of native gates unchanged.
/// Native-only input comes back identical.
Circuit rebase_only(const Circuit &circuit);

/// Rewrites layer_marks to as-soon-as-possible scheduling moments, reordering
/// gates within moments only (disjoint qubits), preserving semantics.
Circuit with_moment_marks(const Circuit &circuit);

}  // namespace qvzne

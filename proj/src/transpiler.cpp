#include "qvzne/transpiler.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <stdexcept>

#include "qvzne/kak.hpp"

namespace qvzne {

namespace {

// Lowest-index shortest path between wires via BFS with ascending neighbor
// visitation.
struct WireGraph {
    uint32_t n;
    std::vector<std::vector<uint32_t>> nbrs;
    std::vector<std::vector<uint32_t>> dist;

    explicit WireGraph(const CouplingGraph &g, const std::vector<uint32_t> &verts) {
        n = static_cast<uint32_t>(verts.size());
        std::map<uint32_t, uint32_t> wire_of;
        for (uint32_t i = 0; i < n; ++i) wire_of[verts[i]] = i;
        nbrs.resize(n);
        for (auto [a, b] : g.edges) {
            nbrs[wire_of.at(a)].push_back(wire_of.at(b));
            nbrs[wire_of.at(b)].push_back(wire_of.at(a));
        }
        for (auto &v : nbrs) std::sort(v.begin(), v.end());
        dist.assign(n, std::vector<uint32_t>(n, UINT32_MAX));
        for (uint32_t s = 0; s < n; ++s) {
            dist[s][s] = 0;
            std::deque<uint32_t> queue{s};
            while (!queue.empty()) {
                uint32_t v = queue.front();
                queue.pop_front();
                for (uint32_t u : nbrs[v]) {
                    if (dist[s][u] == UINT32_MAX) {
                        dist[s][u] = dist[s][v] + 1;
                        queue.push_back(u);
                    }
                }
            }
        }
    }

    bool adjacent(uint32_t a, uint32_t b) const { return dist[a][b] == 1; }

    std::vector<uint32_t> path(uint32_t from, uint32_t to) const {
        std::vector<uint32_t> p{from};
        uint32_t cur = from;
        while (cur != to) {
            for (uint32_t u : nbrs[cur]) {
                if (dist[u][to] + 1 == dist[cur][to]) {
                    p.push_back(u);
                    cur = u;
                    break;
                }
            }
        }
        return p;
    }
};

void push_swap_as_cx(std::vector<Gate> &gates, uint32_t a, uint32_t b) {
    gates.push_back(Gate::cx(a, b));
    gates.push_back(Gate::cx(b, a));
    gates.push_back(Gate::cx(a, b));
}

// Merges adjacent runs of one-qubit gates per wire into canonical native
// runs; two-qubit gates and barriers flush the touched wires.
std::vector<Gate> peephole_merge_1q(const std::vector<Gate> &gates, uint32_t n_qubits) {
    std::vector<std::vector<Gate>> pending(n_qubits);
    std::vector<Gate> out;
    auto flush = [&](uint32_t w) {
        if (pending[w].empty()) return;
        for (Gate &g : rebase_1q(pending[w], w)) out.push_back(std::move(g));
        pending[w].clear();
    };
    for (const Gate &g : gates) {
        if (g.is_unitary_op() && g.qubits.size() == 1) {
            pending[g.qubits[0]].push_back(g);
        } else {
            for (uint32_t q : g.qubits) flush(q);
            out.push_back(g);
        }
    }
    for (uint32_t w = 0; w < n_qubits; ++w) flush(w);
    return out;
}

}  // namespace

Circuit with_moment_marks(const Circuit &circuit) {
    std::vector<size_t> moment_of(circuit.gates.size(), 0);
    std::vector<size_t> frontier(circuit.n_qubits, 0);
    size_t max_moment = 0;
    for (size_t i = 0; i < circuit.gates.size(); ++i) {
        size_t m = 0;
        for (uint32_t q : circuit.gates[i].qubits) m = std::max(m, frontier[q]);
        moment_of[i] = m;
        for (uint32_t q : circuit.gates[i].qubits) frontier[q] = m + 1;
        max_moment = std::max(max_moment, m);
    }
    Circuit out(circuit.n_qubits);
    if (circuit.gates.empty()) return out;
    for (size_t m = 0; m <= max_moment; ++m) {
        for (size_t i = 0; i < circuit.gates.size(); ++i) {
            if (moment_of[i] == m) out.gates.push_back(circuit.gates[i]);
        }
        out.mark_layer();
    }
    return out;
}

RoutedCircuit route(const QvCircuit &qv, const Layout &layout) {
    layout.validate();
    if (!layout.subgraph.is_connected()) {
        throw std::invalid_argument("route: layout subgraph is not connected");
    }
    if (layout.subgraph.vertices.size() != qv.n || layout.mapping.size() != qv.n) {
        throw std::invalid_argument("route: layout size does not match the circuit");
    }

    std::vector<uint32_t> verts(layout.subgraph.vertices);
    std::sort(verts.begin(), verts.end());
    const WireGraph wg(layout.subgraph, verts);

    std::map<uint32_t, uint32_t> wire_of_vertex;
    for (uint32_t i = 0; i < verts.size(); ++i) wire_of_vertex[verts[i]] = i;
    std::vector<uint32_t> wire_of(qv.n);  // logical -> wire
    std::vector<uint32_t> logical_at(qv.n);
    for (uint32_t l = 0; l < qv.n; ++l) {
        wire_of[l] = wire_of_vertex.at(layout.mapping[l]);
        logical_at[wire_of[l]] = l;
    }

    std::vector<Gate> gates;
    for (const Gate &g : qv.circuit.gates) {
        if (g.kind != GateKind::SU4) {
            throw std::invalid_argument("route: expected a logical QV circuit of SU4 blocks");
        }
        const uint32_t la = g.qubits[0], lb = g.qubits[1];
        if (!wg.adjacent(wire_of[la], wire_of[lb])) {
            const std::vector<uint32_t> p = wg.path(wire_of[la], wire_of[lb]);
            for (size_t i = 0; i + 2 < p.size(); ++i) {
                push_swap_as_cx(gates, p[i], p[i + 1]);
                std::swap(logical_at[p[i]], logical_at[p[i + 1]]);
                wire_of[logical_at[p[i]]] = p[i];
                wire_of[logical_at[p[i + 1]]] = p[i + 1];
            }
        }
        for (Gate &ng : decompose_su4(*g.su4, wire_of[la], wire_of[lb])) {
            gates.push_back(std::move(ng));
        }
    }
    Circuit flat(qv.n);
    flat.gates = peephole_merge_1q(gates, qv.n);

    RoutedCircuit out;
    out.circuit = with_moment_marks(flat);
    out.wire_of_logical = wire_of;
    out.device_vertex_of_wire = verts;
    out.circuit.validate();
    return out;
}

RoutedCircuit route_native(const Circuit &circuit, const Layout &layout) {
    layout.validate();
    circuit.validate();
    if (!layout.subgraph.is_connected()) {
        throw std::invalid_argument("route_native: layout subgraph is not connected");
    }
    const uint32_t n = circuit.n_qubits;
    if (layout.subgraph.vertices.size() != n || layout.mapping.size() != n) {
        throw std::invalid_argument("route_native: layout size does not match the circuit");
    }

    std::vector<uint32_t> verts(layout.subgraph.vertices);
    std::sort(verts.begin(), verts.end());
    const WireGraph wg(layout.subgraph, verts);
    std::map<uint32_t, uint32_t> wire_of_vertex;
    for (uint32_t i = 0; i < verts.size(); ++i) wire_of_vertex[verts[i]] = i;
    std::vector<uint32_t> wire_of(n);
    std::vector<uint32_t> logical_at(n);
    for (uint32_t l = 0; l < n; ++l) {
        wire_of[l] = wire_of_vertex.at(layout.mapping[l]);
        logical_at[wire_of[l]] = l;
    }

    std::vector<Gate> gates;
    for (const Gate &g : circuit.gates) {
        switch (g.kind) {
            case GateKind::X:
            case GateKind::SX:
            case GateKind::RZ: {
                Gate r = g;
                r.qubits[0] = wire_of[g.qubits[0]];
                gates.push_back(std::move(r));
                break;
            }
            case GateKind::Barrier: {
                Gate r = g;
                for (uint32_t &q : r.qubits) q = wire_of[q];
                std::sort(r.qubits.begin(), r.qubits.end());
                gates.push_back(std::move(r));
                break;
            }
            case GateKind::CX: {
                const uint32_t la = g.qubits[0], lb = g.qubits[1];
                if (!wg.adjacent(wire_of[la], wire_of[lb])) {
                    const std::vector<uint32_t> p = wg.path(wire_of[la], wire_of[lb]);
                    for (size_t i = 0; i + 2 < p.size(); ++i) {
                        push_swap_as_cx(gates, p[i], p[i + 1]);
                        std::swap(logical_at[p[i]], logical_at[p[i + 1]]);
                        wire_of[logical_at[p[i]]] = p[i];
                        wire_of[logical_at[p[i + 1]]] = p[i + 1];
                    }
                }
                gates.push_back(Gate::cx(wire_of[la], wire_of[lb]));
                break;
            }
            case GateKind::SU4: {
                const uint32_t la = g.qubits[0], lb = g.qubits[1];
                if (!wg.adjacent(wire_of[la], wire_of[lb])) {
                    const std::vector<uint32_t> p = wg.path(wire_of[la], wire_of[lb]);
                    for (size_t i = 0; i + 2 < p.size(); ++i) {
                        push_swap_as_cx(gates, p[i], p[i + 1]);
                        std::swap(logical_at[p[i]], logical_at[p[i + 1]]);
                        wire_of[logical_at[p[i]]] = p[i];
                        wire_of[logical_at[p[i + 1]]] = p[i + 1];
                    }
                }
                for (Gate &ng : decompose_su4(*g.su4, wire_of[la], wire_of[lb])) {
                    gates.push_back(std::move(ng));
                }
                break;
            }
            case GateKind::SWAP:
            case GateKind::Measure:
                throw std::invalid_argument("route_native: decompose SWAP and strip measurements first");
        }
    }

    Circuit flat(n);
    flat.gates = peephole_merge_1q(gates, n);
    RoutedCircuit out;
    out.circuit = with_moment_marks(flat);
    out.wire_of_logical = wire_of;
    out.device_vertex_of_wire = verts;
    out.circuit.validate();
    return out;
}

Circuit RoutedCircuit::measured_circuit() const {
    Circuit c = circuit;
    std::vector<uint32_t> all(c.n_qubits);
    for (uint32_t i = 0; i < c.n_qubits; ++i) all[i] = i;
    c.gates.push_back(Gate::barrier(all));
    std::vector<uint32_t> logical_of_wire(c.n_qubits, 0);
    for (uint32_t l = 0; l < wire_of_logical.size(); ++l) logical_of_wire[wire_of_logical[l]] = l;
    for (uint32_t w = 0; w < c.n_qubits; ++w) {
        c.gates.push_back(Gate::measure(w, logical_of_wire[w]));
    }
    if (!c.layer_marks.empty()) c.layer_marks.back() = c.gates.size();
    return c;
}

Circuit rebase_only(const Circuit &circuit) {
    Circuit out(circuit.n_qubits);
    size_t consumed = 0;
    size_t next_mark = 0;
    for (size_t i = 0; i < circuit.gates.size(); ++i) {
        while (next_mark < circuit.layer_marks.size() && circuit.layer_marks[next_mark] == i) {
            out.layer_marks.push_back(out.gates.size());
            next_mark++;
        }
        const Gate &g = circuit.gates[i];
        switch (g.kind) {
            case GateKind::SU4:
                for (Gate &ng : decompose_su4(*g.su4, g.qubits[0], g.qubits[1])) {
                    out.gates.push_back(std::move(ng));
                }
                break;
            case GateKind::SWAP:
                push_swap_as_cx(out.gates, g.qubits[0], g.qubits[1]);
                break;
            default: out.gates.push_back(g);
        }
    }
    while (next_mark < circuit.layer_marks.size()) {
        out.layer_marks.push_back(out.gates.size());
        next_mark++;
    }
    return out;
}

}  // namespace qvzne

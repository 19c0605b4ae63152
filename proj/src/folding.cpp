#include "qvzne/folding.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qvzne {

namespace {

void check_lambda(double lambda) {
    if (!(lambda >= 1.0 && lambda <= 3.0)) {
        throw std::invalid_argument("fold: lambda must lie in [1, 3]");
    }
}

std::vector<uint32_t> all_qubits(uint32_t n) {
    std::vector<uint32_t> qs(n);
    std::iota(qs.begin(), qs.end(), 0u);
    return qs;
}

}  // namespace

size_t fold_count(size_t t_or_d, double lambda) {
    check_lambda(lambda);
    return static_cast<size_t>(std::floor(t_or_d * (lambda - 1.0) / 2.0 + 1e-9));
}

FoldedCircuit fold_global(const Circuit &circuit, double lambda) {
    check_lambda(lambda);
    circuit.validate();

    // measurements are never folded; split them off and re-append
    Circuit body(circuit.n_qubits);
    std::vector<Gate> measures;
    size_t body_end = circuit.gates.size();
    for (size_t i = 0; i < circuit.gates.size(); ++i) {
        if (circuit.gates[i].kind == GateKind::Measure) {
            body_end = i;
            break;
        }
    }
    body.gates.assign(circuit.gates.begin(), circuit.gates.begin() + body_end);
    measures.assign(circuit.gates.begin() + body_end, circuit.gates.end());
    for (size_t m : circuit.layer_marks) {
        if (m <= body_end) body.layer_marks.push_back(m);
    }
    if (!body.layer_marks.empty() && body.layer_marks.back() != body.gates.size()) {
        body.layer_marks.push_back(body.gates.size());
    }
    if (body.layer_marks.empty()) {
        // one gate per layer when no layer structure is recorded
        for (size_t i = 1; i <= body.gates.size(); ++i) body.layer_marks.push_back(i);
    }

    const size_t d = body.layer_marks.size();
    const size_t k = fold_count(d, lambda);

    FoldedCircuit out;
    out.plan = FoldPlan{lambda, k, FoldBasis::Layers, d};
    if (k == 0) {
        out.circuit = circuit;
        return out;
    }
    Circuit folded(circuit.n_qubits);
    folded.gates = body.gates;
    folded.layer_marks = body.layer_marks;

    {
        const size_t w_start_mark = d - k;
        folded.gates.push_back(Gate::barrier(all_qubits(circuit.n_qubits)));
        // W^dag: layers in reverse order, gates within a layer reversed and
        // inverted natively
        for (size_t layer = d; layer-- > w_start_mark;) {
            const size_t lo = (layer == 0) ? 0 : body.layer_marks[layer - 1];
            const size_t hi = body.layer_marks[layer];
            for (size_t g = hi; g-- > lo;) {
                for (Gate &inv : native_inverse(body.gates[g])) folded.gates.push_back(std::move(inv));
            }
            folded.layer_marks.push_back(folded.gates.size());
        }
        folded.gates.push_back(Gate::barrier(all_qubits(circuit.n_qubits)));
        // W again
        for (size_t layer = w_start_mark; layer < d; ++layer) {
            const size_t lo = (layer == 0) ? 0 : body.layer_marks[layer - 1];
            const size_t hi = body.layer_marks[layer];
            for (size_t g = lo; g < hi; ++g) folded.gates.push_back(body.gates[g]);
            folded.layer_marks.push_back(folded.gates.size());
        }
    }
    for (const Gate &m : measures) folded.gates.push_back(m);
    if (!measures.empty()) folded.layer_marks.back() = folded.gates.size();
    folded.validate();
    out.circuit = std::move(folded);
    return out;
}

FoldedCircuit fold_local_random(const Circuit &circuit, double lambda, Rng &rng) {
    check_lambda(lambda);
    circuit.validate();
    std::vector<size_t> cx_positions;
    for (size_t i = 0; i < circuit.gates.size(); ++i) {
        if (circuit.gates[i].kind == GateKind::CX) cx_positions.push_back(i);
    }
    const size_t t = cx_positions.size();
    if (t == 0) throw std::invalid_argument("fold_local_random: circuit has no CX gates");
    const size_t k = fold_count(t, lambda);

    std::vector<size_t> chosen;
    std::sample(cx_positions.begin(), cx_positions.end(), std::back_inserter(chosen), k, rng);
    std::vector<bool> fold_here(circuit.gates.size(), false);
    for (size_t pos : chosen) fold_here[pos] = true;

    FoldedCircuit out;
    out.plan = FoldPlan{lambda, k, FoldBasis::CxGates, t};
    Circuit folded(circuit.n_qubits);
    size_t next_mark = 0;
    for (size_t i = 0; i < circuit.gates.size(); ++i) {
        while (next_mark < circuit.layer_marks.size() && circuit.layer_marks[next_mark] == i) {
            folded.layer_marks.push_back(folded.gates.size());
            next_mark++;
        }
        const Gate &g = circuit.gates[i];
        folded.gates.push_back(g);
        if (fold_here[i]) {
            // CX is self-inverse: G G^dag G = CX CX CX, barriers block
            // cancellation by later passes
            folded.gates.push_back(Gate::barrier(g.qubits));
            folded.gates.push_back(g);
            folded.gates.push_back(Gate::barrier(g.qubits));
            folded.gates.push_back(g);
        }
    }
    while (next_mark < circuit.layer_marks.size()) {
        folded.layer_marks.push_back(folded.gates.size());
        next_mark++;
    }
    folded.validate();
    out.circuit = std::move(folded);
    return out;
}

std::vector<FoldedCircuit> fold_local_ensemble(const Circuit &circuit, double lambda, size_t m,
                                               Rng &rng) {
    if (m < 1) throw std::invalid_argument("fold_local_ensemble: m must be >= 1");
    std::vector<FoldedCircuit> out;
    out.reserve(m);
    for (size_t i = 0; i < m; ++i) {
        const uint64_t instance_seed = rng();
        Rng instance_rng(instance_seed);
        FoldedCircuit f = fold_local_random(circuit, lambda, instance_rng);
        f.local_instance_seed = instance_seed;
        out.push_back(std::move(f));
    }
    return out;
}

}  // namespace qvzne

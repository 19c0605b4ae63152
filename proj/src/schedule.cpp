#include "qvzne/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qvzne {

double DurationModel::of(const Gate &g) const {
    switch (g.kind) {
        case GateKind::X: return x;
        case GateKind::SX: return sx;
        case GateKind::RZ: return rz;
        case GateKind::CX: return cx;
        case GateKind::Measure: return measure;
        case GateKind::Barrier: return 0.0;
        default: throw std::invalid_argument("no duration for gate " + gate_kind_name(g.kind));
    }
}

void DurationModel::validate() const {
    if (rz != 0.0) throw std::invalid_argument("rz is virtual; its duration must be 0");
    if (x <= 0 || sx <= 0 || cx <= 0 || measure <= 0) {
        throw std::invalid_argument("gate durations must be positive");
    }
}

namespace {

// Gaps between consecutive operations per qubit plus the trailing gap;
// leading gaps are skipped.
std::vector<IdleWindow> find_idle_windows(const ScheduledCircuit &sc,
                                          const DurationModel &durations) {
    const uint32_t n = sc.circuit.n_qubits;
    std::vector<std::vector<std::pair<double, double>>> busy(n);  // (start, end)
    for (size_t i = 0; i < sc.circuit.gates.size(); ++i) {
        const Gate &g = sc.circuit.gates[i];
        const double dur = durations.of(g);
        for (uint32_t q : g.qubits) busy[q].push_back({sc.start_times[i], sc.start_times[i] + dur});
    }
    std::vector<IdleWindow> windows;
    for (uint32_t q = 0; q < n; ++q) {
        auto &iv = busy[q];
        std::sort(iv.begin(), iv.end());
        if (iv.empty()) continue;  // untouched qubit: leading-only, skip
        double cursor = iv[0].second;
        for (size_t i = 1; i < iv.size(); ++i) {
            if (iv[i].first > cursor + 1e-12) {
                windows.push_back({q, cursor, iv[i].first - cursor});
            }
            cursor = std::max(cursor, iv[i].second);
        }
        if (sc.total_time > cursor + 1e-12) {
            windows.push_back({q, cursor, sc.total_time - cursor});
        }
    }
    return windows;
}

ScheduledCircuit sort_by_start(Circuit circuit, std::vector<double> starts, double total,
                               const DurationModel &durations) {
    std::vector<size_t> order(circuit.gates.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return starts[a] < starts[b]; });
    ScheduledCircuit out;
    out.circuit.n_qubits = circuit.n_qubits;
    out.start_times.reserve(order.size());
    for (size_t idx : order) {
        out.circuit.gates.push_back(std::move(circuit.gates[idx]));
        out.start_times.push_back(starts[idx]);
    }
    out.total_time = total;
    out.durations = durations;
    out.idle_windows = find_idle_windows(out, durations);
    return out;
}

}  // namespace

ScheduledCircuit schedule_alap(const Circuit &circuit, const DurationModel &durations) {
    durations.validate();
    circuit.validate();
    for (const Gate &g : circuit.gates) {
        if (g.kind == GateKind::SU4 || g.kind == GateKind::SWAP) {
            throw std::invalid_argument("schedule_alap: circuit must be native");
        }
    }
    // Walk the gate list backwards placing each gate as early as possible in
    // reverse time, which is as late as possible forward.
    const uint32_t n = circuit.n_qubits;
    std::vector<double> back_avail(n, 0.0);
    std::vector<double> back_start(circuit.gates.size(), 0.0);
    double horizon = 0.0;
    for (size_t i = circuit.gates.size(); i-- > 0;) {
        const Gate &g = circuit.gates[i];
        const double dur = durations.of(g);
        double s = 0.0;
        for (uint32_t q : g.qubits) s = std::max(s, back_avail[q]);
        back_start[i] = s;
        for (uint32_t q : g.qubits) back_avail[q] = s + dur;
        horizon = std::max(horizon, s + dur);
    }
    std::vector<double> starts(circuit.gates.size());
    for (size_t i = 0; i < circuit.gates.size(); ++i) {
        starts[i] = horizon - back_start[i] - durations.of(circuit.gates[i]);
    }
    return sort_by_start(Circuit{circuit}, std::move(starts), horizon, durations);
}

ScheduledCircuit insert_dd(const ScheduledCircuit &scheduled, const DurationModel &durations) {
    durations.validate();
    Circuit padded = scheduled.circuit;
    std::vector<double> starts = scheduled.start_times;
    const double dx = durations.x;
    for (const IdleWindow &w : scheduled.idle_windows) {
        if (w.duration < 2.0 * dx) continue;
        const double c1 = w.start + 0.25 * w.duration;
        const double c2 = w.start + 0.75 * w.duration;
        padded.gates.push_back(Gate::x(w.qubit));
        starts.push_back(c1 - 0.5 * dx);
        padded.gates.push_back(Gate::x(w.qubit));
        starts.push_back(c2 - 0.5 * dx);
    }
    padded.layer_marks.clear();
    return sort_by_start(std::move(padded), std::move(starts), scheduled.total_time, durations);
}

}  // namespace qvzne

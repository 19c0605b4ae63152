#pragma once

#include <cstdint>
#include <vector>

#include "qvzne/circuit.hpp"

namespace qvzne {

/// Per-kind gate durations in abstract time units. RZ is virtual and must be
/// exactly zero.
struct DurationModel {
    double x = 1.0;
    double sx = 1.0;
    double cx = 5.0;
    double measure = 15.0;
    double rz = 0.0;

    double of(const Gate &g) const;
    void validate() const;
};

struct IdleWindow {
    uint32_t qubit;
    double start;
    double duration;
};

/// A native circuit with as-late-as-possible start times. Gates are kept in
/// nondecreasing start order; idle_windows are the gaps between consecutive
/// operations on a qubit plus any trailing gap, excluding the leading gap
/// before a qubit's first operation (the initial |0> state only picks up a
/// global phase there).
struct ScheduledCircuit {
    Circuit circuit;
    std::vector<double> start_times;
    double total_time = 0.0;
    std::vector<IdleWindow> idle_windows;
    DurationModel durations;
};

ScheduledCircuit schedule_alap(const Circuit &circuit, const DurationModel &durations);

/// Inserts an X-X pair into every idle window of length >= 2 dur(X), centered
/// at the 1/4 and 3/4 points. The pre/mid/post gaps then satisfy
/// mid = pre + post, so a constant-rate Z drift cancels exactly. Windows too
/// short are left alone; the noiseless unitary never changes.
ScheduledCircuit insert_dd(const ScheduledCircuit &scheduled, const DurationModel &durations);

}  // namespace qvzne

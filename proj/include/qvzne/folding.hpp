#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qvzne/circuit.hpp"
#include "qvzne/qv.hpp"

namespace qvzne {

enum class FoldBasis { Layers, CxGates };

/// How a circuit is stretched to reach scale factor lambda:
/// k = floor(t_or_d * (lambda - 1) / 2) folded units, where t_or_d counts
/// CX gates (local) or layers (global). lambda is capped at 3.
struct FoldPlan {
    double lambda = 1.0;
    size_t k = 0;
    FoldBasis basis = FoldBasis::Layers;
    size_t t_or_d = 0;
};

struct FoldedCircuit {
    Circuit circuit;
    FoldPlan plan;
    std::optional<uint64_t> local_instance_seed;
};

/// k = floor(t_or_d (lambda-1)/2); the tiny epsilon guards exact-rational
/// products against representation error, never crossing intended fractions.
size_t fold_count(size_t t_or_d, double lambda);

/// Global folding: appends W^dag W where W is the last k layers, giving depth
/// d' = d + 2k and an unchanged unitary. Measurements stay at the very end;
/// full-width barriers separate the folded sections. Circuits without
/// layer_marks are treated as one gate per layer.
FoldedCircuit fold_global(const Circuit &circuit, double lambda);

/// Local folding: replaces k CX gates, sampled uniformly without replacement,
/// by CX-CX-CX separated by barriers so later passes cannot cancel them.
/// Only CX gates are eligible; the CX count becomes t + 2k.
FoldedCircuit fold_local_random(const Circuit &circuit, double lambda, Rng &rng);

/// m independent local-fold draws; downstream HOPs of the instances are
/// averaged into a single noise-scaled value.
std::vector<FoldedCircuit> fold_local_ensemble(const Circuit &circuit, double lambda, size_t m,
                                               Rng &rng);

}  // namespace qvzne

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qvzne {

/// Undirected simple device connectivity.
struct CouplingGraph {
    std::vector<uint32_t> vertices;
    std::vector<std::pair<uint32_t, uint32_t>> edges;

    bool has_edge(uint32_t a, uint32_t b) const;
    bool is_connected() const;
    std::vector<uint32_t> neighbors(uint32_t v) const;

    /// Checks simple-graph invariants (no self loops, no duplicates, edge
    /// endpoints declared).
    void validate() const;

    std::string to_json() const;
    static CouplingGraph from_json(const std::string &text);

    /// Fully connected graph on n vertices 0..n-1.
    static CouplingGraph all_to_all(uint32_t n);
    /// The bundled 27-vertex heavy-hex coupling map (Falcon layout).
    static CouplingGraph heavy_hex_27();
};

/// One isomorphism class of connected induced n-vertex subgraphs, with every
/// embedding of its representative into the host graph.
struct SubgraphClass {
    CouplingGraph representative;  // vertices relabeled 0..n-1
    /// embeddings[k][i] = host vertex carrying representative vertex i
    std::vector<std::vector<uint32_t>> embeddings;
};

/// Enumerates all connected induced n-vertex subgraphs of g grouped into
/// isomorphism classes (canonical adjacency labeling, exhaustive over
/// permutations; guarded to n <= 8). Deterministic class and embedding order.
std::vector<SubgraphClass> enumerate_subgraph_classes(const CouplingGraph &g, uint32_t n);

/// Injective placement of logical qubits onto a coupling graph used as the
/// routing target.
struct Layout {
    CouplingGraph subgraph;
    std::vector<uint32_t> mapping;  // logical qubit -> subgraph vertex

    void validate() const;
    static Layout identity(const CouplingGraph &g);
};

}  // namespace qvzne

#include "qvzne/coupling.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

#include <json.hpp>

namespace qvzne {

using nlohmann::json;

bool CouplingGraph::has_edge(uint32_t a, uint32_t b) const {
    for (auto [u, v] : edges) {
        if ((u == a && v == b) || (u == b && v == a)) return true;
    }
    return false;
}

std::vector<uint32_t> CouplingGraph::neighbors(uint32_t v) const {
    std::vector<uint32_t> out;
    for (auto [a, b] : edges) {
        if (a == v) out.push_back(b);
        if (b == v) out.push_back(a);
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool CouplingGraph::is_connected() const {
    if (vertices.empty()) return false;
    std::set<uint32_t> seen{vertices[0]};
    std::vector<uint32_t> stack{vertices[0]};
    while (!stack.empty()) {
        uint32_t v = stack.back();
        stack.pop_back();
        for (uint32_t u : neighbors(v)) {
            if (seen.insert(u).second) stack.push_back(u);
        }
    }
    return seen.size() == vertices.size();
}

void CouplingGraph::validate() const {
    std::set<uint32_t> vs(vertices.begin(), vertices.end());
    if (vs.size() != vertices.size()) throw std::invalid_argument("duplicate vertices");
    std::set<std::pair<uint32_t, uint32_t>> es;
    for (auto [a, b] : edges) {
        if (a == b) throw std::invalid_argument("self loop in coupling graph");
        if (!vs.count(a) || !vs.count(b)) throw std::invalid_argument("edge endpoint not declared");
        auto key = std::minmax(a, b);
        if (!es.insert({key.first, key.second}).second) {
            throw std::invalid_argument("duplicate edge in coupling graph");
        }
    }
}

std::string CouplingGraph::to_json() const {
    json j;
    j["vertices"] = vertices;
    j["edges"] = json::array();
    for (auto [a, b] : edges) j["edges"].push_back({a, b});
    return j.dump(2) + "\n";
}

CouplingGraph CouplingGraph::from_json(const std::string &text) {
    json j = json::parse(text);
    CouplingGraph g;
    for (const auto &v : j.at("vertices")) g.vertices.push_back(v.get<uint32_t>());
    for (const auto &e : j.at("edges")) {
        if (!e.is_array() || e.size() != 2) throw std::invalid_argument("edge must be a pair");
        g.edges.emplace_back(e[0].get<uint32_t>(), e[1].get<uint32_t>());
    }
    g.validate();
    return g;
}

CouplingGraph CouplingGraph::all_to_all(uint32_t n) {
    CouplingGraph g;
    g.vertices.resize(n);
    std::iota(g.vertices.begin(), g.vertices.end(), 0u);
    for (uint32_t a = 0; a < n; ++a)
        for (uint32_t b = a + 1; b < n; ++b) g.edges.emplace_back(a, b);
    return g;
}

CouplingGraph CouplingGraph::heavy_hex_27() {
    CouplingGraph g;
    g.vertices.resize(27);
    std::iota(g.vertices.begin(), g.vertices.end(), 0u);
    g.edges = {{0, 1},   {1, 2},   {1, 4},   {2, 3},   {3, 5},   {4, 7},   {5, 8},
               {6, 7},   {7, 10},  {8, 9},   {8, 11},  {10, 12}, {11, 14}, {12, 13},
               {12, 15}, {13, 14}, {14, 16}, {15, 18}, {16, 19}, {17, 18}, {18, 21},
               {19, 20}, {19, 22}, {21, 23}, {23, 24}, {24, 25}, {22, 25}, {25, 26}};
    return g;
}

namespace {

// Adjacency bitmask under a vertex permutation; n <= 8 keeps it in 64 bits.
uint64_t adjacency_key(const std::vector<std::vector<bool>> &adj,
                       const std::vector<int> &perm) {
    const size_t n = perm.size();
    uint64_t key = 0;
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j)
            if (adj[perm[i]][perm[j]]) key |= uint64_t{1} << (i * n + j);
    return key;
}

struct CanonicalForm {
    uint64_t key;
    std::vector<int> perm;  // canonical index -> local index
};

CanonicalForm canonical_form(const std::vector<std::vector<bool>> &adj) {
    const size_t n = adj.size();
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    CanonicalForm best{~uint64_t{0}, perm};
    do {
        const uint64_t key = adjacency_key(adj, perm);
        if (key < best.key) best = {key, perm};
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

// ESU-style enumeration: every connected induced n-subgraph exactly once.
void extend_subgraph(const std::vector<std::vector<uint32_t>> &nbrs,
                     std::vector<uint32_t> &sub, std::set<uint32_t> &in_sub,
                     std::set<uint32_t> &reach, std::vector<uint32_t> ext, uint32_t root,
                     uint32_t n, std::vector<std::vector<uint32_t>> &out) {
    if (sub.size() == n) {
        out.push_back(sub);
        return;
    }
    while (!ext.empty()) {
        const uint32_t w = ext.back();
        ext.pop_back();
        std::vector<uint32_t> next_ext = ext;
        std::set<uint32_t> added;
        for (uint32_t u : nbrs[w]) {
            if (u > root && !in_sub.count(u) && !reach.count(u)) {
                next_ext.push_back(u);
                added.insert(u);
            }
        }
        sub.push_back(w);
        in_sub.insert(w);
        for (uint32_t u : added) reach.insert(u);
        extend_subgraph(nbrs, sub, in_sub, reach, std::move(next_ext), root, n, out);
        for (uint32_t u : added) reach.erase(u);
        in_sub.erase(w);
        sub.pop_back();
    }
}

}  // namespace

std::vector<SubgraphClass> enumerate_subgraph_classes(const CouplingGraph &g, uint32_t n) {
    g.validate();
    if (n < 1 || n > 8) {
        throw std::invalid_argument("enumerate_subgraph_classes: n must be in [1, 8]");
    }
    // compact relabeling of host vertices
    std::vector<uint32_t> verts(g.vertices);
    std::sort(verts.begin(), verts.end());
    std::map<uint32_t, uint32_t> index_of;
    for (uint32_t i = 0; i < verts.size(); ++i) index_of[verts[i]] = i;
    std::vector<std::vector<uint32_t>> nbrs(verts.size());
    for (auto [a, b] : g.edges) {
        nbrs[index_of[a]].push_back(index_of[b]);
        nbrs[index_of[b]].push_back(index_of[a]);
    }
    for (auto &v : nbrs) std::sort(v.begin(), v.end());

    std::vector<std::vector<uint32_t>> found;
    for (uint32_t v = 0; v < verts.size(); ++v) {
        std::vector<uint32_t> sub{v};
        std::set<uint32_t> in_sub{v};
        std::set<uint32_t> reach;
        std::vector<uint32_t> ext;
        for (uint32_t u : nbrs[v]) {
            if (u > v) {
                ext.push_back(u);
                reach.insert(u);
            }
        }
        extend_subgraph(nbrs, sub, in_sub, reach, std::move(ext), v, n, found);
        reach.clear();
    }

    // group by canonical adjacency
    std::map<uint64_t, SubgraphClass> classes;
    for (auto &sub : found) {
        std::sort(sub.begin(), sub.end());
        std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
        for (uint32_t i = 0; i < n; ++i)
            for (uint32_t j = 0; j < n; ++j)
                adj[i][j] = std::binary_search(nbrs[sub[i]].begin(), nbrs[sub[i]].end(), sub[j]);
        const CanonicalForm canon = canonical_form(adj);
        auto it = classes.find(canon.key);
        if (it == classes.end()) {
            SubgraphClass cls;
            cls.representative.vertices.resize(n);
            std::iota(cls.representative.vertices.begin(), cls.representative.vertices.end(), 0u);
            for (uint32_t i = 0; i < n; ++i)
                for (uint32_t j = i + 1; j < n; ++j)
                    if (adj[canon.perm[i]][canon.perm[j]])
                        cls.representative.edges.emplace_back(i, j);
            it = classes.emplace(canon.key, std::move(cls)).first;
        }
        std::vector<uint32_t> embedding(n);
        for (uint32_t i = 0; i < n; ++i) embedding[i] = verts[sub[canon.perm[i]]];
        it->second.embeddings.push_back(std::move(embedding));
    }

    std::vector<SubgraphClass> out;
    for (auto &[key, cls] : classes) {
        std::sort(cls.embeddings.begin(), cls.embeddings.end());
        out.push_back(std::move(cls));
    }
    return out;
}

void Layout::validate() const {
    subgraph.validate();
    std::set<uint32_t> verts(subgraph.vertices.begin(), subgraph.vertices.end());
    std::set<uint32_t> used;
    for (uint32_t v : mapping) {
        if (!verts.count(v)) throw std::invalid_argument("layout maps outside the subgraph");
        if (!used.insert(v).second) throw std::invalid_argument("layout mapping is not injective");
    }
}

Layout Layout::identity(const CouplingGraph &g) {
    Layout l;
    l.subgraph = g;
    l.mapping.assign(g.vertices.begin(), g.vertices.end());
    std::sort(l.mapping.begin(), l.mapping.end());
    return l;
}

}  // namespace qvzne

#include <doctest.h>

#include <numeric>

#include "qvzne/qv.hpp"

using namespace qvzne;

TEST_CASE("haar_random_su4 is unitary with unit determinant") {
    Rng rng(11);
    for (int i = 0; i < 50; ++i) {
        Matrix4cd m = haar_random_su4(rng);
        CHECK((m.adjoint() * m - Matrix4cd::Identity()).cwiseAbs().maxCoeff() < 1e-10);
        CHECK(std::abs(std::abs(m.determinant()) - 1.0) < 1e-10);
        CHECK(std::abs(m.determinant() - Complex(1.0, 0.0)) < 1e-9);
    }
}

TEST_CASE("haar_random_su4 column uniformity moment") {
    // Haar moment: E |M00|^2 = 1/4.
    Rng rng(12);
    double acc = 0.0;
    const int samples = 10000;
    for (int i = 0; i < samples; ++i) acc += std::norm(haar_random_su4(rng)(0, 0));
    CHECK(std::abs(acc / samples - 0.25) < 0.01);
}

TEST_CASE("generate_qv_circuit structure") {
    QvCircuit qv4 = generate_qv_circuit(4, 1);
    CHECK(qv4.circuit.layer_count() == 4);
    CHECK(qv4.circuit.gates.size() == 8);  // 4 layers x 2 blocks

    QvCircuit qv7 = generate_qv_circuit(7, 1);
    CHECK(qv7.circuit.layer_count() == 7);
    CHECK(qv7.circuit.gates.size() == 21);  // 7 layers x 3 blocks
    // one idle qubit per layer
    for (uint32_t layer = 0; layer < 7; ++layer) {
        std::set<uint32_t> touched;
        const size_t lo = layer == 0 ? 0 : qv7.circuit.layer_marks[layer - 1];
        for (size_t g = lo; g < qv7.circuit.layer_marks[layer]; ++g) {
            for (uint32_t q : qv7.circuit.gates[g].qubits) touched.insert(q);
        }
        CHECK(touched.size() == 6);
    }
}

TEST_CASE("generate_qv_circuit determinism and seed sensitivity") {
    QvCircuit a = generate_qv_circuit(5, 42);
    QvCircuit b = generate_qv_circuit(5, 42);
    CHECK(a.circuit == b.circuit);
    CHECK(a.layer_permutations == b.layer_permutations);
    QvCircuit c = generate_qv_circuit(5, 43);
    CHECK_FALSE((*a.circuit.gates[0].su4 - *c.circuit.gates[0].su4).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("generate_qv_circuit rejects out-of-range n") {
    CHECK_THROWS_AS(generate_qv_circuit(1, 0), std::invalid_argument);
    CHECK_THROWS_AS(generate_qv_circuit(13, 0), std::invalid_argument);
}

TEST_CASE("ideal_distribution basic cases") {
    Circuit idc(2);
    auto p = ideal_distribution(idc);
    CHECK(p[0] == 1.0);
    CHECK(p[1] == 0.0);

    Circuit xc(1);
    xc.push(Gate::x(0));
    auto px = ideal_distribution(xc);
    CHECK(px[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ideal_distribution sums to one and matches the matrix oracle") {
    for (uint32_t n = 2; n <= 5; ++n) {
        QvCircuit qv = generate_qv_circuit(n, 100 + n);
        auto p = ideal_distribution(qv);
        const double total = std::accumulate(p.begin(), p.end(), 0.0);
        CHECK(std::abs(total - 1.0) < 1e-9);
        MatrixXcd u = compose_unitary(qv.circuit);
        for (size_t x = 0; x < p.size(); ++x) {
            CHECK(std::abs(p[x] - std::norm(u(x, 0))) < 1e-9);
        }
    }
}

TEST_CASE("heavy_set examples") {
    HeavySet h = heavy_set({0, 0, 0, 1});
    CHECK(h.median == 0.0);
    CHECK(h.members == std::set<uint64_t>{3});

    HeavySet uniform = heavy_set({0.25, 0.25, 0.25, 0.25});
    CHECK(uniform.members.empty());  // strict inequality on ties
    CHECK(uniform.median == 0.25);
}

TEST_CASE("heavy_set size is exactly half for generic circuits") {
    for (uint32_t n = 2; n <= 6; ++n) {
        QvCircuit qv = generate_qv_circuit(n, 500 + n);
        HeavySet h = heavy_set(ideal_distribution(qv));
        CHECK(h.members.size() == (size_t{1} << (n - 1)));
    }
}

TEST_CASE("heavy_set validates normalization") {
    CHECK_THROWS_AS(heavy_set({0.5, 0.4}), std::invalid_argument);
}

TEST_CASE("noiseless heavy mass dominates") {
    // brute check on n <= 5: heavy mass >= 1/2 whenever |H| = 2^(n-1)
    for (uint32_t n = 2; n <= 5; ++n) {
        for (uint64_t seed = 0; seed < 10; ++seed) {
            QvCircuit qv = generate_qv_circuit(n, 900 + seed);
            auto p = ideal_distribution(qv);
            HeavySet h = heavy_set(p);
            if (h.members.size() == (size_t{1} << (n - 1))) {
                CHECK(heavy_mass(p, h) >= 0.5);
            }
        }
    }
}

TEST_CASE("mean noiseless heavy mass brackets the large-n asymptote") {
    // (1 + ln 2)/2 ~ 0.8466; the finite-n window is [0.80, 0.89]
    double acc = 0.0;
    int count = 0;
    for (uint32_t n = 4; n <= 7; ++n) {
        for (uint64_t seed = 0; seed < 50; ++seed) {
            QvCircuit qv = generate_qv_circuit(n, 2000 + 100 * n + seed);
            auto p = ideal_distribution(qv);
            acc += heavy_mass(p, heavy_set(p));
            count++;
        }
    }
    const double mean = acc / count;
    CHECK(mean > 0.80);
    CHECK(mean < 0.89);
}

TEST_CASE("uniform-sampling HOP is at most one half") {
    for (uint64_t seed = 0; seed < 20; ++seed) {
        QvCircuit qv = generate_qv_circuit(4, 3000 + seed);
        HeavySet h = heavy_set(ideal_distribution(qv));
        CHECK(static_cast<double>(h.members.size()) / 16.0 <= 0.5);
    }
}

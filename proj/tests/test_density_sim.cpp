#include <doctest.h>

#include "qvzne/coupling.hpp"
#include "qvzne/density_sim.hpp"
#include "qvzne/transpiler.hpp"

using namespace qvzne;

namespace {

Circuit routed_fixture(uint32_t n, uint64_t seed) {
    QvCircuit qv = generate_qv_circuit(n, seed);
    return route(qv, Layout::identity(CouplingGraph::all_to_all(n))).circuit;
}

}  // namespace

TEST_CASE("noiseless simulation reduces to the statevector") {
    Circuit c = routed_fixture(4, 10);
    DensityState state = simulate(c, NoiseModel::noiseless());
    state.validate(1e-9);
    const auto p = ideal_distribution(c);
    const auto d = state.diagonal();
    for (size_t x = 0; x < p.size(); ++x) CHECK(std::abs(d[x] - p[x]) < 1e-9);
    const VectorXcd psi = run_statevector(c);
    CHECK(fidelity_with_pure(state, psi) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("p2 = 1 fully depolarizes the pair") {
    Circuit c(2);
    c.push(Gate::cx(0, 1));
    NoiseModel noise;
    noise.p2 = 1.0;
    DensityState state = simulate(c, noise);
    const auto d = state.diagonal();
    for (double v : d) CHECK(v == doctest::Approx(0.25).epsilon(1e-10));
}

TEST_CASE("maximally mixed state gives exact heavy probability one half") {
    Circuit c(3);
    c.push(Gate::cx(0, 1));
    c.push(Gate::cx(1, 2));
    NoiseModel noise;
    noise.p2 = 1.0;
    // depolarizing both pairs of a GHZ-free circuit leaves near-uniform rho;
    // use a synthetic heavy set of exactly half the strings
    DensityState mixed;
    mixed.n = 3;
    mixed.rho = MatrixXcd::Identity(8, 8) / 8.0;
    HeavySet h;
    h.n = 3;
    h.members = {0, 2, 5, 7};
    CHECK(exact_heavy_prob(mixed, h, 0.0) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("trace is preserved across random noisy circuits") {
    NoiseModel noise;
    noise.p2 = 0.03;
    noise.p1 = 0.003;
    for (uint64_t seed = 0; seed < 20; ++seed) {
        Circuit c = routed_fixture(3, 600 + seed);
        DensityState state = simulate(c, noise);
        CHECK(std::abs(state.rho.trace().real() - 1.0) < 1e-10);
        CHECK(std::abs(state.rho.trace().imag()) < 1e-12);
        state.validate(1e-8);
    }
}

TEST_CASE("simulation composes over concatenation") {
    NoiseModel noise;
    noise.p2 = 0.05;
    noise.p1 = 0.004;
    Circuit c1 = routed_fixture(3, 71);
    Circuit c2 = routed_fixture(3, 72);
    Circuit cat(3);
    cat.gates = c1.gates;
    cat.gates.insert(cat.gates.end(), c2.gates.begin(), c2.gates.end());

    DensityState full = simulate(cat, noise);
    DensityState staged = simulate(c2, noise, simulate(c1, noise));
    CHECK((full.rho - staged.rho).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("exact heavy probability is non-increasing in p2") {
    QvCircuit qv = generate_qv_circuit(4, 88);
    HeavySet h = heavy_set(ideal_distribution(qv));
    Circuit c = route(qv, Layout::identity(CouplingGraph::all_to_all(4))).circuit;
    // identity wire map on all-to-all
    double last = 1.0;
    for (double p2 : {0.0, 0.002, 0.01, 0.05}) {
        NoiseModel noise;
        noise.p2 = p2;
        noise.p1 = p2 / 10;
        const double hop = exact_heavy_prob(simulate(c, noise), h, 0.0);
        CHECK(hop <= last + 1e-6);
        last = hop;
    }
}

TEST_CASE("sampling matches the exact distribution at 3 sigma") {
    QvCircuit qv = generate_qv_circuit(3, 99);
    HeavySet h = heavy_set(ideal_distribution(qv));
    Circuit c = route(qv, Layout::identity(CouplingGraph::all_to_all(3))).circuit;
    NoiseModel noise;
    noise.p2 = 0.02;
    noise.p1 = 0.002;
    DensityState state = simulate(c, noise);
    const double exact = exact_heavy_prob(state, h, 0.0);

    Rng rng(12345);
    const uint64_t shots = 1000000;
    auto counts = sample_counts(state, shots, 0.0, rng);
    uint64_t total = 0, hits = 0;
    for (const auto &[bits, n] : counts) {
        total += n;
        if (h.members.count(index_of_bitstring(bits))) hits += n;
    }
    CHECK(total == shots);
    const double est = static_cast<double>(hits) / shots;
    const double sigma = std::sqrt(exact * (1 - exact) / shots);
    CHECK(std::abs(est - exact) < 3 * sigma + 1e-9);
}

TEST_CASE("pure |00> with no readout error lands every shot on 00") {
    Circuit c(2);
    DensityState state = simulate(c, NoiseModel::noiseless());
    Rng rng(1);
    auto counts = sample_counts(state, 500, 0.0, rng);
    REQUIRE(counts.size() == 1);
    CHECK(counts.at("00") == 500);
}

TEST_CASE("readout flip of one half gives the uniform distribution") {
    Circuit c(2);
    DensityState state = simulate(c, NoiseModel::noiseless());
    Rng rng(2);
    const uint64_t shots = 100000;
    auto counts = sample_counts(state, shots, 0.5, rng);
    for (const auto &[bits, n] : counts) {
        const double freq = static_cast<double>(n) / shots;
        CHECK(std::abs(freq - 0.25) < 0.01);
    }
}

TEST_CASE("counts always sum to shots") {
    Circuit c = routed_fixture(3, 5);
    NoiseModel noise;
    noise.p2 = 0.1;
    DensityState state = simulate(c, noise);
    Rng rng(3);
    for (uint64_t shots : {1ull, 17ull, 1000ull}) {
        auto counts = sample_counts(state, shots, 0.05, rng);
        uint64_t total = 0;
        for (const auto &[bits, n] : counts) total += n;
        CHECK(total == shots);
    }
}

TEST_CASE("exact heavy probability matches sampled frequency with readout error") {
    QvCircuit qv = generate_qv_circuit(3, 7);
    HeavySet h = heavy_set(ideal_distribution(qv));
    Circuit c = route(qv, Layout::identity(CouplingGraph::all_to_all(3))).circuit;
    NoiseModel noise;
    noise.p2 = 0.01;
    noise.readout_flip = 0.03;
    DensityState state = simulate(c, noise);
    const double exact = exact_heavy_prob(state, h, noise.readout_flip);
    Rng rng(77);
    auto counts = sample_counts(state, 200000, noise.readout_flip, rng);
    uint64_t hits = 0;
    for (const auto &[bits, n] : counts) {
        if (h.members.count(index_of_bitstring(bits))) hits += n;
    }
    const double est = hits / 200000.0;
    CHECK(std::abs(est - exact) < 3 * std::sqrt(exact * (1 - exact) / 200000.0) + 1e-9);
}

TEST_CASE("memory guard rejects n > 10") {
    Circuit big(11);
    CHECK_THROWS_AS(simulate(big, NoiseModel::noiseless()), std::invalid_argument);
}

TEST_CASE("idle drift requires a schedule") {
    Circuit c(2);
    NoiseModel noise;
    noise.idle_z_rate = 0.1;
    CHECK_THROWS_AS(simulate(c, noise), std::invalid_argument);
}

TEST_CASE("noise model validation") {
    NoiseModel bad;
    bad.p2 = 1.5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = NoiseModel{};
    bad.readout_flip = 0.6;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("bitstring conventions put qubit 0 rightmost") {
    CHECK(bitstring_of(1, 3) == "001");
    CHECK(bitstring_of(4, 3) == "100");
    CHECK(index_of_bitstring("001") == 1);
    CHECK(index_of_bitstring("100") == 4);
    CHECK_THROWS_AS(index_of_bitstring("10x"), std::invalid_argument);
}

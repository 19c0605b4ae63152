#include <doctest.h>

#include "qvzne/circuit.hpp"
#include "qvzne/qv.hpp"
#include "qvzne/unitary.hpp"

using namespace qvzne;

namespace {

Circuit random_native_circuit(uint32_t n, size_t len, Rng &rng) {
    Circuit c(n);
    std::uniform_int_distribution<int> kind(0, 3);
    std::uniform_int_distribution<uint32_t> qubit(0, n - 1);
    std::uniform_real_distribution<double> angle(-3.0, 3.0);
    for (size_t i = 0; i < len; ++i) {
        switch (kind(rng)) {
            case 0: c.push(Gate::x(qubit(rng))); break;
            case 1: c.push(Gate::sx(qubit(rng))); break;
            case 2: c.push(Gate::rz(angle(rng), qubit(rng))); break;
            default: {
                uint32_t a = qubit(rng), b = qubit(rng);
                if (a == b) b = (a + 1) % n;
                c.push(Gate::cx(a, b));
            }
        }
    }
    return c;
}

}  // namespace

TEST_CASE("compose_unitary identity on empty circuit") {
    Circuit c(2);
    MatrixXcd u = compose_unitary(c);
    CHECK((u - MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("compose_unitary single X") {
    Circuit c(1);
    c.push(Gate::x(0));
    MatrixXcd u = compose_unitary(c);
    CHECK(std::abs(u(0, 1) - 1.0) < 1e-15);
    CHECK(std::abs(u(1, 0) - 1.0) < 1e-15);
    CHECK(std::abs(u(0, 0)) < 1e-15);
}

TEST_CASE("compose_unitary CX self-inverse") {
    Circuit c(2);
    c.push(Gate::cx(0, 1));
    c.push(Gate::cx(0, 1));
    MatrixXcd u = compose_unitary(c);
    CHECK((u - MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("compose_unitary rejects measurements and oversized circuits") {
    Circuit c(1);
    c.push(Gate::measure(0, 0));
    CHECK_THROWS_AS(compose_unitary(c), std::invalid_argument);
    Circuit big(13);
    CHECK_THROWS_AS(compose_unitary(big), std::invalid_argument);
}

TEST_CASE("compose_unitary is multiplicative over concatenation") {
    Rng rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        Circuit c1 = random_native_circuit(3, 8, rng);
        Circuit c2 = random_native_circuit(3, 8, rng);
        Circuit cat(3);
        cat.gates = c1.gates;
        cat.gates.insert(cat.gates.end(), c2.gates.begin(), c2.gates.end());
        MatrixXcd lhs = compose_unitary(cat);
        MatrixXcd rhs = compose_unitary(c2) * compose_unitary(c1);
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("gate invariants") {
    CHECK_THROWS_AS(Gate::cx(1, 1).validate(), std::invalid_argument);
    CHECK_THROWS_AS(Gate::rz(std::nan(""), 0).validate(), std::invalid_argument);
    Matrix4cd not_unitary = Matrix4cd::Identity();
    not_unitary(0, 0) = 2.0;
    CHECK_THROWS_AS(Gate::su4_block(not_unitary, 0, 1).validate(), std::invalid_argument);
    Rng rng(5);
    CHECK_NOTHROW(Gate::su4_block(haar_random_su4(rng), 0, 1).validate());
}

TEST_CASE("circuit invariants") {
    Circuit c(2);
    c.push(Gate::x(5));
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);

    Circuit m(2);
    m.push(Gate::measure(0, 0));
    m.push(Gate::x(1));
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);

    Circuit marks(2);
    marks.push(Gate::x(0));
    marks.push(Gate::x(1));
    marks.layer_marks = {1};
    CHECK_THROWS_AS(marks.validate(), std::invalid_argument);
    marks.layer_marks = {1, 2};
    CHECK_NOTHROW(marks.validate());
}

TEST_CASE("gate_counts multiset") {
    Circuit empty(2);
    CHECK(gate_counts(empty).empty());

    Circuit c(3);
    c.push(Gate::cx(0, 1));
    c.push(Gate::cx(1, 2));
    c.push(Gate::cx(0, 2));
    c.push(Gate::sx(0));
    c.push(Gate::sx(1));
    auto counts = gate_counts(c);
    CHECK(counts[GateKind::CX] == 3);
    CHECK(counts[GateKind::SX] == 2);
    CHECK(counts.count(GateKind::X) == 0);
}

TEST_CASE("native_inverse inverts every native kind") {
    Rng rng(7);
    Circuit c = random_native_circuit(3, 20, rng);
    Circuit inv(3);
    for (size_t i = c.gates.size(); i-- > 0;) {
        for (Gate &g : native_inverse(c.gates[i])) inv.push(std::move(g));
    }
    Circuit cat(3);
    cat.gates = c.gates;
    cat.gates.insert(cat.gates.end(), inv.gates.begin(), inv.gates.end());
    MatrixXcd u = compose_unitary(cat);
    MatrixXcd eye = MatrixXcd::Identity(8, 8);
    CHECK(phase_aligned_distance(u, eye) < 1e-9);
}

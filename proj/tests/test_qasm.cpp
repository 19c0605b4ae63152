#include <doctest.h>

#include "qvzne/qasm.hpp"
#include "qvzne/qv.hpp"

using namespace qvzne;

namespace {

Circuit random_native_circuit(uint32_t n, size_t len, Rng &rng) {
    Circuit c(n);
    std::uniform_int_distribution<int> kind(0, 4);
    std::uniform_int_distribution<uint32_t> qubit(0, n - 1);
    std::uniform_real_distribution<double> angle(-6.0, 6.0);
    for (size_t i = 0; i < len; ++i) {
        switch (kind(rng)) {
            case 0: c.push(Gate::x(qubit(rng))); break;
            case 1: c.push(Gate::sx(qubit(rng))); break;
            case 2: c.push(Gate::rz(angle(rng), qubit(rng))); break;
            case 3: {
                uint32_t a = qubit(rng), b = qubit(rng);
                if (a == b) b = (a + 1) % n;
                c.push(Gate::cx(a, b));
                break;
            }
            default: c.push(Gate::barrier({qubit(rng)}));
        }
    }
    for (uint32_t q = 0; q < n; ++q) c.push(Gate::measure(q, q));
    return c;
}

}  // namespace

TEST_CASE("empty one-qubit circuit exports header and qreg only") {
    Circuit c(1);
    CHECK(qasm_export(c) == "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[1];\n");
}

TEST_CASE("rz(pi/2) prints symbolically and round-trips bit-exactly") {
    Circuit c(1);
    c.push(Gate::rz(M_PI / 2, 0));
    const std::string text = qasm_export(c);
    CHECK(text.find("rz(pi/2) q[0];") != std::string::npos);
    Circuit back = qasm_import(text);
    REQUIRE(back.gates.size() == 1);
    CHECK(back.gates[0].angle == M_PI / 2);

    Circuit d(1);
    d.push(Gate::rz(-3 * (M_PI / 4), 0));
    const std::string text2 = qasm_export(d);
    CHECK(text2.find("rz(-3*pi/4) q[0];") != std::string::npos);
    CHECK(qasm_import(text2).gates[0].angle == -3 * (M_PI / 4));
}

TEST_CASE("export/import round trip is gate-for-gate over random circuits") {
    Rng rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        Circuit c = random_native_circuit(2 + trial % 5, 30, rng);
        Circuit back = qasm_import(qasm_export(c));
        CHECK(back == c);
    }
}

TEST_CASE("layer directives survive the round trip") {
    Circuit c(2);
    c.push(Gate::x(0));
    c.mark_layer();
    c.push(Gate::cx(0, 1));
    c.push(Gate::sx(1));
    c.mark_layer();
    Circuit back = qasm_import(qasm_export(c));
    CHECK(back.layer_marks == c.layer_marks);
    CHECK(back == c);
}

TEST_CASE("emitted QASM parses under the module's own grammar") {
    Rng rng(23);
    Circuit c = random_native_circuit(4, 40, rng);
    const std::string once = qasm_export(c);
    const std::string twice = qasm_export(qasm_import(once));
    CHECK(once == twice);
}

TEST_CASE("unknown gate names are rejected with position") {
    const std::string doc =
        "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[2];\nh q[0];\n";
    try {
        qasm_import(doc);
        FAIL("expected parse error");
    } catch (const QasmParseError &e) {
        CHECK(std::string(e.what()).find("'h'") != std::string::npos);
        CHECK(e.line() == 4);
    }
}

TEST_CASE("qubit index out of declared range is rejected") {
    const std::string doc =
        "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[3];\ncx q[0],q[5];\n";
    try {
        qasm_import(doc);
        FAIL("expected parse error");
    } catch (const QasmParseError &e) {
        CHECK(std::string(e.what()).find("out of range") != std::string::npos);
    }
}

TEST_CASE("malformed angles are rejected") {
    const std::string doc =
        "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[1];\nrz(banana) q[0];\n";
    CHECK_THROWS_AS(qasm_import(doc), QasmParseError);
}

TEST_CASE("explicit identity gates are dropped on import") {
    const std::string doc =
        "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[1];\nid q[0];\nx q[0];\n";
    Circuit c = qasm_import(doc);
    REQUIRE(c.gates.size() == 1);
    CHECK(c.gates[0].kind == GateKind::X);
}

TEST_CASE("export rejects non-native gates") {
    Rng rng(3);
    Circuit c(2);
    c.push(Gate::su4_block(haar_random_su4(rng), 0, 1));
    CHECK_THROWS_AS(qasm_export(c), std::invalid_argument);
    Circuit s(2);
    s.push(Gate::swap(0, 1));
    CHECK_THROWS_AS(qasm_export(s), std::invalid_argument);
}

TEST_CASE("comments are skipped") {
    const std::string doc =
        "OPENQASM 2.0;\n// a comment\ninclude \"qelib1.inc\";\nqreg q[1];\n// another\nsx q[0];\n";
    Circuit c = qasm_import(doc);
    REQUIRE(c.gates.size() == 1);
    CHECK(c.gates[0].kind == GateKind::SX);
}

#include <doctest.h>

#include "qvzne/kak.hpp"
#include "qvzne/qv.hpp"

using namespace qvzne;

namespace {

MatrixXcd compose_gates(const std::vector<Gate> &gates, uint32_t n) {
    Circuit c(n);
    for (const Gate &g : gates) c.push(g);
    return compose_unitary(c);
}

size_t count_cx(const std::vector<Gate> &gates) {
    size_t k = 0;
    for (const Gate &g : gates) k += g.kind == GateKind::CX;
    return k;
}

}  // namespace

TEST_CASE("kak reconstructs random unitaries inside the Weyl chamber") {
    for (int i = 0; i < 100; ++i) {
        Rng rng(5000 + i);
        Matrix4cd m = haar_random_su4(rng);
        KakDecomposition k = kak_decompose(m);  // throws if reconstruction fails
        CHECK(k.x <= M_PI / 4 + 1e-9);
        CHECK(k.x >= k.y - 1e-9);
        CHECK(k.y >= std::abs(k.z) - 1e-9);
    }
}

TEST_CASE("kak rejects non-unitary input") {
    Matrix4cd m = Matrix4cd::Identity() * 1.5;
    CHECK_THROWS_AS(kak_decompose(m), std::invalid_argument);
}

TEST_CASE("canonical coordinates of named gates") {
    KakDecomposition id = kak_decompose(Matrix4cd::Identity());
    CHECK(std::abs(id.x) < 1e-9);
    CHECK(std::abs(id.y) < 1e-9);
    CHECK(std::abs(id.z) < 1e-9);

    KakDecomposition cx = kak_decompose(cx_matrix());
    CHECK(cx.x == doctest::Approx(M_PI / 4).epsilon(1e-9));
    CHECK(std::abs(cx.y) < 1e-9);
    CHECK(std::abs(cx.z) < 1e-9);

    KakDecomposition sw = kak_decompose(swap_matrix());
    CHECK(sw.x == doctest::Approx(M_PI / 4).epsilon(1e-9));
    CHECK(sw.y == doctest::Approx(M_PI / 4).epsilon(1e-9));
    CHECK(sw.z == doctest::Approx(M_PI / 4).epsilon(1e-9));
}

TEST_CASE("cx_cost classifies by Makhlin class") {
    CHECK(cx_cost(Matrix4cd::Identity()) == 0);
    CHECK(cx_cost(kron2(sx_matrix(), rz_matrix(0.7))) == 0);
    CHECK(cx_cost(cx_matrix()) == 1);
    CHECK(cx_cost(canonical_gate(0.3, 0.2, 0.0)) == 2);
    CHECK(cx_cost(swap_matrix()) == 3);
    Rng rng(77);
    CHECK(cx_cost(haar_random_su4(rng)) == 3);
}

TEST_CASE("decompose_su4 special cases") {
    // identity: no CX at all
    std::vector<Gate> id_seq = decompose_su4(Matrix4cd::Identity(), 0, 1);
    CHECK(count_cx(id_seq) == 0);

    // CX itself: exactly one CX after class detection
    std::vector<Gate> cx_seq = decompose_su4(cx_matrix(), 0, 1);
    CHECK(count_cx(cx_seq) == 1);
    MatrixXcd got = compose_gates(cx_seq, 2);
    MatrixXcd want = cx_matrix();
    CHECK(phase_aligned_distance(got, want) < 1e-9);
}

TEST_CASE("decompose_su4 handles 100 Haar-random unitaries at 3 CX") {
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        Rng rng(9100 + i);
        Matrix4cd m = haar_random_su4(rng);
        std::vector<Gate> seq = decompose_su4(m, 0, 1);
        CHECK(count_cx(seq) == 3);
        MatrixXcd got = compose_gates(seq, 2);
        MatrixXcd want = m;
        worst = std::max(worst, phase_aligned_distance(got, want));
    }
    CHECK(worst < 1e-7);
}

TEST_CASE("decompose_su4 fidelity property") {
    for (int i = 0; i < 20; ++i) {
        Rng rng(9600 + i);
        Matrix4cd m = haar_random_su4(rng);
        std::vector<Gate> seq = decompose_su4(m, 0, 1);
        Matrix4cd rebuilt = compose_gates(seq, 2);
        const double fidelity = std::abs((m.adjoint() * rebuilt).trace()) / 4.0;
        CHECK(fidelity > 1.0 - 1e-9);
    }
}

TEST_CASE("decompose_su4 respects wire assignment") {
    Rng rng(404);
    Matrix4cd m = haar_random_su4(rng);
    std::vector<Gate> seq = decompose_su4(m, 2, 0);
    for (const Gate &g : seq) {
        for (uint32_t q : g.qubits) CHECK((q == 2 || q == 0));
    }
    // embed reference on wires (2,0) of a 3-qubit register
    Circuit direct(3);
    direct.push(Gate::su4_block(m, 2, 0));
    MatrixXcd want = compose_unitary(direct);
    MatrixXcd got = compose_gates(seq, 3);
    CHECK(phase_aligned_distance(got, want) < 1e-7);
}

TEST_CASE("rebase_1q shortcuts") {
    CHECK(rebase_1q(Matrix2cd::Identity(), 0).empty());

    std::vector<Gate> xg = rebase_1q(x_matrix(), 0);
    REQUIRE(xg.size() == 1);
    CHECK(xg[0].kind == GateKind::X);

    std::vector<Gate> sxg = rebase_1q(sx_matrix(), 0);
    REQUIRE(sxg.size() == 1);
    CHECK(sxg[0].kind == GateKind::SX);

    std::vector<Gate> rzg = rebase_1q(rz_matrix(1.234), 0);
    REQUIRE(rzg.size() == 1);
    CHECK(rzg[0].kind == GateKind::RZ);
    CHECK(rzg[0].angle == doctest::Approx(1.234).epsilon(1e-12));
}

TEST_CASE("rebase_1q reproduces 100 random unitaries below 1e-9") {
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        Rng rng(700 + i);
        Matrix2cd u;
        {
            Matrix4cd m4 = haar_random_su4(rng);
            Eigen::HouseholderQR<Matrix2cd> qr(Matrix2cd(m4.block<2, 2>(0, 0)));
            u = qr.householderQ();
        }
        std::vector<Gate> seq = rebase_1q(u, 0);
        CHECK(seq.size() <= 5);
        MatrixXcd got = compose_gates(seq, 1);
        MatrixXcd want = u;
        worst = std::max(worst, phase_aligned_distance(got, want));
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("rebase_1q merges native runs") {
    std::vector<Gate> run = {Gate::rz(0.3, 2), Gate::sx(2), Gate::rz(-1.1, 2), Gate::x(2)};
    Matrix2cd want2 = Matrix2cd::Identity();
    for (const Gate &g : run) want2 = one_qubit_matrix(g) * want2;
    std::vector<Gate> merged = rebase_1q(run, 2);
    MatrixXcd got = compose_gates(merged, 3);
    Circuit ref(3);
    for (const Gate &g : run) ref.push(g);
    MatrixXcd want = compose_unitary(ref);
    CHECK(phase_aligned_distance(got, want) < 1e-9);
}

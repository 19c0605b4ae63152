#include "qvzne/kak.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

namespace qvzne {

namespace {

constexpr Complex kI{0.0, 1.0};
constexpr double kPi = M_PI;
constexpr double kQuarterPi = M_PI / 4;

Matrix2cd pauli_x() { return x_matrix(); }

Matrix2cd pauli_y() {
    Matrix2cd m;
    m << 0, -kI, kI, 0;
    return m;
}

Matrix2cd pauli_z() {
    Matrix2cd m;
    m << 1, 0, 0, -1;
    return m;
}

Matrix2cd rx_gate(double theta) {
    Matrix2cd m;
    const double c = std::cos(theta / 2), s = std::sin(theta / 2);
    m << c, -kI * s, -kI * s, c;
    return m;
}

Matrix2cd ry_gate(double theta) {
    Matrix2cd m;
    const double c = std::cos(theta / 2), s = std::sin(theta / 2);
    m << c, -s, s, c;
    return m;
}

// Magic (Bell) basis transform; conjugation maps SU(2)xSU(2) onto SO(4) and
// diagonalizes the canonical interaction.
const Matrix4cd &magic_basis() {
    static const Matrix4cd m = [] {
        const double s = 1.0 / std::sqrt(2.0);
        Matrix4cd v;
        v << s, 0, 0, s * kI,
             0, s * kI, s, 0,
             0, s * kI, -s, 0,
             s, 0, 0, -s * kI;
        return v;
    }();
    return m;
}

// CX matrix on two wires in either orientation; local bit 0 is wire 0.
Matrix4cd cx_on(int control, int target) {
    Matrix4cd m = Matrix4cd::Zero();
    for (int b = 0; b < 4; ++b) {
        const int c = (b >> control) & 1;
        const int out = c ? b ^ (1 << target) : b;
        m(out, b) = 1;
    }
    return m;
}

struct KakState {
    Complex phase;
    Matrix2cd a0, a1, b0, b1;
    std::array<double, 3> c;  // interaction coefficients for XX, YY, ZZ
};

const std::array<Matrix2cd, 3> &pauli_by_axis() {
    static const std::array<Matrix2cd, 3> p = {pauli_x(), pauli_y(), pauli_z()};
    return p;
}

// N(c) = N(c - pi/2 on axis k) * (i * P_k x P_k); absorbs the Pauli pair into
// the b side and i into the phase.
void shift_down(KakState &s, int k) {
    const Matrix2cd &p = pauli_by_axis()[k];
    s.c[k] -= kPi / 2;
    s.phase *= kI;
    s.b0 = p * s.b0;
    s.b1 = p * s.b1;
}

void shift_up(KakState &s, int k) {
    const Matrix2cd &p = pauli_by_axis()[k];
    s.c[k] += kPi / 2;
    s.phase *= -kI;
    s.b0 = p * s.b0;
    s.b1 = p * s.b1;
}

// Conjugating both qubits by (P_j + P_k)/sqrt(2) exchanges axes j and k.
void swap_axes(KakState &s, int j, int k) {
    const Matrix2cd c = ((pauli_by_axis()[j] + pauli_by_axis()[k]) / std::sqrt(2.0)).eval();
    std::swap(s.c[j], s.c[k]);
    s.a0 = s.a0 * c;
    s.a1 = s.a1 * c;
    s.b0 = c * s.b0;
    s.b1 = c * s.b1;
}

// Conjugating qubit 0 by the remaining Pauli negates axes j and k.
void negate_axes(KakState &s, int j, int k) {
    const int other = 3 - j - k;
    const Matrix2cd &p = pauli_by_axis()[other];
    s.c[j] = -s.c[j];
    s.c[k] = -s.c[k];
    s.a0 = s.a0 * p;
    s.b0 = p * s.b0;
}

void canonicalize(KakState &s) {
    constexpr double tol = 1e-12;
    for (int iter = 0; iter < 24; ++iter) {
        for (int k = 0; k < 3; ++k) {
            while (s.c[k] > kQuarterPi + tol) shift_down(s, k);
            while (s.c[k] < -kQuarterPi - tol) shift_up(s, k);
        }
        // sort by |value| descending
        if (std::abs(s.c[0]) < std::abs(s.c[1])) swap_axes(s, 0, 1);
        if (std::abs(s.c[1]) < std::abs(s.c[2])) swap_axes(s, 1, 2);
        if (std::abs(s.c[0]) < std::abs(s.c[1])) swap_axes(s, 0, 1);
        if (s.c[0] < -tol) negate_axes(s, 0, 1);
        if (s.c[1] < -tol) negate_axes(s, 1, 2);
        const bool x_at_corner = s.c[0] > kQuarterPi - 1e-9;
        if (x_at_corner && s.c[2] < -tol) {
            // identification (pi/4, y, z) ~ (pi/4, y, -z)
            shift_down(s, 0);
            negate_axes(s, 0, 2);
            continue;
        }
        const bool in_chamber = s.c[0] <= kQuarterPi + 1e-9 && s.c[0] >= s.c[1] - tol &&
                                s.c[1] >= std::abs(s.c[2]) - tol && s.c[1] >= -tol;
        if (in_chamber) return;
    }
    throw std::runtime_error("kak canonicalization did not converge");
}

// Splits k = kron2(hi, lo) up to phase via the rank-one rearrangement.
void factor_kron(const Matrix4cd &k, Matrix2cd &hi, Matrix2cd &lo) {
    Eigen::Matrix4cd r;
    for (int hr = 0; hr < 2; ++hr)
        for (int hc = 0; hc < 2; ++hc)
            for (int lr = 0; lr < 2; ++lr)
                for (int lc = 0; lc < 2; ++lc)
                    r(hr * 2 + hc, lr * 2 + lc) = k(hr * 2 + lr, hc * 2 + lc);
    Eigen::JacobiSVD<Matrix4cd> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const double scale = std::sqrt(svd.singularValues()(0));
    Eigen::Vector4cd u = svd.matrixU().col(0) * scale;
    Eigen::Vector4cd v = svd.matrixV().col(0).conjugate() * scale;
    hi << u(0), u(1), u(2), u(3);
    lo << v(0), v(1), v(2), v(3);
    // fix the split phase so each factor is special unitary
    Complex dh = hi.determinant();
    Complex dl = lo.determinant();
    hi /= std::sqrt(dh);
    lo /= std::sqrt(dl);
}

double unitary_deviation(const Matrix4cd &m) {
    return ((m.adjoint() * m) - Matrix4cd::Identity()).cwiseAbs().maxCoeff();
}

}  // namespace

Matrix4cd kron2(const Matrix2cd &hi, const Matrix2cd &lo) {
    Matrix4cd out;
    for (int hr = 0; hr < 2; ++hr)
        for (int hc = 0; hc < 2; ++hc)
            out.block<2, 2>(hr * 2, hc * 2) = hi(hr, hc) * lo;
    return out;
}

Matrix4cd canonical_gate(double x, double y, double z) {
    const Matrix4cd xx = kron2(pauli_x(), pauli_x());
    const Matrix4cd yy = kron2(pauli_y(), pauli_y());
    const Matrix4cd zz = kron2(pauli_z(), pauli_z());
    auto rot = [](const Matrix4cd &p, double t) -> Matrix4cd {
        return std::cos(t) * Matrix4cd::Identity() + kI * std::sin(t) * p;
    };
    return rot(xx, x) * rot(yy, y) * rot(zz, z);
}

KakDecomposition kak_decompose(const Matrix4cd &m) {
    const double deviation = unitary_deviation(m);
    if (deviation > 1e-8) {
        throw std::invalid_argument("kak_decompose: matrix is not unitary to 1e-8");
    }
    Matrix4cd mu = m;
    if (deviation > 1e-12) {
        // project onto the unitary group so the phase algebra below is exact
        Eigen::JacobiSVD<Matrix4cd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
        mu = svd.matrixU() * svd.matrixV().adjoint();
    }
    // Normalize to SU(4).
    const Complex det = mu.determinant();
    const Complex alpha = std::pow(det, 0.25);
    const Matrix4cd u = mu / alpha;

    const Matrix4cd &mb = magic_basis();
    const Matrix4cd up = mb.adjoint() * u * mb;
    const Matrix4cd q = up.transpose() * up;

    // Q is unitary symmetric; Re(Q) and Im(Q) are commuting real symmetric
    // matrices, diagonalized by a common real orthogonal P.
    const Eigen::Matrix4d qr = q.real();
    const Eigen::Matrix4d qi = q.imag();
    Eigen::Matrix4d p;
    bool ok = false;
    double mix = 0.7688823481;
    for (int attempt = 0; attempt < 8 && !ok; ++attempt) {
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(qr * std::cos(mix) + qi * std::sin(mix));
        p = es.eigenvectors();
        Eigen::Matrix4cd check = p.transpose() * q * p;
        check.diagonal().setZero();
        ok = check.cwiseAbs().maxCoeff() < 1e-9;
        mix += 0.9157331233;
    }
    if (!ok) throw std::runtime_error("kak_decompose: failed to diagonalize the magic product");

    std::array<double, 4> theta;
    {
        const Eigen::Vector4cd d2 = (p.transpose() * q * p).diagonal();
        for (int i = 0; i < 4; ++i) theta[i] = 0.5 * std::arg(d2(i));
    }

    // The eigenvector order and the sqrt branches are arbitrary; search for
    // the assignment under which D matches the canonical relation, whose
    // magic-basis position order is
    //   theta = (x-y+z, x+y-z, -x-y-z, -x+y+z).
    // Branch flips add pi to individual entries; the relation forces the sum
    // to vanish mod 2pi, so only consistent combinations survive. The columns
    // of P are then reordered to put each phase at its canonical position.
    KakState s;
    bool assigned = false;
    std::array<int, 4> order{};
    for (int flips = 0; flips < 16 && !assigned; ++flips) {
        std::array<double, 4> t;
        for (int j = 0; j < 4; ++j) t[j] = theta[j] + (((flips >> j) & 1) ? kPi : 0.0);
        if (std::abs(std::remainder(t[0] + t[1] + t[2] + t[3], 2 * kPi)) > 1e-6) continue;
        std::array<int, 4> idx = {0, 1, 2, 3};
        do {
            const double x = 0.5 * (t[idx[0]] + t[idx[1]]);
            const double y = 0.5 * (t[idx[1]] + t[idx[2]]);
            const double z = 0.5 * (t[idx[0]] + t[idx[2]]);
            if (std::abs(std::remainder(t[idx[3]] + x + y + z, 2 * kPi)) < 1e-9) {
                theta = t;
                s.c = {x, y, z};
                order = {idx[0], idx[1], idx[3], idx[2]};
                assigned = true;
                break;
            }
        } while (std::next_permutation(idx.begin(), idx.end()));
    }
    if (!assigned) throw std::runtime_error("kak_decompose: no consistent phase assignment");

    Eigen::Matrix4d p_ordered;
    std::array<double, 4> theta_ordered;
    for (int j = 0; j < 4; ++j) {
        p_ordered.col(j) = p.col(order[j]);
        theta_ordered[j] = theta[order[j]];
    }
    // det(D) = 1 by the relation, so flipping one column of P flips both
    // det(P) and det(O1), landing both orthogonal factors in SO(4).
    if (p_ordered.determinant() < 0) p_ordered.col(0) = -p_ordered.col(0);
    p = p_ordered;
    theta = theta_ordered;

    Eigen::Vector4cd dinv;
    for (int i = 0; i < 4; ++i) dinv(i) = std::exp(-kI * theta[i]);
    const Matrix4cd o1c = up * p.cast<Complex>() * dinv.asDiagonal();
    if (o1c.imag().cwiseAbs().maxCoeff() > 1e-7) {
        throw std::runtime_error("kak_decompose: left orthogonal factor is not real");
    }

    const Matrix4cd a_full = mb * o1c * mb.adjoint();
    const Matrix4cd b_full = mb * p.transpose().cast<Complex>().eval() * mb.adjoint();
    factor_kron(a_full, s.a1, s.a0);
    factor_kron(b_full, s.b1, s.b0);
    s.phase = 1.0;

    canonicalize(s);

    KakDecomposition out;
    out.a0 = s.a0;
    out.a1 = s.a1;
    out.b0 = s.b0;
    out.b1 = s.b1;
    out.x = s.c[0];
    out.y = s.c[1];
    out.z = s.c[2];

    // Recover the exact global phase from the reconstruction.
    const Matrix4cd candidate =
        kron2(out.a1, out.a0) * canonical_gate(out.x, out.y, out.z) * kron2(out.b1, out.b0);
    Eigen::Index r, c;
    candidate.cwiseAbs().maxCoeff(&r, &c);
    out.phase = mu(r, c) / candidate(r, c);
    out.phase /= std::abs(out.phase);
    if ((mu - out.phase * candidate).cwiseAbs().maxCoeff() > 1e-9) {
        throw std::runtime_error("kak_decompose: reconstruction check failed");
    }
    return out;
}

int cx_cost(const Matrix4cd &m, double tol) {
    const KakDecomposition k = kak_decompose(m);
    if (k.x < tol && k.y < tol && std::abs(k.z) < tol) return 0;
    if (std::abs(k.x - kQuarterPi) < tol && k.y < tol && std::abs(k.z) < tol) return 1;
    if (std::abs(k.z) < tol) return 2;
    return 3;
}

namespace {

// One entry of a two-wire template: either a CX or a 1q matrix slot.
struct TemplateOp {
    bool is_cx;
    int control = 0, target = 0;
    int wire = 0;
    Matrix2cd u;
};

Matrix4cd compose_template(const std::vector<TemplateOp> &ops) {
    Matrix4cd m = Matrix4cd::Identity();
    for (const TemplateOp &op : ops) {
        if (op.is_cx) {
            m = cx_on(op.control, op.target) * m;
        } else {
            m = (op.wire == 1 ? kron2(op.u, Matrix2cd::Identity())
                              : kron2(Matrix2cd::Identity(), op.u)) *
                m;
        }
    }
    return m;
}

TemplateOp cx_op(int control, int target) {
    TemplateOp op;
    op.is_cx = true;
    op.control = control;
    op.target = target;
    return op;
}

TemplateOp slot(int wire, const Matrix2cd &u) {
    TemplateOp op;
    op.is_cx = false;
    op.wire = wire;
    op.u = u;
    return op;
}

// Interaction templates for the 0/1/2-CX classes. Each realizes a circuit
// whose canonical coordinates equal the requested chamber point; outer locals
// are stitched on afterwards from the two decompositions.
std::vector<TemplateOp> interaction_template(const KakDecomposition &k, int cost) {
    switch (cost) {
        case 0: return {};
        case 1: return {cx_op(0, 1)};
        default:
            // CX01 . exp(i x X0) exp(i y Z1) . CX01 = exp(i x XX + i y ZZ)
            return {cx_op(0, 1), slot(0, rx_gate(-2 * k.x)), slot(1, rz_matrix(-2 * k.y)),
                    cx_op(0, 1)};
    }
}

// exp(i t P) for a Pauli product P.
Matrix4cd pauli_rotation(const Matrix4cd &p, double t) {
    return std::cos(t) * Matrix4cd::Identity() + kI * std::sin(t) * p;
}

}  // namespace

std::vector<Gate> rebase_1q(const Matrix2cd &u, uint32_t wire) {
    if (((u.adjoint() * u) - Matrix2cd::Identity()).cwiseAbs().maxCoeff() > 1e-8) {
        throw std::invalid_argument("rebase_1q: matrix is not unitary to 1e-8");
    }
    auto aligned = [&](const Matrix2cd &target) {
        MatrixXcd a = u, b = target;
        return phase_aligned_distance(a, b) < 1e-11;
    };
    if (aligned(Matrix2cd::Identity())) return {};
    if (aligned(x_matrix())) return {Gate::x(wire)};
    if (aligned(sx_matrix())) return {Gate::sx(wire)};
    if (std::abs(u(0, 1)) < 1e-11 && std::abs(u(1, 0)) < 1e-11) {
        const double delta = std::arg(u(1, 1) / u(0, 0));
        if (std::abs(delta) < 1e-11) return {};
        return {Gate::rz(delta, wire)};
    }

    // ZYZ Euler angles: u = e^{i phi} RZ(alpha) RY(theta) RZ(beta)
    const double theta = 2.0 * std::atan2(std::abs(u(1, 0)), std::abs(u(0, 0)));
    double sum, diff;  // sum = alpha + beta, diff = alpha - beta
    if (std::abs(u(0, 0)) < 1e-12) {
        sum = 0.0;
        diff = std::arg(u(1, 0)) - std::arg(-u(0, 1));
    } else if (std::abs(u(1, 0)) < 1e-12) {
        sum = std::arg(u(1, 1)) - std::arg(u(0, 0));
        diff = 0.0;
    } else {
        sum = std::arg(u(1, 1)) - std::arg(u(0, 0));
        diff = std::arg(u(1, 0)) - std::arg(-u(0, 1));
    }
    double alpha = 0.5 * (sum + diff);
    double beta = 0.5 * (sum - diff);

    // Halving sum and diff leaves a joint pi ambiguity; resolve it against
    // the matrix itself.
    auto zyz = [&](double a, double b) {
        return (rz_matrix(a) * ry_gate(theta) * rz_matrix(b)).eval();
    };
    {
        MatrixXcd cand = zyz(alpha, beta), want = u;
        if (phase_aligned_distance(cand, want) > 1e-10) {
            alpha += kPi;
            beta += kPi;
            MatrixXcd cand2 = zyz(alpha, beta);
            if (phase_aligned_distance(cand2, want) > 1e-10) {
                throw std::runtime_error("rebase_1q: euler extraction failed");
            }
        }
    }

    // RZ(alpha) RY(theta) RZ(beta) = i . RZ(alpha) SX RZ(pi - theta) SX RZ(beta + pi),
    // gates listed in application order.
    std::vector<Gate> out;
    auto push_rz = [&](double angle) {
        const double a = std::remainder(angle, 2 * kPi);
        if (std::abs(a) > 1e-12) out.push_back(Gate::rz(a, wire));
    };
    push_rz(beta + kPi);
    out.push_back(Gate::sx(wire));
    push_rz(kPi - theta);
    out.push_back(Gate::sx(wire));
    push_rz(alpha);
    return out;
}

std::vector<Gate> rebase_1q(const std::vector<Gate> &run, uint32_t wire) {
    Matrix2cd u = Matrix2cd::Identity();
    for (const Gate &g : run) u = one_qubit_matrix(g) * u;
    return rebase_1q(u, wire);
}

std::vector<Gate> decompose_su4(const Matrix4cd &m, uint32_t qa, uint32_t qb) {
    const KakDecomposition ku = kak_decompose(m);
    const int cost = cx_cost(m);

    if (cost == 3) {
        // Peel one CX off the interaction: with
        //   V = exp(i(x X0 + z Z1 - y X0.Z1))
        // the canonical gate factors as N(x,y,z) = CX01 . V . CX01, and
        // G = V . CX01 always sits in the 2-CX class, so
        //   m = phase . A . CX01 . G . B.
        const Matrix4cd x0 = kron2(Matrix2cd::Identity(), pauli_x());
        const Matrix4cd z1 = kron2(pauli_z(), Matrix2cd::Identity());
        const Matrix4cd x0z1 = kron2(pauli_z(), pauli_x());
        const Matrix4cd v = pauli_rotation(x0, ku.x) * pauli_rotation(z1, ku.z) *
                            pauli_rotation(x0z1, -ku.y);
        const Matrix4cd g = v * cx_on(0, 1);
        if (cx_cost(g) > 2) {
            throw std::runtime_error("decompose_su4: CX peel left a 3-CX remainder");
        }
        std::vector<Gate> gates;
        for (Gate &bg : rebase_1q(ku.b0, qa)) gates.push_back(std::move(bg));
        for (Gate &bg : rebase_1q(ku.b1, qb)) gates.push_back(std::move(bg));
        std::vector<Gate> inner = decompose_su4(g, qa, qb);
        gates.insert(gates.end(), std::make_move_iterator(inner.begin()),
                     std::make_move_iterator(inner.end()));
        gates.push_back(Gate::cx(qa, qb));
        for (Gate &ag : rebase_1q(ku.a0, qa)) gates.push_back(std::move(ag));
        for (Gate &ag : rebase_1q(ku.a1, qb)) gates.push_back(std::move(ag));
        return gates;
    }

    const std::vector<TemplateOp> body = interaction_template(ku, cost);
    Matrix2cd left0, left1, right0, right1;
    if (cost > 0) {
        const Matrix4cd rmat = compose_template(body);
        const KakDecomposition kr = kak_decompose(rmat);
        const double coord_gap = std::max({std::abs(kr.x - ku.x), std::abs(kr.y - ku.y),
                                           std::abs(kr.z - ku.z)});
        if (coord_gap > 1e-8) {
            throw std::runtime_error("decompose_su4: template misses the canonical class");
        }
        // m = (aU aR^+) R (bR^+ bU) up to phase
        left0 = ku.a0 * kr.a0.adjoint();
        left1 = ku.a1 * kr.a1.adjoint();
        right0 = kr.b0.adjoint() * ku.b0;
        right1 = kr.b1.adjoint() * ku.b1;
    } else {
        left0 = ku.a0 * ku.b0;
        left1 = ku.a1 * ku.b1;
        right0 = Matrix2cd::Identity();
        right1 = Matrix2cd::Identity();
    }

    const uint32_t wire_of[2] = {qa, qb};
    std::vector<Gate> gates;
    Matrix2cd pending[2] = {right0, right1};
    auto flush = [&](int w) {
        for (Gate &g : rebase_1q(pending[w], wire_of[w])) gates.push_back(std::move(g));
        pending[w] = Matrix2cd::Identity();
    };
    for (const TemplateOp &op : body) {
        if (op.is_cx) {
            flush(op.control);
            flush(op.target);
            gates.push_back(Gate::cx(wire_of[op.control], wire_of[op.target]));
        } else {
            pending[op.wire] = op.u * pending[op.wire];
        }
    }
    pending[0] = left0 * pending[0];
    pending[1] = left1 * pending[1];
    flush(0);
    flush(1);
    return gates;
}

}  // namespace qvzne

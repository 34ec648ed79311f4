#include "doctest.h"

#include "bellbound/qcore.hpp"
#include "bellbound/states.hpp"
#include "test_util.hpp"

using namespace bellbound;
using testutil::random_cmatrix;
using testutil::random_density;
using testutil::random_hermitian;

namespace {

CMatrix pauli_x() {
    CMatrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}
CMatrix pauli_z() {
    CMatrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

PureState singlet() {
    CVector v = CVector::Zero(4);
    v[1] = 1.0 / std::sqrt(2.0);
    v[2] = -1.0 / std::sqrt(2.0);
    return PureState(v, {2, 2});
}

} // namespace

TEST_CASE("kron basics") {
    CMatrix zz = kron(pauli_z(), pauli_z());
    CHECK(zz(0, 0).real() == doctest::Approx(1));
    CHECK(zz(1, 1).real() == doctest::Approx(-1));
    CHECK(zz(2, 2).real() == doctest::Approx(-1));
    CHECK(zz(3, 3).real() == doctest::Approx(1));
    CHECK(zz.cwiseAbs().sum() == doctest::Approx(4));

    std::mt19937_64 rng(7);
    CMatrix m = random_cmatrix(3, 3, rng);
    CMatrix im = kron(CMatrix::Identity(2, 2), m);
    CHECK((im.block(0, 0, 3, 3) - m).cwiseAbs().maxCoeff() == doctest::Approx(0));
    CHECK((im.block(3, 3, 3, 3) - m).cwiseAbs().maxCoeff() == doctest::Approx(0));
    CHECK(im.block(0, 3, 3, 3).cwiseAbs().maxCoeff() == doctest::Approx(0));
}

TEST_CASE("kron associativity against elementwise oracle") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 5; ++trial) {
        CMatrix a = random_cmatrix(2, 2, rng), b = random_cmatrix(2, 2, rng),
                c = random_cmatrix(2, 2, rng);
        CMatrix lhs = kron(kron(a, b), c);
        CMatrix rhs = kron(a, kron(b, c));
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-14);
        // direct index oracle
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 8; ++j) {
                Complex expect = a(i / 4, j / 4) * b((i / 2) % 2, (j / 2) % 2) *
                                 c(i % 2, j % 2);
                CHECK(std::abs(lhs(i, j) - expect) < 1e-14);
            }
    }
}

TEST_CASE("partial trace") {
    CMatrix rho = singlet().density().mat();
    CMatrix ra = partial_trace(rho, {2, 2}, Subsystem::A);
    CHECK((ra - 0.5 * CMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);

    std::mt19937_64 rng(3);
    CMatrix x = random_cmatrix(2, 2, rng), y = random_cmatrix(3, 3, rng);
    CMatrix tb = partial_trace(kron(x, y), {2, 3}, Subsystem::B);
    CHECK((tb - x * y.trace()).cwiseAbs().maxCoeff() < 1e-12);

    // trace preservation on random 6x6
    CMatrix m = random_cmatrix(6, 6, rng);
    CHECK(std::abs(partial_trace(m, {2, 3}, Subsystem::A).trace() - m.trace()) < 1e-12);
    CHECK(std::abs(partial_trace(m, {2, 3}, Subsystem::B).trace() - m.trace()) < 1e-12);

    CHECK_THROWS_AS(partial_trace(m, {2, 2}, Subsystem::A), invalid_argument);
}

TEST_CASE("partial transpose") {
    CMatrix rho = singlet().density().mat();
    CMatrix pt = partial_transpose(rho, {2, 2}, Subsystem::A);
    EigResult eig = herm_eig(pt);
    CHECK(eig.values.minCoeff() == doctest::Approx(-0.5));

    // separable diagonal product state stays PSD
    CMatrix d1 = CMatrix::Zero(2, 2), d2 = CMatrix::Zero(3, 3);
    d1.diagonal() << 0.25, 0.75;
    d2.diagonal() << 0.5, 0.3, 0.2;
    CMatrix sep = kron(d1, d2);
    CHECK(herm_eig(partial_transpose(sep, {2, 3}, Subsystem::B)).values.minCoeff() >=
          -1e-12);

    std::mt19937_64 rng(5);
    CMatrix m = random_cmatrix(6, 6, rng);
    for (Subsystem s : {Subsystem::A, Subsystem::B}) {
        CMatrix twice = partial_transpose(partial_transpose(m, {2, 3}, s), {2, 3}, s);
        CHECK((twice - m).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("herm_eig") {
    EigResult ex = herm_eig(pauli_x());
    CHECK(ex.values[0] == doctest::Approx(-1));
    CHECK(ex.values[1] == doctest::Approx(1));
    CHECK(std::abs(std::abs(ex.vectors(0, 0)) - 1 / std::sqrt(2.0)) < 1e-12);

    CHECK(herm_eig(CMatrix::Identity(5, 5)).values.isApproxToConstant(1.0));

    std::mt19937_64 rng(1);
    for (int d : {8, 64}) {
        CMatrix h = random_hermitian(d, rng);
        EigResult e = herm_eig(h);
        CMatrix rec = CMatrix::Zero(d, d);
        for (int k = 0; k < d; ++k)
            rec += e.values[k] * e.vectors.col(k) * e.vectors.col(k).adjoint();
        CHECK((rec - h).cwiseAbs().maxCoeff() < 1e-8);
        for (int k = 0; k < d; ++k)
            CHECK((h * e.vectors.col(k) - e.values[k] * e.vectors.col(k)).norm() < 1e-9);
    }
    CHECK_THROWS_AS(herm_eig(random_cmatrix(3, 3, rng)), invalid_argument);
}

TEST_CASE("singular values") {
    CMatrix d(2, 2);
    d << 3, 0, 0, -2;
    RVector sv = singular_values(d);
    CHECK(sv[0] == doctest::Approx(3));
    CHECK(sv[1] == doctest::Approx(2));

    // unitary: all ones
    CMatrix u(2, 2);
    u << Complex(0, 1) / std::sqrt(2.0), Complex(1, 0) / std::sqrt(2.0),
        Complex(-1, 0) / std::sqrt(2.0), Complex(0, -1) / std::sqrt(2.0);
    CHECK((singular_values(u) - RVector::Ones(2)).cwiseAbs().maxCoeff() < 1e-12);

    std::mt19937_64 rng(9);
    RMatrix m = RMatrix::Random(3, 3);
    RVector sv3 = singular_values(m.cast<Complex>());
    Eigen::SelfAdjointEigenSolver<RMatrix> es(m.transpose() * m);
    for (int k = 0; k < 3; ++k)
        CHECK(sv3[k] == doctest::Approx(std::sqrt(es.eigenvalues()[2 - k])).epsilon(1e-9));
}

TEST_CASE("trace norm") {
    CHECK(trace_norm(pauli_z()) == doctest::Approx(2));
    CHECK(trace_norm(CMatrix::Zero(3, 3)) == doctest::Approx(0));
    std::mt19937_64 rng(13);
    for (int t = 0; t < 10; ++t) {
        CMatrix a = random_hermitian(4, rng), b = random_hermitian(4, rng);
        CHECK(trace_norm(a + b) <= trace_norm(a) + trace_norm(b) + 1e-10);
    }
}

TEST_CASE("positive eigenspace projector") {
    CMatrix pz = positive_eigenspace_projector(pauli_z());
    CMatrix e00 = CMatrix::Zero(2, 2);
    e00(0, 0) = 1;
    CHECK((pz - e00).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(positive_eigenspace_projector(-CMatrix::Identity(3, 3)).cwiseAbs().maxCoeff() <
          1e-12);

    std::mt19937_64 rng(17);
    for (int t = 0; t < 8; ++t) {
        CMatrix h = random_hermitian(4, rng);
        CMatrix p = positive_eigenspace_projector(h);
        CHECK((p * p - p).cwiseAbs().maxCoeff() < 1e-8);
        CHECK((h * p - p * h).cwiseAbs().maxCoeff() < 1e-8);
        // subset-enumeration oracle: max tr(H P) over eigen-subset projectors
        EigResult e = herm_eig(h);
        double best = -1e300;
        for (int mask = 0; mask < 16; ++mask) {
            double v = 0;
            for (int k = 0; k < 4; ++k)
                if (mask & (1 << k)) v += e.values[k];
            best = std::max(best, v);
        }
        CHECK((h * p).trace().real() == doctest::Approx(best).epsilon(1e-9));
        // trace-norm identity
        CMatrix pm = CMatrix::Identity(4, 4) - p;
        CHECK(trace_norm(h) ==
              doctest::Approx((h * p).trace().real() - (h * pm).trace().real()));
    }
}

TEST_CASE("schmidt decomposition") {
    CVector v = CVector::Zero(4);
    v[0] = 2.0 / std::sqrt(5.0);
    v[3] = 1.0 / std::sqrt(5.0);
    SchmidtResult s = schmidt(PureState(v, {2, 2}));
    CHECK(s.coeffs[0] == doctest::Approx(2.0 / std::sqrt(5.0)));
    CHECK(s.coeffs[1] == doctest::Approx(1.0 / std::sqrt(5.0)));

    // product state: single coefficient 1
    CVector p = CVector::Zero(6);
    p[1] = 1.0;
    SchmidtResult sp = schmidt(PureState(p, {2, 3}));
    CHECK(sp.coeffs.size() == 1);
    CHECK(sp.coeffs[0] == doctest::Approx(1.0));

    // random two-qutrit: coeffs^2 = eigenvalues of reduced state; reconstruction
    std::mt19937_64 rng(23);
    PureState psi(testutil::random_pure(9, rng), {3, 3});
    SchmidtResult sr = schmidt(psi);
    CHECK(sr.coeffs.squaredNorm() == doctest::Approx(1.0));
    CMatrix red = partial_trace(psi.density().mat(), {3, 3}, Subsystem::B);
    RVector ev = herm_eig(red).values;
    for (int k = 0; k < 3; ++k)
        CHECK(sr.coeffs[k] * sr.coeffs[k] == doctest::Approx(ev[2 - k]).epsilon(1e-9));
    CVector rec = CVector::Zero(9);
    for (int k = 0; k < sr.coeffs.size(); ++k)
        rec += sr.coeffs[k] * kron(sr.basis_a.col(k), sr.basis_b.col(k)).col(0);
    // global phase may differ
    Complex ph = rec.dot(psi.amps()) / std::abs(rec.dot(psi.amps()));
    CHECK((rec * ph - psi.amps()).norm() < 1e-8);
}

TEST_CASE("hermitian basis") {
    HermitianBasis b2 = hermitian_basis(2);
    REQUIRE(b2.elems.size() == 4);
    const double r = 1.0 / std::sqrt(2.0);
    CHECK((b2.elems[0] - r * CMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((b2.elems[1] - r * pauli_x()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(std::abs(b2.elems[2](0, 1) - Complex(0, -r)) < 1e-14);
    CHECK((b2.elems[3] - r * pauli_z()).cwiseAbs().maxCoeff() < 1e-14);

    HermitianBasis b3 = hermitian_basis(3);
    REQUIRE(b3.elems.size() == 9);
    for (size_t i = 0; i < 9; ++i)
        for (size_t j = 0; j < 9; ++j) {
            double expect = i == j ? 1.0 : 0.0;
            CHECK(std::abs((b3.elems[i] * b3.elems[j]).trace().real() - expect) < 1e-10);
            CHECK(std::abs((b3.elems[i] * b3.elems[j]).trace().imag()) < 1e-10);
        }
    for (size_t i = 0; i < 9; ++i) {
        double expect = i == 0 ? std::sqrt(3.0) : 0.0;
        CHECK(std::abs(b3.elems[i].trace().real() - expect) < 1e-10);
    }

    // expansion-reconstruction oracle
    std::mt19937_64 rng(29);
    CMatrix h = random_hermitian(3, rng);
    CMatrix rec = CMatrix::Zero(3, 3);
    for (const auto& s : b3.elems) rec += (h * s).trace().real() * s;
    CHECK((rec - h).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("coherence decomposition") {
    // maximally mixed: everything vanishes
    DensityMatrix mm(CMatrix::Identity(4, 4) / 4.0, {2, 2});
    CoherenceDecomposition c = coherence_decomposition(mm);
    CHECK(c.r_a.cwiseAbs().maxCoeff() < 1e-12);
    CHECK(c.r_b.cwiseAbs().maxCoeff() < 1e-12);
    CHECK(c.Rp.cwiseAbs().maxCoeff() < 1e-12);

    // Werner / isotropic: vanishing coherence vectors
    for (const DensityMatrix& rho :
         {states::werner(3, 0.7), states::isotropic(3, 0.6)}) {
        CoherenceDecomposition cd = coherence_decomposition(rho);
        CHECK(cd.r_a.cwiseAbs().maxCoeff() < 1e-10);
        CHECK(cd.r_b.cwiseAbs().maxCoeff() < 1e-10);
    }

    // singlet: R' = -I/2, checked against the direct trace oracle
    CoherenceDecomposition cs = coherence_decomposition(singlet().density());
    CHECK((cs.Rp + 0.5 * RMatrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-10);
    HermitianBasis basis = hermitian_basis(2);
    CMatrix rho = singlet().density().mat();
    for (int i = 1; i < 4; ++i)
        for (int j = 1; j < 4; ++j)
            CHECK(cs.Rp(i - 1, j - 1) ==
                  doctest::Approx((rho * kron(basis.elems[i], basis.elems[j]))
                                      .trace()
                                      .real()));

    // reconstruction from the decomposition
    std::mt19937_64 rng(31);
    DensityMatrix rnd = random_density({2, 2}, rng);
    CoherenceDecomposition cr = coherence_decomposition(rnd);
    CMatrix rec = CMatrix::Identity(4, 4) / 4.0;
    for (int i = 1; i < 4; ++i) {
        rec += cr.r_a[i - 1] * kron(basis.elems[i], basis.elems[0]);
        rec += cr.r_b[i - 1] * kron(basis.elems[0], basis.elems[i]);
        for (int j = 1; j < 4; ++j)
            rec += cr.Rp(i - 1, j - 1) * kron(basis.elems[i], basis.elems[j]);
    }
    CHECK((rec - rnd.mat()).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("is_ppt") {
    CHECK_FALSE(is_ppt(singlet().density()));
    CMatrix d1 = CMatrix::Zero(2, 2), d2 = CMatrix::Zero(2, 2);
    d1(0, 0) = 1;
    d2(1, 1) = 1;
    CHECK(is_ppt(DensityMatrix(kron(d1, d2), {2, 2})));
}

TEST_CASE("density matrix invariants") {
    std::mt19937_64 rng(37);
    DensityMatrix rho = random_density({2, 3}, rng);
    CHECK(std::abs(rho.mat().trace().real() - 1.0) < 1e-12);

    CMatrix bad = CMatrix::Identity(4, 4); // trace 4
    CHECK_THROWS_AS(DensityMatrix(bad, {2, 2}), invalid_argument);
    CMatrix neg = CMatrix::Zero(2, 2);
    neg(0, 0) = 1.5;
    neg(1, 1) = -0.5;
    CHECK_THROWS_AS(DensityMatrix(neg, {1, 2}), invalid_argument);
    CHECK_THROWS_AS(DensityMatrix(CMatrix::Identity(4, 4) / 4.0, {2, 3}),
                    invalid_argument);
}

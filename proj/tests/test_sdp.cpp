#include "doctest.h"

#include "bellbound/sdp.hpp"
#include "test_util.hpp"

using namespace bellbound;
using namespace bellbound::sdp;

namespace {

CMatrix pauli(int k) {
    CMatrix m(2, 2);
    switch (k) {
        case 1: m << 0, 1, 1, 0; break;
        case 2: m << 0, Complex(0, -1), Complex(0, 1), 0; break;
        default: m << 1, 0, 0, -1; break;
    }
    return m;
}

} // namespace

TEST_CASE("real embedding") {
    RMatrix e = real_embedding(pauli(2));
    Eigen::SelfAdjointEigenSolver<RMatrix> es(e);
    CHECK(es.eigenvalues()[0] == doctest::Approx(-1));
    CHECK(es.eigenvalues()[1] == doctest::Approx(-1));
    CHECK(es.eigenvalues()[2] == doctest::Approx(1));
    CHECK(es.eigenvalues()[3] == doctest::Approx(1));

    // real input: block diagonal copy
    RMatrix h(2, 2);
    h << 2, 1, 1, -1;
    RMatrix eh = real_embedding(h.cast<Complex>());
    CHECK((eh.topLeftCorner(2, 2) - h).cwiseAbs().maxCoeff() == doctest::Approx(0));
    CHECK(eh.topRightCorner(2, 2).cwiseAbs().maxCoeff() == doctest::Approx(0));

    // PSD preserved in both directions on random samples
    std::mt19937_64 rng(3);
    for (int t = 0; t < 5; ++t) {
        CMatrix g = testutil::random_cmatrix(3, 3, rng);
        CMatrix psd = g * g.adjoint();
        RMatrix emb = real_embedding(psd);
        Eigen::SelfAdjointEigenSolver<RMatrix> ee(emb);
        CHECK(ee.eigenvalues().minCoeff() >= -1e-10);
        CMatrix back = real_unembedding(emb);
        CHECK((back - psd).cwiseAbs().maxCoeff() < 1e-12);
        // doubled spectrum
        EigResult orig = herm_eig(psd);
        for (int k = 0; k < 3; ++k) {
            CHECK(ee.eigenvalues()[2 * k] == doctest::Approx(orig.values[k]));
            CHECK(ee.eigenvalues()[2 * k + 1] == doctest::Approx(orig.values[k]));
        }
    }
}

TEST_CASE("standard form: smallest eigenvalue problems") {
    // maximize -tr(F0 Z), F0 = -sigma_z, tr Z = 1 -> largest eigenvalue of sigma_z
    SdpStandard p;
    p.f0 = -pauli(3);
    p.fs = {CMatrix::Identity(2, 2)};
    p.c = RVector::Ones(1);
    SdpSolution s = solve_standard(p);
    REQUIRE(s.optimal());
    CHECK(s.objective == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(s.Z(0, 0).real() == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(std::abs(s.Z.trace().real() - 1.0) < 1e-6);

    // max tr(B Z), tr Z = 1 equals lambda_max(B) for the CHSH operator at
    // the optimal angles (eigensolver oracle)
    const double r = 1.0 / std::sqrt(2.0);
    CMatrix a1 = pauli(3), a2 = pauli(1);
    CMatrix b1 = -r * (pauli(1) + pauli(3)), b2 = r * (pauli(1) - pauli(3));
    CMatrix bell = CMatrix::Zero(4, 4);
    bell += kron(a1, (b1 + b2).eval());
    bell += kron(a2, (b1 - b2).eval());
    SdpStandard q;
    q.f0 = -bell;
    q.fs = {CMatrix::Identity(4, 4)};
    q.c = RVector::Ones(1);
    SdpSolution sq = solve_standard(q);
    REQUIRE(sq.optimal());
    CHECK(sq.objective == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-7));
}

TEST_CASE("standard form: infeasible trace constraints") {
    SdpStandard p;
    p.f0 = CMatrix::Zero(2, 2);
    p.fs = {CMatrix::Identity(2, 2), CMatrix::Identity(2, 2)};
    p.c = RVector(2);
    p.c << 1.0, 2.0;
    SdpSolution s = solve_standard(p);
    CHECK(s.status == SdpStatus::Infeasible);
}

TEST_CASE("inequality form: spectral norm problems") {
    // minimize t s.t. t I - sigma_x >= 0  ->  t = 1
    SdpInequality p;
    p.c = RVector::Ones(1);
    p.g0 = -pauli(1);
    p.gs = {CMatrix::Identity(2, 2)};
    SdpSolution s = solve_inequality(p);
    REQUIRE(s.optimal());
    CHECK(s.objective == doctest::Approx(1.0).epsilon(1e-7));

    // random Hermitian: t* = lambda_max(H), eigensolver oracle
    std::mt19937_64 rng(7);
    for (int t = 0; t < 4; ++t) {
        CMatrix h = testutil::random_hermitian(6, rng);
        SdpInequality q;
        q.c = RVector::Ones(1);
        q.g0 = -h;
        q.gs = {CMatrix::Identity(6, 6)};
        SdpSolution sq = solve_inequality(q);
        REQUIRE(sq.optimal());
        CHECK(sq.objective ==
              doctest::Approx(herm_eig(h).values.maxCoeff()).epsilon(1e-7));
    }
}

TEST_CASE("weak duality holds near convergence") {
    std::mt19937_64 rng(11);
    CMatrix h = testutil::random_hermitian(5, rng);
    SdpStandard p;
    p.f0 = -h; // maximize tr(h Z)
    p.fs = {CMatrix::Identity(5, 5)};
    p.c = RVector::Ones(1);
    SdpSolution s = solve_standard(p);
    REQUIRE(s.optimal());
    for (const auto& rec : s.history)
        if (rec.primal_infeas < 1e-6 && rec.dual_infeas < 1e-6)
            CHECK(rec.dual_obj >= rec.primal_obj - 1e-6);
}

TEST_CASE("solver is deterministic") {
    std::mt19937_64 rng(13);
    CMatrix h = testutil::random_hermitian(4, rng);
    SdpInequality q;
    q.c = RVector::Ones(1);
    q.g0 = -h;
    q.gs = {CMatrix::Identity(4, 4)};
    SdpSolution s1 = solve_inequality(q);
    SdpSolution s2 = solve_inequality(q);
    CHECK(s1.objective == s2.objective);
    CHECK(s1.iterations == s2.iterations);
}

TEST_CASE("objective is stable under orthogonal reparameterization") {
    // maximize tr(H Z) s.t. constraints tr(F_i Z) = c_i; rotating the F_i span
    // (and c) by an orthogonal mix leaves the feasible set unchanged.
    std::mt19937_64 rng(17);
    CMatrix h = testutil::random_hermitian(4, rng);
    CMatrix f1 = CMatrix::Identity(4, 4);
    CMatrix f2 = testutil::random_hermitian(4, rng);
    SdpStandard p;
    p.f0 = -h;
    p.fs = {f1, f2};
    p.c = RVector(2);
    p.c << 1.0, 0.2;
    SdpSolution s = solve_standard(p);
    REQUIRE(s.optimal());

    const double th = 0.83;
    SdpStandard q;
    q.f0 = -h;
    q.fs = {std::cos(th) * f1 + std::sin(th) * f2,
            -std::sin(th) * f1 + std::cos(th) * f2};
    q.c = RVector(2);
    q.c << std::cos(th) * 1.0 + std::sin(th) * 0.2,
        -std::sin(th) * 1.0 + std::cos(th) * 0.2;
    SdpSolution sq = solve_standard(q);
    REQUIRE(sq.optimal());
    CHECK(std::abs(s.objective - sq.objective) <= 1e-7);
}

TEST_CASE("solution satisfies feasibility within tolerance") {
    std::mt19937_64 rng(19);
    CMatrix h = testutil::random_hermitian(4, rng);
    SdpStandard p;
    p.f0 = -h;
    p.fs = {CMatrix::Identity(4, 4), pauli(3).eval() * 0 + testutil::random_hermitian(4, rng)};
    p.c = RVector(2);
    p.c << 1.0, 0.1;
    SdpSolution s = solve_standard(p);
    if (s.optimal()) {
        CHECK(herm_eig(s.Z).values.minCoeff() >= -1e-7);
        CHECK(std::abs((p.fs[0] * s.Z).trace().real() - 1.0) < 1e-6);
        CHECK(std::abs((p.fs[1] * s.Z).trace().real() - 0.1) < 1e-6);
        CHECK(s.duality_gap <= 1e-7);
    }
}

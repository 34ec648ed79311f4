#include "doctest.h"

#include "bellbound/bell.hpp"
#include "bellbound/states.hpp"
#include "test_util.hpp"

using namespace bellbound;
using namespace bellbound::bell;

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

// +-1 observable along a Bloch direction.
CMatrix bloch_obs(double x, double y, double z) {
    return x * pauli(1) + y * pauli(2) + z * pauli(3);
}

MeasurementAssignment projective_from_obs(const std::vector<CMatrix>& alice,
                                          const std::vector<CMatrix>& bob) {
    MeasurementAssignment m;
    auto to_povm = [](const CMatrix& o) {
        const CMatrix id = CMatrix::Identity(o.rows(), o.cols());
        return std::vector<CMatrix>{0.5 * (id + o), 0.5 * (id - o)};
    };
    for (const auto& o : alice) m.alice.push_back(to_povm(o));
    for (const auto& o : bob) m.bob.push_back(to_povm(o));
    return m;
}

DensityMatrix singlet() {
    CVector v = CVector::Zero(4);
    v[1] = 1.0 / std::sqrt(2.0);
    v[2] = -1.0 / std::sqrt(2.0);
    return PureState(v, {2, 2}).density();
}

} // namespace

TEST_CASE("classical bounds of the named inequalities") {
    CHECK(classical_bound(ch()) == doctest::Approx(0.0));
    CHECK(classical_bound(i3322()) == doctest::Approx(0.0));
    CHECK(classical_bound(i4422_1()) == doctest::Approx(0.0));
    CHECK(classical_bound(i4422_3()) == doctest::Approx(0.0));
    // The printed I^(2) and A5 coefficient tables enumerate to 2 and 1, not
    // the displayed 0; the cached bound is the enumerated truth.
    CHECK(classical_bound(i4422_2()) == doctest::Approx(2.0));
    CHECK(classical_bound(i4422_a5()) == doctest::Approx(1.0));
    CHECK(i4422_2().beta_lhv == doctest::Approx(2.0));
    CHECK(i4422_a5().beta_lhv == doctest::Approx(1.0));
    CHECK(classical_bound(i22nn(3)) == doctest::Approx(0.0));
    CHECK(classical_bound(i22nn(4)) == doctest::Approx(0.0));
    CHECK(classical_bound(cglmp(3)) == doctest::Approx(2.0));
    CHECK(classical_bound(cglmp(4)) == doctest::Approx(2.0));
    CHECK(chsh().beta_lhv == doctest::Approx(2.0));
    CHECK(as4().beta_lhv == doctest::Approx(6.0));
    CHECK(d4().beta_lhv == doctest::Approx(10.0));
    CHECK(i3322_corr().beta_lhv == doctest::Approx(4.0));
    CHECK(mermin(2).beta_lhv == doctest::Approx(1.0));
    CHECK(mermin(3).beta_lhv == doctest::Approx(1.0));
    CHECK(mermin(4).beta_lhv == doctest::Approx(1.0));
    // enumeration oracle over 2^6 strategies for imm22(3)
    CHECK(classical_bound(imm22(3)) == doctest::Approx(0.0));
    CHECK(classical_bound(imm22(5)) == doctest::Approx(0.0));
}

TEST_CASE("every deterministic strategy respects the bound, one attains it") {
    for (const BellInequality& q : {ch(), i3322(), i22nn(3)}) {
        double best = -1e300;
        std::vector<int> a(q.sc.m_a), b(q.sc.m_b);
        const int na = q.sc.n_a, nb = q.sc.n_b;
        int total_a = 1, total_b = 1;
        for (int i = 0; i < q.sc.m_a; ++i) total_a *= na;
        for (int i = 0; i < q.sc.m_b; ++i) total_b *= nb;
        for (int ia = 0; ia < total_a; ++ia) {
            int r = ia;
            for (int i = 0; i < q.sc.m_a; ++i) { a[i] = r % na; r /= na; }
            for (int ib = 0; ib < total_b; ++ib) {
                r = ib;
                for (int i = 0; i < q.sc.m_b; ++i) { b[i] = r % nb; r /= nb; }
                const double v = evaluate(q, {a, b});
                CHECK(v <= q.beta_lhv + 1e-12);
                best = std::max(best, v);
            }
        }
        CHECK(best == doctest::Approx(q.beta_lhv));
    }
}

TEST_CASE("mermin(2) is half the CHSH form") {
    MultipartiteCorrelation m2 = mermin(2);
    REQUIRE(m2.coeff.size() == 4);
    CHECK(m2.coeff[0] == doctest::Approx(0.5));  // s = (1,1)
    CHECK(m2.coeff[1] == doctest::Approx(0.5));  // s = (1,2)
    CHECK(m2.coeff[2] == doctest::Approx(0.5));  // s = (2,1)
    CHECK(m2.coeff[3] == doctest::Approx(-0.5)); // s = (2,2)
}

TEST_CASE("relabeling preserves the classical bound") {
    BellInequality q = ch();
    BellInequality t = relabel(q, SwapParties{});
    CHECK(classical_bound(t) == doctest::Approx(q.beta_lhv));

    // an 8-member equivalence class: setting swaps x outcome swaps
    std::vector<BellInequality> cls;
    for (int ssw = 0; ssw < 2; ++ssw)
        for (int oa = 0; oa < 2; ++oa)
            for (int ob = 0; ob < 2; ++ob) {
                std::vector<RelabelOp> ops;
                if (ssw) ops.push_back(PermuteSettings{Subsystem::A, {1, 0}});
                if (oa) ops.push_back(PermuteOutcomes{Subsystem::A, 0, {1, 0}});
                if (ob) ops.push_back(PermuteOutcomes{Subsystem::B, 1, {1, 0}});
                cls.push_back(relabel(q, ops));
            }
    CHECK(cls.size() == 8);
    for (const auto& c : cls) CHECK(classical_bound(c) == doctest::Approx(0.0));

    // invertibility: permutation then its inverse restores coefficients exactly
    BellInequality fwd = relabel(q, PermuteOutcomes{Subsystem::B, 0, {1, 0}});
    BellInequality back = relabel(fwd, PermuteOutcomes{Subsystem::B, 0, {1, 0}});
    CHECK(back.joint == q.joint);
    CHECK(back.marg_a == q.marg_a);
    CHECK(back.marg_b == q.marg_b);
}

TEST_CASE("i22nn(3) carries the printed block pattern") {
    BellInequality q = i22nn(3);
    // M1 = [[1,1],[1,0]] in block (1,1); M2 = [[0,1],[1,1]] in blocks (1,2),(2,1)
    CHECK(q.j(0, 0, 0, 0) == 1);
    CHECK(q.j(0, 0, 0, 1) == 1);
    CHECK(q.j(0, 0, 1, 0) == 1);
    CHECK(q.j(0, 0, 1, 1) == 0);
    CHECK(q.j(0, 1, 0, 0) == 0);
    CHECK(q.j(0, 1, 0, 1) == 1);
    CHECK(q.j(0, 1, 1, 0) == 1);
    CHECK(q.j(0, 1, 1, 1) == 1);
    CHECK(q.j(1, 1, 0, 1) == -1);
    CHECK(q.ma(0, 0) == -1);
    CHECK(q.ma(0, 1) == -1);
    CHECK(q.mb(0, 0) == -1);
    // third-outcome coefficients stay explicit zeros
    CHECK(q.j(0, 0, 2, 0) == 0);
    CHECK(q.j(0, 0, 0, 2) == 0);
}

TEST_CASE("cglmp conversion onto i22nn") {
    for (int n : {2, 3, 4, 5}) {
        CglmpConversion conv = cglmp_to_i22nn(n);
        CHECK(conv.exact_match);
        CHECK(conv.scale == doctest::Approx(2.0 * n / (n - 1.0)));
        // transformed coefficients match scale * i22nn entrywise
        BellInequality target = i22nn(n);
        for (size_t i = 0; i < target.joint.size(); ++i)
            CHECK(conv.transformed.joint[i] ==
                  doctest::Approx(conv.scale * target.joint[i]));
    }
    // n=3: the chain passes through the printed intermediate with
    // [b'_{1,1}] = [[1,1,-2],[-1,2,-1],[0,0,0]] after Alice-outcome elimination
    BellInequality q = cglmp(3);
    q.b00 -= 2.0;
    for (int sa = 0; sa < 2; ++sa)
        for (int sb = 0; sb < 2; ++sb)
            for (int ob = 0; ob < 3; ++ob) {
                const double t = q.j(sa, sb, 2, ob);
                for (int oa = 0; oa < 3; ++oa) q.j(sa, sb, oa, ob) -= t;
                q.mb(sb, ob) += t;
            }
    CHECK(q.j(0, 0, 0, 0) == doctest::Approx(1));
    CHECK(q.j(0, 0, 0, 1) == doctest::Approx(1));
    CHECK(q.j(0, 0, 0, 2) == doctest::Approx(-2));
    CHECK(q.j(0, 0, 1, 0) == doctest::Approx(-1));
    CHECK(q.j(0, 0, 1, 1) == doctest::Approx(2));
    CHECK(q.j(0, 0, 1, 2) == doctest::Approx(-1));
    CHECK(q.j(0, 0, 2, 0) == doctest::Approx(0));
    // first marginal row of the printed intermediate: (-1, -1, 2)
    CHECK(q.mb(0, 0) == doctest::Approx(-1));
    CHECK(q.mb(0, 1) == doctest::Approx(-1));
    CHECK(q.mb(0, 2) == doctest::Approx(2));
}

TEST_CASE("bell operator reproduces the CH operator form") {
    // optimal singlet angles: a1 = z, a2 = x, b at -+45 degrees
    const double r = 1.0 / std::sqrt(2.0);
    std::vector<CMatrix> alice = {bloch_obs(0, 0, 1), bloch_obs(1, 0, 0)};
    std::vector<CMatrix> bob = {bloch_obs(-r, 0, -r), bloch_obs(r, 0, -r)};
    MeasurementAssignment meas = projective_from_obs(alice, bob);
    CMatrix b = bell_operator(ch(), meas);

    // B_CH = A1+ (x) (B2+ - B1-) - A2- (x) B1+ - A2+ (x) B2+
    auto plus = [](const CMatrix& o) {
        return (0.5 * (CMatrix::Identity(2, 2) + o)).eval();
    };
    auto minus = [](const CMatrix& o) {
        return (0.5 * (CMatrix::Identity(2, 2) - o)).eval();
    };
    CMatrix expect = kron(plus(alice[0]), (plus(bob[1]) - minus(bob[0])).eval()) -
                     kron(minus(alice[1]), plus(bob[0])) -
                     kron(plus(alice[1]), plus(bob[1]));
    CHECK((b - expect).cwiseAbs().maxCoeff() < 1e-12);

    // the singlet attains the maximal CH value 1/sqrt(2) - 1/2
    const double val = (singlet().mat() * b).trace().real();
    CHECK(val == doctest::Approx(1.0 / std::sqrt(2.0) - 0.5));
}

TEST_CASE("trivial measurements realize deterministic strategies") {
    BellInequality q = i3322();
    std::mt19937_64 rng(5);
    DensityMatrix rho = testutil::random_density({2, 2}, rng);
    DeterministicStrategy s{{0, 1, 0}, {1, 0, 0}};
    MeasurementAssignment meas;
    meas.alice.resize(3);
    meas.bob.resize(3);
    for (int sa = 0; sa < 3; ++sa)
        for (int oa = 0; oa < 2; ++oa)
            meas.alice[sa].push_back(oa == s.a[sa] ? CMatrix(CMatrix::Identity(2, 2))
                                                   : CMatrix(CMatrix::Zero(2, 2)));
    for (int sb = 0; sb < 3; ++sb)
        for (int ob = 0; ob < 2; ++ob)
            meas.bob[sb].push_back(ob == s.b[sb] ? CMatrix(CMatrix::Identity(2, 2))
                                                 : CMatrix(CMatrix::Zero(2, 2)));
    const double qv = (rho.mat() * bell_operator(q, meas)).trace().real();
    CHECK(qv == doctest::Approx(evaluate(q, s)));
}

TEST_CASE("expectation is linear in the state") {
    std::mt19937_64 rng(7);
    MeasurementAssignment meas = random_measurements({2, 2, 2, 2}, 2, 2, rng);
    CMatrix b = bell_operator(ch(), meas);
    DensityMatrix r1 = testutil::random_density({2, 2}, rng);
    DensityMatrix r2 = testutil::random_density({2, 2}, rng);
    const double q = 0.3;
    CMatrix mix = q * r1.mat() + (1 - q) * r2.mat();
    CHECK((mix * b).trace().real() ==
          doctest::Approx(q * (r1.mat() * b).trace().real() +
                          (1 - q) * (r2.mat() * b).trace().real()));
}

TEST_CASE("correlation operator at the Tsirelson angles") {
    const double r = 1.0 / std::sqrt(2.0);
    std::vector<CMatrix> alice = {bloch_obs(0, 0, 1), bloch_obs(1, 0, 0)};
    std::vector<CMatrix> bob = {bloch_obs(-r, 0, -r), bloch_obs(r, 0, -r)};
    CMatrix b = correlation_operator(chsh(), alice, bob);
    CHECK((singlet().mat() * b).trace().real() ==
          doctest::Approx(2.0 * std::sqrt(2.0)));

    // identity observables cannot violate: value = sum of coefficients
    std::vector<CMatrix> ids = {CMatrix::Identity(2, 2), CMatrix::Identity(2, 2)};
    CMatrix bi = correlation_operator(chsh(), ids, ids);
    CHECK((singlet().mat() * bi).trace().real() ==
          doctest::Approx(chsh().b.sum()));
}

TEST_CASE("correlation form matches probability form on random POVMs") {
    std::mt19937_64 rng(11);
    BellInequality prob = correlation_to_probability(chsh());
    CHECK(prob.beta_lhv == doctest::Approx(2.0));
    for (int t = 0; t < 5; ++t) {
        MeasurementAssignment meas = random_measurements({2, 2, 2, 2}, 2, 2, rng);
        DensityMatrix rho = testutil::random_density({2, 2}, rng);
        // correlation value via E = p++ - p+- - p-+ + p--
        ProbabilityVector p = probabilities(rho, meas);
        double corr = 0.0;
        const RMatrix& b = chsh().b;
        for (int sa = 0; sa < 2; ++sa)
            for (int sb = 0; sb < 2; ++sb) {
                double e = p.j(p.sc, sa, sb, 0, 0) - p.j(p.sc, sa, sb, 0, 1) -
                           p.j(p.sc, sa, sb, 1, 0) + p.j(p.sc, sa, sb, 1, 1);
                corr += b(sa, sb) * e;
            }
        const double pv = (rho.mat() * bell_operator(prob, meas)).trace().real();
        CHECK(corr == doctest::Approx(pv).epsilon(1e-9));
    }
}

TEST_CASE("induced probabilities are normalized and no-signaling") {
    std::mt19937_64 rng(13);
    for (int t = 0; t < 4; ++t) {
        MeasurementAssignment meas = random_measurements({3, 2, 2, 3}, 2, 3, rng);
        validate_povm(meas);
        DensityMatrix rho = testutil::random_density({2, 3}, rng);
        ProbabilityVector p = probabilities(rho, meas);
        CHECK(normalization_residual(p) < 1e-8);
        CHECK(no_signaling_residual(p) < 1e-8);
    }
}

TEST_CASE("operator relation between CGLMP and I22nn") {
    std::mt19937_64 rng(17);
    // n=3, maximally mixed: both sides in closed form
    DensityMatrix mixed(CMatrix::Identity(9, 9) / 9.0, {3, 3});
    CHECK(operator_relation_residual(mixed, 3, /*seed=*/42) < 1e-8);

    // n=2, singlet with CHSH-optimal projectors
    const double r = 1.0 / std::sqrt(2.0);
    MeasurementAssignment meas = projective_from_obs(
        {bloch_obs(0, 0, 1), bloch_obs(1, 0, 0)},
        {bloch_obs(-r, 0, -r), bloch_obs(r, 0, -r)});
    CHECK(operator_relation_residual(singlet(), 2, meas) < 1e-8);

    // n=4, random two-ququart state and random POVMs
    DensityMatrix rho = testutil::random_density({4, 4}, rng);
    CHECK(operator_relation_residual(rho, 4, /*seed=*/7) < 1e-8);
}

TEST_CASE("random measurements are valid POVMs") {
    std::mt19937_64 rng(19);
    for (bool generic : {false, true}) {
        MeasurementAssignment meas =
            random_measurements({2, 2, 3, 3}, 3, 3, rng, generic);
        CHECK_NOTHROW(validate_povm(meas));
    }
}

TEST_CASE("scenario guard rejects oversized enumerations") {
    BellInequality big = BellInequality::zeros({30, 30, 2, 2});
    CHECK_THROWS_AS(classical_bound(big), invalid_argument);
}

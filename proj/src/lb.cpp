#include "bellbound/lb.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>

namespace bellbound::lb {

namespace {

// tr_A[rho (A (x) 1)] without forming the Kronecker product.
CMatrix traced_against_alice(const DensityMatrix& rho, const CMatrix& a) {
    const int da = rho.split().d_a, db = rho.split().d_b;
    CMatrix out = CMatrix::Zero(db, db);
    for (int j = 0; j < db; ++j)
        for (int l = 0; l < db; ++l) {
            Complex s = 0;
            for (int i = 0; i < da; ++i)
                for (int k = 0; k < da; ++k) s += rho.mat()(i * db + j, k * db + l) * a(k, i);
            out(j, l) = s;
        }
    return out;
}

CMatrix traced_against_bob(const DensityMatrix& rho, const CMatrix& b) {
    const int da = rho.split().d_a, db = rho.split().d_b;
    CMatrix out = CMatrix::Zero(da, da);
    for (int i = 0; i < da; ++i)
        for (int k = 0; k < da; ++k) {
            Complex s = 0;
            for (int j = 0; j < db; ++j)
                for (int l = 0; l < db; ++l) s += rho.mat()(i * db + j, k * db + l) * b(l, j);
            out(i, k) = s;
        }
    return out;
}

// Restore exact POVM structure after an SDP solve: clip tiny negative
// eigenvalues and renormalize the per-setting sum back to the identity.
void repair_povm_setting(std::vector<CMatrix>& elems) {
    const Eigen::Index d = elems[0].rows();
    CMatrix sum = CMatrix::Zero(d, d);
    for (CMatrix& e : elems) {
        e = 0.5 * (e + e.adjoint().eval());
        Eigen::SelfAdjointEigenSolver<CMatrix> es(e);
        CMatrix fixed = CMatrix::Zero(d, d);
        for (Eigen::Index k = 0; k < d; ++k)
            if (es.eigenvalues()[k] > 0)
                fixed += es.eigenvalues()[k] * es.eigenvectors().col(k) *
                         es.eigenvectors().col(k).adjoint();
        e = fixed;
        sum += e;
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(sum);
    CMatrix corr = CMatrix::Zero(d, d);
    for (Eigen::Index k = 0; k < d; ++k)
        corr += (1.0 / std::sqrt(std::max(es.eigenvalues()[k], 1e-300))) *
                es.eigenvectors().col(k) * es.eigenvectors().col(k).adjoint();
    for (CMatrix& e : elems) {
        CMatrix fixed = corr * e * corr;
        e = 0.5 * (fixed + fixed.adjoint().eval());
    }
}

double half_sum_traces(const std::vector<std::vector<CMatrix>>& red) {
    double s = 0.0;
    for (const auto& setting : red)
        for (const CMatrix& r : setting) s += r.trace().real();
    return s;
}

} // namespace

std::vector<std::vector<CMatrix>> reduced_operators_bob(
    const DensityMatrix& rho, const bell::BellInequality& ineq,
    const std::vector<std::vector<CMatrix>>& alice) {
    const auto& sc = ineq.sc;
    const int db = rho.split().d_b;
    const CMatrix rho_b = partial_trace(rho.mat(), rho.split(), Subsystem::A);
    std::vector<std::vector<CMatrix>> red(sc.m_b);
    for (int sb = 0; sb < sc.m_b; ++sb) {
        red[sb].assign(sc.n_b, CMatrix::Zero(db, db));
        for (int ob = 0; ob < sc.n_b; ++ob) {
            CMatrix& r = red[sb][ob];
            if (ineq.mb(sb, ob) != 0.0) r += ineq.mb(sb, ob) * rho_b;
            for (int sa = 0; sa < sc.m_a; ++sa)
                for (int oa = 0; oa < sc.n_a; ++oa) {
                    const double c = ineq.j(sa, sb, oa, ob);
                    if (c != 0.0) r += c * traced_against_alice(rho, alice[sa][oa]);
                }
            r = 0.5 * (r + r.adjoint().eval());
        }
    }
    return red;
}

std::vector<std::vector<CMatrix>> reduced_operators_alice(
    const DensityMatrix& rho, const bell::BellInequality& ineq,
    const std::vector<std::vector<CMatrix>>& bob) {
    const auto& sc = ineq.sc;
    const int da = rho.split().d_a;
    const CMatrix rho_a = partial_trace(rho.mat(), rho.split(), Subsystem::B);
    std::vector<std::vector<CMatrix>> red(sc.m_a);
    for (int sa = 0; sa < sc.m_a; ++sa) {
        red[sa].assign(sc.n_a, CMatrix::Zero(da, da));
        for (int oa = 0; oa < sc.n_a; ++oa) {
            CMatrix& r = red[sa][oa];
            if (ineq.ma(sa, oa) != 0.0) r += ineq.ma(sa, oa) * rho_a;
            for (int sb = 0; sb < sc.m_b; ++sb)
                for (int ob = 0; ob < sc.n_b; ++ob) {
                    const double c = ineq.j(sa, sb, oa, ob);
                    if (c != 0.0) r += c * traced_against_bob(rho, bob[sb][ob]);
                }
            r = 0.5 * (r + r.adjoint().eval());
        }
    }
    return red;
}

double bob_independent_term(const DensityMatrix& rho, const bell::BellInequality& ineq,
                            const std::vector<std::vector<CMatrix>>& alice) {
    const auto& sc = ineq.sc;
    const CMatrix rho_a = partial_trace(rho.mat(), rho.split(), Subsystem::B);
    double v = ineq.b00;
    for (int sa = 0; sa < sc.m_a; ++sa)
        for (int oa = 0; oa < sc.n_a; ++oa)
            if (ineq.ma(sa, oa) != 0.0)
                v += ineq.ma(sa, oa) * (rho_a * alice[sa][oa]).trace().real();
    return v;
}

double alice_independent_term(const DensityMatrix& rho, const bell::BellInequality& ineq,
                              const std::vector<std::vector<CMatrix>>& bob) {
    const auto& sc = ineq.sc;
    const CMatrix rho_b = partial_trace(rho.mat(), rho.split(), Subsystem::A);
    double v = ineq.b00;
    for (int sb = 0; sb < sc.m_b; ++sb)
        for (int ob = 0; ob < sc.n_b; ++ob)
            if (ineq.mb(sb, ob) != 0.0)
                v += ineq.mb(sb, ob) * (rho_b * bob[sb][ob]).trace().real();
    return v;
}

namespace {

// Shared core of the per-party SDP step: maximize sum tr(red[s][o] E[s][o])
// over POVM elements E, in the block-diagonal standard form.
std::pair<std::vector<std::vector<CMatrix>>, double> optimize_party_sdp(
    const std::vector<std::vector<CMatrix>>& red, int d, double constant,
    const sdp::SdpOptions& opts) {
    const int settings = static_cast<int>(red.size());
    const int outcomes = static_cast<int>(red[0].size());
    const int dim = settings * outcomes * d;
    const HermitianBasis basis = hermitian_basis(d);

    sdp::SdpStandard p;
    p.f0 = CMatrix::Zero(dim, dim);
    for (int s = 0; s < settings; ++s)
        for (int o = 0; o < outcomes; ++o)
            p.f0.block((s * outcomes + o) * d, (s * outcomes + o) * d, d, d) =
                -red[s][o];
    p.c.resize(settings * d * d);
    for (int s = 0; s < settings; ++s)
        for (int n = 0; n < d * d; ++n) {
            CMatrix f = CMatrix::Zero(dim, dim);
            for (int o = 0; o < outcomes; ++o)
                f.block((s * outcomes + o) * d, (s * outcomes + o) * d, d, d) =
                    basis.elems[n];
            p.fs.push_back(std::move(f));
            p.c[s * d * d + n] = n == 0 ? std::sqrt(double(d)) : 0.0;
        }

    sdp::SdpSolution sol = sdp::solve_standard(p, opts);
    if (!sol.optimal())
        throw std::runtime_error("per-party SDP failed: " + sol.message);

    std::vector<std::vector<CMatrix>> out(settings);
    for (int s = 0; s < settings; ++s) {
        out[s].resize(outcomes);
        for (int o = 0; o < outcomes; ++o)
            out[s][o] = sol.Z.block((s * outcomes + o) * d, (s * outcomes + o) * d, d, d);
        repair_povm_setting(out[s]);
    }
    double value = constant;
    for (int s = 0; s < settings; ++s)
        for (int o = 0; o < outcomes; ++o)
            value += (red[s][o] * out[s][o]).trace().real();
    return {std::move(out), value};
}

std::pair<std::vector<std::vector<CMatrix>>, double> optimize_party_two_outcome(
    const std::vector<std::vector<CMatrix>>& red, int d, double constant) {
    std::vector<std::vector<CMatrix>> out(red.size());
    double value = constant + 0.5 * half_sum_traces(red);
    for (size_t s = 0; s < red.size(); ++s) {
        const CMatrix delta = red[s][0] - red[s][1];
        const CMatrix plus = positive_eigenspace_projector(delta);
        out[s] = {plus, CMatrix::Identity(d, d) - plus};
        value += 0.5 * trace_norm(delta);
    }
    return {std::move(out), value};
}

} // namespace

std::pair<std::vector<std::vector<CMatrix>>, double> optimize_bob_sdp(
    const DensityMatrix& rho, const bell::BellInequality& ineq,
    const std::vector<std::vector<CMatrix>>& alice, const sdp::SdpOptions& opts) {
    return optimize_party_sdp(reduced_operators_bob(rho, ineq, alice),
                              rho.split().d_b, bob_independent_term(rho, ineq, alice),
                              opts);
}

std::pair<std::vector<std::vector<CMatrix>>, double> optimize_alice_sdp(
    const DensityMatrix& rho, const bell::BellInequality& ineq,
    const std::vector<std::vector<CMatrix>>& bob, const sdp::SdpOptions& opts) {
    return optimize_party_sdp(reduced_operators_alice(rho, ineq, bob),
                              rho.split().d_a, alice_independent_term(rho, ineq, bob),
                              opts);
}

std::pair<std::vector<std::vector<CMatrix>>, double> optimize_bob_two_outcome(
    const DensityMatrix& rho, const bell::BellInequality& ineq,
    const std::vector<std::vector<CMatrix>>& alice) {
    if (ineq.sc.n_b != 2)
        throw invalid_argument("optimize_bob_two_outcome: n_b must be 2");
    return optimize_party_two_outcome(reduced_operators_bob(rho, ineq, alice),
                                      rho.split().d_b,
                                      bob_independent_term(rho, ineq, alice));
}

std::pair<std::vector<std::vector<CMatrix>>, double> optimize_alice_two_outcome(
    const DensityMatrix& rho, const bell::BellInequality& ineq,
    const std::vector<std::vector<CMatrix>>& bob) {
    if (ineq.sc.n_a != 2)
        throw invalid_argument("optimize_alice_two_outcome: n_a must be 2");
    return optimize_party_two_outcome(reduced_operators_alice(rho, ineq, bob),
                                      rho.split().d_a,
                                      alice_independent_term(rho, ineq, bob));
}

namespace {

uint64_t mix_seed(uint64_t seed, uint64_t stream) {
    uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

struct RestartOutcome {
    double value = 0.0;
    bell::MeasurementAssignment meas;
    int sweeps = 0;
    std::vector<double> trajectory;
};

RestartOutcome run_restart(const DensityMatrix& rho, const bell::BellInequality& ineq,
                           const SeesawConfig& cfg, int restart) {
    std::mt19937_64 rng(mix_seed(cfg.rng_seed, restart));
    bell::MeasurementAssignment meas = bell::random_measurements(
        ineq.sc, rho.split().d_a, rho.split().d_b, rng, cfg.generic_povm_init);

    RestartOutcome out;
    double value = -std::numeric_limits<double>::infinity();
    for (int sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
        // Bob first, then Alice; each half-sweep is an exact maximization.
        if (ineq.sc.n_b == 2) {
            auto r = optimize_bob_two_outcome(rho, ineq, meas.alice);
            meas.bob = std::move(r.first);
            out.trajectory.push_back(r.second);
        } else {
            auto r = optimize_bob_sdp(rho, ineq, meas.alice, cfg.sdp);
            meas.bob = std::move(r.first);
            out.trajectory.push_back(r.second);
        }
        double alice_value;
        if (ineq.sc.n_a == 2) {
            auto r = optimize_alice_two_outcome(rho, ineq, meas.bob);
            meas.alice = std::move(r.first);
            alice_value = r.second;
        } else {
            auto r = optimize_alice_sdp(rho, ineq, meas.bob, cfg.sdp);
            meas.alice = std::move(r.first);
            alice_value = r.second;
        }
        out.trajectory.push_back(alice_value);
        out.sweeps = sweep + 1;
        const bool converged = alice_value - value < cfg.convergence_tol;
        value = alice_value;
        if (converged) break;
    }
    out.value = value;
    out.meas = std::move(meas);
    return out;
}

} // namespace

LbResult seesaw(const DensityMatrix& rho, const bell::BellInequality& ineq,
                const SeesawConfig& config) {
    if (config.restarts < 1) throw invalid_argument("seesaw: restarts must be >= 1");
    std::vector<RestartOutcome> outcomes(config.restarts);
    const int workers = std::max(1, config.threads);
    if (workers == 1) {
        for (int r = 0; r < config.restarts; ++r)
            outcomes[r] = run_restart(rho, ineq, config, r);
    } else {
        std::atomic<int> next{0};
        std::vector<std::future<void>> futs;
        for (int w = 0; w < workers; ++w)
            futs.push_back(std::async(std::launch::async, [&] {
                for (int r = next.fetch_add(1); r < config.restarts;
                     r = next.fetch_add(1))
                    outcomes[r] = run_restart(rho, ineq, config, r);
            }));
        for (auto& f : futs) f.get();
    }

    LbResult res;
    for (int r = 0; r < config.restarts; ++r) {
        res.restart_values.push_back(outcomes[r].value);
        if (outcomes[r].value > outcomes[res.best_restart].value) res.best_restart = r;
    }
    RestartOutcome& best = outcomes[res.best_restart];
    res.value = best.value;
    res.measurements = std::move(best.meas);
    res.sweeps = best.sweeps;
    res.half_sweep_values = std::move(best.trajectory);
    return res;
}

LbResult seesaw(const DensityMatrix& rho, const bell::CorrelationInequality& cineq,
                const SeesawConfig& config) {
    return seesaw(rho, bell::correlation_to_probability(cineq), config);
}

RMatrix horodecki_T(const DensityMatrix& rho) {
    if (rho.split().d_a != 2 || rho.split().d_b != 2)
        throw invalid_argument("horodecki_T: two-qubit states only");
    CMatrix pauli[3];
    pauli[0] = CMatrix(2, 2);
    pauli[0] << 0, 1, 1, 0;
    pauli[1] = CMatrix(2, 2);
    pauli[1] << 0, Complex(0, -1), Complex(0, 1), 0;
    pauli[2] = CMatrix(2, 2);
    pauli[2] << 1, 0, 0, -1;
    RMatrix t(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            t(i, j) = (rho.mat() * kron(pauli[i], pauli[j])).trace().real();
    return t;
}

HorodeckiValues horodecki_values(const DensityMatrix& rho) {
    const RVector sv = singular_values(horodecki_T(rho).cast<Complex>());
    const double s2 = sv[0] * sv[0] + sv[1] * sv[1];
    HorodeckiValues out;
    out.sqm_ch = std::max(0.0, 0.5 * (std::sqrt(s2) - 1.0));
    out.sqm_chsh = 4.0 * (out.sqm_ch + 0.5);
    out.violates = s2 > 1.0;
    return out;
}

} // namespace bellbound::lb

#include "bellbound/ub.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <algorithm>
#include <functional>
#include <future>

#include "bellbound/states.hpp"

namespace bellbound::ub {

namespace {

// tr(rho A (x) B) = vec(A)^dag R vec(B) for Hermitian A, B (column-major vec):
// R[i + k d, l + j d] = rho[i d + j, k d + l].
CMatrix build_big_r(const DensityMatrix& rho) {
    const int d = rho.split().d_a;
    CMatrix r(d * d, d * d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                for (int l = 0; l < d; ++l)
                    r(i + k * d, l + j * d) = rho.mat()(i * d + j, k * d + l);
    return r;
}

CVector vec(const CMatrix& m) {
    return Eigen::Map<const CVector>(m.data(), m.size());
}

void fill_state_data(QcqpInstance& inst, const DensityMatrix& rho) {
    if (rho.split().d_a != rho.split().d_b)
        throw invalid_argument("build_qcqp: requires d_a == d_b");
    inst.d = rho.split().d_a;
    inst.big_r = build_big_r(rho);
    inst.rho_a = partial_trace(rho.mat(), rho.split(), Subsystem::B);
    inst.rho_b = partial_trace(rho.mat(), rho.split(), Subsystem::A);
    CoherenceDecomposition coh = coherence_decomposition(rho);
    inst.r_a = std::move(coh.r_a);
    inst.r_b = std::move(coh.r_b);
    inst.rp = std::move(coh.Rp);
}

} // namespace

QcqpInstance build_qcqp(const bell::CorrelationInequality& cineq,
                        const DensityMatrix& rho) {
    QcqpInstance inst;
    inst.kind = QcqpKind::CorrelationDichotomic;
    inst.m_a = static_cast<int>(cineq.b.rows());
    inst.m_b = static_cast<int>(cineq.b.cols());
    inst.b = cineq.b;
    inst.marg_a = cineq.marg_a.size() ? cineq.marg_a : RVector::Zero(inst.m_a);
    inst.marg_b = cineq.marg_b.size() ? cineq.marg_b : RVector::Zero(inst.m_b);
    inst.constant = 0.0;
    fill_state_data(inst, rho);
    return inst;
}

QcqpInstance build_qcqp(const bell::BellInequality& ineq, const DensityMatrix& rho) {
    const auto& sc = ineq.sc;
    if (sc.n_a != 2 || sc.n_b != 2)
        throw invalid_argument("build_qcqp: probability form requires two outcomes");
    QcqpInstance inst;
    inst.kind = QcqpKind::ProbabilityTwoOutcome;
    inst.m_a = sc.m_a;
    inst.m_b = sc.m_b;
    // Collapse onto the "+" elements via A- = 1 - A+.
    inst.b.resize(sc.m_a, sc.m_b);
    inst.marg_a = RVector::Zero(sc.m_a);
    inst.marg_b = RVector::Zero(sc.m_b);
    inst.constant = ineq.b00;
    for (int sa = 0; sa < sc.m_a; ++sa)
        for (int sb = 0; sb < sc.m_b; ++sb) {
            inst.b(sa, sb) = ineq.j(sa, sb, 0, 0) - ineq.j(sa, sb, 0, 1) -
                             ineq.j(sa, sb, 1, 0) + ineq.j(sa, sb, 1, 1);
            inst.marg_a[sa] += ineq.j(sa, sb, 0, 1) - ineq.j(sa, sb, 1, 1);
            inst.marg_b[sb] += ineq.j(sa, sb, 1, 0) - ineq.j(sa, sb, 1, 1);
            inst.constant += ineq.j(sa, sb, 1, 1);
        }
    for (int sa = 0; sa < sc.m_a; ++sa) {
        inst.marg_a[sa] += ineq.ma(sa, 0) - ineq.ma(sa, 1);
        inst.constant += ineq.ma(sa, 1);
    }
    for (int sb = 0; sb < sc.m_b; ++sb) {
        inst.marg_b[sb] += ineq.mb(sb, 0) - ineq.mb(sb, 1);
        inst.constant += ineq.mb(sb, 1);
    }
    fill_state_data(inst, rho);
    return inst;
}

double qcqp_value(const QcqpInstance& inst, const std::vector<CMatrix>& alice_obs,
                  const std::vector<CMatrix>& bob_obs) {
    if (static_cast<int>(alice_obs.size()) != inst.m_a ||
        static_cast<int>(bob_obs.size()) != inst.m_b)
        throw invalid_argument("qcqp_value: observable count mismatch");
    double v = inst.constant;
    for (int sa = 0; sa < inst.m_a; ++sa)
        for (int sb = 0; sb < inst.m_b; ++sb)
            if (inst.b(sa, sb) != 0.0)
                v += inst.b(sa, sb) *
                     (vec(alice_obs[sa]).dot(inst.big_r * vec(bob_obs[sb]))).real();
    for (int sa = 0; sa < inst.m_a; ++sa)
        v += inst.marg_a[sa] * (inst.rho_a * alice_obs[sa]).trace().real();
    for (int sb = 0; sb < inst.m_b; ++sb)
        v += inst.marg_b[sb] * (inst.rho_b * bob_obs[sb]).trace().real();
    return v;
}

namespace {

constexpr double kCoherenceTol = 1e-8;

// --- state-independent dual -------------------------------------------------

UbResult state_independent_impl(const QcqpInstance& inst, const UbOptions& opts) {
    const int d = inst.d, M = inst.m_a + inst.m_b;
    const int d2 = d * d;
    const int dim = 1 + M * d2; // [s | vectorized observables]
    const HermitianBasis basis = hermitian_basis(d);
    const bool prob = inst.kind == QcqpKind::ProbabilityTwoOutcome;

    // Constant blocks: Omega_0 plus the state part of the linear term u.
    CMatrix g0 = CMatrix::Zero(dim, dim);
    for (int sa = 0; sa < inst.m_a; ++sa)
        for (int sb = 0; sb < inst.m_b; ++sb) {
            const double c = inst.b(sa, sb);
            if (c == 0.0) continue;
            g0.block(1 + sa * d2, 1 + (inst.m_a + sb) * d2, d2, d2) -= 0.5 * c * inst.big_r;
            g0.block(1 + (inst.m_a + sb) * d2, 1 + sa * d2, d2, d2) -=
                0.5 * c * inst.big_r.adjoint();
        }
    auto add_border = [&](int m, const CVector& u) {
        g0.block(1 + m * d2, 0, d2, 1) += 0.5 * u;
        g0.block(0, 1 + m * d2, 1, d2) += 0.5 * u.adjoint();
    };
    for (int sa = 0; sa < inst.m_a; ++sa)
        if (inst.marg_a[sa] != 0.0) add_border(sa, inst.marg_a[sa] * vec(inst.rho_a));
    for (int sb = 0; sb < inst.m_b; ++sb)
        if (inst.marg_b[sb] != 0.0)
            add_border(inst.m_a + sb, inst.marg_b[sb] * vec(inst.rho_b));

    UbResult res;
    res.mode = UbMode::StateIndependent;
    // Degenerate instance: nothing to optimize, the bound is the constant.
    if (g0.cwiseAbs().maxCoeff() < 1e-14) {
        res.value = prob ? inst.constant : 0.0;
        return res;
    }

    sdp::SdpInequality p;
    p.g0 = std::move(g0);
    p.c.resize(M * d2 + 1);
    const CMatrix idd = CMatrix::Identity(d, d);
    for (int m = 0; m < M; ++m)
        for (int n = 0; n < d2; ++n) {
            CMatrix g = CMatrix::Zero(dim, dim);
            g.block(1 + m * d2, 1 + m * d2, d2, d2) = kron(idd, basis.elems[n]);
            if (prob) {
                const CVector u = 0.5 * vec(basis.elems[n]);
                g.block(1 + m * d2, 0, d2, 1) += u;
                g.block(0, 1 + m * d2, 1, d2) += u.adjoint();
            }
            p.gs.push_back(std::move(g));
            p.c[m * d2 + n] = prob ? 0.0 : (n == 0 ? std::sqrt(double(d)) : 0.0);
        }
    {
        CMatrix g = CMatrix::Zero(dim, dim);
        g(0, 0) = 1.0;
        p.gs.push_back(std::move(g));
        p.c[M * d2] = 1.0;
    }

    sdp::SdpSolution sol = sdp::solve_inequality(p, opts.sdp);
    res.status = sol.status;
    if (!sol.optimal())
        throw std::runtime_error("state-independent dual failed: " + sol.message);
    res.value = sol.objective + (prob ? inst.constant : 0.0);
    return res;
}

// --- fixed-trace dual ---------------------------------------------------------

// [P_n]_{ij} = tr(sigma_n {sigma_i, sigma_j}) / 2 restricted to i, j >= 1.
std::vector<RMatrix> anticommutator_tables(const HermitianBasis& basis) {
    const int d2 = basis.d * basis.d;
    std::vector<RMatrix> tables(d2, RMatrix::Zero(d2 - 1, d2 - 1));
    for (int n = 0; n < d2; ++n)
        for (int i = 1; i < d2; ++i)
            for (int j = i; j < d2; ++j) {
                const double v = 0.5 * (basis.elems[n] * (basis.elems[i] * basis.elems[j] +
                                                          basis.elems[j] * basis.elems[i]))
                                           .trace()
                                           .real();
                tables[n](i - 1, j - 1) = v;
                tables[n](j - 1, i - 1) = v;
            }
    return tables;
}

UbResult fixed_trace_impl(const QcqpInstance& inst, const TraceProfile& profile,
                          const UbOptions& opts) {
    const int d = inst.d, M = inst.m_a + inst.m_b;
    const int nb = d * d - 1; // traceless block size per observable
    const int dim = 1 + M * nb;
    const bool prob = inst.kind == QcqpKind::ProbabilityTwoOutcome;
    if (static_cast<int>(profile.z.size()) != M)
        throw invalid_argument("ub_fixed_trace: profile size mismatch");
    for (int m = 0; m < M; ++m) {
        const int z = profile.z[m];
        const bool ok = prob ? (z >= 0 && z <= d)
                             : (std::abs(z) <= d && (z + d) % 2 == 0);
        if (!ok) throw invalid_argument("ub_fixed_trace: trace outside the grid");
    }
    const HermitianBasis basis = hermitian_basis(d);
    const std::vector<RMatrix> pn = anticommutator_tables(basis);
    const double sqd = std::sqrt(double(d));

    // Weighted coupling to each party's coherence vector, and the constant.
    RVector ta = RVector::Zero(inst.m_a), tb = RVector::Zero(inst.m_b);
    for (int sa = 0; sa < inst.m_a; ++sa)
        for (int sb = 0; sb < inst.m_b; ++sb) {
            ta[sa] += inst.b(sa, sb) * profile.z[inst.m_a + sb];
            tb[sb] += inst.b(sa, sb) * profile.z[sa];
        }
    double constant = prob ? inst.constant : 0.0;
    for (int sa = 0; sa < inst.m_a; ++sa) {
        constant += ta[sa] * profile.z[sa] / double(d * d);
        constant += inst.marg_a[sa] * profile.z[sa] / double(d);
    }
    for (int sb = 0; sb < inst.m_b; ++sb)
        constant += inst.marg_b[sb] * profile.z[inst.m_a + sb] / double(d);

    // LMI [[-2t, q^T], [q, 2 Omega']] >= 0 in the variables lambda, t.
    CMatrix g0 = CMatrix::Zero(dim, dim);
    for (int sa = 0; sa < inst.m_a; ++sa)
        for (int sb = 0; sb < inst.m_b; ++sb) {
            const double c = inst.b(sa, sb);
            if (c == 0.0) continue;
            g0.block(1 + sa * nb, 1 + (inst.m_a + sb) * nb, nb, nb) -=
                c * inst.rp.cast<Complex>();
            g0.block(1 + (inst.m_a + sb) * nb, 1 + sa * nb, nb, nb) -=
                c * inst.rp.transpose().cast<Complex>();
        }
    auto add_q = [&](int m, const RVector& q) {
        g0.block(1 + m * nb, 0, nb, 1) += q.cast<Complex>();
        g0.block(0, 1 + m * nb, 1, nb) += q.transpose().cast<Complex>();
    };
    for (int sa = 0; sa < inst.m_a; ++sa) {
        const double coeff = ta[sa] / sqd + sqd * inst.marg_a[sa];
        if (coeff != 0.0) add_q(sa, coeff * inst.r_a);
    }
    for (int sb = 0; sb < inst.m_b; ++sb) {
        const double coeff = tb[sb] / sqd + sqd * inst.marg_b[sb];
        if (coeff != 0.0) add_q(inst.m_a + sb, coeff * inst.r_b);
    }

    // lambda_{m0} has zero objective cost on z = 0 profiles and P_0 > 0, an
    // unbounded zero-cost recession direction of the dual; cap those entries
    // through extra diagonal slots so the optimal set stays bounded.
    std::vector<int> capped;
    for (int m = 0; m < M; ++m) {
        const double z = profile.z[m];
        const double cost = prob ? z / sqd - z * z / (d * sqd) : sqd - z * z / (d * sqd);
        if (std::abs(cost) < 1e-12) capped.push_back(m);
    }
    const double cap = 1e4;
    const int xdim = dim + static_cast<int>(capped.size());

    sdp::SdpInequality p;
    p.g0 = CMatrix::Zero(xdim, xdim);
    p.g0.topLeftCorner(dim, dim) = g0;
    for (size_t k = 0; k < capped.size(); ++k) p.g0(dim + k, dim + k) = cap;
    p.c.resize(M * d * d + 1);
    for (int m = 0; m < M; ++m) {
        const double z = profile.z[m];
        for (int n = 0; n < d * d; ++n) {
            CMatrix g = CMatrix::Zero(xdim, xdim);
            g.block(1 + m * nb, 1 + m * nb, nb, nb) = 2.0 * pn[n].cast<Complex>();
            if (n >= 1) {
                const double border = prob ? 1.0 - 2.0 * z / d : -2.0 * z / d;
                g(1 + m * nb + (n - 1), 0) += border;
                g(0, 1 + m * nb + (n - 1)) += border;
            }
            if (n == 0)
                for (size_t k = 0; k < capped.size(); ++k)
                    if (capped[k] == m) g(dim + k, dim + k) = -1.0;
            p.gs.push_back(std::move(g));
            p.c[m * d * d + n] =
                n == 0 ? (prob ? z / sqd - z * z / (d * sqd) : sqd - z * z / (d * sqd))
                       : 0.0;
        }
    }
    {
        CMatrix g = CMatrix::Zero(xdim, xdim);
        g(0, 0) = -2.0;
        p.gs.push_back(std::move(g));
        p.c[M * d * d] = -1.0;
    }

    sdp::SdpSolution sol = sdp::solve_inequality(p, opts.sdp);
    UbResult res;
    res.mode = UbMode::FixedTrace;
    res.status = sol.status;
    if (!sol.optimal())
        throw std::runtime_error("fixed-trace dual failed: " + sol.message);
    res.value = sol.objective + constant;
    res.best_profile = profile;
    return res;
}

} // namespace

UbResult ub_state_independent(const QcqpInstance& inst, const UbOptions& opts) {
    return state_independent_impl(inst, opts);
}
UbResult ub_state_independent(const bell::CorrelationInequality& cineq,
                              const DensityMatrix& rho, const UbOptions& opts) {
    return state_independent_impl(build_qcqp(cineq, rho), opts);
}
UbResult ub_state_independent(const bell::BellInequality& ineq,
                              const DensityMatrix& rho, const UbOptions& opts) {
    return state_independent_impl(build_qcqp(ineq, rho), opts);
}

UbResult ub_fixed_trace(const QcqpInstance& inst, const TraceProfile& profile,
                        const UbOptions& opts) {
    return fixed_trace_impl(inst, profile, opts);
}

std::vector<TraceProfile> profile_grid(QcqpKind kind, int d, int observables,
                                       bool prune_symmetry) {
    // z_m = +-d forces O_m = +-1 and the inequality cannot be violated with a
    // trivial observable, so those profiles need no certificate and are
    // excluded from the enumeration.
    std::vector<int> values;
    if (kind == QcqpKind::CorrelationDichotomic)
        for (int z = -d + 2; z <= d - 2; z += 2) values.push_back(z);
    else
        for (int z = 0; z <= d; ++z) values.push_back(z);

    std::vector<TraceProfile> grid;
    std::vector<int> idx(observables, 0);
    while (true) {
        TraceProfile p;
        p.z.resize(observables);
        for (int m = 0; m < observables; ++m) p.z[m] = values[idx[m]];
        bool keep = true;
        if (prune_symmetry && kind == QcqpKind::CorrelationDichotomic) {
            // objective is invariant under flipping every observable's sign
            std::vector<int> neg(observables);
            for (int m = 0; m < observables; ++m) neg[m] = -p.z[m];
            keep = !std::lexicographical_compare(neg.begin(), neg.end(), p.z.begin(),
                                                 p.z.end());
        }
        if (keep) grid.push_back(std::move(p));
        int pos = observables - 1;
        while (pos >= 0 && ++idx[pos] == static_cast<int>(values.size())) {
            idx[pos] = 0;
            --pos;
        }
        if (pos < 0) break;
    }
    return grid;
}

namespace {

UbResult enumerate_impl(const QcqpInstance& inst, const UbOptions& opts) {
    // The global-flip pruning is only valid without linear terms.
    const bool pure = inst.marg_a.cwiseAbs().maxCoeff() == 0.0 &&
                      inst.marg_b.cwiseAbs().maxCoeff() == 0.0 &&
                      inst.r_a.cwiseAbs().maxCoeff() < kCoherenceTol &&
                      inst.r_b.cwiseAbs().maxCoeff() < kCoherenceTol;
    const std::vector<TraceProfile> grid = profile_grid(
        inst.kind, inst.d, inst.m_a + inst.m_b,
        inst.kind == QcqpKind::CorrelationDichotomic && pure);

    std::vector<double> values(grid.size());
    const int workers = std::max(1, opts.threads);
    if (workers == 1) {
        for (size_t i = 0; i < grid.size(); ++i)
            values[i] = fixed_trace_impl(inst, grid[i], opts).value;
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::future<void>> futs;
        for (int w = 0; w < workers; ++w)
            futs.push_back(std::async(std::launch::async, [&] {
                for (size_t i = next.fetch_add(1); i < grid.size();
                     i = next.fetch_add(1))
                    values[i] = fixed_trace_impl(inst, grid[i], opts).value;
            }));
        for (auto& f : futs) f.get();
    }

    UbResult res;
    res.mode = UbMode::EnumerateProfiles;
    size_t best = 0;
    for (size_t i = 1; i < grid.size(); ++i)
        if (values[i] > values[best]) best = i;
    res.value = values[best];
    res.best_profile = grid[best];
    if (opts.keep_profile_values)
        for (size_t i = 0; i < grid.size(); ++i)
            res.profile_values.emplace_back(grid[i], values[i]);
    return res;
}

} // namespace

UbResult ub_enumerate_profiles(const QcqpInstance& inst, const UbOptions& opts) {
    return enumerate_impl(inst, opts);
}
UbResult ub_enumerate_profiles(const bell::CorrelationInequality& cineq,
                               const DensityMatrix& rho, const UbOptions& opts) {
    return enumerate_impl(build_qcqp(cineq, rho), opts);
}
UbResult ub_enumerate_profiles(const bell::BellInequality& ineq,
                               const DensityMatrix& rho, const UbOptions& opts) {
    return enumerate_impl(build_qcqp(ineq, rho), opts);
}

UbResult chsh_semianalytic(const DensityMatrix& rho) {
    CoherenceDecomposition coh = coherence_decomposition(rho);
    if (coh.r_a.cwiseAbs().maxCoeff() > kCoherenceTol ||
        coh.r_b.cwiseAbs().maxCoeff() > kCoherenceTol)
        throw invalid_argument("chsh_semianalytic: coherence vectors must vanish");
    const int d = rho.split().d_a;
    const double s1 = singular_values(coh.Rp.cast<Complex>())[0];
    RMatrix b(2, 2);
    b << 1, 1, 1, -1;

    UbResult res;
    res.mode = UbMode::Semianalytic;
    res.value = -std::numeric_limits<double>::infinity();
    const double dd = double(d) * d;
    for (int z1 = -d + 2; z1 <= d - 2; z1 += 2)
        for (int z2 = -d + 2; z2 <= d - 2; z2 += 2)
            for (int z3 = -d + 2; z3 <= d - 2; z3 += 2)
                for (int z4 = -d + 2; z4 <= d - 2; z4 += 2) {
                    const double fa = (2 * dd - z1 * z1 - z2 * z2) / (2 * dd);
                    const double fb = (2 * dd - z3 * z3 - z4 * z4) / (2 * dd);
                    double v = 2.0 * std::sqrt(2.0) * s1 * d * std::sqrt(fa * fb);
                    v += (b(0, 0) * z1 * z3 + b(0, 1) * z1 * z4 + b(1, 0) * z2 * z3 +
                          b(1, 1) * z2 * z4) /
                         dd;
                    if (v > res.value) {
                        res.value = v;
                        res.best_profile = TraceProfile{{z1, z2, z3, z4}};
                    }
                }
    return res;
}

namespace {

double bisect_threshold(const std::function<double(double)>& excess, double tol) {
    double lo = 0.0, hi = 1.0;
    if (excess(1.0) <= 0.0) return 1.0;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (excess(mid) > 1e-12) hi = mid;
        else lo = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

double isotropic_chsh_threshold_semianalytic(int d, double tol) {
    return bisect_threshold(
        [d](double p) {
            return chsh_semianalytic(states::isotropic(d, p)).value - 2.0;
        },
        tol);
}

double isotropic_chsh_threshold_numeric(int d, const UbOptions& opts, double tol) {
    // Per-profile crossing search. The closed-form bound is looser than the
    // dual at every p, so its crossing lower-bounds each profile's dual
    // crossing: process profiles in that order and stop once no remaining
    // profile can undercut the best threshold found.
    const bell::CorrelationInequality chsh = bell::chsh();
    const std::vector<TraceProfile> grid =
        profile_grid(QcqpKind::CorrelationDichotomic, d, 4, true);
    const double dd = double(d) * d;
    std::vector<std::pair<double, const TraceProfile*>> order;
    for (const TraceProfile& prof : grid) {
        const auto& z = prof.z;
        const double fa = (2 * dd - z[0] * z[0] - z[1] * z[1]) / (2 * dd);
        const double fb = (2 * dd - z[2] * z[2] - z[3] * z[3]) / (2 * dd);
        const double g = (z[0] * z[2] + z[0] * z[3] + z[1] * z[2] - z[1] * z[3]) / dd;
        // semianalytic crossing with s1(p) = p/d: 2 sqrt2 p sqrt(fa fb) + g = 2
        const double slope = 2.0 * std::sqrt(2.0) * std::sqrt(fa * fb);
        const double cross = slope > 1e-12 ? (2.0 - g) / slope : 2.0;
        order.emplace_back(cross, &prof);
    }
    std::sort(order.begin(), order.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    double best = 1.0;
    for (const auto& [lower, prof] : order) {
        if (lower >= best) break;
        auto dual = [&](double p) {
            return fixed_trace_impl(build_qcqp(chsh, states::isotropic(d, p)), *prof,
                                    opts)
                .value;
        };
        if (dual(best) <= 2.0 + 1e-12) continue;
        double lo = std::max(0.0, lower - tol), hi = best;
        while (hi - lo > tol) {
            const double mid = 0.5 * (lo + hi);
            if (dual(mid) > 2.0 + 1e-12) hi = mid;
            else lo = mid;
        }
        best = 0.5 * (lo + hi);
    }
    return best;
}

} // namespace bellbound::ub

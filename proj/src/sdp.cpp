#include "bellbound/sdp.hpp"

#include <cmath>

namespace bellbound::sdp {

RMatrix real_embedding(const CMatrix& h) {
    const Eigen::Index n = h.rows();
    if (h.cols() != n) throw invalid_argument("real_embedding: matrix must be square");
    RMatrix out(2 * n, 2 * n);
    out.topLeftCorner(n, n) = h.real();
    out.topRightCorner(n, n) = -h.imag();
    out.bottomLeftCorner(n, n) = h.imag();
    out.bottomRightCorner(n, n) = h.real();
    return out;
}

CMatrix real_unembedding(const RMatrix& m) {
    const Eigen::Index n = m.rows() / 2;
    if (m.rows() != m.cols() || m.rows() % 2 != 0)
        throw invalid_argument("real_unembedding: bad dimensions");
    CMatrix z = 0.5 * (m.topLeftCorner(n, n) + m.bottomRightCorner(n, n)).cast<Complex>();
    z += Complex(0, 0.5) * (m.bottomLeftCorner(n, n) - m.topRightCorner(n, n)).cast<Complex>();
    return 0.5 * (z + z.adjoint().eval());
}

namespace {

// Core problem, all-real:
//   (P) min tr(C X)  s.t. tr(A_i X) = b_i, X >= 0
//   (D) max b.y      s.t. C - sum_i y_i A_i >= 0
// solved on the homogeneous self-dual model
//   A(X) - b tau = 0,  C tau - At(y) - S = 0,  b.y - tr(C X) - kappa = 0,
//   X, S >= 0, tau, kappa >= 0,
// with Nesterov-Todd scaled search directions, Mehrotra predictor-corrector
// steps, and a dense Cholesky factorization of the Schur complement. At
// convergence tau > 0 yields the optimum (X, y, S)/tau, while tau -> 0 with
// kappa > 0 certifies primal or dual infeasibility.
struct CoreProblem {
    RMatrix C;
    std::vector<RMatrix> A;
    RVector b;
};

struct CoreResult {
    SdpStatus status = SdpStatus::NumericalFailure;
    RMatrix X;
    RVector y;
    double pobj = 0.0, dobj = 0.0;
    double gap = 0.0;
    int iterations = 0;
    std::string message;
    std::vector<IterateRecord> history;
};

RMatrix sym(const RMatrix& q) { return 0.5 * (q + q.transpose()); }

// f(M) through the spectral decomposition.
RMatrix matfun(const RMatrix& m, double (*f)(double)) {
    Eigen::SelfAdjointEigenSolver<RMatrix> es(m);
    RVector d = es.eigenvalues();
    for (Eigen::Index i = 0; i < d.size(); ++i) d[i] = f(d[i]);
    return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

// Largest step alpha with M + alpha dM >= 0. Cholesky when it succeeds,
// spectral square root when M sits too close to the boundary for LLT.
double max_step(const RMatrix& m, const RMatrix& dm) {
    RMatrix w;
    Eigen::LLT<RMatrix> llt(m);
    if (llt.info() == Eigen::Success) {
        RMatrix l = llt.matrixL();
        w = l.triangularView<Eigen::Lower>().solve(dm.transpose());
        const RMatrix wt = w.transpose();
        w = l.triangularView<Eigen::Lower>().solve(wt);
    } else {
        const RMatrix mih =
            matfun(m, [](double t) { return 1.0 / std::sqrt(std::max(t, 1e-300)); });
        w = mih * dm * mih;
    }
    Eigen::SelfAdjointEigenSolver<RMatrix> es(sym(w), Eigen::EigenvaluesOnly);
    const double lam = es.eigenvalues().minCoeff();
    if (lam >= 0.0) return std::numeric_limits<double>::infinity();
    return -1.0 / lam;
}

CoreResult solve_core(const CoreProblem& prob, const SdpOptions& opts) {
    const int n = static_cast<int>(prob.C.rows());
    const int m = static_cast<int>(prob.A.size());
    CoreResult res;
    if (n > opts.dim_cap) {
        res.message = "dimension exceeds cap";
        return res;
    }

    const double bnorm = m ? prob.b.cwiseAbs().maxCoeff() : 0.0;
    const double cnorm = prob.C.norm();
    const double init = std::max(1.0, std::max(bnorm, cnorm / std::sqrt(double(n))));

    RMatrix X = init * RMatrix::Identity(n, n);
    RMatrix S = init * RMatrix::Identity(n, n);
    RVector y = RVector::Zero(m);
    double tau = 1.0, kappa = init;

    auto a_of = [&](const RMatrix& M) {
        RVector v(m);
        for (int i = 0; i < m; ++i) v[i] = (prob.A[i].cwiseProduct(M)).sum();
        return v;
    };
    auto at_of = [&](const RVector& v) {
        RMatrix M = RMatrix::Zero(n, n);
        for (int i = 0; i < m; ++i) M += v[i] * prob.A[i];
        return M;
    };

    const double mu0 = (X.cwiseProduct(S).sum() + tau * kappa) / (n + 1);
    int stalls = 0;
    double prev_alpha = 1.0;

    for (int iter = 0; iter < opts.max_iter; ++iter) {
        const double mu = (X.cwiseProduct(S).sum() + tau * kappa) / (n + 1);

        // Residuals of the homogeneous model. Once an equation holds to
        // roundoff its residual is pinned to zero; leftover noise would be
        // amplified by the scaling near convergence.
        RVector v_p = a_of(X) - prob.b * tau;
        RMatrix v_d = prob.C * tau - at_of(y) - S;
        double v_g = prob.b.dot(y) - prob.C.cwiseProduct(X).sum() - kappa;
        if (v_p.norm() < 1e-13 * (1.0 + bnorm)) v_p.setZero();
        if (v_d.norm() < 1e-13 * (1.0 + cnorm)) v_d.setZero();
        if (std::abs(v_g) < 1e-13 * (1.0 + std::abs(kappa))) v_g = 0.0;

        // Convergence check on the de-homogenized point.
        const double pobj = prob.C.cwiseProduct(X).sum() / tau;
        const double dobj = prob.b.dot(y) / tau;
        const double pinf = (a_of(X) / tau - prob.b).norm() / (1.0 + prob.b.norm());
        const double dinf = (prob.C - at_of(y / tau) - S / tau).norm() / (1.0 + cnorm);
        const double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
        res.history.push_back({pobj, dobj, pinf, dinf});
        if (pinf <= opts.feas_tol && dinf <= opts.feas_tol && gap <= opts.gap_tol) {
            res.status = SdpStatus::Optimal;
            res.X = X / tau;
            res.y = y / tau;
            res.pobj = pobj;
            res.dobj = dobj;
            res.gap = gap;
            res.iterations = iter;
            return res;
        }
        // Infeasibility: tau collapses while kappa stays bounded away from zero.
        if (mu < 1e-10 * mu0 && tau < 1e-6 * std::max(1.0, kappa)) {
            res.status = SdpStatus::Infeasible;
            res.message = prob.b.dot(y) > 0 ? "primal infeasible" : "dual infeasible";
            res.iterations = iter;
            return res;
        }

        // Nesterov-Todd scaling: W S W = X; G = W^{1/2}, V = G S G.
        const RMatrix Xh = matfun(X, [](double t) { return std::sqrt(std::max(t, 0.0)); });
        const RMatrix T = sym(Xh * S * Xh);
        const RMatrix Tmh =
            matfun(T, [](double t) { return 1.0 / std::sqrt(std::max(t, 1e-300)); });
        const RMatrix W = sym(Xh * Tmh * Xh);
        const RMatrix G = matfun(W, [](double t) { return std::sqrt(std::max(t, 0.0)); });
        const RMatrix Ginv =
            matfun(W, [](double t) { return 1.0 / std::sqrt(std::max(t, 1e-300)); });
        const RMatrix V = sym(G * S * G);
        Eigen::SelfAdjointEigenSolver<RMatrix> esV(V);
        if (esV.info() != Eigen::Success || esV.eigenvalues().maxCoeff() <= 0.0) {
            res.message = "NT scaling failed";
            break;
        }
        const RMatrix P = esV.eigenvectors();
        RVector lam = esV.eigenvalues();
        // Roundoff can push a converged null direction to zero; floor it so
        // the Jordan solve stays finite (only already-converged directions
        // are affected).
        const double lam_floor = 1e-12 * lam.maxCoeff();
        for (Eigen::Index i = 0; i < lam.size(); ++i)
            lam[i] = std::max(lam[i], lam_floor);

        // Solve V K + K V = 2 R' in the scaled space.
        auto jordan_solve = [&](const RMatrix& Rp) {
            RMatrix B = P.transpose() * Rp * P;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) B(i, j) *= 2.0 / (lam[i] + lam[j]);
            return RMatrix(P * B * P.transpose());
        };

        // Schur complement M_ij = tr(A_i W A_j W) and the C-column.
        RMatrix M(m, m);
        RVector u(m);
        const RMatrix WCW = sym(W * prob.C * W);
        for (int j = 0; j < m; ++j) {
            const RMatrix Yj = sym(W * prob.A[j] * W);
            for (int i = 0; i < m; ++i) M(i, j) = prob.A[i].cwiseProduct(Yj).sum();
            u[j] = prob.C.cwiseProduct(Yj).sum();
        }
        M = sym(M);
        const double c2 = prob.C.cwiseProduct(WCW).sum();

        Eigen::LDLT<RMatrix> ldlt(M);
        if (ldlt.info() != Eigen::Success) {
            res.message = "Schur complement factorization failed";
            break;
        }

        // One Newton solve for a scaled complementarity target (R', rc):
        //   dX + W dS W = G jordan_solve(R') G,  dtau kappa + tau dkappa = rc,
        // together with the three linear equations of the model.
        auto newton = [&](const RMatrix& Rp, double rc, RMatrix& dX, RVector& dy,
                          RMatrix& dS, double& dtau, double& dkappa) {
            const RMatrix Rnt = sym(G * jordan_solve(Rp) * G);
            const RMatrix Kmat = Rnt - sym(W * v_d * W);
            const RVector rhs1 = -v_p - a_of(Kmat);
            const double rhs2 = -v_g + prob.C.cwiseProduct(Kmat).sum() + rc / tau;
            const RVector g1 = ldlt.solve(rhs1);
            const RVector g2 = ldlt.solve(u + prob.b);
            const double denom = (prob.b - u).dot(g2) + c2 + kappa / tau;
            dtau = (rhs2 - (prob.b - u).dot(g1)) / denom;
            dy = g1 + dtau * g2;
            dS = v_d + prob.C * dtau - at_of(dy);
            dX = Kmat - dtau * WCW;
            for (int j = 0; j < m; ++j) dX += dy[j] * sym(W * prob.A[j] * W);
            dkappa = (rc - kappa * dtau) / tau;
        };

        auto step_bound = [&](const RMatrix& ddX, const RMatrix& ddS, double ddtau,
                              double ddkappa, double frac) {
            double a = 1.0;
            a = std::min(a, frac * max_step(X, ddX));
            a = std::min(a, frac * max_step(S, ddS));
            if (ddtau < 0) a = std::min(a, -frac * tau / ddtau);
            if (ddkappa < 0) a = std::min(a, -frac * kappa / ddkappa);
            return a;
        };
        auto mu_after = [&](const RMatrix& ddX, const RMatrix& ddS, double ddtau,
                            double ddkappa, double a) {
            return ((X + a * ddX).cwiseProduct(S + a * ddS).sum() +
                    (tau + a * ddtau) * (kappa + a * ddkappa)) /
                   (n + 1);
        };

        // Predictor (affine direction): R' = -V^2, so jordan_solve gives -V.
        RMatrix dX_aff, dS_aff;
        RVector dy_aff;
        double dtau_aff, dkappa_aff;
        const RMatrix V2 = V * V;
        newton(-V2, -tau * kappa, dX_aff, dy_aff, dS_aff, dtau_aff, dkappa_aff);
        const double a_aff = step_bound(dX_aff, dS_aff, dtau_aff, dkappa_aff, 0.98);
        const double mu_aff = mu_after(dX_aff, dS_aff, dtau_aff, dkappa_aff, a_aff);
        double sigma = std::pow(std::max(0.0, mu_aff / mu), 3.0);
        sigma = std::min(1.0, sigma);
        // Recover centrality when the previous realized step collapsed even
        // though the affine bound looked long (off-center iterates).
        if (prev_alpha < 0.3) sigma = std::max(sigma, 0.5);
        const double frac = 0.9 + 0.09 * std::min(1.0, a_aff);

        // Mehrotra corrector in the scaled space. Fall back to the plain
        // centering direction only if the second-order term wrecks the step.
        const RMatrix dXs = sym(Ginv * dX_aff * Ginv);
        const RMatrix dSs = sym(G * dS_aff * G);
        const RMatrix second = 0.5 * (dXs * dSs + dSs * dXs);
        RMatrix dX, dS;
        RVector dy;
        double dtau, dkappa;
        newton(sigma * mu * RMatrix::Identity(n, n) - V2 - second,
               sigma * mu - tau * kappa - dtau_aff * dkappa_aff, dX, dy, dS, dtau,
               dkappa);
        double alpha = step_bound(dX, dS, dtau, dkappa, frac);
        if (alpha < std::min(0.2, 0.5 * a_aff)) {
            RMatrix eX, eS;
            RVector ey;
            double etau, ekappa;
            newton(sigma * mu * RMatrix::Identity(n, n) - V2, sigma * mu - tau * kappa,
                   eX, ey, eS, etau, ekappa);
            const double a2 = step_bound(eX, eS, etau, ekappa, frac);
            if (a2 > alpha) {
                dX = eX;
                dS = eS;
                dy = ey;
                dtau = etau;
                dkappa = ekappa;
                alpha = a2;
            }
        }

        if (alpha < 1e-9) {
            if (++stalls >= 3) {
                res.message = "step length collapsed";
                break;
            }
        } else {
            stalls = 0;
        }

        prev_alpha = alpha;
        X = sym(X + alpha * dX);
        S = sym(S + alpha * dS);
        y += alpha * dy;
        tau += alpha * dtau;
        kappa += alpha * dkappa;
        res.iterations = iter + 1;
    }

    // Report the best-effort de-homogenized point.
    res.X = X / tau;
    res.y = y / tau;
    res.pobj = prob.C.cwiseProduct(X).sum() / tau;
    res.dobj = prob.b.dot(y) / tau;
    res.gap = std::abs(res.pobj - res.dobj) /
              (1.0 + std::abs(res.pobj) + std::abs(res.dobj));
    if (res.status == SdpStatus::NumericalFailure && res.message.empty()) {
        res.status = SdpStatus::MaxIterations;
        res.message = "iteration cap reached";
    } else if (!res.message.empty()) {
        res.status = SdpStatus::NumericalFailure;
    }
    return res;
}

bool all_real(const CMatrix& h) { return h.imag().cwiseAbs().maxCoeff() < 1e-14; }

} // namespace

SdpSolution solve_standard(const SdpStandard& p, const SdpOptions& opts) {
    const int m = static_cast<int>(p.fs.size());
    if (p.c.size() != m) throw invalid_argument("solve_standard: |c| != |F|");
    bool realdata = all_real(p.f0);
    for (const auto& f : p.fs) realdata = realdata && all_real(f);

    CoreProblem core;
    if (realdata) {
        core.C = p.f0.real();
        core.b = p.c;
        for (const auto& f : p.fs) core.A.push_back(f.real());
    } else {
        core.C = real_embedding(p.f0);
        core.b = 2.0 * p.c;
        for (const auto& f : p.fs) core.A.push_back(real_embedding(f));
    }
    CoreResult r = solve_core(core, opts);

    SdpSolution sol;
    sol.status = r.status;
    sol.iterations = r.iterations;
    sol.message = r.message;
    sol.duality_gap = r.gap;
    sol.history = std::move(r.history);
    if (r.X.size()) {
        if (realdata) sol.Z = r.X.cast<Complex>();
        else sol.Z = real_unembedding(r.X);
        // maximize -tr(F0 Z); the core minimizes tr(C X) (doubled when embedded)
        sol.objective = realdata ? -r.pobj : -r.pobj / 2.0;
    }
    return sol;
}

SdpSolution solve_inequality(const SdpInequality& p, const SdpOptions& opts) {
    const int m = static_cast<int>(p.gs.size());
    if (p.c.size() != m) throw invalid_argument("solve_inequality: |c| != |G|");
    bool realdata = all_real(p.g0);
    for (const auto& g : p.gs) realdata = realdata && all_real(g);

    // The LMI variables sit on the dual side of the core problem:
    //   max (-c).y  s.t. G0 - sum_i y_i (-G_i) >= 0.
    CoreProblem core;
    core.b = -p.c;
    if (realdata) {
        core.C = p.g0.real();
        for (const auto& g : p.gs) core.A.push_back(-g.real());
    } else {
        core.C = real_embedding(p.g0);
        for (const auto& g : p.gs) core.A.push_back(-real_embedding(g));
    }
    CoreResult r = solve_core(core, opts);

    SdpSolution sol;
    sol.status = r.status;
    sol.iterations = r.iterations;
    sol.message = r.message;
    sol.duality_gap = r.gap;
    sol.history = std::move(r.history);
    if (r.status == SdpStatus::Infeasible && r.message == "dual infeasible")
        sol.message = "LMI infeasible";
    if (r.y.size()) {
        sol.x = r.y;
        sol.objective = p.c.dot(r.y);
    }
    return sol;
}

} // namespace bellbound::sdp

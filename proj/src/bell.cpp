#include "bellbound/bell.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <numeric>

namespace bellbound::bell {

namespace {

int ipow(int base, int exp) {
    int64_t r = 1;
    for (int i = 0; i < exp; ++i) {
        r *= base;
        if (r > (int64_t)1e17) throw invalid_argument("strategy space overflow");
    }
    return static_cast<int>(r);
}

} // namespace

BellInequality BellInequality::zeros(BellScenario sc) {
    BellInequality q;
    q.sc = sc;
    q.marg_a.assign(size_t(sc.m_a) * sc.n_a, 0.0);
    q.marg_b.assign(size_t(sc.m_b) * sc.n_b, 0.0);
    q.joint.assign(size_t(sc.m_a) * sc.m_b * sc.n_a * sc.n_b, 0.0);
    return q;
}

void validate_povm(const MeasurementAssignment& meas, const Tolerances& tols) {
    auto check_party = [&](const std::vector<std::vector<CMatrix>>& party) {
        if (party.empty()) throw invalid_argument("POVM: no settings");
        const Eigen::Index d = party[0][0].rows();
        for (const auto& setting : party) {
            CMatrix sum = CMatrix::Zero(d, d);
            for (const CMatrix& e : setting) {
                if (e.rows() != d || e.cols() != d)
                    throw invalid_argument("POVM: inconsistent dimensions");
                require_hermitian(e, tols.hermiticity * 100);
                Eigen::SelfAdjointEigenSolver<CMatrix> es(e, Eigen::EigenvaluesOnly);
                if (es.eigenvalues().minCoeff() < -tols.psd)
                    throw invalid_argument("POVM: element not PSD");
                sum += e;
            }
            if ((sum - CMatrix::Identity(d, d)).cwiseAbs().maxCoeff() >
                tols.povm_completeness)
                throw invalid_argument("POVM: setting does not sum to identity");
        }
    };
    check_party(meas.alice);
    check_party(meas.bob);
}

double evaluate(const BellInequality& ineq, const DeterministicStrategy& s) {
    const auto& sc = ineq.sc;
    double v = ineq.b00;
    for (int sa = 0; sa < sc.m_a; ++sa) v += ineq.ma(sa, s.a[sa]);
    for (int sb = 0; sb < sc.m_b; ++sb) v += ineq.mb(sb, s.b[sb]);
    for (int sa = 0; sa < sc.m_a; ++sa)
        for (int sb = 0; sb < sc.m_b; ++sb) v += ineq.j(sa, sb, s.a[sa], s.b[sb]);
    return v;
}

namespace {

// Max over Alice strategies in [first, last): Bob's best response factorizes
// over his settings once Alice's outcomes are fixed.
double bound_range(const BellInequality& q, int first, int last) {
    const auto& sc = q.sc;
    std::vector<int> a(sc.m_a);
    std::vector<double> f(size_t(sc.m_b) * sc.n_b);
    double best = -std::numeric_limits<double>::infinity();
    for (int idx = first; idx < last; ++idx) {
        int rem = idx;
        for (int sa = 0; sa < sc.m_a; ++sa) {
            a[sa] = rem % sc.n_a;
            rem /= sc.n_a;
        }
        double base = q.b00;
        for (int sa = 0; sa < sc.m_a; ++sa) base += q.ma(sa, a[sa]);
        for (int sb = 0; sb < sc.m_b; ++sb)
            for (int ob = 0; ob < sc.n_b; ++ob) {
                double t = q.mb(sb, ob);
                for (int sa = 0; sa < sc.m_a; ++sa) t += q.j(sa, sb, a[sa], ob);
                f[sb * sc.n_b + ob] = t;
            }
        for (int sb = 0; sb < sc.m_b; ++sb) {
            double m = f[sb * sc.n_b];
            for (int ob = 1; ob < sc.n_b; ++ob) m = std::max(m, f[sb * sc.n_b + ob]);
            base += m;
        }
        best = std::max(best, base);
    }
    return best;
}

} // namespace

double classical_bound(const BellInequality& ineq, int threads) {
    const auto& sc = ineq.sc;
    const double space = std::pow(double(sc.n_a), sc.m_a) * std::pow(double(sc.n_b), sc.m_b);
    if (space > 1e8) throw invalid_argument("classical_bound: scenario too large");
    const int n_alice = ipow(sc.n_a, sc.m_a);
    if (threads <= 1 || n_alice < 4096) return bound_range(ineq, 0, n_alice);
    std::vector<std::future<double>> parts;
    const int chunk = (n_alice + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        int lo = t * chunk, hi = std::min(n_alice, lo + chunk);
        if (lo >= hi) break;
        parts.push_back(std::async(std::launch::async,
                                   [&ineq, lo, hi] { return bound_range(ineq, lo, hi); }));
    }
    double best = -std::numeric_limits<double>::infinity();
    for (auto& p : parts) best = std::max(best, p.get());
    return best;
}

double classical_bound(const CorrelationInequality& ineq) {
    const int ma = static_cast<int>(ineq.b.rows());
    const int mb = static_cast<int>(ineq.b.cols());
    double best = -std::numeric_limits<double>::infinity();
    for (int mask = 0; mask < (1 << ma); ++mask) {
        double base = 0.0;
        for (int sb = 0; sb < mb; ++sb) {
            double col = ineq.marg_b.size() ? ineq.marg_b[sb] : 0.0;
            for (int sa = 0; sa < ma; ++sa)
                col += ineq.b(sa, sb) * ((mask >> sa) & 1 ? -1.0 : 1.0);
            base += std::abs(col);
        }
        for (int sa = 0; sa < ma; ++sa)
            if (ineq.marg_a.size())
                base += ineq.marg_a[sa] * ((mask >> sa) & 1 ? -1.0 : 1.0);
        best = std::max(best, base);
    }
    return best;
}

double classical_bound(const MultipartiteCorrelation& ineq) {
    const int n = ineq.parties;
    if (n > 8) throw invalid_argument("classical_bound: too many parties");
    const int n_assign = 1 << (2 * n); // two +-1 outcomes per party
    const int n_settings = 1 << n;
    double best = -std::numeric_limits<double>::infinity();
    for (int assign = 0; assign < n_assign; ++assign) {
        double v = 0.0;
        for (int s = 0; s < n_settings; ++s) {
            double prod = ineq.coeff[s];
            if (prod == 0.0) continue;
            for (int j = 0; j < n; ++j) {
                const int setting = (s >> (n - 1 - j)) & 1;
                const int bit = (assign >> (2 * j + setting)) & 1;
                if (bit) prod = -prod;
            }
            v += prod;
        }
        best = std::max(best, v);
    }
    return best;
}

namespace {

BellInequality finalize(BellInequality q) {
    q.beta_lhv = classical_bound(q);
    return q;
}

} // namespace

BellInequality ch() {
    BellInequality q = BellInequality::zeros({2, 2, 2, 2});
    q.ma(0, 0) = -1;
    q.mb(0, 0) = -1;
    q.j(0, 0, 0, 0) = 1;
    q.j(0, 1, 0, 0) = 1;
    q.j(1, 0, 0, 0) = 1;
    q.j(1, 1, 0, 0) = -1;
    return finalize(q);
}

BellInequality i3322() {
    BellInequality q = BellInequality::zeros({3, 3, 2, 2});
    q.ma(0, 0) = -1;
    q.mb(0, 0) = -2;
    q.mb(1, 0) = -1;
    const double jt[3][3] = {{1, 1, 1}, {1, 1, -1}, {1, -1, 0}};
    for (int sa = 0; sa < 3; ++sa)
        for (int sb = 0; sb < 3; ++sb) q.j(sa, sb, 0, 0) = jt[sa][sb];
    return finalize(q);
}

namespace {

BellInequality i4422_from(const double marg_a[4], const double marg_b[4],
                          const double jt[4][4]) {
    BellInequality q = BellInequality::zeros({4, 4, 2, 2});
    for (int s = 0; s < 4; ++s) {
        q.ma(s, 0) = marg_a[s];
        q.mb(s, 0) = marg_b[s];
    }
    for (int sa = 0; sa < 4; ++sa)
        for (int sb = 0; sb < 4; ++sb) q.j(sa, sb, 0, 0) = jt[sa][sb];
    return finalize(q);
}

} // namespace

BellInequality i4422_1() {
    const double ma[4] = {-1, 0, -1, -1}, mb[4] = {0, -1, -1, -1};
    const double jt[4][4] = {{-1, 1, 0, 2}, {0, 1, -1, -1}, {1, -1, 1, 1}, {-1, 1, 2, -1}};
    return i4422_from(ma, mb, jt);
}

BellInequality i4422_2() {
    const double ma[4] = {0, -1, -1, 0}, mb[4] = {0, 0, -1, -1};
    const double jt[4][4] = {{1, 1, 1, 0}, {1, -1, 0, 1}, {-1, 1, 1, 1}, {0, -1, 1, 0}};
    return i4422_from(ma, mb, jt);
}

BellInequality i4422_3() {
    const double ma[4] = {-1, 0, 0, 0}, mb[4] = {-3, -2, -1, 0};
    const double jt[4][4] = {{1, 1, 1, 1}, {1, 1, 1, -1}, {1, 1, -1, 0}, {1, -1, 0, 0}};
    return i4422_from(ma, mb, jt);
}

BellInequality i4422_a5() {
    const double ma[4] = {-2, -1, -1, 0}, mb[4] = {0, -1, -1, -1};
    const double jt[4][4] = {{-1, 1, 0, 2}, {0, 1, -1, -1}, {1, -1, 1, 1}, {-1, 1, 2, -1}};
    return i4422_from(ma, mb, jt);
}

BellInequality imm22(int m) {
    if (m < 2) throw invalid_argument("imm22: m must be >= 2");
    BellInequality q = BellInequality::zeros({m, m, 2, 2});
    q.mb(0, 0) = -1;
    for (int sa = 0; sa < m; ++sa) q.ma(sa, 0) = -double(m - 1 - sa);
    for (int sa = 0; sa < m; ++sa)
        for (int sb = 0; sb < m; ++sb) {
            const int s = (sa + 1) + (sb + 1);
            if (s <= m + 1) q.j(sa, sb, 0, 0) = 1;
            else if (s == m + 2) q.j(sa, sb, 0, 0) = -1;
        }
    return finalize(q);
}

BellInequality i22nn(int n) {
    if (n < 2) throw invalid_argument("i22nn: n must be >= 2");
    BellInequality q = BellInequality::zeros({2, 2, n, n});
    for (int oa = 1; oa <= n - 1; ++oa) {
        q.ma(0, oa - 1) = -1;
        q.mb(0, oa - 1) = -1;
        for (int ob = 1; ob <= n - oa; ++ob) q.j(0, 0, oa - 1, ob - 1) = 1;
        for (int ob = n - oa; ob <= n - 1; ++ob) {
            q.j(0, 1, oa - 1, ob - 1) = 1;
            q.j(1, 0, oa - 1, ob - 1) = 1;
            q.j(1, 1, oa - 1, ob - 1) = -1;
        }
    }
    return finalize(q);
}

BellInequality cglmp(int n) {
    if (n < 2) throw invalid_argument("cglmp: n must be >= 2");
    BellInequality q = BellInequality::zeros({2, 2, n, n});
    auto b11 = [n](int oa, int ob) { // 1-based outcome labels
        return ob >= oa ? 1.0 + 2.0 * (oa - ob) / (n - 1.0)
                        : -1.0 + 2.0 * (oa - ob - 1) / (n - 1.0);
    };
    auto b12 = [n](int oa, int ob) {
        return ob > oa ? -1.0 + 2.0 * (ob - oa - 1) / (n - 1.0)
                       : 1.0 + 2.0 * (ob - oa) / (n - 1.0);
    };
    for (int oa = 1; oa <= n; ++oa)
        for (int ob = 1; ob <= n; ++ob) {
            q.j(0, 0, oa - 1, ob - 1) = b11(oa, ob);
            q.j(0, 1, oa - 1, ob - 1) = b12(oa, ob);
            q.j(1, 0, oa - 1, ob - 1) = b12(oa, ob);
            q.j(1, 1, oa - 1, ob - 1) = -b12(oa, ob);
        }
    return finalize(q);
}

CorrelationInequality chsh() {
    CorrelationInequality q;
    q.b.resize(2, 2);
    q.b << 1, 1, 1, -1;
    q.beta_lhv = classical_bound(q);
    return q;
}

CorrelationInequality i3322_corr() {
    CorrelationInequality q;
    q.b.resize(3, 3);
    q.b << 1, 1, 1, 1, 1, -1, 1, -1, 0;
    q.marg_a.resize(3);
    q.marg_a << -1, -1, 0;
    q.marg_b.resize(3);
    q.marg_b << 1, 1, 0;
    q.beta_lhv = classical_bound(q);
    return q;
}

CorrelationInequality as4() {
    CorrelationInequality q;
    q.b.resize(4, 4);
    q.b << 1, 1, 1, 1, 1, 1, 1, -1, 1, 1, -2, 0, 1, -1, 0, 0;
    q.beta_lhv = classical_bound(q);
    return q;
}

CorrelationInequality d4() {
    CorrelationInequality q;
    q.b.resize(4, 4);
    q.b << 2, 1, 1, 2, 1, 1, 2, -2, 1, 2, -2, -1, 2, -2, -1, -1;
    q.beta_lhv = classical_bound(q);
    return q;
}

MultipartiteCorrelation mermin(int n) {
    if (n < 2) throw invalid_argument("mermin: n must be >= 2");
    std::vector<double> t = {1.0, 0.0}; // F_1 = o^[1]_1
    for (int k = 2; k <= n; ++k) {
        const int sz = static_cast<int>(t.size());
        std::vector<double> next(size_t(sz) * 2, 0.0);
        for (int idx = 0; idx < sz; ++idx) {
            const double f = t[idx];
            const double fp = t[(sz - 1) ^ idx]; // all settings interchanged
            next[size_t(idx) << 1] = 0.5 * (f + fp);
            next[(size_t(idx) << 1) | 1] = 0.5 * (f - fp);
        }
        t = std::move(next);
    }
    MultipartiteCorrelation q;
    q.parties = n;
    q.coeff = std::move(t);
    q.beta_lhv = classical_bound(q);
    return q;
}

AnyInequality named(const std::string& tag) {
    auto colon = tag.find(':');
    const std::string base = tag.substr(0, colon);
    int arg = 0;
    if (colon != std::string::npos) arg = std::stoi(tag.substr(colon + 1));
    if (base == "ch") return ch();
    if (base == "chsh") return chsh();
    if (base == "i3322") return i3322();
    if (base == "i4422_1") return i4422_1();
    if (base == "i4422_2") return i4422_2();
    if (base == "i4422_3" || base == "i4422") return i4422_3();
    if (base == "i4422_a5" || base == "a5") return i4422_a5();
    if (base == "imm22") return imm22(arg);
    if (base == "i22nn") return i22nn(arg);
    if (base == "i2233") return i22nn(3);
    if (base == "i2244") return i22nn(4);
    if (base == "cglmp") return cglmp(arg);
    if (base == "i3322_corr") return i3322_corr();
    if (base == "as4") return as4();
    if (base == "d4") return d4();
    if (base == "mermin") return mermin(arg);
    throw invalid_argument("named: unknown inequality tag '" + tag + "'");
}

BellInequality relabel(const BellInequality& ineq, const RelabelOp& op) {
    BellInequality out;
    if (std::holds_alternative<SwapParties>(op)) {
        out = BellInequality::zeros({ineq.sc.m_b, ineq.sc.m_a, ineq.sc.n_b, ineq.sc.n_a});
        out.b00 = ineq.b00;
        out.marg_a = ineq.marg_b;
        out.marg_b = ineq.marg_a;
        for (int sa = 0; sa < out.sc.m_a; ++sa)
            for (int sb = 0; sb < out.sc.m_b; ++sb)
                for (int oa = 0; oa < out.sc.n_a; ++oa)
                    for (int ob = 0; ob < out.sc.n_b; ++ob)
                        out.j(sa, sb, oa, ob) = ineq.j(sb, sa, ob, oa);
    } else if (const auto* ps = std::get_if<PermuteSettings>(&op)) {
        out = ineq;
        const auto& perm = ps->perm;
        if (ps->party == Subsystem::A) {
            if (static_cast<int>(perm.size()) != ineq.sc.m_a)
                throw invalid_argument("relabel: bad setting permutation");
            for (int sa = 0; sa < ineq.sc.m_a; ++sa) {
                for (int oa = 0; oa < ineq.sc.n_a; ++oa)
                    out.ma(perm[sa], oa) = ineq.ma(sa, oa);
                for (int sb = 0; sb < ineq.sc.m_b; ++sb)
                    for (int oa = 0; oa < ineq.sc.n_a; ++oa)
                        for (int ob = 0; ob < ineq.sc.n_b; ++ob)
                            out.j(perm[sa], sb, oa, ob) = ineq.j(sa, sb, oa, ob);
            }
        } else {
            if (static_cast<int>(perm.size()) != ineq.sc.m_b)
                throw invalid_argument("relabel: bad setting permutation");
            for (int sb = 0; sb < ineq.sc.m_b; ++sb) {
                for (int ob = 0; ob < ineq.sc.n_b; ++ob)
                    out.mb(perm[sb], ob) = ineq.mb(sb, ob);
                for (int sa = 0; sa < ineq.sc.m_a; ++sa)
                    for (int oa = 0; oa < ineq.sc.n_a; ++oa)
                        for (int ob = 0; ob < ineq.sc.n_b; ++ob)
                            out.j(sa, perm[sb], oa, ob) = ineq.j(sa, sb, oa, ob);
            }
        }
    } else {
        const auto& po = std::get<PermuteOutcomes>(op);
        out = ineq;
        if (po.party == Subsystem::A) {
            if (static_cast<int>(po.perm.size()) != ineq.sc.n_a ||
                po.setting >= ineq.sc.m_a)
                throw invalid_argument("relabel: bad outcome permutation");
            for (int oa = 0; oa < ineq.sc.n_a; ++oa) {
                out.ma(po.setting, po.perm[oa]) = ineq.ma(po.setting, oa);
                for (int sb = 0; sb < ineq.sc.m_b; ++sb)
                    for (int ob = 0; ob < ineq.sc.n_b; ++ob)
                        out.j(po.setting, sb, po.perm[oa], ob) =
                            ineq.j(po.setting, sb, oa, ob);
            }
        } else {
            if (static_cast<int>(po.perm.size()) != ineq.sc.n_b ||
                po.setting >= ineq.sc.m_b)
                throw invalid_argument("relabel: bad outcome permutation");
            for (int ob = 0; ob < ineq.sc.n_b; ++ob) {
                out.mb(po.setting, po.perm[ob]) = ineq.mb(po.setting, ob);
                for (int sa = 0; sa < ineq.sc.m_a; ++sa)
                    for (int oa = 0; oa < ineq.sc.n_a; ++oa)
                        out.j(sa, po.setting, oa, po.perm[ob]) =
                            ineq.j(sa, po.setting, oa, ob);
            }
        }
    }
    out.beta_lhv = ineq.beta_lhv; // invariant under relabeling
    return out;
}

BellInequality relabel(const BellInequality& ineq, const std::vector<RelabelOp>& ops) {
    BellInequality out = ineq;
    for (const auto& op : ops) out = relabel(out, op);
    return out;
}

namespace {

// Integer copy of a Bell inequality's coefficients scaled by `denom` so the
// CGLMP chain stays in exact arithmetic.
struct IntIneq {
    BellScenario sc;
    int64_t b00 = 0;
    std::vector<int64_t> marg_a, marg_b, joint;
    int64_t& ma(int sa, int oa) { return marg_a[sa * sc.n_a + oa]; }
    int64_t& mb(int sb, int ob) { return marg_b[sb * sc.n_b + ob]; }
    int64_t& j(int sa, int sb, int oa, int ob) {
        return joint[((sa * sc.m_b + sb) * sc.n_a + oa) * sc.n_b + ob];
    }
};

IntIneq to_int(const BellInequality& q, int denom) {
    IntIneq z;
    z.sc = q.sc;
    auto conv = [denom](const std::vector<double>& v) {
        std::vector<int64_t> out(v.size());
        for (size_t i = 0; i < v.size(); ++i) {
            const double scaled = v[i] * denom;
            out[i] = std::llround(scaled);
            if (std::abs(scaled - double(out[i])) > 1e-9)
                throw std::runtime_error("cglmp_to_i22nn: non-integral coefficient");
        }
        return out;
    };
    z.b00 = std::llround(q.b00 * denom);
    z.marg_a = conv(q.marg_a);
    z.marg_b = conv(q.marg_b);
    z.joint = conv(q.joint);
    return z;
}

BellInequality from_int(const IntIneq& z, int denom) {
    BellInequality q = BellInequality::zeros(z.sc);
    q.b00 = double(z.b00) / denom;
    for (size_t i = 0; i < z.marg_a.size(); ++i) q.marg_a[i] = double(z.marg_a[i]) / denom;
    for (size_t i = 0; i < z.marg_b.size(); ++i) q.marg_b[i] = double(z.marg_b[i]) / denom;
    for (size_t i = 0; i < z.joint.size(); ++i) q.joint[i] = double(z.joint[i]) / denom;
    return q;
}

} // namespace

CglmpConversion cglmp_to_i22nn(int n) {
    if (n < 2) throw invalid_argument("cglmp_to_i22nn: n must be >= 2");
    CglmpConversion out;
    out.n = n;
    out.scale = 2.0 * n / (n - 1.0);

    // Work on (n-1)-scaled integer coefficients of the shifted CGLMP form
    // (constant moved to the lhs).
    IntIneq z = to_int(cglmp(n), n - 1);
    z.b00 -= int64_t(2) * (n - 1);
    out.moves.push_back("shift the classical constant 2 to the left-hand side");

    // No-signaling: zero Alice's n-th-outcome joint coefficients.
    for (int sa = 0; sa < 2; ++sa)
        for (int sb = 0; sb < 2; ++sb)
            for (int ob = 0; ob < n; ++ob) {
                const int64_t t = z.j(sa, sb, n - 1, ob);
                for (int oa = 0; oa < n; ++oa) z.j(sa, sb, oa, ob) -= t;
                z.mb(sb, ob) += t;
            }
    out.moves.push_back("no-signaling elimination of Alice's outcome n");

    // No-signaling: zero Bob's n-th-outcome joint coefficients.
    for (int sa = 0; sa < 2; ++sa)
        for (int sb = 0; sb < 2; ++sb)
            for (int oa = 0; oa < n; ++oa) {
                const int64_t t = z.j(sa, sb, oa, n - 1);
                for (int ob = 0; ob < n; ++ob) z.j(sa, sb, oa, ob) -= t;
                z.ma(sa, oa) += t;
            }
    out.moves.push_back("no-signaling elimination of Bob's outcome n");

    // Marginal normalization: zero Bob's n-th-outcome marginal coefficients.
    for (int sb = 0; sb < 2; ++sb) {
        const int64_t t = z.mb(sb, n - 1);
        for (int ob = 0; ob < n; ++ob) z.mb(sb, ob) -= t;
        z.b00 += t;
    }
    out.moves.push_back("normalization elimination of Bob's marginal outcome n");

    // Relabel Bob's outcomes o_b -> n - o_b (outcome n fixed).
    {
        IntIneq w = z;
        for (int sb = 0; sb < 2; ++sb)
            for (int ob = 1; ob <= n - 1; ++ob) {
                w.mb(sb, (n - ob) - 1) = z.mb(sb, ob - 1);
                for (int sa = 0; sa < 2; ++sa)
                    for (int oa = 0; oa < n; ++oa)
                        w.j(sa, sb, oa, (n - ob) - 1) = z.j(sa, sb, oa, ob - 1);
            }
        z = w;
    }
    out.moves.push_back("relabel Bob's outcomes o_b -> n - o_b");

    // Exact comparison against 2n * i22nn(n) (both sides scaled by n-1).
    IntIneq target = to_int(i22nn(n), 1);
    bool ok = z.b00 == target.b00 * 2 * n;
    for (size_t i = 0; ok && i < z.joint.size(); ++i)
        ok = z.joint[i] == target.joint[i] * 2 * n;
    for (size_t i = 0; ok && i < z.marg_a.size(); ++i)
        ok = z.marg_a[i] == target.marg_a[i] * 2 * n;
    for (size_t i = 0; ok && i < z.marg_b.size(); ++i)
        ok = z.marg_b[i] == target.marg_b[i] * 2 * n;
    out.exact_match = ok;
    out.transformed = finalize(from_int(z, n - 1));
    return out;
}

CMatrix bell_operator(const BellInequality& ineq, const MeasurementAssignment& meas) {
    const auto& sc = ineq.sc;
    if (static_cast<int>(meas.alice.size()) != sc.m_a ||
        static_cast<int>(meas.bob.size()) != sc.m_b ||
        static_cast<int>(meas.alice[0].size()) != sc.n_a ||
        static_cast<int>(meas.bob[0].size()) != sc.n_b)
        throw invalid_argument("bell_operator: assignment does not match scenario");
    const int da = meas.dim_a(), db = meas.dim_b();
    const CMatrix ida = CMatrix::Identity(da, da), idb = CMatrix::Identity(db, db);
    CMatrix op = ineq.b00 * kron(ida, idb);
    for (int sa = 0; sa < sc.m_a; ++sa)
        for (int oa = 0; oa < sc.n_a; ++oa)
            if (ineq.ma(sa, oa) != 0.0) op += ineq.ma(sa, oa) * kron(meas.alice[sa][oa], idb);
    for (int sb = 0; sb < sc.m_b; ++sb)
        for (int ob = 0; ob < sc.n_b; ++ob)
            if (ineq.mb(sb, ob) != 0.0) op += ineq.mb(sb, ob) * kron(ida, meas.bob[sb][ob]);
    for (int sa = 0; sa < sc.m_a; ++sa)
        for (int sb = 0; sb < sc.m_b; ++sb)
            for (int oa = 0; oa < sc.n_a; ++oa)
                for (int ob = 0; ob < sc.n_b; ++ob) {
                    const double c = ineq.j(sa, sb, oa, ob);
                    if (c != 0.0) op += c * kron(meas.alice[sa][oa], meas.bob[sb][ob]);
                }
    return op;
}

CMatrix correlation_operator(const CorrelationInequality& cineq,
                             const std::vector<CMatrix>& alice_obs,
                             const std::vector<CMatrix>& bob_obs) {
    const int ma = static_cast<int>(cineq.b.rows()), mb = static_cast<int>(cineq.b.cols());
    if (static_cast<int>(alice_obs.size()) != ma || static_cast<int>(bob_obs.size()) != mb)
        throw invalid_argument("correlation_operator: observable count mismatch");
    auto check_involution = [](const CMatrix& o) {
        require_hermitian(o, 1e-8);
        if ((o * o - CMatrix::Identity(o.rows(), o.cols())).cwiseAbs().maxCoeff() > 1e-8)
            throw invalid_argument("correlation_operator: observable is not an involution");
    };
    for (const auto& o : alice_obs) check_involution(o);
    for (const auto& o : bob_obs) check_involution(o);
    const int da = static_cast<int>(alice_obs[0].rows());
    const int db = static_cast<int>(bob_obs[0].rows());
    CMatrix op = CMatrix::Zero(da * db, da * db);
    for (int sa = 0; sa < ma; ++sa)
        for (int sb = 0; sb < mb; ++sb)
            if (cineq.b(sa, sb) != 0.0) op += cineq.b(sa, sb) * kron(alice_obs[sa], bob_obs[sb]);
    for (int sa = 0; sa < ma && cineq.marg_a.size(); ++sa)
        if (cineq.marg_a[sa] != 0.0)
            op += cineq.marg_a[sa] * kron(alice_obs[sa], CMatrix::Identity(db, db));
    for (int sb = 0; sb < mb && cineq.marg_b.size(); ++sb)
        if (cineq.marg_b[sb] != 0.0)
            op += cineq.marg_b[sb] * kron(CMatrix::Identity(da, da), bob_obs[sb]);
    return op;
}

BellInequality correlation_to_probability(const CorrelationInequality& cineq) {
    const int ma = static_cast<int>(cineq.b.rows()), mb = static_cast<int>(cineq.b.cols());
    BellInequality q = BellInequality::zeros({ma, mb, 2, 2});
    auto sign = [](int o) { return o == 0 ? 1.0 : -1.0; };
    for (int sa = 0; sa < ma; ++sa)
        for (int sb = 0; sb < mb; ++sb)
            for (int oa = 0; oa < 2; ++oa)
                for (int ob = 0; ob < 2; ++ob)
                    q.j(sa, sb, oa, ob) = cineq.b(sa, sb) * sign(oa) * sign(ob);
    for (int sa = 0; sa < ma && cineq.marg_a.size(); ++sa)
        for (int oa = 0; oa < 2; ++oa) q.ma(sa, oa) = cineq.marg_a[sa] * sign(oa);
    for (int sb = 0; sb < mb && cineq.marg_b.size(); ++sb)
        for (int ob = 0; ob < 2; ++ob) q.mb(sb, ob) = cineq.marg_b[sb] * sign(ob);
    return finalize(q);
}

ProbabilityVector probabilities(const DensityMatrix& rho,
                                const MeasurementAssignment& meas) {
    ProbabilityVector p;
    p.sc = {static_cast<int>(meas.alice.size()), static_cast<int>(meas.bob.size()),
            static_cast<int>(meas.alice[0].size()), static_cast<int>(meas.bob[0].size())};
    p.joint.resize(size_t(p.sc.m_a) * p.sc.m_b * p.sc.n_a * p.sc.n_b);
    size_t idx = 0;
    for (int sa = 0; sa < p.sc.m_a; ++sa)
        for (int sb = 0; sb < p.sc.m_b; ++sb)
            for (int oa = 0; oa < p.sc.n_a; ++oa)
                for (int ob = 0; ob < p.sc.n_b; ++ob)
                    p.joint[idx++] =
                        (rho.mat() * kron(meas.alice[sa][oa], meas.bob[sb][ob]))
                            .trace()
                            .real();
    return p;
}

double normalization_residual(const ProbabilityVector& p) {
    double worst = 0.0;
    for (int sa = 0; sa < p.sc.m_a; ++sa)
        for (int sb = 0; sb < p.sc.m_b; ++sb) {
            double sum = 0.0;
            for (int oa = 0; oa < p.sc.n_a; ++oa)
                for (int ob = 0; ob < p.sc.n_b; ++ob) sum += p.j(p.sc, sa, sb, oa, ob);
            worst = std::max(worst, std::abs(sum - 1.0));
        }
    return worst;
}

double no_signaling_residual(const ProbabilityVector& p) {
    double worst = 0.0;
    // Alice's marginals must not depend on s_b, and vice versa.
    for (int sa = 0; sa < p.sc.m_a; ++sa)
        for (int oa = 0; oa < p.sc.n_a; ++oa) {
            double ref = 0.0;
            for (int sb = 0; sb < p.sc.m_b; ++sb) {
                double m = 0.0;
                for (int ob = 0; ob < p.sc.n_b; ++ob) m += p.j(p.sc, sa, sb, oa, ob);
                if (sb == 0) ref = m;
                else worst = std::max(worst, std::abs(m - ref));
            }
        }
    for (int sb = 0; sb < p.sc.m_b; ++sb)
        for (int ob = 0; ob < p.sc.n_b; ++ob) {
            double ref = 0.0;
            for (int sa = 0; sa < p.sc.m_a; ++sa) {
                double m = 0.0;
                for (int oa = 0; oa < p.sc.n_a; ++oa) m += p.j(p.sc, sa, sb, oa, ob);
                if (sa == 0) ref = m;
                else worst = std::max(worst, std::abs(m - ref));
            }
        }
    return worst;
}

double operator_relation_residual(const DensityMatrix& rho, int n,
                                  const MeasurementAssignment& meas) {
    // The conversion chain ends with the relabeling o_b -> n - o_b on Bob's
    // side, so on a shared assignment the I22nn side is evaluated with Bob's
    // outcomes permuted accordingly (identity for n = 2).
    std::vector<int> perm(n);
    perm[n - 1] = n - 1;
    for (int ob = 1; ob <= n - 1; ++ob) perm[ob - 1] = (n - ob) - 1;
    BellInequality i22 = i22nn(n);
    for (int sb = 0; sb < 2; ++sb)
        i22 = relabel(i22, PermuteOutcomes{Subsystem::B, sb, perm});
    const CMatrix b_in = bell_operator(cglmp(n), meas);
    const CMatrix b_i22 = bell_operator(i22, meas);
    const double lhs = (rho.mat() * b_in).trace().real();
    const double rhs = (rho.mat() * b_i22).trace().real();
    return std::abs(lhs - 2.0 * n / (n - 1.0) * rhs - 2.0);
}

double operator_relation_residual(const DensityMatrix& rho, int n, uint64_t seed) {
    std::mt19937_64 rng(seed);
    MeasurementAssignment meas =
        random_measurements({2, 2, n, n}, rho.split().d_a, rho.split().d_b, rng);
    return operator_relation_residual(rho, n, meas);
}

namespace {

CMatrix haar_unitary(int d, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    CMatrix g(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) g(i, j) = Complex(gauss(rng), gauss(rng));
    Eigen::HouseholderQR<CMatrix> qr(g);
    CMatrix q = qr.householderQ();
    CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < d; ++j) {
        Complex ph = r(j, j) / std::abs(r(j, j));
        q.col(j) *= ph;
    }
    return q;
}

// Uniform composition of d into n parts. Parts are kept positive whenever
// n <= d (a zero or full-rank projector is a stuck point of the see-saw);
// with more outcomes than dimensions zeros are unavoidable and allowed.
std::vector<int> random_composition(int d, int n, std::mt19937_64& rng) {
    const bool positive = n <= d;
    const int slots_count = positive ? d - 1 : d + n - 1;
    std::vector<int> slots(slots_count);
    std::iota(slots.begin(), slots.end(), 0);
    for (int i = 0; i < n - 1; ++i) {
        std::uniform_int_distribution<int> pick(i, slots_count - 1);
        std::swap(slots[i], slots[pick(rng)]);
    }
    std::vector<int> bars(slots.begin(), slots.begin() + (n - 1));
    std::sort(bars.begin(), bars.end());
    std::vector<int> parts(n);
    int prev = -1;
    for (int i = 0; i < n - 1; ++i) {
        parts[i] = positive ? bars[i] - prev : bars[i] - prev - 1;
        prev = bars[i];
    }
    parts[n - 1] = positive ? d - 1 - prev : d + n - 2 - prev;
    return parts;
}

std::vector<std::vector<CMatrix>> random_party(int settings, int outcomes, int d,
                                               std::mt19937_64& rng, bool generic,
                                               double eps) {
    std::vector<std::vector<CMatrix>> out(settings);
    for (int s = 0; s < settings; ++s) {
        const CMatrix u = haar_unitary(d, rng);
        const std::vector<int> ranks = random_composition(d, outcomes, rng);
        out[s].resize(outcomes);
        int col = 0;
        for (int o = 0; o < outcomes; ++o) {
            CMatrix p = CMatrix::Zero(d, d);
            for (int r = 0; r < ranks[o]; ++r, ++col)
                p += u.col(col) * u.col(col).adjoint();
            out[s][o] = p;
        }
        if (generic) {
            const double norm = 1.0 - eps + outcomes * eps / d;
            for (int o = 0; o < outcomes; ++o)
                out[s][o] = ((1.0 - eps) * out[s][o] +
                             (eps / d) * CMatrix::Identity(d, d)) /
                            norm;
        }
    }
    return out;
}

} // namespace

MeasurementAssignment random_measurements(const BellScenario& sc, int d_a, int d_b,
                                          std::mt19937_64& rng, bool generic_povm,
                                          double epsilon) {
    MeasurementAssignment meas;
    meas.alice = random_party(sc.m_a, sc.n_a, d_a, rng, generic_povm, epsilon);
    meas.bob = random_party(sc.m_b, sc.n_b, d_b, rng, generic_povm, epsilon);
    return meas;
}

} // namespace bellbound::bell

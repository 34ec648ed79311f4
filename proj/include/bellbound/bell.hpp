#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "bellbound/qcore.hpp"

namespace bellbound::bell {

struct BellScenario {
    int m_a = 2, m_b = 2; // settings per party
    int n_a = 2, n_b = 2; // outcomes per setting
    bool operator==(const BellScenario&) const = default;
};

// Bell inequality for probabilities in block-coefficient form,
//   S = b00 + sum marg_a[sa][oa] pA + sum marg_b[sb][ob] pB + sum joint[...] pAB <= beta_lhv.
// Blocks are stored at full n_a x n_b size; constructors from the literature
// leave the last outcome's coefficients as explicit zeros.
struct BellInequality {
    BellScenario sc;
    double b00 = 0.0;
    std::vector<double> marg_a; // m_a * n_a
    std::vector<double> marg_b; // m_b * n_b
    std::vector<double> joint;  // m_a * m_b * n_a * n_b
    double beta_lhv = 0.0;      // cached vertex-enumeration maximum

    static BellInequality zeros(BellScenario sc);
    double& ma(int sa, int oa) { return marg_a[sa * sc.n_a + oa]; }
    double ma(int sa, int oa) const { return marg_a[sa * sc.n_a + oa]; }
    double& mb(int sb, int ob) { return marg_b[sb * sc.n_b + ob]; }
    double mb(int sb, int ob) const { return marg_b[sb * sc.n_b + ob]; }
    double& j(int sa, int sb, int oa, int ob) {
        return joint[((sa * sc.m_b + sb) * sc.n_a + oa) * sc.n_b + ob];
    }
    double j(int sa, int sb, int oa, int ob) const {
        return joint[((sa * sc.m_b + sb) * sc.n_a + oa) * sc.n_b + ob];
    }
};

// Bipartite correlation inequality: sum b[sa][sb] E(A_sa, B_sb) + marginals <= beta.
struct CorrelationInequality {
    RMatrix b;       // m_a x m_b
    RVector marg_a;  // size m_a or 0
    RVector marg_b;  // size m_b or 0
    double beta_lhv = 0.0;
};

// n-party full-correlation inequality with two dichotomic settings per party:
//   sum_s coeff[s] E(o^1_{s_1}, ..., o^n_{s_n}) <= beta.
struct MultipartiteCorrelation {
    int parties = 2;
    std::vector<double> coeff; // 2^parties entries, setting bits: party 1 = MSB
    double beta_lhv = 0.0;
};

struct DeterministicStrategy {
    std::vector<int> a; // outcome per Alice setting, 0-based
    std::vector<int> b;
};

// Per-party, per-setting POVM element lists.
struct MeasurementAssignment {
    std::vector<std::vector<CMatrix>> alice; // [setting][outcome]
    std::vector<std::vector<CMatrix>> bob;
    int dim_a() const { return static_cast<int>(alice.at(0).at(0).rows()); }
    int dim_b() const { return static_cast<int>(bob.at(0).at(0).rows()); }
};

void validate_povm(const MeasurementAssignment& meas,
                   const Tolerances& tols = default_tols());

// --- classical bounds -------------------------------------------------------

double evaluate(const BellInequality& ineq, const DeterministicStrategy& s);

// Exhaustive maximum over deterministic strategies. Guard: the strategy space
// n_a^m_a * n_b^m_b must not exceed 1e8.
double classical_bound(const BellInequality& ineq, int threads = 1);
double classical_bound(const CorrelationInequality& ineq);
double classical_bound(const MultipartiteCorrelation& ineq);

// --- named inequalities ------------------------------------------------------

BellInequality ch();
BellInequality i3322();
BellInequality i4422_1();
BellInequality i4422_2();
BellInequality i4422_3();
BellInequality i4422_a5();
BellInequality imm22(int m);
BellInequality i22nn(int n);
BellInequality cglmp(int n); // printed form, bound 2
CorrelationInequality chsh();
CorrelationInequality i3322_corr();
CorrelationInequality as4();
CorrelationInequality d4();
MultipartiteCorrelation mermin(int n); // F_n recursion, beta = 1

using AnyInequality =
    std::variant<BellInequality, CorrelationInequality, MultipartiteCorrelation>;

// Lookup by tag, e.g. "ch", "chsh", "i3322", "imm22:5", "cglmp:3", "mermin:3".
AnyInequality named(const std::string& tag);

// --- relabeling --------------------------------------------------------------

struct SwapParties {};
struct PermuteSettings {
    Subsystem party;
    std::vector<int> perm; // new_setting = perm[old_setting]
};
struct PermuteOutcomes {
    Subsystem party;
    int setting;
    std::vector<int> perm; // new_outcome = perm[old_outcome]
};
using RelabelOp = std::variant<SwapParties, PermuteSettings, PermuteOutcomes>;

BellInequality relabel(const BellInequality& ineq, const RelabelOp& op);
BellInequality relabel(const BellInequality& ineq, const std::vector<RelabelOp>& ops);

// --- CGLMP <-> I22nn ---------------------------------------------------------

// Row/column moves that carry the printed CGLMP coefficients onto
// (2n/(n-1)) * I22nn: no-signaling eliminations of each party's n-th outcome,
// a marginal normalization, and a final outcome relabeling on Bob's side.
struct CglmpConversion {
    int n = 0;
    double scale = 0.0;              // 2n/(n-1)
    std::vector<std::string> moves;  // applied in order
    BellInequality transformed;      // result of the moves on cglmp(n)
    bool exact_match = false;        // integer-arithmetic check against scale * i22nn(n)
};

CglmpConversion cglmp_to_i22nn(int n);

// --- operators ---------------------------------------------------------------

// B = sum joint A (x) B + sum marg_a A (x) 1 + sum marg_b 1 (x) B + b00 1 (x) 1.
CMatrix bell_operator(const BellInequality& ineq, const MeasurementAssignment& meas);

// Correlation operator from +-1-valued observables (O^2 = 1 checked).
CMatrix correlation_operator(const CorrelationInequality& cineq,
                             const std::vector<CMatrix>& alice_obs,
                             const std::vector<CMatrix>& bob_obs);

// Exact rewrite of a two-outcome correlation inequality as a probability
// inequality via E = p++ - p+- - p-+ + p--; the classical bound is re-derived
// by enumeration.
BellInequality correlation_to_probability(const CorrelationInequality& cineq);

// Joint outcome distribution induced by (rho, meas); used by the
// normalization / no-signaling property checks.
struct ProbabilityVector {
    BellScenario sc;
    std::vector<double> joint; // [sa][sb][oa][ob]
    double j(const BellScenario& s, int sa, int sb, int oa, int ob) const {
        return joint[((sa * s.m_b + sb) * s.n_a + oa) * s.n_b + ob];
    }
};

ProbabilityVector probabilities(const DensityMatrix& rho,
                                const MeasurementAssignment& meas);

double no_signaling_residual(const ProbabilityVector& p);
double normalization_residual(const ProbabilityVector& p);

// |tr(rho B_In) - (2n/(n-1)) tr(rho B_I22nn) - 2| for a shared assignment.
double operator_relation_residual(const DensityMatrix& rho, int n,
                                  const MeasurementAssignment& meas);
double operator_relation_residual(const DensityMatrix& rho, int n, uint64_t seed);

// Haar-random-unitary POVMs: column groups with sizes drawn uniformly from the
// weak compositions of d into n parts; optionally smoothed to full rank.
MeasurementAssignment random_measurements(const BellScenario& sc, int d_a, int d_b,
                                          std::mt19937_64& rng,
                                          bool generic_povm = true,
                                          double epsilon = 0.1);

} // namespace bellbound::bell

#pragma once

#include <optional>
#include <vector>

#include "bellbound/bell.hpp"
#include "bellbound/qcore.hpp"
#include "bellbound/sdp.hpp"

namespace bellbound::ub {

enum class QcqpKind { CorrelationDichotomic, ProbabilityTwoOutcome };

// Quadratic program max tr(rho B) over constrained local observables, in the
// coefficients that both dual relaxations consume. For the correlation kind
// the observables obey O^2 = 1; for the probability kind they are the "+"
// POVM elements with O^2 = O, and the inequality is collapsed onto them.
struct QcqpInstance {
    QcqpKind kind = QcqpKind::CorrelationDichotomic;
    int d = 0;    // common local dimension
    int m_a = 0;  // Alice observables
    int m_b = 0;  // Bob observables
    RMatrix b;    // m_a x m_b coupling coefficients
    RVector marg_a, marg_b; // per-observable linear coefficients
    double constant = 0.0;
    CMatrix big_r;          // tr(rho A (x) B) = vec(A)^dag big_r vec(B)
    CMatrix rho_a, rho_b;   // reduced states for the linear terms
    // Hermitian-basis expansion of rho (fixed-trace route)
    RVector r_a, r_b;       // coherence vectors, d^2-1 each
    RMatrix rp;             // (d^2-1) x (d^2-1)
};

QcqpInstance build_qcqp(const bell::CorrelationInequality& cineq,
                        const DensityMatrix& rho);
QcqpInstance build_qcqp(const bell::BellInequality& ineq, const DensityMatrix& rho);

// Evaluate tr(rho B) through the instance's quadratic form at the given
// observables ("+" elements for the probability kind).
double qcqp_value(const QcqpInstance& inst, const std::vector<CMatrix>& alice_obs,
                  const std::vector<CMatrix>& bob_obs);

enum class UbMode { StateIndependent, FixedTrace, EnumerateProfiles, Semianalytic };

// Fixed trace of each observable: the correlation kind lives on
// {-d, -d+2, ..., d}, the probability kind on {0, 1, ..., d}.
struct TraceProfile {
    std::vector<int> z; // one entry per observable, Alice first
};

std::vector<TraceProfile> profile_grid(QcqpKind kind, int d, int observables,
                                       bool prune_symmetry = true);

struct UbResult {
    double value = 0.0;
    UbMode mode = UbMode::StateIndependent;
    sdp::SdpStatus status = sdp::SdpStatus::Optimal;
    std::optional<TraceProfile> best_profile;
    std::vector<std::pair<TraceProfile, double>> profile_values;
};

struct UbOptions {
    sdp::SdpOptions sdp;
    int threads = 1;
    bool keep_profile_values = false;
};

// Lowest-order Lagrange dual over vectorized observables:
//   minimize (sum_m tr Lambda_m) + s  s.t.  [[s, u^dag/2], [u/2, Omega]] >= 0,
// Omega = Omega_0 + (+)_m 1 (x) Lambda_m; reported per-state even though the
// value is observed to be state-independent.
UbResult ub_state_independent(const QcqpInstance& inst, const UbOptions& opts = {});
UbResult ub_state_independent(const bell::CorrelationInequality& cineq,
                              const DensityMatrix& rho, const UbOptions& opts = {});
UbResult ub_state_independent(const bell::BellInequality& ineq,
                              const DensityMatrix& rho, const UbOptions& opts = {});

// Dual restricted to observables of fixed trace, in the real Hermitian-basis
// variables; a valid upper bound for the given profile.
UbResult ub_fixed_trace(const QcqpInstance& inst, const TraceProfile& profile,
                        const UbOptions& opts = {});

// Maximum of ub_fixed_trace over the profile grid (global z -> -z symmetry
// pruned for pure correlation inequalities; verified by full enumeration).
UbResult ub_enumerate_profiles(const QcqpInstance& inst, const UbOptions& opts = {});
UbResult ub_enumerate_profiles(const bell::CorrelationInequality& cineq,
                               const DensityMatrix& rho, const UbOptions& opts = {});
UbResult ub_enumerate_profiles(const bell::BellInequality& ineq,
                               const DensityMatrix& rho, const UbOptions& opts = {});

// Closed-form CHSH bound for states with vanishing coherence vectors:
//   max_z 2 sqrt(2) s1 d sqrt(prod_i (2d^2 - z^2 - z^2) / 2d^2) + sum b z z / d^2.
UbResult chsh_semianalytic(const DensityMatrix& rho);

// Threshold weight where the CHSH bound on isotropic(d, p) crosses 2.
double isotropic_chsh_threshold_semianalytic(int d, double tol = 1e-6);
double isotropic_chsh_threshold_numeric(int d, const UbOptions& opts = {},
                                        double tol = 1e-5);

} // namespace bellbound::ub

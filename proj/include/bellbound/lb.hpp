#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "bellbound/bell.hpp"
#include "bellbound/qcore.hpp"
#include "bellbound/sdp.hpp"

namespace bellbound::lb {

struct SeesawConfig {
    double convergence_tol = 1e-9; // stop when a full sweep gains less
    int max_sweeps = 200;
    int restarts = 20;
    uint64_t rng_seed = 0;
    bool generic_povm_init = true; // false: projective rank-list initialization
    int threads = 1;
    sdp::SdpOptions sdp;
};

struct LbResult {
    double value = 0.0;
    bell::MeasurementAssignment measurements;
    int sweeps = 0;
    std::vector<double> restart_values;
    std::vector<double> half_sweep_values; // best restart's trajectory
    int best_restart = 0;
};

// Per-(s_b, o_b) reduced operators sum_{s_a,o_a} b tr_A[rho (A (x) 1)],
// including Bob's marginal coefficients through A = 1.
std::vector<std::vector<CMatrix>> reduced_operators_bob(
    const DensityMatrix& rho, const bell::BellInequality& ineq,
    const std::vector<std::vector<CMatrix>>& alice);
std::vector<std::vector<CMatrix>> reduced_operators_alice(
    const DensityMatrix& rho, const bell::BellInequality& ineq,
    const std::vector<std::vector<CMatrix>>& bob);

// Terms of the objective that do not involve the optimized party.
double bob_independent_term(const DensityMatrix& rho, const bell::BellInequality& ineq,
                            const std::vector<std::vector<CMatrix>>& alice);
double alice_independent_term(const DensityMatrix& rho, const bell::BellInequality& ineq,
                              const std::vector<std::vector<CMatrix>>& bob);

// Exact single-party maximization as a standard-form SDP over block-diagonal
// POVM elements; returns the new elements and the full objective value.
std::pair<std::vector<std::vector<CMatrix>>, double> optimize_bob_sdp(
    const DensityMatrix& rho, const bell::BellInequality& ineq,
    const std::vector<std::vector<CMatrix>>& alice, const sdp::SdpOptions& opts = {});
std::pair<std::vector<std::vector<CMatrix>>, double> optimize_alice_sdp(
    const DensityMatrix& rho, const bell::BellInequality& ineq,
    const std::vector<std::vector<CMatrix>>& bob, const sdp::SdpOptions& opts = {});

// Closed-form single-party maximization for two-outcome inequalities: the new
// elements are the positive/non-positive eigenspace projectors of the reduced
// operator differences (Helstrom measurement).
std::pair<std::vector<std::vector<CMatrix>>, double> optimize_bob_two_outcome(
    const DensityMatrix& rho, const bell::BellInequality& ineq,
    const std::vector<std::vector<CMatrix>>& alice);
std::pair<std::vector<std::vector<CMatrix>>, double> optimize_alice_two_outcome(
    const DensityMatrix& rho, const bell::BellInequality& ineq,
    const std::vector<std::vector<CMatrix>>& bob);

// Alternating per-party maximization of tr(rho B) from random initial POVMs;
// the best value over independent restarts wins (ties: lowest restart index).
LbResult seesaw(const DensityMatrix& rho, const bell::BellInequality& ineq,
                const SeesawConfig& config = {});
LbResult seesaw(const DensityMatrix& rho, const bell::CorrelationInequality& cineq,
                const SeesawConfig& config = {});

// Correlation matrix [T]_ij = tr(rho sigma_i (x) sigma_j) of a two-qubit state.
RMatrix horodecki_T(const DensityMatrix& rho);

struct HorodeckiValues {
    double sqm_ch;   // max{0, (sqrt(s1^2+s2^2)-1)/2}
    double sqm_chsh; // 4 (sqm_ch + 1/2)
    bool violates;   // s1^2 + s2^2 > 1
};

HorodeckiValues horodecki_values(const DensityMatrix& rho);

} // namespace bellbound::lb

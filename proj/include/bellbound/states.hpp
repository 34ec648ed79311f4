#pragma once

#include <vector>

#include "bellbound/qcore.hpp"

namespace bellbound::states {

// rho_W(d, p) = p * 2 Pi_- / (d(d-1)) + (1-p) I/d^2.
// Valid weight range 1 - 2d/(d+1) <= p <= 1; negative p is legal there.
DensityMatrix werner(int d, double p);

// rho_I(d, p) = p |Phi_d+><Phi_d+| + (1-p) I/d^2, 0 <= p <= 1.
DensityMatrix isotropic(int d, double p);

// |Phi_d+> = (1/sqrt(d)) sum_i |ii>.
PureState max_entangled(int d);

// n-partite GHZ state (|0...0> + e^{i alpha} |1...1>)/sqrt(2), split (2, 2^{n-1}).
PureState ghz(int n, double alpha = 0.0);

// Two-qubit pure state cos(theta)|00> + sin(theta)|11>.
PureState two_qubit_schmidt(double theta);

// p |Phi_2(theta)><...| + (1-p)/2 (|01><01| + |10><10|).
DensityMatrix gisin(double p, double theta);

// p |Psi_{2:1}><...| + (1-p) |0><0| (x) |1><1|, |Psi_{2:1}> = (2|00>+|11>)/sqrt(5).
DensityMatrix collins_gisin(double p);

// Two-qutrit PPT entangled family, 0 < p < 1.
DensityMatrix horodecki_h3(double p);

// (2/7)|Phi_3+><...| + (alpha/7) sigma_+ + ((5-alpha)/7) sigma_-, 2 <= alpha <= 5.
DensityMatrix choi_horodecki(double alpha);

// n-qubit mixture of GHZ with flipped product states, split (2, 2^{n-1}).
DensityMatrix dur(int n);

// Three-qubit family with U (x) U (x) U symmetry, split (2, 4).
DensityMatrix toth_acin(double p);

// Pure state with the given Schmidt coefficients on the |ii> diagonal
// (normalized internally), split (d, d).
PureState pure_schmidt(std::vector<double> coeffs);

enum class Family { Werner, Isotropic };

struct ThresholdRecord {
    double p_sep;      // separable iff p <= p_sep
    double p_proj_lhv; // LHV model known for projective measurements up to here
    double p_povm_lhv; // LHV model known for POVMs up to here
};

ThresholdRecord thresholds(Family family, int d);

struct GisinThresholds {
    double p0;          // protocol applies for p > p0
    double pE;          // entangled iff p > pE
    double pL;          // no CHSH violation for p <= pL
    double pL_filtered; // filtered state violates CHSH iff p > pL_filtered
};

GisinThresholds gisin_thresholds(double theta);

} // namespace bellbound::states

#pragma once

namespace bellbound {

// All numerical tolerances used across the library, collected in one place.
// Individual call sites take a const reference so test harnesses can tighten
// or loosen everything at once.
struct Tolerances {
    double hermiticity = 1e-10;   // max |M - M^dag| entry at construction
    double trace_one = 1e-9;      // |tr(rho) - 1|
    double psd = 1e-9;            // eigenvalues >= -psd count as nonnegative
    double eig_residual = 1e-9;   // ||H v - lambda v|| per eigenpair
    double zero_eigenvalue = 1e-10; // |lambda| below this is treated as zero
    double basis_orthonormal = 1e-10;
    double povm_completeness = 1e-8; // per-setting sum vs identity
    double reconstruction = 1e-8;
    double feas = 1e-8;           // SDP constraint residuals
    double gap = 1e-8;            // SDP relative duality gap
    double seesaw_convergence = 1e-9;
    double no_signaling = 1e-8;
};

inline const Tolerances& default_tols() {
    static const Tolerances t{};
    return t;
}

} // namespace bellbound

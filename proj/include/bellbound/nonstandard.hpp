#pragma once

#include <utility>
#include <vector>

#include "bellbound/bell.hpp"
#include "bellbound/qcore.hpp"

namespace bellbound::nonstd {

// rho^(x)N with the sites regrouped so all Alice factors come first:
// (A1 B1)(A2 B2)... -> (A1 A2...)(B1 B2...), split (d_a^N, d_b^N).
DensityMatrix tensor_power(const DensityMatrix& rho, int copies);

// Largest known Bell-CH expectation of a pure state with the given Schmidt
// coefficients (sorted descending and normalized internally):
//   1/2 sum_n sqrt((c_{2n-1}^2 + c_{2n}^2)^2 + 4 c_{2n-1}^2 c_{2n}^2)
//     + (d mod 2) c_d^2 / 2 - 1/2.
double pure_ch_value(std::vector<double> coeffs);

// The measurement scheme attaining pure_ch_value: Alice measures the
// block-diagonal Z- and X-type observables on Schmidt-coefficient pairs; Bob
// measures the eigenprojectors of the induced reduced-operator differences.
bell::MeasurementAssignment pure_ch_measurements(std::vector<double> coeffs);

// Bell-CH value of the maximally entangled state: 1/sqrt2 - 1/2 for even d,
// (sqrt2 (d-1) + 1) / 2d - 1/2 for odd d.
double me_ch_value(int d);

// N copies of cos(phi)|00> + sin(phi)|11> under the pairing scheme.
double ncopy_two_qubit_value(double phi, int copies);

// Best known I22dd violation of the maximally entangled state, its mixture
// with white noise, and the visibility threshold where the violation vanishes.
double i22dd_me_value(int d);
double i22dd_isotropic_value(int d, double p);
double i22dd_isotropic_threshold(int d);

// One term F_A (x) F_B of a separable filtering map. `physical` rescales so
// the largest singular value is 1 (a single filter that can be implemented
// with postselection).
struct FilterPair {
    CMatrix f_a;
    CMatrix f_b;
    static FilterPair physical(CMatrix f_a, CMatrix f_b);
};

// rho -> sum_i (F_Ai (x) F_Bi) rho (.)^dag, renormalized; second member is
// the success probability. Throws if the filter annihilates the state.
std::pair<DensityMatrix, double> apply_filter(const DensityMatrix& rho,
                                              const std::vector<FilterPair>& filters);

// diag(sqrt(tan theta), 1) on both wings.
FilterPair gisin_filter(double theta);

// Local projections onto the first two levels, compressed to qubit outputs.
FilterPair two_level_projection(int d);

// CHSH value of the locally projected critical Werner state: (d/(d+2)) 2 sqrt2.
double popescu_chsh_value(int d);

// H_theta = 1 - cos(theta) sx (x) sx - sin(theta) sz (x) sz; a negative
// expectation after filtering certifies a CHSH violation after SLOCC.
CMatrix h_theta(double theta);
double witness_value(const DensityMatrix& rho, const CMatrix& f_a, const CMatrix& f_b,
                     double theta);

} // namespace bellbound::nonstd

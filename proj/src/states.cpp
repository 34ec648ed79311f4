#include "bellbound/states.hpp"

#include <cmath>

namespace bellbound::states {

namespace {

CMatrix swap_operator(int d) {
    CMatrix v = CMatrix::Zero(d * d, d * d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) v(i * d + j, j * d + i) = 1.0;
    return v;
}

CMatrix pauli(int k) {
    CMatrix s(2, 2);
    switch (k) {
        case 0: s << 1, 0, 0, 1; break;
        case 1: s << 0, 1, 1, 0; break;
        case 2: s << 0, Complex(0, -1), Complex(0, 1), 0; break;
        default: s << 1, 0, 0, -1; break;
    }
    return s;
}


} // namespace

DensityMatrix werner(int d, double p) {
    if (d < 2) throw invalid_argument("werner: d must be >= 2");
    const double pmin = 1.0 - 2.0 * d / (d + 1.0);
    if (p < pmin - 1e-12 || p > 1.0 + 1e-12)
        throw invalid_argument("werner: p out of range");
    CMatrix anti = 0.5 * (CMatrix::Identity(d * d, d * d) - swap_operator(d));
    CMatrix m = p * 2.0 / (d * (d - 1.0)) * anti +
                (1.0 - p) / (d * d) * CMatrix::Identity(d * d, d * d);
    return DensityMatrix(m, {d, d});
}

DensityMatrix isotropic(int d, double p) {
    if (d < 2) throw invalid_argument("isotropic: d must be >= 2");
    if (p < -1e-12 || p > 1.0 + 1e-12) throw invalid_argument("isotropic: p out of range");
    const CVector me = max_entangled(d).amps();
    CMatrix m = p * (me * me.adjoint()) +
                (1.0 - p) / (d * d) * CMatrix::Identity(d * d, d * d);
    return DensityMatrix(m, {d, d});
}

PureState max_entangled(int d) {
    if (d < 1) throw invalid_argument("max_entangled: d must be >= 1");
    CVector v = CVector::Zero(d * d);
    for (int i = 0; i < d; ++i) v[i * d + i] = 1.0 / std::sqrt(double(d));
    return PureState(v, {d, d});
}

PureState ghz(int n, double alpha) {
    if (n < 2) throw invalid_argument("ghz: n must be >= 2");
    const int dim = 1 << n;
    CVector v = CVector::Zero(dim);
    v[0] = 1.0 / std::sqrt(2.0);
    v[dim - 1] = std::exp(Complex(0, alpha)) / std::sqrt(2.0);
    return PureState(v, {2, dim / 2});
}

PureState two_qubit_schmidt(double theta) {
    CVector v = CVector::Zero(4);
    v[0] = std::cos(theta);
    v[3] = std::sin(theta);
    return PureState(v, {2, 2});
}

DensityMatrix gisin(double p, double theta) {
    if (p < -1e-12 || p > 1.0 + 1e-12) throw invalid_argument("gisin: p out of range");
    if (theta <= 0.0 || theta >= M_PI / 2)
        throw invalid_argument("gisin: theta out of range");
    const CVector phi = two_qubit_schmidt(theta).amps();
    CMatrix m = p * (phi * phi.adjoint());
    m(1, 1) += 0.5 * (1.0 - p); // |01>
    m(2, 2) += 0.5 * (1.0 - p); // |10>
    return DensityMatrix(m, {2, 2});
}

DensityMatrix collins_gisin(double p) {
    if (p < -1e-12 || p > 1.0 + 1e-12)
        throw invalid_argument("collins_gisin: p out of range");
    CVector psi = CVector::Zero(4);
    psi[0] = 2.0 / std::sqrt(5.0);
    psi[3] = 1.0 / std::sqrt(5.0);
    CMatrix m = p * (psi * psi.adjoint());
    m(1, 1) += 1.0 - p; // |0>_A |1>_B
    return DensityMatrix(m, {2, 2});
}

DensityMatrix horodecki_h3(double p) {
    if (p <= 0.0 || p >= 1.0) throw invalid_argument("horodecki_h3: need 0 < p < 1");
    const CVector me = max_entangled(3).amps();
    CMatrix ent = CMatrix::Zero(9, 9);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (i != j) ent(i * 3 + j, i * 3 + j) = 1.0 / 8.0;
    ent(2 * 3 + 0, 2 * 3 + 0) -= 1.0 / 8.0;
    ent += 3.0 / 8.0 * (me * me.adjoint());

    CVector psi = CVector::Zero(9);
    psi[2 * 3 + 0] = std::sqrt((1.0 + p) / 2.0);
    psi[2 * 3 + 2] = std::sqrt((1.0 - p) / 2.0);

    CMatrix m = 8.0 * p / (8.0 * p + 1.0) * ent +
                1.0 / (8.0 * p + 1.0) * (psi * psi.adjoint());
    return DensityMatrix(m, {3, 3});
}

DensityMatrix choi_horodecki(double alpha) {
    if (alpha < 2.0 - 1e-12 || alpha > 5.0 + 1e-12)
        throw invalid_argument("choi_horodecki: need 2 <= alpha <= 5");
    const CVector me = max_entangled(3).amps();
    CMatrix sp = CMatrix::Zero(9, 9), sm = CMatrix::Zero(9, 9);
    for (int j = 0; j < 3; ++j) {
        sp(j * 3 + (j + 1) % 3, j * 3 + (j + 1) % 3) = 1.0 / 3.0;
        sm(j * 3 + (j + 2) % 3, j * 3 + (j + 2) % 3) = 1.0 / 3.0;
    }
    CMatrix m = 2.0 / 7.0 * (me * me.adjoint()) + alpha / 7.0 * sp +
                (5.0 - alpha) / 7.0 * sm;
    return DensityMatrix(m, {3, 3});
}

DensityMatrix dur(int n) {
    if (n < 3) throw invalid_argument("dur: n must be >= 3");
    const int dim = 1 << n;
    CMatrix m = CMatrix::Zero(dim, dim);
    const CVector g = ghz(n).amps();
    m += g * g.adjoint();
    for (int k = 1; k <= n; ++k) {
        const int flip = 1 << (n - k); // |Phi_{k,0}>: qubit k is 1, rest 0
        int idx0 = flip;
        int idx1 = (dim - 1) ^ flip;
        m(idx0, idx0) += 0.5;
        m(idx1, idx1) += 0.5;
    }
    m /= double(n + 1);
    return DensityMatrix(m, {2, dim / 2});
}

DensityMatrix toth_acin(double p) {
    if (p < -1e-12 || p > 1.0 + 1e-12) throw invalid_argument("toth_acin: p out of range");
    const CMatrix id2 = CMatrix::Identity(2, 2);
    // First term read as (1/8) 1 (x) 1 (x) 1 so the state has unit trace
    // (the remaining terms are traceless).
    CMatrix m = kron(kron(id2, id2), id2) / 8.0;
    for (int k = 1; k <= 3; ++k) {
        const CMatrix s = pauli(k);
        m += kron(kron(id2, s), s) / 24.0;
        m -= p / 16.0 * (kron(kron(s, id2), s) + kron(kron(s, s), id2));
    }
    return DensityMatrix(m, {2, 4});
}

PureState pure_schmidt(std::vector<double> coeffs) {
    const int d = static_cast<int>(coeffs.size());
    if (d < 1) throw invalid_argument("pure_schmidt: empty coefficient list");
    double norm = 0.0;
    for (double c : coeffs) {
        if (c < 0.0) throw invalid_argument("pure_schmidt: coefficients must be >= 0");
        norm += c * c;
    }
    if (norm <= 0.0) throw invalid_argument("pure_schmidt: all coefficients zero");
    norm = std::sqrt(norm);
    CVector v = CVector::Zero(d * d);
    for (int i = 0; i < d; ++i) v[i * d + i] = coeffs[i] / norm;
    return PureState(v, {d, d});
}

ThresholdRecord thresholds(Family family, int d) {
    if (d < 2) throw invalid_argument("thresholds: d must be >= 2");
    ThresholdRecord rec{};
    rec.p_sep = 1.0 / (d + 1.0);
    rec.p_povm_lhv = (3.0 * d - 1.0) / (d * d - 1.0) * std::pow(1.0 - 1.0 / d, d);
    if (family == Family::Werner) {
        rec.p_proj_lhv = 1.0 - 1.0 / d;
    } else {
        double sum = 0.0;
        for (int k = 2; k <= d; ++k) sum += 1.0 / k;
        rec.p_proj_lhv = sum / (d - 1.0);
    }
    return rec;
}

GisinThresholds gisin_thresholds(double theta) {
    if (theta <= 0.0 || theta >= M_PI / 2)
        throw invalid_argument("gisin_thresholds: theta out of range");
    const double s = std::sin(2.0 * theta);
    return {1.0 / (2.0 - s), 1.0 / (1.0 + s), 4.0 / (4.0 + s * s),
            1.0 / (1.0 + (std::sqrt(2.0) - 1.0) * s)};
}

} // namespace bellbound::states

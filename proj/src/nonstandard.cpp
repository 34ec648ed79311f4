#include "bellbound/nonstandard.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace bellbound::nonstd {

namespace {

// Reorder tensor factors of a square matrix: position p of the output takes
// factor perm[p] of the input.
CMatrix permute_subsystems(const CMatrix& m, const std::vector<int>& dims,
                           const std::vector<int>& perm) {
    const int n = static_cast<int>(dims.size());
    int total = 1;
    for (int d : dims) total *= d;
    if (m.rows() != total || m.cols() != total)
        throw invalid_argument("permute_subsystems: dimension mismatch");

    std::vector<int> in_stride(n, 1);
    for (int f = n - 2; f >= 0; --f) in_stride[f] = in_stride[f + 1] * dims[f + 1];
    std::vector<int> out_dims(n);
    for (int p = 0; p < n; ++p) out_dims[p] = dims[perm[p]];
    std::vector<int> out_stride(n, 1);
    for (int p = n - 2; p >= 0; --p) out_stride[p] = out_stride[p + 1] * out_dims[p + 1];

    std::vector<int> map(total);
    std::vector<int> digits(n);
    for (int idx = 0; idx < total; ++idx) {
        int rem = idx;
        for (int f = 0; f < n; ++f) {
            digits[f] = rem / in_stride[f];
            rem %= in_stride[f];
        }
        int out = 0;
        for (int p = 0; p < n; ++p) out += digits[perm[p]] * out_stride[p];
        map[idx] = out;
    }
    CMatrix res(total, total);
    for (int i = 0; i < total; ++i)
        for (int j = 0; j < total; ++j) res(map[i], map[j]) = m(i, j);
    return res;
}

std::vector<double> sorted_normalized(std::vector<double> coeffs) {
    if (coeffs.empty()) throw invalid_argument("empty Schmidt coefficient list");
    double norm = 0.0;
    for (double c : coeffs) {
        if (c < 0.0) throw invalid_argument("Schmidt coefficients must be >= 0");
        norm += c * c;
    }
    if (norm <= 0.0) throw invalid_argument("all Schmidt coefficients zero");
    norm = std::sqrt(norm);
    for (double& c : coeffs) c /= norm;
    std::sort(coeffs.begin(), coeffs.end(), std::greater<double>());
    return coeffs;
}

} // namespace

DensityMatrix tensor_power(const DensityMatrix& rho, int copies) {
    if (copies < 1) throw invalid_argument("tensor_power: copies must be >= 1");
    if (copies == 1) return rho;
    CMatrix big = rho.mat();
    for (int c = 1; c < copies; ++c) big = kron(big, rho.mat());

    // Sites currently come interleaved A1 B1 A2 B2 ...; group the A's first.
    std::vector<int> dims(2 * copies);
    for (int c = 0; c < copies; ++c) {
        dims[2 * c] = rho.split().d_a;
        dims[2 * c + 1] = rho.split().d_b;
    }
    std::vector<int> perm;
    for (int c = 0; c < copies; ++c) perm.push_back(2 * c);
    for (int c = 0; c < copies; ++c) perm.push_back(2 * c + 1);
    big = permute_subsystems(big, dims, perm);

    int da = 1, db = 1;
    for (int c = 0; c < copies; ++c) {
        da *= rho.split().d_a;
        db *= rho.split().d_b;
    }
    return DensityMatrix(0.5 * (big + big.adjoint().eval()), {da, db});
}

double pure_ch_value(std::vector<double> coeffs) {
    const std::vector<double> c = sorted_normalized(std::move(coeffs));
    const int d = static_cast<int>(c.size());
    double v = -0.5;
    for (int n = 0; n + 1 < d; n += 2) {
        const double a = c[n] * c[n], b = c[n + 1] * c[n + 1];
        v += 0.5 * std::sqrt((a + b) * (a + b) + 4.0 * a * b);
    }
    if (d % 2 == 1) v += 0.5 * c[d - 1] * c[d - 1];
    return v;
}

bell::MeasurementAssignment pure_ch_measurements(std::vector<double> coeffs) {
    const std::vector<double> c = sorted_normalized(std::move(coeffs));
    const int d = static_cast<int>(c.size());
    const int pairs = d / 2;
    const bool odd = d % 2 == 1;

    // Alice: direct sums of sigma_z and sigma_x over coefficient pairs, the
    // leftover level picking up the +1 corner for the Z-type observable pair.
    CMatrix zobs = CMatrix::Zero(d, d), xobs = CMatrix::Zero(d, d);
    for (int n = 0; n < pairs; ++n) {
        zobs(2 * n, 2 * n) = 1.0;
        zobs(2 * n + 1, 2 * n + 1) = -1.0;
        xobs(2 * n, 2 * n + 1) = 1.0;
        xobs(2 * n + 1, 2 * n) = 1.0;
    }
    if (odd) {
        zobs(d - 1, d - 1) = 1.0;
        xobs(d - 1, d - 1) = 1.0;
    }
    const CMatrix id = CMatrix::Identity(d, d);
    bell::MeasurementAssignment meas;
    meas.alice = {{0.5 * (id + zobs), 0.5 * (id - zobs)},
                  {0.5 * (id + xobs), 0.5 * (id - xobs)}};

    // Bob: projectors onto the positive-eigenvalue eigenvectors of the
    // reduced-operator differences, built per pair and normalized explicitly.
    meas.bob.resize(2);
    for (int sb = 0; sb < 2; ++sb) {
        const double sign = sb == 0 ? 1.0 : -1.0; // x-entry sign flips for B2
        CMatrix plus = CMatrix::Zero(d, d);
        for (int n = 0; n < pairs; ++n) {
            const double a = c[2 * n] * c[2 * n], b = c[2 * n + 1] * c[2 * n + 1];
            const double kap = std::sqrt((a + b) * (a + b) + 4.0 * a * b);
            CVector v = CVector::Zero(d);
            v[2 * n] = a + b + kap;
            v[2 * n + 1] = sign * 2.0 * c[2 * n] * c[2 * n + 1];
            v.normalize();
            plus += v * v.adjoint();
        }
        if (odd) plus(d - 1, d - 1) = 1.0; // eigenvalue c_d^2 (resp. 0) level
        meas.bob[sb] = {plus, id - plus};
    }
    return meas;
}

double me_ch_value(int d) {
    if (d < 1) throw invalid_argument("me_ch_value: d must be >= 1");
    if (d % 2 == 0) return 1.0 / std::sqrt(2.0) - 0.5;
    return (std::sqrt(2.0) * (d - 1) + 1.0) / (2.0 * d) - 0.5;
}

double ncopy_two_qubit_value(double phi, int copies) {
    if (copies < 1) throw invalid_argument("ncopy_two_qubit_value: copies must be >= 1");
    if (phi <= 0.0 || phi > M_PI / 4 + 1e-12)
        throw invalid_argument("ncopy_two_qubit_value: need 0 < phi <= pi/4");
    // Total weight of the perfectly correlated two-dimensional subspaces:
    // p = 1 - (1/2) cos^{2(N-1)}(phi) sum_m tan^{2m}(phi) [1 - (-1)^C(N-1,m)].
    const int nm1 = copies - 1;
    double sum = 0.0;
    for (int m = 0; m <= nm1; ++m) {
        // parity of C(N-1, m) by Kummer's theorem: odd iff m is a submask
        const bool odd_binom = (m & nm1) == m;
        if (odd_binom) sum += 2.0 * std::pow(std::tan(phi), 2 * m);
    }
    const double p = 1.0 - 0.5 * std::pow(std::cos(phi), 2 * nm1) * sum;
    const double s2 = std::sin(2.0 * phi);
    return p / std::sqrt(2.0) + 0.5 * (1.0 - p) * std::sqrt(1.0 + s2 * s2) - 0.5;
}

double i22dd_me_value(int d) {
    if (d < 2) throw invalid_argument("i22dd_me_value: d must be >= 2");
    auto q = [d](int k) {
        const double s = std::sin(M_PI * (k + 0.25) / d);
        return 1.0 / (2.0 * d * d * d * s * s);
    };
    double sum = 0.0;
    for (int k = 0; k <= d / 2 - 1; ++k) sum += q(k) - q(-(k + 1));
    return (d - 1.0) / (2.0 * d) * (4.0 * d * sum - 2.0);
}

double i22dd_isotropic_value(int d, double p) {
    return p * i22dd_me_value(d) + (1.0 - p) * (-1.0 + 1.0 / d);
}

double i22dd_isotropic_threshold(int d) {
    const double v = i22dd_me_value(d);
    const double noise = 1.0 - 1.0 / d;
    return noise / (v + noise);
}

FilterPair FilterPair::physical(CMatrix f_a, CMatrix f_b) {
    const double sa = singular_values(f_a)[0];
    const double sb = singular_values(f_b)[0];
    if (sa > 1.0) f_a /= sa;
    if (sb > 1.0) f_b /= sb;
    return {std::move(f_a), std::move(f_b)};
}

std::pair<DensityMatrix, double> apply_filter(const DensityMatrix& rho,
                                              const std::vector<FilterPair>& filters) {
    if (filters.empty()) throw invalid_argument("apply_filter: no filter terms");
    const Eigen::Index da_out = filters[0].f_a.rows();
    const Eigen::Index db_out = filters[0].f_b.rows();
    CMatrix out = CMatrix::Zero(da_out * db_out, da_out * db_out);
    for (const FilterPair& f : filters) {
        if (f.f_a.cols() != rho.split().d_a || f.f_b.cols() != rho.split().d_b ||
            f.f_a.rows() != da_out || f.f_b.rows() != db_out)
            throw invalid_argument("apply_filter: filter dimensions mismatch");
        const CMatrix k = kron(f.f_a, f.f_b);
        out += k * rho.mat() * k.adjoint();
    }
    const double p_suc = out.trace().real();
    if (p_suc < 1e-12)
        throw std::runtime_error("apply_filter: filter annihilates the state");
    out /= p_suc;
    return {DensityMatrix(0.5 * (out + out.adjoint().eval()),
                          {int(da_out), int(db_out)}),
            p_suc};
}

FilterPair gisin_filter(double theta) {
    if (theta <= 0.0 || theta >= M_PI / 2)
        throw invalid_argument("gisin_filter: theta out of range");
    CMatrix f = CMatrix::Zero(2, 2);
    f(0, 0) = std::sqrt(std::tan(theta));
    f(1, 1) = 1.0;
    return FilterPair::physical(f, f);
}

FilterPair two_level_projection(int d) {
    if (d < 2) throw invalid_argument("two_level_projection: d must be >= 2");
    CMatrix f = CMatrix::Zero(2, d);
    f(0, 0) = 1.0;
    f(1, 1) = 1.0;
    return {f, f};
}

double popescu_chsh_value(int d) {
    if (d < 2) throw invalid_argument("popescu_chsh_value: d must be >= 2");
    return d / (d + 2.0) * 2.0 * std::sqrt(2.0);
}

CMatrix h_theta(double theta) {
    if (theta < 0.0 || theta > M_PI / 4 + 1e-12)
        throw invalid_argument("h_theta: need 0 <= theta <= pi/4");
    CMatrix sx(2, 2), sz(2, 2);
    sx << 0, 1, 1, 0;
    sz << 1, 0, 0, -1;
    return kron(CMatrix::Identity(2, 2), CMatrix::Identity(2, 2)) -
           std::cos(theta) * kron(sx, sx) - std::sin(theta) * kron(sz, sz);
}

double witness_value(const DensityMatrix& rho, const CMatrix& f_a, const CMatrix& f_b,
                     double theta) {
    if (f_a.rows() != 2 || f_b.rows() != 2 || f_a.cols() != rho.split().d_a ||
        f_b.cols() != rho.split().d_b)
        throw invalid_argument("witness_value: filters must map the state to two qubits");
    const CMatrix k = kron(f_a, f_b);
    return (rho.mat() * k.adjoint() * h_theta(theta) * k).trace().real();
}

} // namespace bellbound::nonstd

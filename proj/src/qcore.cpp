#include "bellbound/qcore.hpp"

#include <cmath>

namespace bellbound {

bool is_hermitian(const CMatrix& m, double tol) {
    if (m.rows() != m.cols()) return false;
    return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

void require_hermitian(const CMatrix& m, double tol) {
    if (!is_hermitian(m, tol)) throw invalid_argument("matrix is not Hermitian");
}

DensityMatrix::DensityMatrix(CMatrix mat, Split split, const Tolerances& tols)
    : mat_(std::move(mat)), split_(split) {
    if (split_.d_a < 1 || split_.d_b < 1 || mat_.rows() != mat_.cols() ||
        mat_.rows() != split_.dim())
        throw invalid_argument("density matrix: split does not match dimension");
    if (!mat_.allFinite()) throw invalid_argument("density matrix: non-finite entries");
    require_hermitian(mat_, tols.hermiticity);
    if (std::abs(mat_.trace().real() - 1.0) > tols.trace_one)
        throw invalid_argument("density matrix: trace is not 1");
    Eigen::SelfAdjointEigenSolver<CMatrix> es(mat_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tols.psd)
        throw invalid_argument("density matrix: not positive semidefinite");
}

PureState::PureState(CVector amps, Split split, const Tolerances& tols)
    : amps_(std::move(amps)), split_(split) {
    if (amps_.size() != split_.dim())
        throw invalid_argument("pure state: split does not match dimension");
    if (!amps_.allFinite()) throw invalid_argument("pure state: non-finite entries");
    if (std::abs(amps_.norm() - 1.0) > tols.trace_one)
        throw invalid_argument("pure state: not normalized");
}

DensityMatrix PureState::density() const {
    return DensityMatrix(amps_ * amps_.adjoint(), split_);
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

CMatrix partial_trace(const CMatrix& m, Split split, Subsystem sub) {
    const int da = split.d_a, db = split.d_b;
    if (m.rows() != m.cols() || m.rows() != split.dim())
        throw invalid_argument("partial_trace: dimension mismatch");
    if (sub == Subsystem::A) {
        CMatrix out = CMatrix::Zero(db, db);
        for (int i = 0; i < db; ++i)
            for (int j = 0; j < db; ++j)
                for (int k = 0; k < da; ++k) out(i, j) += m(k * db + i, k * db + j);
        return out;
    }
    CMatrix out = CMatrix::Zero(da, da);
    for (int i = 0; i < da; ++i)
        for (int j = 0; j < da; ++j)
            for (int k = 0; k < db; ++k) out(i, j) += m(i * db + k, j * db + k);
    return out;
}

CMatrix partial_transpose(const CMatrix& m, Split split, Subsystem sub) {
    const int da = split.d_a, db = split.d_b;
    if (m.rows() != m.cols() || m.rows() != split.dim())
        throw invalid_argument("partial_transpose: dimension mismatch");
    CMatrix out(m.rows(), m.cols());
    for (int i = 0; i < da; ++i)
        for (int j = 0; j < db; ++j)
            for (int k = 0; k < da; ++k)
                for (int l = 0; l < db; ++l) {
                    if (sub == Subsystem::A)
                        out(i * db + j, k * db + l) = m(k * db + j, i * db + l);
                    else
                        out(i * db + j, k * db + l) = m(i * db + l, k * db + j);
                }
    return out;
}

EigResult herm_eig(const CMatrix& h, double herm_tol) {
    require_hermitian(h, herm_tol);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    if (es.info() != Eigen::Success) throw std::runtime_error("herm_eig: eigensolver failed");
    return {es.eigenvalues(), es.eigenvectors()};
}

RVector singular_values(const CMatrix& m) {
    Eigen::JacobiSVD<CMatrix> svd(m);
    return svd.singularValues(); // Eigen returns them descending
}

double trace_norm(const CMatrix& h) {
    return herm_eig(h).values.cwiseAbs().sum();
}

CMatrix positive_eigenspace_projector(const CMatrix& h, const Tolerances& tols) {
    EigResult eig = herm_eig(h, tols.hermiticity);
    CMatrix proj = CMatrix::Zero(h.rows(), h.cols());
    for (Eigen::Index k = 0; k < eig.values.size(); ++k)
        if (eig.values[k] > tols.zero_eigenvalue)
            proj += eig.vectors.col(k) * eig.vectors.col(k).adjoint();
    return proj;
}

SchmidtResult schmidt(const PureState& psi) {
    const int da = psi.split().d_a, db = psi.split().d_b;
    CMatrix coeff(da, db);
    for (int i = 0; i < da; ++i)
        for (int j = 0; j < db; ++j) coeff(i, j) = psi.amps()[i * db + j];
    Eigen::JacobiSVD<CMatrix> svd(coeff, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RVector& sv = svd.singularValues();
    int r = 0;
    while (r < sv.size() && sv[r] > 1e-12) ++r;
    SchmidtResult out;
    out.coeffs = sv.head(r);
    out.basis_a = svd.matrixU().leftCols(r);
    out.basis_b = svd.matrixV().conjugate().leftCols(r);
    return out;
}

HermitianBasis hermitian_basis(int d) {
    if (d < 1) throw invalid_argument("hermitian_basis: d must be >= 1");
    HermitianBasis basis;
    basis.d = d;
    basis.elems.reserve(d * d);
    basis.elems.push_back(CMatrix::Identity(d, d) / std::sqrt(double(d)));
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (int j = 0; j < d; ++j)
        for (int k = j + 1; k < d; ++k) {
            CMatrix sym = CMatrix::Zero(d, d);
            sym(j, k) = sym(k, j) = inv_sqrt2;
            basis.elems.push_back(sym);
            CMatrix asym = CMatrix::Zero(d, d);
            asym(j, k) = Complex(0, -inv_sqrt2);
            asym(k, j) = Complex(0, inv_sqrt2);
            basis.elems.push_back(asym);
        }
    for (int l = 0; l < d - 1; ++l) {
        CMatrix diag = CMatrix::Zero(d, d);
        const double norm = 1.0 / std::sqrt(double(l + 1) * (l + 2));
        for (int j = 0; j <= l; ++j) diag(j, j) = norm;
        diag(l + 1, l + 1) = -double(l + 1) * norm;
        basis.elems.push_back(diag);
    }
    return basis;
}

CoherenceDecomposition coherence_decomposition(const DensityMatrix& rho) {
    const int d = rho.split().d_a;
    if (rho.split().d_b != d)
        throw invalid_argument("coherence_decomposition: requires d_a == d_b");
    HermitianBasis basis = hermitian_basis(d);
    const int n = d * d - 1;
    CoherenceDecomposition out;
    out.r_a.resize(n);
    out.r_b.resize(n);
    out.Rp.resize(n, n);
    for (int i = 1; i <= n; ++i) {
        out.r_a[i - 1] = (rho.mat() * kron(basis.elems[i], basis.elems[0])).trace().real();
        out.r_b[i - 1] = (rho.mat() * kron(basis.elems[0], basis.elems[i])).trace().real();
        for (int j = 1; j <= n; ++j)
            out.Rp(i - 1, j - 1) =
                (rho.mat() * kron(basis.elems[i], basis.elems[j])).trace().real();
    }
    return out;
}

bool is_ppt(const DensityMatrix& rho, const Tolerances& tols) {
    CMatrix pt = partial_transpose(rho.mat(), rho.split(), Subsystem::A);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(pt, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() >= -tols.psd;
}

} // namespace bellbound

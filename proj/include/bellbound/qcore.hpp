#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "bellbound/config.hpp"

namespace bellbound {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

// Bipartite tensor factorization d_a x d_b, subsystem A first.
struct Split {
    int d_a = 1;
    int d_b = 1;
    int dim() const { return d_a * d_b; }
};

enum class Subsystem { A, B };

// Thrown on precondition violations (bad dimensions, invalid parameters).
using std::invalid_argument;

bool is_hermitian(const CMatrix& m, double tol = default_tols().hermiticity);
void require_hermitian(const CMatrix& m, double tol = default_tols().hermiticity);

// Hermitian PSD unit-trace operator with a bipartite split. Validates at
// construction: hermiticity, tr = 1, min eigenvalue >= -psd tolerance.
class DensityMatrix {
  public:
    DensityMatrix(CMatrix mat, Split split, const Tolerances& tols = default_tols());
    const CMatrix& mat() const { return mat_; }
    const Split& split() const { return split_; }
    int dim() const { return static_cast<int>(mat_.rows()); }

  private:
    CMatrix mat_;
    Split split_;
};

// Normalized state vector with a bipartite split.
class PureState {
  public:
    PureState(CVector amps, Split split, const Tolerances& tols = default_tols());
    const CVector& amps() const { return amps_; }
    const Split& split() const { return split_; }
    DensityMatrix density() const;

  private:
    CVector amps_;
    Split split_;
};

// Kronecker product, row-major tensor convention: (A kron B)|i,j> = A|i> kron B|j>.
CMatrix kron(const CMatrix& a, const CMatrix& b);

// Trace out one subsystem of a dim = d_a*d_b square matrix.
CMatrix partial_trace(const CMatrix& m, Split split, Subsystem sub);

// Transpose one subsystem in place; same dimension as the input.
CMatrix partial_transpose(const CMatrix& m, Split split, Subsystem sub);

struct EigResult {
    RVector values;  // ascending
    CMatrix vectors; // column k pairs with values[k]
};

// Eigendecomposition of a Hermitian matrix. Throws on non-Hermitian input.
EigResult herm_eig(const CMatrix& h, double herm_tol = default_tols().hermiticity);

// Singular values in descending order.
RVector singular_values(const CMatrix& m);

// Sum of |eigenvalue| over the spectrum of a Hermitian matrix.
double trace_norm(const CMatrix& h);

// Projector onto the strictly positive eigenspace. Eigenvalues with
// |lambda| <= zero_eigenvalue go to the non-positive side.
CMatrix positive_eigenspace_projector(const CMatrix& h,
                                      const Tolerances& tols = default_tols());

struct SchmidtResult {
    RVector coeffs;  // descending, > 0, sum of squares = 1
    CMatrix basis_a; // columns: Alice's Schmidt vectors
    CMatrix basis_b; // columns: Bob's Schmidt vectors
};

SchmidtResult schmidt(const PureState& psi);

// Orthonormal Hermitian operator basis: tr(s_n s_m) = delta_nm, s_0 = 1/sqrt(d).
// Ordering: s_0; then for each index pair (j,k), j<k, in lexicographic order the
// symmetric then the antisymmetric Gell-Mann matrix; then the d-1 diagonal ones.
struct HermitianBasis {
    int d = 0;
    std::vector<CMatrix> elems; // d^2 entries
};

HermitianBasis hermitian_basis(int d);

// Expansion of rho on C^d (x) C^d in the Hermitian basis:
//   [Rp]_ij = tr(rho s_i (x) s_j), [r_a]_i = tr(rho s_i (x) s_0), i,j >= 1.
struct CoherenceDecomposition {
    RVector r_a;
    RVector r_b;
    RMatrix Rp; // (d^2-1) x (d^2-1)
};

CoherenceDecomposition coherence_decomposition(const DensityMatrix& rho);

// Peres-Horodecki test: partial transpose has min eigenvalue >= -psd tolerance.
bool is_ppt(const DensityMatrix& rho, const Tolerances& tols = default_tols());

} // namespace bellbound

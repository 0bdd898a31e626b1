// Dense complex operator algebra: Kronecker products, partial traces,
// vectorization, embeddings into tensor factors, norms, and the small
// operator zoo (Pauli, ladder) everything else is built from.
//
// Vectorization convention, fixed once for the whole library:
// column stacking, vec(X)[j*d + i] = X(i, j), so that
//   vec(A X B) = (B^T ⊗ A) vec(X).
// All superoperator matrices in the library assume this convention.

#pragma once

#include <vector>

#include "adel/errors.hpp"
#include "adel/types.hpp"

namespace adel {

// ------------------------------ tensor layout -------------------------------

// Ordered factor dimensions of a tensor-product space. The order is fixed for
// the lifetime of a model: [A^(1), ..., A^(K), B].
struct HilbertDims {
    std::vector<int> dims;

    HilbertDims() = default;
    explicit HilbertDims(std::vector<int> d);

    int factors() const { return static_cast<int>(dims.size()); }
    int total() const;
    int dim(int factor) const { return dims.at(static_cast<std::size_t>(factor)); }
};

// ------------------------------ basic algebra -------------------------------

Mat kron(const Mat& a, const Mat& b);
Mat kron_all(const std::vector<Mat>& factors);

inline Mat comm(const Mat& a, const Mat& b) { return a * b - b * a; }

// Trace over the factors NOT listed in `keep`; the result lives on the kept
// factors in their original order.
Mat partial_trace(const Mat& x, const HilbertDims& dims, const std::vector<int>& keep);

// Embed `op`, acting on the listed factors (in the listed order), into the
// full product space, identity elsewhere. `sites` need not be contiguous or
// sorted: embed(U, dims, {2, 0}) places U's first factor on site 2.
Mat embed(const Mat& op, const HilbertDims& dims, const std::vector<int>& sites);

Vec vectorize(const Mat& x);
Mat devectorize(const Vec& v);

double trace_norm(const Mat& x);

Mat hermitize(const Mat& x);
bool is_hermitian(const Mat& x, double tol = 1e-12);

// ------------------------------ operator zoo --------------------------------

Mat identity(int d);
Mat sigma_x();
Mat sigma_y();
Mat sigma_z();
Mat sigma_plus();   // |e><g| with basis order (|g>, |e>) = (0, 1)
Mat sigma_minus();  // |g><e|
Mat annihilation(int d);
Mat number_operator(int d);
Mat basis_op(int d, int i, int j);  // |i><j|

// Hermitian matrix-unit basis of d x d operators: E_ii, E_ij + E_ji,
// i(E_ij - E_ji) for i < j. Deterministic order; d^2 elements.
std::vector<Mat> hermitian_basis(int d);

// ------------------------------ density checks ------------------------------

struct DensityTolerances {
    double hermiticity = 1e-12;
    double trace = 1e-12;
    double positivity = -1e-10;  // smallest admissible eigenvalue
};

// Throws DimensionMismatch / Error when x is not a valid density operator.
void check_density(const Mat& x, const DensityTolerances& tol = {});

} // namespace adel

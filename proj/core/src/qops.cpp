#include "adel/qops.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace adel {

HilbertDims::HilbertDims(std::vector<int> d) : dims(std::move(d)) {
    for (int v : dims) {
        if (v < 1) throw DimensionMismatch("HilbertDims: every factor dimension must be >= 1");
    }
}

int HilbertDims::total() const {
    int t = 1;
    for (int v : dims) t *= v;
    return t;
}

Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Mat kron_all(const std::vector<Mat>& factors) {
    if (factors.empty()) return Mat::Identity(1, 1);
    Mat out = factors.front();
    for (std::size_t i = 1; i < factors.size(); ++i) out = kron(out, factors[i]);
    return out;
}

namespace {

// Strides of each factor in the composite index (row-major over factors:
// index = sum_m i_m * stride_m with the LAST factor fastest, matching kron).
std::vector<int> factor_strides(const HilbertDims& dims) {
    const int n = dims.factors();
    std::vector<int> stride(static_cast<std::size_t>(n), 1);
    for (int m = n - 2; m >= 0; --m)
        stride[static_cast<std::size_t>(m)] =
            stride[static_cast<std::size_t>(m + 1)] * dims.dim(m + 1);
    return stride;
}

} // namespace

Mat partial_trace(const Mat& x, const HilbertDims& dims, const std::vector<int>& keep) {
    const int total = dims.total();
    if (x.rows() != total || x.cols() != total)
        throw DimensionMismatch("partial_trace: operator dimension " + std::to_string(x.rows()) +
                                " does not match factor product " + std::to_string(total));
    const int n = dims.factors();
    std::vector<bool> kept(static_cast<std::size_t>(n), false);
    for (int s : keep) {
        if (s < 0 || s >= n) throw DimensionMismatch("partial_trace: keep index out of range");
        kept[static_cast<std::size_t>(s)] = true;
    }

    const auto stride = factor_strides(dims);
    int dim_keep = 1, dim_trace = 1;
    std::vector<int> keep_sites, trace_sites;
    for (int m = 0; m < n; ++m) {
        if (kept[static_cast<std::size_t>(m)]) { dim_keep *= dims.dim(m); keep_sites.push_back(m); }
        else { dim_trace *= dims.dim(m); trace_sites.push_back(m); }
    }

    // Output strides over the kept factors, in original factor order.
    std::vector<int> out_stride(keep_sites.size(), 1);
    for (int m = static_cast<int>(keep_sites.size()) - 2; m >= 0; --m)
        out_stride[static_cast<std::size_t>(m)] =
            out_stride[static_cast<std::size_t>(m + 1)] * dims.dim(keep_sites[static_cast<std::size_t>(m + 1)]);

    Mat out = Mat::Zero(dim_keep, dim_keep);
    std::vector<int> ik(keep_sites.size(), 0), jk(keep_sites.size(), 0), it(trace_sites.size(), 0);

    auto advance = [](std::vector<int>& idx, const std::vector<int>& sites, const HilbertDims& d) {
        for (int m = static_cast<int>(idx.size()) - 1; m >= 0; --m) {
            if (++idx[static_cast<std::size_t>(m)] < d.dim(sites[static_cast<std::size_t>(m)])) return true;
            idx[static_cast<std::size_t>(m)] = 0;
        }
        return false;
    };

    do {  // over row-kept indices
        do {  // over col-kept indices
            Cplx sum = 0.0;
            std::fill(it.begin(), it.end(), 0);
            do {  // over traced indices (equal on row and column)
                int row = 0, col = 0;
                for (std::size_t m = 0; m < keep_sites.size(); ++m) {
                    row += ik[m] * stride[static_cast<std::size_t>(keep_sites[m])];
                    col += jk[m] * stride[static_cast<std::size_t>(keep_sites[m])];
                }
                for (std::size_t m = 0; m < trace_sites.size(); ++m) {
                    const int s = it[m] * stride[static_cast<std::size_t>(trace_sites[m])];
                    row += s; col += s;
                }
                sum += x(row, col);
            } while (advance(it, trace_sites, dims));
            int orow = 0, ocol = 0;
            for (std::size_t m = 0; m < keep_sites.size(); ++m) {
                orow += ik[m] * out_stride[m];
                ocol += jk[m] * out_stride[m];
            }
            out(orow, ocol) = sum;
        } while (advance(jk, keep_sites, dims));
    } while (advance(ik, keep_sites, dims));

    return out;
}

Mat embed(const Mat& op, const HilbertDims& dims, const std::vector<int>& sites) {
    const int n = dims.factors();
    int op_dim = 1;
    for (int s : sites) {
        if (s < 0 || s >= n) throw DimensionMismatch("embed: site index out of range");
        op_dim *= dims.dim(s);
    }
    if (op.rows() != op_dim || op.cols() != op_dim)
        throw DimensionMismatch("embed: operator dimension does not match listed sites");

    const auto stride = factor_strides(dims);
    std::vector<bool> on_site(static_cast<std::size_t>(n), false);
    for (int s : sites) on_site[static_cast<std::size_t>(s)] = true;

    // Strides of the operator's own factor ordering (sites order, last fastest).
    std::vector<int> op_stride(sites.size(), 1);
    for (int m = static_cast<int>(sites.size()) - 2; m >= 0; --m)
        op_stride[static_cast<std::size_t>(m)] =
            op_stride[static_cast<std::size_t>(m + 1)] * dims.dim(sites[static_cast<std::size_t>(m + 1)]);

    std::vector<int> rest_sites;
    for (int m = 0; m < n; ++m)
        if (!on_site[static_cast<std::size_t>(m)]) rest_sites.push_back(m);

    const int total = dims.total();
    Mat out = Mat::Zero(total, total);

    std::vector<int> oi(sites.size(), 0), oj(sites.size(), 0), r(rest_sites.size(), 0);
    auto advance = [&dims](std::vector<int>& idx, const std::vector<int>& which) {
        for (int m = static_cast<int>(idx.size()) - 1; m >= 0; --m) {
            if (++idx[static_cast<std::size_t>(m)] < dims.dim(which[static_cast<std::size_t>(m)])) return true;
            idx[static_cast<std::size_t>(m)] = 0;
        }
        return false;
    };

    do {  // operator row multi-index
        do {  // operator column multi-index
            int orow = 0, ocol = 0;
            for (std::size_t m = 0; m < sites.size(); ++m) {
                orow += oi[m] * op_stride[m];
                ocol += oj[m] * op_stride[m];
            }
            const Cplx v = op(orow, ocol);
            if (v == Cplx(0.0, 0.0)) continue;
            std::fill(r.begin(), r.end(), 0);
            do {  // spectator multi-index, equal on row and column
                int row = 0, col = 0;
                for (std::size_t m = 0; m < sites.size(); ++m) {
                    row += oi[m] * stride[static_cast<std::size_t>(sites[m])];
                    col += oj[m] * stride[static_cast<std::size_t>(sites[m])];
                }
                for (std::size_t m = 0; m < rest_sites.size(); ++m) {
                    const int s = r[m] * stride[static_cast<std::size_t>(rest_sites[m])];
                    row += s; col += s;
                }
                out(row, col) = v;
            } while (advance(r, rest_sites));
        } while (advance(oj, sites));
    } while (advance(oi, sites));

    return out;
}

Vec vectorize(const Mat& x) {
    return Eigen::Map<const Vec>(x.data(), x.size());
}

Mat devectorize(const Vec& v) {
    const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
    if (n * n != v.size())
        throw DimensionMismatch("devectorize: length " + std::to_string(v.size()) + " is not a perfect square");
    return Eigen::Map<const Mat>(v.data(), n, n);
}

double trace_norm(const Mat& x) {
    Eigen::JacobiSVD<Mat> svd(x);
    return svd.singularValues().sum();
}

Mat hermitize(const Mat& x) { return 0.5 * (x + x.adjoint()); }

bool is_hermitian(const Mat& x, double tol) {
    const double scale = std::max(1.0, x.norm());
    return (x - x.adjoint()).norm() <= tol * scale;
}

Mat identity(int d) { return Mat::Identity(d, d); }

Mat sigma_x() {
    Mat m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

Mat sigma_y() {
    Mat m(2, 2);
    m << 0, Cplx(0, -1), Cplx(0, 1), 0;
    return m;
}

Mat sigma_z() {
    Mat m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

Mat sigma_plus() { return basis_op(2, 1, 0); }
Mat sigma_minus() { return basis_op(2, 0, 1); }

Mat annihilation(int d) {
    if (d < 1) throw DimensionMismatch("annihilation: dimension must be >= 1");
    Mat m = Mat::Zero(d, d);
    for (int n = 1; n < d; ++n) m(n - 1, n) = std::sqrt(static_cast<double>(n));
    return m;
}

Mat number_operator(int d) {
    Mat m = Mat::Zero(d, d);
    for (int n = 0; n < d; ++n) m(n, n) = static_cast<double>(n);
    return m;
}

Mat basis_op(int d, int i, int j) {
    if (i < 0 || j < 0 || i >= d || j >= d) throw DimensionMismatch("basis_op: index out of range");
    Mat m = Mat::Zero(d, d);
    m(i, j) = 1.0;
    return m;
}

std::vector<Mat> hermitian_basis(int d) {
    std::vector<Mat> basis;
    basis.reserve(static_cast<std::size_t>(d) * static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) basis.push_back(basis_op(d, i, i));
    for (int i = 0; i < d; ++i) {
        for (int j = i + 1; j < d; ++j) {
            basis.push_back(basis_op(d, i, j) + basis_op(d, j, i));
            basis.push_back(I_UNIT * (basis_op(d, i, j) - basis_op(d, j, i)));
        }
    }
    return basis;
}

void check_density(const Mat& x, const DensityTolerances& tol) {
    if (x.rows() != x.cols()) throw DimensionMismatch("density operator must be square");
    const double scale = std::max(1.0, x.norm());
    if ((x - x.adjoint()).norm() > tol.hermiticity * scale)
        throw Error("density operator is not Hermitian");
    if (std::abs(x.trace() - Cplx(1.0, 0.0)) > tol.trace)
        throw Error("density operator trace differs from 1");
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(x));
    if (es.eigenvalues().minCoeff() < tol.positivity)
        throw Error("density operator has a negative eigenvalue beyond tolerance");
}

} // namespace adel

#include "adel/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

#include "adel/errors.hpp"

namespace adel {

bool Lindbladian::is_zero(double tol) const {
    if (hamiltonian.norm() > tol) return false;
    for (const auto& j : jumps)
        if (j.rate * j.op.norm() > tol) return false;
    return true;
}

Mat Lindbladian::apply(const Mat& rho) const {
    if (rho.rows() != dim() || rho.cols() != dim())
        throw DimensionMismatch("Lindbladian::apply: dimension mismatch");
    Mat out = -I_UNIT * (hamiltonian * rho - rho * hamiltonian);
    for (const auto& j : jumps) out += j.rate * dissipator_apply(j.op, rho);
    return out;
}

std::vector<Mat> Lindbladian::scaled_jumps() const {
    std::vector<Mat> out;
    out.reserve(jumps.size());
    for (const auto& j : jumps) out.push_back(std::sqrt(j.rate) * j.op);
    return out;
}

void Lindbladian::validate(double herm_tol) const {
    if (hamiltonian.rows() != hamiltonian.cols())
        throw DimensionMismatch("Lindbladian: Hamiltonian must be square");
    if (!is_hermitian(hamiltonian, herm_tol))
        throw Error("Lindbladian: Hamiltonian is not Hermitian");
    for (const auto& j : jumps) {
        if (j.op.rows() != dim() || j.op.cols() != dim())
            throw DimensionMismatch("Lindbladian: jump operator dimension mismatch");
        if (j.rate < 0.0) throw NegativeRate("Lindbladian: negative jump rate");
    }
}

Mat dissipator_apply(const Mat& l, const Mat& rho) {
    if (l.rows() != rho.rows() || l.cols() != rho.cols())
        throw DimensionMismatch("dissipator_apply: dimension mismatch");
    const Mat ldl = l.adjoint() * l;
    return l * rho * l.adjoint() - 0.5 * (ldl * rho + rho * ldl);
}

namespace {

// vec(A X) = (I ⊗ A) vec(X),  vec(X B) = (B^T ⊗ I) vec(X)
Mat left_mult(const Mat& a) { return kron(Mat::Identity(a.rows(), a.cols()), a); }
Mat right_mult(const Mat& b) { return kron(b.transpose(), Mat::Identity(b.rows(), b.cols())); }

} // namespace

Mat to_superoperator(const Lindbladian& gen) {
    const int d = gen.dim();
    Mat s = -I_UNIT * (left_mult(gen.hamiltonian) - right_mult(gen.hamiltonian));
    for (const auto& j : gen.jumps) {
        const Mat ldl = j.op.adjoint() * j.op;
        s += j.rate * (kron(j.op.conjugate(), j.op)
                       - 0.5 * left_mult(ldl) - 0.5 * right_mult(ldl));
    }
    (void)d;
    return s;
}

SteadyStateResult steady_state(const Lindbladian& gen, const SteadyStateOptions& opts) {
    const Mat s = to_superoperator(gen);
    Eigen::JacobiSVD<Mat> svd(s, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const Eigen::Index n = sv.size();
    const double smax = sv(0);

    // Singular values are sorted descending; the last is the null direction.
    const double second_smallest = n >= 2 ? sv(n - 2) : 0.0;
    if (second_smallest <= opts.uniqueness_rel * smax) {
        int mult = 0;
        for (Eigen::Index i = 0; i < n; ++i)
            if (sv(i) <= opts.uniqueness_rel * smax) ++mult;
        throw NonUniqueSteadyState("steady_state: null space dimension " + std::to_string(mult) +
                                   " (second-smallest singular value " + std::to_string(second_smallest) + ")");
    }

    Mat rho = devectorize(svd.matrixV().col(n - 1));
    rho = hermitize(rho);
    const Cplx tr = rho.trace();
    if (std::abs(tr) < 1e-12)
        throw NonUniqueSteadyState("steady_state: null vector is traceless; no normalizable steady state");
    rho /= tr;

    SpectralReport report;
    Eigen::ComplexEigenSolver<Mat> es(s);
    report.eigenvalues = es.eigenvalues();
    const double zero_tol = std::max(1e-12, 1e-9 * smax);
    double max_re_nonzero = -std::numeric_limits<double>::infinity();
    int mult = 0;
    for (Eigen::Index i = 0; i < report.eigenvalues.size(); ++i) {
        const Cplx lam = report.eigenvalues(i);
        if (std::abs(lam) <= zero_tol) ++mult;
        else max_re_nonzero = std::max(max_re_nonzero, lam.real());
    }
    report.steady_multiplicity = std::max(mult, 1);
    report.gap = -max_re_nonzero;
    if (!(report.gap > opts.gap_min))
        throw NotRelaxing("steady_state: spectral gap " + std::to_string(report.gap) +
                          " below tolerance " + std::to_string(opts.gap_min));

    const double resid = gen.apply(rho).norm();
    if (resid > opts.residual_rel * std::max(1.0, smax))
        throw SingularSolve("steady_state: residual " + std::to_string(resid) + " too large");

    return {rho, report};
}

Mat propagator(const Mat& superop, double t) {
    const Mat st = t * superop;
    return st.exp();
}

Mat propagate(const Lindbladian& gen, const Mat& rho0, double t) {
    if (t < 0.0) throw Error("propagate: t must be >= 0");
    if (rho0.rows() != gen.dim() || rho0.cols() != gen.dim())
        throw DimensionMismatch("propagate: state dimension mismatch");
    const Mat p = propagator(to_superoperator(gen), t);
    return devectorize(p * vectorize(rho0));
}

Mat solve_shifted(const Mat& superop, Cplx shift, const Mat& rhs, const SolveOptions& opts) {
    const Eigen::Index n2 = superop.rows();
    if (superop.cols() != n2) throw DimensionMismatch("solve_shifted: superoperator must be square");
    if (rhs.rows() != rhs.cols() || rhs.rows() * rhs.rows() != n2)
        throw DimensionMismatch("solve_shifted: rhs dimension mismatch");

    const Vec b = -vectorize(rhs);
    const double s_scale = std::max(1.0, superop.norm());
    const double rhs_norm = rhs.norm();
    const bool zero_shift = std::abs(shift) <= opts.zero_shift_tol * s_scale;
    const bool traceless_rhs = std::abs(rhs.trace()) <= 1e-10 * std::max(1.0, rhs_norm);

    Mat a = superop;
    if (!zero_shift) a += shift * Mat::Identity(n2, n2);

    Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double smax = sv(0);

    Vec x;
    if (zero_shift && traceless_rhs) {
        // Pseudo-inverse solve treating the null direction as exactly singular,
        // then remove the kernel (steady-state) component to fix the trace gauge.
        Vec inv = Vec::Zero(sv.size());
        const double cutoff = smax / opts.condition_max;
        for (Eigen::Index i = 0; i < sv.size(); ++i)
            if (sv(i) > cutoff) inv(i) = 1.0 / sv(i);
        if ((inv.array() != 0.0).count() < sv.size() - 1)
            throw SingularSolve("solve_shifted: generator null space has dimension > 1");
        x = svd.matrixV() * (inv.asDiagonal() * (svd.matrixU().adjoint() * b));
        Mat xm = devectorize(x);
        const Mat kernel = devectorize(svd.matrixV().col(sv.size() - 1));
        const Cplx ktr = kernel.trace();
        if (std::abs(ktr) > 1e-10) xm -= (xm.trace() / ktr) * kernel;
        x = vectorize(xm);
    } else {
        const double smin = sv(sv.size() - 1);
        if (!(smin > 0.0) || smax / smin > opts.condition_max) {
            // Report the spectrum point the shift collided with.
            Eigen::ComplexEigenSolver<Mat> es(superop);
            Cplx nearest = es.eigenvalues()(0);
            for (Eigen::Index i = 1; i < es.eigenvalues().size(); ++i)
                if (std::abs(es.eigenvalues()(i) + shift) < std::abs(nearest + shift))
                    nearest = es.eigenvalues()(i);
            throw SingularSolve("solve_shifted: condition number " +
                                std::to_string(smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity()) +
                                " exceeds limit; shift " + std::to_string(shift.real()) + "+" +
                                std::to_string(shift.imag()) + "i collides with eigenvalue " +
                                std::to_string(nearest.real()) + "+" + std::to_string(nearest.imag()) + "i");
        }
        x = svd.solve(b);
    }

    const double resid = (a * x - b).norm();
    if (resid > opts.residual_rel * std::max(1.0, rhs_norm))
        throw SingularSolve("solve_shifted: residual " + std::to_string(resid) +
                            " exceeds tolerance for rhs norm " + std::to_string(rhs_norm));
    return devectorize(x);
}

} // namespace adel

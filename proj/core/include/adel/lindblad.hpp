// Lindblad generators as values: build their d^2 x d^2 superoperator matrices
// (column-stacking convention from qops.hpp), find unique steady states with a
// spectral report, propagate exactly through the matrix exponential, and solve
// shifted linear equations (L + shift*Id)(X) = -rhs.

#pragma once

#include <vector>

#include "adel/qops.hpp"
#include "adel/types.hpp"

namespace adel {

struct Jump {
    Mat op;
    double rate = 1.0;
};

struct Lindbladian {
    Mat hamiltonian;          // Hermitian
    std::vector<Jump> jumps;  // rates >= 0

    static Lindbladian zero(int d) { return {Mat::Zero(d, d), {}}; }

    int dim() const { return static_cast<int>(hamiltonian.rows()); }
    bool is_zero(double tol = 0.0) const;

    // -i[H, rho] + sum_mu rate_mu D_{L_mu}(rho)
    Mat apply(const Mat& rho) const;

    // Jump operators with rates folded in: sqrt(rate) * op.
    std::vector<Mat> scaled_jumps() const;

    void validate(double herm_tol = 1e-12) const;
};

// D_L(rho) = L rho L† - 1/2 {L†L, rho}
Mat dissipator_apply(const Mat& l, const Mat& rho);

// Matrix S with S vec(rho) = vec(L(rho)) for all rho.
Mat to_superoperator(const Lindbladian& gen);

struct SpectralReport {
    Vec eigenvalues;            // of the superoperator
    int steady_multiplicity = 0;
    double gap = 0.0;           // -max{Re lambda : lambda != 0}
};

struct SteadyStateResult {
    Mat rho;   // Hermitian, trace one, PSD within tolerance
    SpectralReport report;
};

struct SteadyStateOptions {
    double uniqueness_rel = 1e-6;  // second singular value must exceed this * ||S||
    double gap_min = 1e-9;
    double residual_rel = 1e-10;   // ||L(rho)|| <= this * ||S||
};

// Null-space steady state (smallest singular vector, Hermitized, normalized).
// Throws NonUniqueSteadyState / NotRelaxing when the generator violates the
// strict-dissipativity assumptions.
SteadyStateResult steady_state(const Lindbladian& gen, const SteadyStateOptions& opts = {});

// exp(t * S), dense Padé scaling-and-squaring.
Mat propagator(const Mat& superop, double t);

// Exact propagation of a density operator; t >= 0.
Mat propagate(const Lindbladian& gen, const Mat& rho0, double t);

struct SolveOptions {
    double condition_max = 1e12;
    double residual_rel = 1e-10;
    double zero_shift_tol = 1e-14;  // |shift| below this * max(1, ||S||) counts as zero
};

// Solve (L + shift*Id)(X) = -rhs given the superoperator matrix of L.
// A zero shift with traceless rhs is solved on the traceless subspace and the
// traceless solution is returned. Throws SingularSolve (reporting the nearest
// eigenvalue) when the shifted operator is numerically singular.
Mat solve_shifted(const Mat& superop, Cplx shift, const Mat& rhs, const SolveOptions& opts = {});

} // namespace adel

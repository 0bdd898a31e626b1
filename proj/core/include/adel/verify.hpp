// Independent checks of a reduction: residuals of the order-h invariance
// equations on the full space, CPTP-to-order reports of the Kraus embedding,
// and brute-force full-vs-reduced trajectory comparison with ε-scaling fits.

#pragma once

#include <vector>

#include "adel/reduce.hpp"

namespace adel {

// Full-space generator Σ_k (L_A^(k) + ε L_int^(k)) + ε L_B - i[H̃_B, ·] on
// the [A..., B] product space.
Lindbladian full_generator(const CompositeModel& model, double eps);

// ------------------------------ invariance ----------------------------------

struct ResidualReport {
    int order = 0;
    double residual_abs = 0.0;  // max Frobenius mismatch over the Hermitian basis
    double scale = 1.0;         // max operator norm of either side (floored at 1)
    double residual_rel = 0.0;
    double tolerance_used = 0.0;
};

// Evaluates LHS and RHS of the order-h invariance equation on the Hermitian
// matrix-unit basis of H_s and reports the worst mismatch. Throws
// OrderUnavailable when the result was not assembled to the requested order.
ResidualReport invariance_residual(const ReductionResult& result, int order,
                                   double tolerance = 0.0);

// ------------------------------ CPTP order ----------------------------------

struct CptpReport {
    int order = 0;
    double epsilon = 0.0;
    double min_choi_eig = 0.0;
    double trace_defect = 0.0;  // max |tr K(ρ) - tr ρ| over the Hermitian basis
};

std::vector<CptpReport> cptp_order_check(const ReductionResult& result,
                                         const std::vector<double>& epsilons);

struct ExponentFit {
    double exponent = 0.0;
    double stderr = 0.0;
    int points_used = 0;
    bool at_noise_floor = false;  // every sample below the floor; no fit possible
};

// Log-log least-squares fit of |values| against epsilons, excluding samples
// below `floor`. With fewer than two usable points the fit is degenerate:
// at_noise_floor is set when everything sits below the floor, otherwise
// DegenerateFit is thrown.
ExponentFit fit_exponent(const std::vector<double>& epsilons,
                         const std::vector<double>& values, double floor = 1e-12);

// --------------------------- trajectory comparison ---------------------------

struct TrajectoryComparison {
    double epsilon = 0.0;
    std::vector<double> times;
    std::vector<double> errors;  // trace-norm distance at each sample
    double max_error = 0.0;
};

struct CompareOptions {
    int dimension_cap = 64;
    bool off_manifold = false;  // start from ρ̄_A ⊗ ρs instead of K(ρs)
};

// Propagates the full model exactly and the reduced model side by side and
// reports max_t || tr_A ρ_full(t) - tr_A K(ρ_s(t)) ||_1.
TrajectoryComparison compare_full_vs_reduced(const ReductionResult& result, const Mat& rho_s0,
                                             double horizon, int steps, double eps,
                                             const CompareOptions& opts = {});

// ------------------------------ scaling fits ---------------------------------

struct ScalingReport {
    std::vector<double> epsilons;
    std::vector<double> errors;
    double fitted_slope = 0.0;
    double slope_stderr = 0.0;
    std::vector<int> excluded;  // indices dropped at the noise floor
};

ScalingReport epsilon_scaling_fit(const std::vector<double>& epsilons,
                                  const std::vector<double>& errors,
                                  double noise_floor = 1e-12);

} // namespace adel

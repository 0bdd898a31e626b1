#include "adel/verify.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "adel/errors.hpp"

namespace adel {

Lindbladian full_generator(const CompositeModel& model, double eps) {
    const HilbertDims dims = model.dims();
    const int slot_b = model.subsystems();
    const int total = model.total_dim();

    Lindbladian gen;
    gen.hamiltonian = Mat::Zero(total, total);
    for (int k = 0; k < model.subsystems(); ++k) {
        const auto& f = model.fast[static_cast<std::size_t>(k)];
        gen.hamiltonian += embed(f.gen.hamiltonian, dims, {k});
        for (const auto& j : f.gen.jumps)
            gen.jumps.push_back({embed(j.op, dims, {k}), j.rate});
        // Interaction A^(k) ⊗ B† + A^(k)† ⊗ B, weighted by ε.
        const Mat v = embed(f.coupling, dims, {k}) * embed(model.coupling_b.adjoint(), dims, {slot_b});
        gen.hamiltonian += eps * (v + v.adjoint());
    }
    gen.hamiltonian += eps * embed(model.gen_b.hamiltonian, dims, {slot_b});
    for (const auto& j : model.gen_b.jumps)
        gen.jumps.push_back({embed(j.op, dims, {slot_b}), eps * j.rate});
    gen.hamiltonian += embed(model.h_tilde_b, dims, {slot_b});
    return gen;
}

namespace {

// The ε-independent pieces of the full generator, applied separately.
struct GeneratorPieces {
    Lindbladian l_a;      // Σ_k L_A^(k), embedded
    Lindbladian l_b;      // L_B, embedded (no ε factor)
    Mat v_int;            // Σ_k A^(k) ⊗ B† + h.c.
    Mat h_tilde_full;     // I ⊗ H̃_B

    Mat apply_a(const Mat& x) const { return l_a.apply(x); }
    Mat apply_b(const Mat& x) const { return l_b.apply(x); }
    Mat apply_int(const Mat& x) const { return -I_UNIT * comm(v_int, x); }
    Mat apply_htilde(const Mat& x) const { return -I_UNIT * comm(h_tilde_full, x); }
};

GeneratorPieces generator_pieces(const CompositeModel& model) {
    const HilbertDims dims = model.dims();
    const int slot_b = model.subsystems();
    const int total = model.total_dim();

    GeneratorPieces p;
    p.l_a.hamiltonian = Mat::Zero(total, total);
    for (int k = 0; k < model.subsystems(); ++k) {
        const auto& f = model.fast[static_cast<std::size_t>(k)];
        p.l_a.hamiltonian += embed(f.gen.hamiltonian, dims, {k});
        for (const auto& j : f.gen.jumps)
            p.l_a.jumps.push_back({embed(j.op, dims, {k}), j.rate});
    }
    p.l_b.hamiltonian = embed(model.gen_b.hamiltonian, dims, {slot_b});
    for (const auto& j : model.gen_b.jumps)
        p.l_b.jumps.push_back({embed(j.op, dims, {slot_b}), j.rate});
    p.v_int = Mat::Zero(total, total);
    for (int k = 0; k < model.subsystems(); ++k) {
        const Mat v = embed(model.fast[static_cast<std::size_t>(k)].coupling, dims, {k}) *
                      embed(model.coupling_b.adjoint(), dims, {slot_b});
        p.v_int += v + v.adjoint();
    }
    p.h_tilde_full = embed(model.h_tilde_b, dims, {slot_b});
    return p;
}

} // namespace

ResidualReport invariance_residual(const ReductionResult& result, int order, double tolerance) {
    if (order < 0 || order > result.order)
        throw OrderUnavailable("invariance residual of order " + std::to_string(order) +
                               " needs a reduction assembled to at least that order");
    const auto pieces = generator_pieces(result.model);
    const auto basis = hermitian_basis(result.model.dim_b());

    double worst = 0.0;
    double scale = 1.0;
    for (const auto& rhos : basis) {
        Mat lhs, rhs;
        const Mat k0 = result.k0(rhos);
        const Mat ls0_rhos = result.l_s0.apply(rhos);
        if (order == 0) {
            lhs = pieces.apply_a(k0) + pieces.apply_htilde(k0);
            rhs = result.k0(ls0_rhos);
        } else if (order == 1) {
            const Mat k1 = result.k1(rhos);
            lhs = pieces.apply_a(k1) + pieces.apply_int(k0) + pieces.apply_b(k0) +
                  pieces.apply_htilde(k1);
            rhs = result.k0(result.l_s1.apply(rhos)) + result.k1(ls0_rhos);
        } else {
            const Mat k1 = result.k1(rhos);
            const Mat k2 = result.k2(rhos);
            lhs = pieces.apply_a(k2) + pieces.apply_int(k1) + pieces.apply_b(k1) +
                  pieces.apply_htilde(k2);
            rhs = result.k0(result.l_s2.apply(rhos)) + result.k1(result.l_s1.apply(rhos)) +
                  result.k2(ls0_rhos);
        }
        worst = std::max(worst, (lhs - rhs).norm());
        scale = std::max({scale, lhs.norm(), rhs.norm()});
    }

    ResidualReport report;
    report.order = order;
    report.residual_abs = worst;
    report.scale = scale;
    report.residual_rel = worst / scale;
    report.tolerance_used = tolerance;
    return report;
}

std::vector<CptpReport> cptp_order_check(const ReductionResult& result,
                                         const std::vector<double>& epsilons) {
    const int dim_b = result.model.dim_b();
    const auto basis = hermitian_basis(dim_b);
    std::vector<CptpReport> reports;
    reports.reserve(epsilons.size());
    for (double eps : epsilons) {
        CptpReport r;
        r.order = result.order;
        r.epsilon = eps;
        const Mat choi = choi_matrix([&](const Mat& x) { return result.kraus(x, eps); }, dim_b);
        Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(choi));
        r.min_choi_eig = es.eigenvalues().minCoeff();
        double defect = 0.0;
        for (const auto& rhos : basis) {
            const Cplx tr = result.kraus(rhos, eps).trace();
            defect = std::max(defect, std::abs(tr - rhos.trace()));
        }
        r.trace_defect = defect;
        reports.push_back(r);
    }
    return reports;
}

ExponentFit fit_exponent(const std::vector<double>& epsilons,
                         const std::vector<double>& values, double floor) {
    if (epsilons.size() != values.size())
        throw DimensionMismatch("fit_exponent: size mismatch");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
        if (std::abs(values[i]) < floor) continue;
        lx.push_back(std::log(epsilons[i]));
        ly.push_back(std::log(std::abs(values[i])));
    }
    ExponentFit fit;
    fit.points_used = static_cast<int>(lx.size());
    if (lx.empty()) {
        fit.at_noise_floor = true;
        return fit;
    }
    if (lx.size() < 2)
        throw DegenerateFit("fit_exponent: fewer than two samples above the noise floor");

    const double n = static_cast<double>(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i]; sy += ly[i]; sxx += lx[i] * lx[i]; sxy += lx[i] * ly[i];
    }
    const double denom = n * sxx - sx * sx;
    if (std::abs(denom) < 1e-12)
        throw DegenerateFit("fit_exponent: epsilon samples do not span a range");
    fit.exponent = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - fit.exponent * sx) / n;
    double ss = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        const double r = ly[i] - (intercept + fit.exponent * lx[i]);
        ss += r * r;
    }
    if (lx.size() > 2)
        fit.stderr = std::sqrt(ss / (n - 2.0) / (sxx - sx * sx / n));
    return fit;
}

TrajectoryComparison compare_full_vs_reduced(const ReductionResult& result, const Mat& rho_s0,
                                             double horizon, int steps, double eps,
                                             const CompareOptions& opts) {
    const CompositeModel& model = result.model;
    if (model.total_dim() > opts.dimension_cap)
        throw DimensionCap("full dimension " + std::to_string(model.total_dim()) +
                           " exceeds cap " + std::to_string(opts.dimension_cap));
    if (steps < 1) throw Error("compare_full_vs_reduced: steps must be >= 1");
    check_density(rho_s0);

    const double dt = horizon / steps;
    const Mat p_full = propagator(to_superoperator(full_generator(model, eps)), dt);
    const Mat p_red = propagator(to_superoperator(result.reduced_generator(eps)), dt);

    Vec v_full = vectorize(opts.off_manifold ? result.k0(rho_s0) : result.kraus(rho_s0, eps));
    Vec v_red = vectorize(rho_s0);

    const HilbertDims dims = model.dims();
    const int slot_b = model.subsystems();

    TrajectoryComparison cmp;
    cmp.epsilon = eps;
    for (int i = 0; i <= steps; ++i) {
        const Mat rho_full = devectorize(v_full);
        const Mat rhos = devectorize(v_red);
        const Mat target_full = partial_trace(rho_full, dims, {slot_b});
        const Mat target_red = partial_trace(result.kraus(rhos, eps), dims, {slot_b});
        const double err = trace_norm(target_full - target_red);
        cmp.times.push_back(i * dt);
        cmp.errors.push_back(err);
        cmp.max_error = std::max(cmp.max_error, err);
        if (i < steps) {
            v_full = p_full * v_full;
            v_red = p_red * v_red;
        }
    }
    return cmp;
}

ScalingReport epsilon_scaling_fit(const std::vector<double>& epsilons,
                                  const std::vector<double>& errors, double noise_floor) {
    if (epsilons.size() != errors.size())
        throw DimensionMismatch("epsilon_scaling_fit: size mismatch");
    ScalingReport report;
    report.epsilons = epsilons;
    report.errors = errors;
    std::vector<double> ex, ey;
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
        if (errors[i] < noise_floor) {
            report.excluded.push_back(static_cast<int>(i));
            continue;
        }
        ex.push_back(epsilons[i]);
        ey.push_back(errors[i]);
    }
    if (ex.size() < 2)
        throw DegenerateFit("epsilon_scaling_fit: fewer than two error samples above the noise floor");
    const ExponentFit fit = fit_exponent(ex, ey, 0.0);
    report.fitted_slope = fit.exponent;
    report.slope_stderr = fit.stderr;
    return report;
}

} // namespace adel

// TLS-bath application: K driven, damped two-level systems coupled to one
// resonator mode in the displaced rotating frame. Builds the composite model
// (A^(k) = i σ₋, B = a, H̃_B = Δ_c a†a, ε = g), evaluates the closed-form
// first-order coefficients z₁ = W₁/Z and z₂ = W₂/Z, and runs detuning/drive
// sweeps of the induced frequency shift and dissipation rates.

#pragma once

#include <vector>

#include "adel/reduce.hpp"

namespace adel {

struct TlsBathParams {
    double g = 0.0;            // qubit-resonator coupling (Hz)
    double gamma_minus = 0.0;  // TLS decay rate Γ₋ (Hz)
    double delta_c = 0.0;      // pump-resonator detuning Δ_c (Hz)
    std::vector<double> delta_q;  // per-TLS detunings Δ_q^(k) (Hz)
    double v_tilde = 0.0;      // pump amplitude ṽ (Hz)
    int fock_dim = 3;          // resonator truncation

    // K detunings on a uniform grid over [lo, hi] (the reproducible layout
    // used for the sweep surfaces).
    static std::vector<double> uniform_detunings(double lo, double hi, int count);
};

// Composite model for the post-displacement equation; the TLS drive enters as
// (g ṽ / Δ_c) σ_x. Throws ZeroDetuning when Δ_c = 0.
CompositeModel build_full_model(const TlsBathParams& p);

// Same model with all frequencies divided by Γ₋ (dimensionless time); the
// verification paths use this scaling so residual tolerances are meaningful.
CompositeModel build_normalized_model(const TlsBathParams& p);

enum class W2Variant {
    GammaMinusSquared,  // read "(Γ₂ + 4Δ_q²)" as Γ₋² + 4Δ_q² (default; matches the solver)
    GammaMinusLinear,   // literal first power, kept for the cross-check
};

// Closed-form (z₁, z₂) for subsystem k. The drive enters only through the
// product g·ṽ. Throws SingularDenominator at parameter sets where Z = 0.
std::pair<Cplx, Cplx> closed_form_z(const TlsBathParams& p, int k,
                                    W2Variant variant = W2Variant::GammaMinusSquared);

// <N> = ṽ²/Δ_c²
double photon_number(double v_tilde, double delta_c);

struct ApplicationCoefficients {
    std::vector<double> shift_k;       // δ^(k) = Im(z₁ + z₂)
    std::vector<double> gamma_a_k;     // 2 Re z₂
    std::vector<double> gamma_adag_k;  // 2 Re z₁
    double shift = 0.0;                // g² Σ_k δ^(k)
    double gamma_a = 0.0;              // g² Σ_k Γ_a^(k)
    double gamma_adag = 0.0;           // g² Σ_k Γ_a†^(k)
};

ApplicationCoefficients application_coefficients(const TlsBathParams& p,
                                                 W2Variant variant = W2Variant::GammaMinusSquared);

struct SweepRow {
    double delta_c = 0.0;
    double v_tilde = 0.0;
    double n_photons = 0.0;
    double shift = 0.0;        // g² Σ δ^(k) (Hz)
    double gamma_a = 0.0;      // g² Σ Γ_a^(k) (Hz)
    double gamma_adag = 0.0;   // g² Σ Γ_a†^(k) (Hz)
};

struct SweepGrid {
    double delta_c_min = 0.0, delta_c_max = 0.0;
    int delta_c_count = 1;
    double v_tilde_min = 0.0, v_tilde_max = 0.0;
    int v_tilde_count = 1;
};

// One row per (Δ_c, ṽ) grid point, Δ_c outer loop, ṽ inner; row order is the
// grid order. Closed-form fast path; resonator space never built.
std::vector<SweepRow> sweep(const TlsBathParams& base, const SweepGrid& grid,
                            W2Variant variant = W2Variant::GammaMinusSquared);

} // namespace adel

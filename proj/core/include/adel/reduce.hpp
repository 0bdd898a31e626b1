// Order-0/1/2 adiabatic elimination of K fast, strictly dissipative
// subsystems coupled to a slow target through A^(k) ⊗ B† + A^(k)† ⊗ B, with
// fast target Hamiltonian H̃_B obeying [H̃_B, B†] = c B†.
//
// Produces the reduced Lindblad generators and the pieces of the
// Kraus-structured embedding K(ρs) = (I - iεM + ε²N) (ρ̄_A ⊗ ρs) (·)† + ε²K₂^Q.
//
// Index conventions used throughout this module:
//   B_1 = B†, B_2 = B;  A_1 = A, A_2 = A†;  δ_hj = h - j;
//   pair index (h, j) is flattened as idx = 2*(h-1) + (j-1).

#pragma once

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "adel/lindblad.hpp"
#include "adel/qops.hpp"

namespace adel {

// ------------------------------- model --------------------------------------

struct FastSubsystem {
    Lindbladian gen;  // strictly relaxing generator on H_A^(k)
    Mat coupling;     // A^(k)
};

struct CompositeModel {
    std::vector<FastSubsystem> fast;
    Mat coupling_b;     // B
    Mat h_tilde_b;      // H̃_B, Hermitian
    Lindbladian gen_b;  // L_B (may be zero)
    double epsilon = 0.0;

    int subsystems() const { return static_cast<int>(fast.size()); }
    int dim_b() const { return static_cast<int>(coupling_b.rows()); }
    int dim_a() const;
    int total_dim() const { return dim_a() * dim_b(); }
    HilbertDims dims() const;  // factor order [A^(1), ..., A^(K), B]

    void validate() const;  // shape/Hermiticity/epsilon checks (not relaxation)
};

// Extracts c with [H̃_B, B†] = c B† and verifies the implied [H̃_B, B] = -c B.
// Throws AssumptionViolated / NonRealConstant.
double check_assumption_cb(const Mat& h_tilde_b, const Mat& coupling_b, double tol = 1e-10);

// ---------------------------- first order -----------------------------------

enum class Gauge {
    CancelHs1,  // trace of F ρ̄ tuned so H_s1 vanishes (needs c != 0)
    Traceless,  // tr(F ρ̄) = 0, H_s1 kept explicitly
};

struct SubsystemFirstOrder {
    Mat rho_bar;           // steady state of the fast generator
    Mat super;             // its superoperator matrix (reused downstream)
    SpectralReport report;
    Mat x1, x2;            // X_h = F_h ρ̄, the actual solver unknowns
    Mat f1, f2;            // F_h extracted on the support of ρ̄
    bool rank_deficient = false;
    Cplx z0, z1, z2;       // tr(Aρ̄), tr(F₁ρ̄A†), tr(F₂ρ̄A)
    Cplx t1, t2;           // tr(F₁ρ̄), tr(F₂ρ̄)
};

struct FirstOrderData {
    Gauge gauge = Gauge::CancelHs1;
    double c_b_dagger = 0.0;
    std::vector<SubsystemFirstOrder> sub;
    Mat h_s1;           // zero in CancelHs1 gauge
    Lindbladian l_s1;   // L_B, plus -i[H_s1, .] in the Traceless gauge
};

struct FirstOrderOptions {
    double residual_rel = 1e-10;
    double rank_tol = 1e-10;      // relative eigenvalue cutoff for the ρ̄ support
    SolveOptions solve;
};

FirstOrderData solve_first_order(const CompositeModel& model, Gauge gauge,
                                 const FirstOrderOptions& opts = {});

// ---------------------------- second order ----------------------------------

struct K2Subsystem {
    // F̄_hj(ρ̄) = Σ_μ [L_μ, F_h] ρ̄ [L_μ, F_j]†  (phase factor at t = 0)
    std::array<Mat, 4> fbar;
    // K̄_hj = -(L_A + 2ic δ_hj)⁻¹ S(F̄_hj), the improper time integral in
    // resolvent form; traceless by construction.
    std::array<Mat, 4> kbar;
    Cplx b = 0.0;  // b^(k) = -tr(F̄_21)/(2c); b_1 := b*, b_2 := b
};

struct K2Pair {
    int k = 0, kp = 0;
    std::array<Mat, 4> x;  // U_{Bj†Bh} ρ̄ on the (k,k') pair space, index (h,j)
    std::array<Mat, 4> u;  // U itself, extracted on the support of ρ̄
};

struct K2Data {
    std::vector<K2Subsystem> sub;   // per k
    std::vector<K2Pair> pairs;      // ordered pairs, index k*K + k'; (k,k) on H_A^(k)
    double f1 = 0.0, f2 = 0.0;
    double tau_bar = 1.0;
    double k2q_min_choi_eig = 0.0;  // at the accepted tau_bar
    Mat n_full;                     // N = Σ U ⊗ B_j†B_h on the full space

    // Coefficients of the ρ̄_A ⊗ (·) tail of K₂^Q: q1 B†ρsB + q2 BρsB† +
    // qx1 B†ρsB† + qx2 BρsB (the analytically integrated 𝒢/𝔤/𝔣 pieces).
    double q1 = 0.0, q2 = 0.0;
    Cplx qx1 = 0.0, qx2 = 0.0;
};

struct SecondOrderData {
    RMat delta_cross;  // δ^(k,k'), filled for k > k'
    Lindbladian l_s2;
    std::optional<K2Data> k2;  // absent when only the generator was requested
};

struct SecondOrderOptions {
    double negative_rate_tol = 1e-8;
    double tau_psd_tol = 1e-9;       // Choi kernel PSD within -tol
    double tau_max = 65536.0;        // 2^16
    FirstOrderOptions first_order;
};

// L_{s,2} coefficients from the z table; separated out so the direct
// coefficient mapping is testable with synthetic z values.
SecondOrderData assemble_second_order_generator(const std::vector<Cplx>& z0,
                                                const std::vector<Cplx>& z1,
                                                const std::vector<Cplx>& z2,
                                                double c_b_dagger, const Mat& coupling_b,
                                                double negative_rate_tol = 1e-8);

// Full Theorem-2 solve: generator plus (optionally) the complete K2 data.
// Preconditions: L_B = 0, CancelHs1 gauge; the K2 construction additionally
// needs c > 0. Throws PreconditionViolated / NegativeRate / TauSearchFailed.
SecondOrderData solve_second_order(const CompositeModel& model, const FirstOrderData& fo,
                                   bool build_kraus = true,
                                   const SecondOrderOptions& opts = {});

K2Data build_K2(const CompositeModel& model, const FirstOrderData& fo,
                const SecondOrderOptions& opts = {});

// ----------------------------- assembled result -----------------------------

struct ReductionResult {
    CompositeModel model;
    int order = 0;
    Gauge gauge = Gauge::CancelHs1;
    FirstOrderData fo;                  // populated for order >= 1
    std::optional<SecondOrderData> so;  // populated for order == 2
    Mat rho_bar_a;                      // ⊗_k ρ̄^(k) on the A space
    Mat m_full;                         // M on the full space (order >= 1)
    Lindbladian l_s0, l_s1, l_s2;       // on H_s; zero beyond `order`

    Mat k0(const Mat& rhos) const;
    Mat k1(const Mat& rhos) const;
    Mat k2(const Mat& rhos) const;   // throws OrderUnavailable below order 2
    Mat k2l(const Mat& rhos) const;
    Mat k2e(const Mat& rhos) const;
    Mat k2q(const Mat& rhos) const;

    // K(ρs) at the result's order: ρ̄⊗ρs, then (I-iεM)(·)(I+iεM†), then the
    // full second-order Kraus structure including K₂^Q.
    Mat kraus(const Mat& rhos, double eps) const;

    // L_s = L_{s,0} + ε L_{s,1} + ε² L_{s,2} truncated at the result's order.
    Lindbladian reduced_generator(double eps) const;
    Lindbladian reduced_generator() const { return reduced_generator(model.epsilon); }
};

struct ReduceOptions {
    FirstOrderOptions first_order;
    SecondOrderOptions second_order;
};

ReductionResult reduce_model(const CompositeModel& model, int order,
                             Gauge gauge = Gauge::CancelHs1,
                             const ReduceOptions& opts = {});

// ------------------------------- map utilities ------------------------------

using MapEvaluator = std::function<Mat(const Mat&)>;

// Choi matrix C = Σ_ij map(|i><j|) ⊗ |i><j|; the map is CP iff C is PSD.
Mat choi_matrix(const MapEvaluator& map, int dim_in);

// Rectangular superoperator matrix of a linear map (columns = vectorized
// images of the matrix units), for residual and trace checks.
Mat map_matrix(const MapEvaluator& map, int dim_in, int dim_out);

} // namespace adel

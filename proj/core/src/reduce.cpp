#include "adel/reduce.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

#include "adel/errors.hpp"

namespace adel {

namespace {

constexpr int pair_idx(int h, int j) { return 2 * (h - 1) + (j - 1); }
constexpr int delta_hj(int h, int j) { return h - j; }

// F with F ρ̄ = X, supported on the range of ρ̄ (F = X ρ̄⁺). Returns the
// least-squares choice when ρ̄ is rank deficient; the residual check guards
// against X escaping the support.
Mat extract_on_support(const Mat& x, const Mat& rho_bar, double rank_tol, double residual_tol,
                       bool* rank_deficient) {
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(rho_bar));
    const auto& ev = es.eigenvalues();
    const double cutoff = rank_tol * std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
    Vec inv = Vec::Zero(ev.size());
    bool deficient = false;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev(i) > cutoff) inv(i) = 1.0 / ev(i);
        else deficient = true;
    }
    const Mat f = x * (es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint());
    const double resid = (f * rho_bar - x).norm();
    if (resid > residual_tol * std::max(1.0, x.norm()))
        throw RankDeficientSteadyState(
            "operator equation F*rho_bar = X has no solution on the steady-state support (residual " +
            std::to_string(resid) + ")");
    if (rank_deficient) *rank_deficient = deficient;
    return f;
}

Mat projected(const Mat& q, const Mat& rho_bar) { return q - q.trace() * rho_bar; }

// Lindbladian of two fast subsystems on their joint space (k != k').
Lindbladian pair_generator(const Lindbladian& a, const Lindbladian& b) {
    const Mat ia = Mat::Identity(a.dim(), a.dim());
    const Mat ib = Mat::Identity(b.dim(), b.dim());
    Lindbladian out;
    out.hamiltonian = kron(a.hamiltonian, ib) + kron(ia, b.hamiltonian);
    for (const auto& j : a.jumps) out.jumps.push_back({kron(j.op, ib), j.rate});
    for (const auto& j : b.jumps) out.jumps.push_back({kron(ia, j.op), j.rate});
    return out;
}

} // namespace

// ------------------------------- model --------------------------------------

int CompositeModel::dim_a() const {
    int d = 1;
    for (const auto& f : fast) d *= f.gen.dim();
    return d;
}

HilbertDims CompositeModel::dims() const {
    std::vector<int> d;
    d.reserve(fast.size() + 1);
    for (const auto& f : fast) d.push_back(f.gen.dim());
    d.push_back(dim_b());
    return HilbertDims(d);
}

void CompositeModel::validate() const {
    if (fast.empty()) throw DimensionMismatch("CompositeModel: at least one fast subsystem required");
    if (coupling_b.rows() != coupling_b.cols())
        throw DimensionMismatch("CompositeModel: B must be square");
    if (h_tilde_b.rows() != dim_b() || h_tilde_b.cols() != dim_b())
        throw DimensionMismatch("CompositeModel: H̃_B dimension mismatch");
    if (!is_hermitian(h_tilde_b))
        throw Error("CompositeModel: H̃_B is not Hermitian");
    if (gen_b.dim() != dim_b())
        throw DimensionMismatch("CompositeModel: L_B dimension mismatch");
    gen_b.validate();
    for (const auto& f : fast) {
        f.gen.validate();
        if (f.coupling.rows() != f.gen.dim() || f.coupling.cols() != f.gen.dim())
            throw DimensionMismatch("CompositeModel: coupling operator dimension mismatch");
    }
    if (epsilon < 0.0) throw Error("CompositeModel: epsilon must be >= 0");
}

double check_assumption_cb(const Mat& h_tilde_b, const Mat& coupling_b, double tol) {
    const Mat bdag = coupling_b.adjoint();
    const double bnorm = bdag.norm();
    if (bnorm == 0.0) throw AssumptionViolated("coupling operator B is zero");
    const Mat lhs = comm(h_tilde_b, bdag);
    // Least-squares projection of [H̃, B†] onto B†.
    const Cplx c = (bdag.adjoint() * lhs).trace() / (bdag.adjoint() * bdag).trace();
    const double resid = (lhs - c * bdag).norm();
    if (resid > tol * bnorm)
        throw AssumptionViolated("[H̃_B, B†] is not proportional to B† (residual " +
                                 std::to_string(resid / bnorm) + " relative)");
    if (std::abs(c.imag()) > tol * std::max(1.0, std::abs(c)))
        throw NonRealConstant("the eigen-coefficient of [H̃_B, B†] has imaginary part " +
                              std::to_string(c.imag()));
    const double cr = c.real();
    // Implied identity on the conjugate ladder.
    const double resid2 = (comm(h_tilde_b, coupling_b) + cr * coupling_b).norm();
    if (resid2 > tol * coupling_b.norm())
        throw AssumptionViolated("[H̃_B, B] deviates from -c B (residual " +
                                 std::to_string(resid2 / coupling_b.norm()) + " relative)");
    return cr;
}

// ---------------------------- first order -----------------------------------

FirstOrderData solve_first_order(const CompositeModel& model, Gauge gauge,
                                 const FirstOrderOptions& opts) {
    model.validate();
    const double c = check_assumption_cb(model.h_tilde_b, model.coupling_b);
    const double h_scale = std::max(1.0, model.h_tilde_b.norm());
    if (gauge == Gauge::CancelHs1 && std::abs(c) <= 1e-12 * h_scale)
        throw GaugeUnavailable("the Hs1-cancelling gauge needs c_B† != 0; got c = " +
                               std::to_string(c));

    FirstOrderData out;
    out.gauge = gauge;
    out.c_b_dagger = c;
    out.sub.reserve(model.fast.size());

    for (const auto& f : model.fast) {
        SubsystemFirstOrder s;
        auto steady = steady_state(f.gen);
        s.rho_bar = steady.rho;
        s.report = steady.report;
        s.super = to_superoperator(f.gen);

        const Mat a_rho = f.coupling * s.rho_bar;
        const Mat adag_rho = f.coupling.adjoint() * s.rho_bar;
        const Mat rhs1 = gauge == Gauge::CancelHs1 ? a_rho : projected(a_rho, s.rho_bar);
        const Mat rhs2 = gauge == Gauge::CancelHs1 ? adag_rho : projected(adag_rho, s.rho_bar);

        // (L_A - i c)(X1) = -rhs1,  (L_A + i c)(X2) = -rhs2
        s.x1 = solve_shifted(s.super, Cplx(0.0, -c), rhs1, opts.solve);
        s.x2 = solve_shifted(s.super, Cplx(0.0, +c), rhs2, opts.solve);

        s.f1 = extract_on_support(s.x1, s.rho_bar, opts.rank_tol, opts.residual_rel, &s.rank_deficient);
        s.f2 = extract_on_support(s.x2, s.rho_bar, opts.rank_tol, opts.residual_rel, nullptr);

        s.z0 = (f.coupling * s.rho_bar).trace();
        s.z1 = (s.x1 * f.coupling.adjoint()).trace();
        s.z2 = (s.x2 * f.coupling).trace();
        s.t1 = s.x1.trace();
        s.t2 = s.x2.trace();
        out.sub.push_back(std::move(s));
    }

    out.h_s1 = Mat::Zero(model.dim_b(), model.dim_b());
    out.l_s1 = model.gen_b;
    if (gauge == Gauge::Traceless) {
        const Mat bdag = model.coupling_b.adjoint();
        for (const auto& s : out.sub)
            out.h_s1 += s.z0 * bdag + std::conj(s.z0) * model.coupling_b;
        out.l_s1.hamiltonian = model.gen_b.hamiltonian + out.h_s1;
    }
    return out;
}

// ---------------------------- second order ----------------------------------

SecondOrderData assemble_second_order_generator(const std::vector<Cplx>& z0,
                                                const std::vector<Cplx>& z1,
                                                const std::vector<Cplx>& z2,
                                                double c_b_dagger, const Mat& coupling_b,
                                                double negative_rate_tol) {
    const std::size_t n = z1.size();
    if (z0.size() != n || z2.size() != n)
        throw DimensionMismatch("assemble_second_order_generator: z tables must have equal length");
    const Mat b = coupling_b;
    const Mat bdag = b.adjoint();
    const Mat b_bdag = b * bdag;
    const Mat bdag_b = bdag * b;

    SecondOrderData out;
    out.delta_cross = RMat::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));

    Mat h2 = Mat::Zero(b.rows(), b.cols());
    double rate_bdag = 0.0, rate_b = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        if (z1[k].real() < -negative_rate_tol)
            throw NegativeRate("Re z1 = " + std::to_string(z1[k].real()) +
                               " on subsystem " + std::to_string(k) +
                               ": the reduced generator is not in Lindblad form");
        if (z2[k].real() < -negative_rate_tol)
            throw NegativeRate("Re z2 = " + std::to_string(z2[k].real()) +
                               " on subsystem " + std::to_string(k) +
                               ": the reduced generator is not in Lindblad form");
        h2 += z1[k].imag() * b_bdag + z2[k].imag() * bdag_b;
        rate_bdag += 2.0 * z1[k].real();
        rate_b += 2.0 * z2[k].real();
    }
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t kp = 0; kp < k; ++kp) {
            const double delta = -2.0 * (z0[k] * std::conj(z0[kp])).real() / c_b_dagger;
            out.delta_cross(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(kp)) = delta;
            h2 += delta * (b_bdag - bdag_b);
        }
    }

    out.l_s2.hamiltonian = hermitize(h2);
    if (rate_bdag != 0.0) out.l_s2.jumps.push_back({bdag, std::max(rate_bdag, 0.0)});
    if (rate_b != 0.0) out.l_s2.jumps.push_back({b, std::max(rate_b, 0.0)});
    return out;
}

namespace {

struct K2Workspace {
    std::vector<Cplx> t1, t2;    // tr(F_h ρ̄) per k
    std::vector<double> fbar11, fbar22;  // tr F̄_hh per k (real, >= 0)
    std::vector<Cplx> b;
    double e1 = 0.0, e2 = 0.0;   // Σ_{k,k'} tr[F_h ρ̄ F_h†] cross tables
    double pi_half = std::numbers::pi / 2.0;

    double f1(double tau) const {
        double p = 0.0;
        for (double v : fbar11) p += tau * v + pi_half;
        return e1 + p;
    }
    double f2(double tau) const {
        double p = 0.0;
        for (std::size_t k = 0; k < fbar22.size(); ++k)
            p += tau * fbar22[k] + pi_half * std::norm(b[k]);
        return e2 + p;
    }
    double q1(double tau) const {
        double s = f1(tau);
        for (double v : fbar11) s += tau * v + pi_half;
        return s;
    }
    double q2(double tau) const {
        double s = f2(tau);
        for (std::size_t k = 0; k < fbar22.size(); ++k)
            s += tau * fbar22[k] + pi_half * std::norm(b[k]);
        return s;
    }
};

} // namespace

K2Data build_K2(const CompositeModel& model, const FirstOrderData& fo,
                const SecondOrderOptions& opts) {
    if (!model.gen_b.is_zero(1e-14 * std::max(1.0, model.gen_b.hamiltonian.norm())))
        throw PreconditionViolated("second-order construction requires a vanishing slow generator (L_B = 0)");
    if (fo.gauge != Gauge::CancelHs1)
        throw PreconditionViolated("second-order construction requires the Hs1-cancelling gauge");
    const double c = fo.c_b_dagger;
    if (!(c > 0.0))
        throw PreconditionViolated("the Kraus construction's time integrals require c_B† > 0; got c = " +
                                   std::to_string(c));

    const int kcount = model.subsystems();
    const Mat b_op = model.coupling_b;
    const Mat bdag = b_op.adjoint();
    const std::array<Mat, 2> b_h = {bdag, b_op};  // B_1 = B†, B_2 = B

    K2Data data;
    data.sub.resize(static_cast<std::size_t>(kcount));
    K2Workspace ws;
    ws.t1.resize(static_cast<std::size_t>(kcount));
    ws.t2.resize(static_cast<std::size_t>(kcount));
    ws.fbar11.resize(static_cast<std::size_t>(kcount));
    ws.fbar22.resize(static_cast<std::size_t>(kcount));
    ws.b.resize(static_cast<std::size_t>(kcount));

    // Per-subsystem pieces: F̄_hj, b, K̄_hj.
    for (int k = 0; k < kcount; ++k) {
        const auto& s = fo.sub[static_cast<std::size_t>(k)];
        auto& out = data.sub[static_cast<std::size_t>(k)];
        const auto jumps = model.fast[static_cast<std::size_t>(k)].gen.scaled_jumps();
        const std::array<const Mat*, 2> f_h = {&s.f1, &s.f2};

        for (int h = 1; h <= 2; ++h) {
            for (int j = 1; j <= 2; ++j) {
                Mat fbar = Mat::Zero(s.rho_bar.rows(), s.rho_bar.cols());
                for (const auto& l : jumps) {
                    const Mat ch = comm(l, *f_h[static_cast<std::size_t>(h - 1)]);
                    const Mat cj = comm(l, *f_h[static_cast<std::size_t>(j - 1)]);
                    fbar += ch * s.rho_bar * cj.adjoint();
                }
                out.fbar[static_cast<std::size_t>(pair_idx(h, j))] = fbar;
            }
        }
        out.b = -out.fbar[static_cast<std::size_t>(pair_idx(2, 1))].trace() / (2.0 * c);
        ws.b[static_cast<std::size_t>(k)] = out.b;
        ws.t1[static_cast<std::size_t>(k)] = s.t1;
        ws.t2[static_cast<std::size_t>(k)] = s.t2;
        ws.fbar11[static_cast<std::size_t>(k)] =
            out.fbar[static_cast<std::size_t>(pair_idx(1, 1))].trace().real();
        ws.fbar22[static_cast<std::size_t>(k)] =
            out.fbar[static_cast<std::size_t>(pair_idx(2, 2))].trace().real();

        for (int h = 1; h <= 2; ++h) {
            for (int j = 1; j <= 2; ++j) {
                const int idx = pair_idx(h, j);
                const Cplx shift(0.0, 2.0 * c * delta_hj(h, j));
                out.kbar[static_cast<std::size_t>(idx)] = solve_shifted(
                    s.super, shift, projected(out.fbar[static_cast<std::size_t>(idx)], s.rho_bar),
                    opts.first_order.solve);
            }
        }
    }

    // Σ_{k,k'} tr[F_h ρ̄^(k,k') F_h†]: diagonal terms use the full product,
    // off-diagonal ones factorize through tr(F_h ρ̄).
    for (int k = 0; k < kcount; ++k) {
        const auto& s = fo.sub[static_cast<std::size_t>(k)];
        ws.e1 += (s.x1 * s.f1.adjoint()).trace().real();
        ws.e2 += (s.x2 * s.f2.adjoint()).trace().real();
        for (int kp = 0; kp < kcount; ++kp) {
            if (kp == k) continue;
            ws.e1 += (ws.t1[static_cast<std::size_t>(k)] * std::conj(ws.t1[static_cast<std::size_t>(kp)])).real();
            ws.e2 += (ws.t2[static_cast<std::size_t>(k)] * std::conj(ws.t2[static_cast<std::size_t>(kp)])).real();
        }
    }

    // Cross coefficients of the ρ̄_A ⊗ (·) tail (independent of τ̄).
    data.qx1 = 0.0;
    data.qx2 = 0.0;
    for (const auto& s : data.sub) {
        data.qx1 += I_UNIT * std::conj(s.b);
        data.qx2 += -I_UNIT * s.b;
    }

    // τ̄ search: the Choi kernel of K₂^Q is affine in τ̄ with a PSD slope, so
    // doubling from 1 terminates as soon as complete positivity is reached.
    const int dim_b = model.dim_b();
    std::vector<Mat> rho_bars;
    rho_bars.reserve(static_cast<std::size_t>(kcount));
    for (const auto& s : fo.sub) rho_bars.push_back(s.rho_bar);
    const Mat rho_bar_a = kron_all(rho_bars);

    auto k2q_eval = [&](const Mat& rhos, double q1, double q2) {
        Mat out = Mat::Zero(model.total_dim(), model.total_dim());
        for (int k = 0; k < kcount; ++k) {
            for (int h = 1; h <= 2; ++h) {
                for (int j = 1; j <= 2; ++j) {
                    std::vector<Mat> factors = rho_bars;
                    factors[static_cast<std::size_t>(k)] =
                        data.sub[static_cast<std::size_t>(k)].kbar[static_cast<std::size_t>(pair_idx(h, j))];
                    out += kron(kron_all(factors),
                                b_h[static_cast<std::size_t>(h - 1)] * rhos *
                                    b_h[static_cast<std::size_t>(j - 1)].adjoint());
                }
            }
        }
        Mat tail = q1 * (bdag * rhos * b_op) + q2 * (b_op * rhos * bdag);
        tail += data.qx1 * (bdag * rhos * bdag) + data.qx2 * (b_op * rhos * b_op);
        out += kron(rho_bar_a, tail);
        return out;
    };

    double tau = 1.0;
    double min_eig = 0.0;
    bool found = false;
    while (tau <= opts.tau_max) {
        const double q1 = ws.q1(tau), q2 = ws.q2(tau);
        const Mat choi = choi_matrix([&](const Mat& r) { return k2q_eval(r, q1, q2); }, dim_b);
        Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(choi));
        min_eig = es.eigenvalues().minCoeff();
        if (min_eig >= -opts.tau_psd_tol) { found = true; break; }
        tau *= 2.0;
    }
    if (!found)
        throw TauSearchFailed("no τ̄ <= " + std::to_string(opts.tau_max) +
                              " renders the quadratic Kraus kernel PSD (min Choi eigenvalue " +
                              std::to_string(min_eig) + ")");
    data.tau_bar = tau;
    data.k2q_min_choi_eig = min_eig;
    data.f1 = ws.f1(tau);
    data.f2 = ws.f2(tau);
    data.q1 = ws.q1(tau);
    data.q2 = ws.q2(tau);

    // U solves on every ordered pair (k, k'), diagonal pairs on H_A^(k) alone.
    data.pairs.resize(static_cast<std::size_t>(kcount * kcount));
    for (int k = 0; k < kcount; ++k) {
        const auto& sk = fo.sub[static_cast<std::size_t>(k)];
        const Mat a_k = model.fast[static_cast<std::size_t>(k)].coupling;
        const std::array<Mat, 2> adag_j = {a_k.adjoint(), a_k};  // (A_j)† for j = 1, 2
        for (int kp = 0; kp < kcount; ++kp) {
            const auto& skp = fo.sub[static_cast<std::size_t>(kp)];
            auto& pair = data.pairs[static_cast<std::size_t>(k * kcount + kp)];
            pair.k = k;
            pair.kp = kp;

            Mat super_pair, rho_pair;
            if (k == kp) {
                super_pair = sk.super;
                rho_pair = sk.rho_bar;
            } else {
                super_pair = to_superoperator(pair_generator(
                    model.fast[static_cast<std::size_t>(k)].gen,
                    model.fast[static_cast<std::size_t>(kp)].gen));
                rho_pair = kron(sk.rho_bar, skp.rho_bar);
            }
            const std::array<const Mat*, 2> f_h = {&skp.f1, &skp.f2};

            for (int h = 1; h <= 2; ++h) {
                for (int j = 1; j <= 2; ++j) {
                    const int idx = pair_idx(h, j);
                    Mat g;  // A_j^(k)† F_h^(k') ρ̄^(k,k')
                    if (k == kp) {
                        g = adag_j[static_cast<std::size_t>(j - 1)] *
                            (*f_h[static_cast<std::size_t>(h - 1)]) * sk.rho_bar;
                    } else {
                        g = kron(adag_j[static_cast<std::size_t>(j - 1)] * sk.rho_bar,
                                 (*f_h[static_cast<std::size_t>(h - 1)]) * skp.rho_bar);
                    }

                    Mat x;
                    if (h == j) {
                        // L(X) = S(G) on the traceless subspace, trace set by the
                        // cancellation conditions of the assembled map.
                        x = solve_shifted(super_pair, Cplx(0.0, 0.0), -projected(g, rho_pair),
                                          opts.first_order.solve);
                        Cplx prescribed;
                        if (h == 1) {
                            Cplx cross = k == kp
                                ? (sk.x1 * sk.f1.adjoint()).trace()
                                : ws.t1[static_cast<std::size_t>(k)] * std::conj(ws.t1[static_cast<std::size_t>(kp)]);
                            prescribed = -cross;
                            if (k == kp)
                                prescribed -= tau * ws.fbar11[static_cast<std::size_t>(k)] + ws.pi_half;
                        } else {
                            Cplx cross = k == kp
                                ? (sk.x2 * sk.f2.adjoint()).trace()
                                : ws.t2[static_cast<std::size_t>(k)] * std::conj(ws.t2[static_cast<std::size_t>(kp)]);
                            prescribed = -cross;
                            if (k == kp)
                                prescribed -= tau * ws.fbar22[static_cast<std::size_t>(k)] +
                                              ws.pi_half * std::norm(data.sub[static_cast<std::size_t>(k)].b);
                        }
                        x += prescribed * rho_pair;
                    } else {
                        // (L + 2ic δ_hj)(X) = G; the trace condition holds automatically.
                        const Cplx shift(0.0, 2.0 * c * delta_hj(h, j));
                        x = solve_shifted(super_pair, shift, -g, opts.first_order.solve);
                    }
                    pair.x[static_cast<std::size_t>(idx)] = x;
                    pair.u[static_cast<std::size_t>(idx)] =
                        extract_on_support(x, rho_pair, opts.first_order.rank_tol,
                                           opts.first_order.residual_rel, nullptr);
                }
            }
        }
    }

    // N = Σ_{k,k'} Σ_{h,j} U_{Bj†Bh}^{(k,k')} ⊗ B_j† B_h on the full space.
    const HilbertDims dims = model.dims();
    const int slot_b = kcount;
    data.n_full = Mat::Zero(model.total_dim(), model.total_dim());
    for (int k = 0; k < kcount; ++k) {
        for (int kp = 0; kp < kcount; ++kp) {
            const auto& pair = data.pairs[static_cast<std::size_t>(k * kcount + kp)];
            for (int h = 1; h <= 2; ++h) {
                for (int j = 1; j <= 2; ++j) {
                    const Mat& u = pair.u[static_cast<std::size_t>(pair_idx(h, j))];
                    const Mat u_emb = k == kp ? embed(u, dims, {k}) : embed(u, dims, {k, kp});
                    const Mat bb = b_h[static_cast<std::size_t>(j - 1)].adjoint() *
                                   b_h[static_cast<std::size_t>(h - 1)];
                    data.n_full += u_emb * embed(bb, dims, {slot_b});
                }
            }
        }
    }

    return data;
}

SecondOrderData solve_second_order(const CompositeModel& model, const FirstOrderData& fo,
                                   bool build_kraus, const SecondOrderOptions& opts) {
    if (!model.gen_b.is_zero(1e-14 * std::max(1.0, model.gen_b.hamiltonian.norm())))
        throw PreconditionViolated("second-order reduction requires a vanishing slow generator (L_B = 0)");
    if (fo.gauge != Gauge::CancelHs1)
        throw PreconditionViolated("second-order reduction requires the Hs1-cancelling gauge");
    if (fo.c_b_dagger == 0.0)
        throw PreconditionViolated("second-order reduction requires c_B† != 0");

    std::vector<Cplx> z0, z1, z2;
    for (const auto& s : fo.sub) {
        z0.push_back(s.z0);
        z1.push_back(s.z1);
        z2.push_back(s.z2);
    }
    SecondOrderData out = assemble_second_order_generator(z0, z1, z2, fo.c_b_dagger,
                                                          model.coupling_b, opts.negative_rate_tol);
    if (build_kraus) out.k2 = build_K2(model, fo, opts);
    return out;
}

// ----------------------------- assembled result -----------------------------

Mat ReductionResult::k0(const Mat& rhos) const { return kron(rho_bar_a, rhos); }

Mat ReductionResult::k1(const Mat& rhos) const {
    if (order < 1) throw OrderUnavailable("reduction was assembled at order 0");
    const Mat x0 = k0(rhos);
    return -I_UNIT * (m_full * x0) + I_UNIT * (x0 * m_full.adjoint());
}

Mat ReductionResult::k2l(const Mat& rhos) const {
    if (!so || !so->k2) throw OrderUnavailable("second-order Kraus data unavailable");
    const Mat x0 = k0(rhos);
    return so->k2->n_full * x0 + x0 * so->k2->n_full.adjoint();
}

Mat ReductionResult::k2e(const Mat& rhos) const {
    if (order < 1) throw OrderUnavailable("reduction was assembled at order 0");
    const Mat x0 = k0(rhos);
    return m_full * x0 * m_full.adjoint();
}

Mat ReductionResult::k2q(const Mat& rhos) const {
    if (!so || !so->k2) throw OrderUnavailable("second-order Kraus data unavailable");
    const auto& k2 = *so->k2;
    const int kcount = model.subsystems();
    const Mat& b_op = model.coupling_b;
    const Mat bdag = b_op.adjoint();
    const std::array<Mat, 2> b_h = {bdag, b_op};

    std::vector<Mat> rho_bars;
    rho_bars.reserve(static_cast<std::size_t>(kcount));
    for (const auto& s : fo.sub) rho_bars.push_back(s.rho_bar);

    Mat out = Mat::Zero(model.total_dim(), model.total_dim());
    for (int k = 0; k < kcount; ++k) {
        for (int h = 1; h <= 2; ++h) {
            for (int j = 1; j <= 2; ++j) {
                std::vector<Mat> factors = rho_bars;
                factors[static_cast<std::size_t>(k)] =
                    k2.sub[static_cast<std::size_t>(k)].kbar[static_cast<std::size_t>(pair_idx(h, j))];
                out += kron(kron_all(factors),
                            b_h[static_cast<std::size_t>(h - 1)] * rhos *
                                b_h[static_cast<std::size_t>(j - 1)].adjoint());
            }
        }
    }
    Mat tail = k2.q1 * (bdag * rhos * b_op) + k2.q2 * (b_op * rhos * bdag);
    tail += k2.qx1 * (bdag * rhos * bdag) + k2.qx2 * (b_op * rhos * b_op);
    out += kron(rho_bar_a, tail);
    return out;
}

Mat ReductionResult::k2(const Mat& rhos) const { return k2l(rhos) + k2e(rhos) + k2q(rhos); }

Mat ReductionResult::kraus(const Mat& rhos, double eps) const {
    const Mat x0 = k0(rhos);
    if (order == 0) return x0;
    const Mat id = Mat::Identity(x0.rows(), x0.cols());
    Mat t = id - I_UNIT * eps * m_full;
    if (order >= 2) {
        t += eps * eps * so->k2->n_full;
        return t * x0 * t.adjoint() + eps * eps * k2q(rhos);
    }
    return t * x0 * t.adjoint();
}

Lindbladian ReductionResult::reduced_generator(double eps) const {
    Lindbladian gen = l_s0;
    if (order >= 1) {
        gen.hamiltonian += eps * l_s1.hamiltonian;
        for (const auto& j : l_s1.jumps) gen.jumps.push_back({j.op, eps * j.rate});
    }
    if (order >= 2) {
        gen.hamiltonian += eps * eps * l_s2.hamiltonian;
        for (const auto& j : l_s2.jumps) gen.jumps.push_back({j.op, eps * eps * j.rate});
    }
    return gen;
}

ReductionResult reduce_model(const CompositeModel& model, int order, Gauge gauge,
                             const ReduceOptions& opts) {
    if (order < 0 || order > 2) throw OrderUnavailable("order must be 0, 1 or 2");
    model.validate();

    ReductionResult out;
    out.model = model;
    out.order = order;
    out.gauge = gauge;
    out.l_s0 = Lindbladian{model.h_tilde_b, {}};
    out.l_s1 = Lindbladian::zero(model.dim_b());
    out.l_s2 = Lindbladian::zero(model.dim_b());

    if (order == 0) {
        // Steady states only.
        out.fo.gauge = gauge;
        out.fo.c_b_dagger = check_assumption_cb(model.h_tilde_b, model.coupling_b);
        for (const auto& f : model.fast) {
            SubsystemFirstOrder s;
            auto steady = steady_state(f.gen);
            s.rho_bar = steady.rho;
            s.report = steady.report;
            out.fo.sub.push_back(std::move(s));
        }
        out.fo.h_s1 = Mat::Zero(model.dim_b(), model.dim_b());
        out.fo.l_s1 = Lindbladian::zero(model.dim_b());
    } else {
        out.fo = solve_first_order(model, gauge, opts.first_order);
        out.l_s1 = out.fo.l_s1;
    }

    std::vector<Mat> rho_bars;
    for (const auto& s : out.fo.sub) rho_bars.push_back(s.rho_bar);
    out.rho_bar_a = kron_all(rho_bars);

    if (order >= 1) {
        const HilbertDims dims = model.dims();
        const int slot_b = model.subsystems();
        const Mat bdag = model.coupling_b.adjoint();
        out.m_full = Mat::Zero(model.total_dim(), model.total_dim());
        for (int k = 0; k < model.subsystems(); ++k) {
            const auto& s = out.fo.sub[static_cast<std::size_t>(k)];
            out.m_full += embed(s.f1, dims, {k}) * embed(bdag, dims, {slot_b});
            out.m_full += embed(s.f2, dims, {k}) * embed(model.coupling_b, dims, {slot_b});
        }
    }

    if (order >= 2) {
        out.so = solve_second_order(model, out.fo, /*build_kraus=*/true, opts.second_order);
        out.l_s2 = out.so->l_s2;
    }
    return out;
}

// ------------------------------- map utilities ------------------------------

Mat choi_matrix(const MapEvaluator& map, int dim_in) {
    const Mat probe = map(basis_op(dim_in, 0, 0));
    const int dim_out = static_cast<int>(probe.rows());
    Mat choi = Mat::Zero(dim_out * dim_in, dim_out * dim_in);
    for (int i = 0; i < dim_in; ++i) {
        for (int j = 0; j < dim_in; ++j) {
            const Mat image = (i == 0 && j == 0) ? probe : map(basis_op(dim_in, i, j));
            choi += kron(image, basis_op(dim_in, i, j));
        }
    }
    return choi;
}

Mat map_matrix(const MapEvaluator& map, int dim_in, int dim_out) {
    Mat m = Mat::Zero(static_cast<Eigen::Index>(dim_out) * dim_out,
                      static_cast<Eigen::Index>(dim_in) * dim_in);
    int col = 0;
    for (int j = 0; j < dim_in; ++j)
        for (int i = 0; i < dim_in; ++i)
            m.col(col++) = vectorize(map(basis_op(dim_in, i, j)));
    return m;
}

} // namespace adel

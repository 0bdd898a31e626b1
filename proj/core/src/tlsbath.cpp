#include "adel/tlsbath.hpp"

#include <cmath>
#include <string>

#include "adel/errors.hpp"

namespace adel {

std::vector<double> TlsBathParams::uniform_detunings(double lo, double hi, int count) {
    if (count < 1) throw Error("uniform_detunings: count must be >= 1");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(count));
    if (count == 1) {
        out.push_back(0.5 * (lo + hi));
        return out;
    }
    const double step = (hi - lo) / (count - 1);
    for (int i = 0; i < count; ++i) out.push_back(lo + i * step);
    return out;
}

namespace {

CompositeModel build_scaled(const TlsBathParams& p, double unit) {
    if (p.delta_c == 0.0)
        throw ZeroDetuning("Δ_c = 0: the displaced frame and the ladder property of H̃_B both degenerate");
    if (p.g <= 0.0 || p.gamma_minus <= 0.0) throw Error("g and Γ₋ must be positive");
    if (p.fock_dim < 2) throw DimensionMismatch("fock_dim must be >= 2");
    if (p.v_tilde < 0.0) throw Error("ṽ must be >= 0");
    if (p.delta_q.empty()) throw Error("at least one TLS detuning required");

    const double drive = p.g * p.v_tilde / p.delta_c;  // effective σ_x drive on each TLS
    CompositeModel model;
    for (double dq : p.delta_q) {
        FastSubsystem sub;
        sub.gen.hamiltonian = ((dq / 2.0) * sigma_z() + drive * sigma_x()) / unit;
        sub.gen.jumps.push_back({sigma_minus(), p.gamma_minus / unit});
        sub.coupling = I_UNIT * sigma_minus();
        model.fast.push_back(std::move(sub));
    }
    model.coupling_b = annihilation(p.fock_dim);
    model.h_tilde_b = (p.delta_c / unit) * number_operator(p.fock_dim);
    model.gen_b = Lindbladian::zero(p.fock_dim);
    model.epsilon = p.g / unit;
    return model;
}

} // namespace

CompositeModel build_full_model(const TlsBathParams& p) { return build_scaled(p, 1.0); }

CompositeModel build_normalized_model(const TlsBathParams& p) {
    return build_scaled(p, p.gamma_minus);
}

std::pair<Cplx, Cplx> closed_form_z(const TlsBathParams& p, int k, W2Variant variant) {
    if (k < 0 || k >= static_cast<int>(p.delta_q.size()))
        throw DimensionMismatch("closed_form_z: subsystem index out of range");
    if (p.delta_c == 0.0) throw ZeroDetuning("closed_form_z: Δ_c = 0");

    const double gm = p.gamma_minus;
    const double dc = p.delta_c;
    const double dq = p.delta_q[static_cast<std::size_t>(k)];
    const double gv = p.g * p.v_tilde;  // the drive appears only as this product
    const double gv2 = gv * gv;
    const double gv4 = gv2 * gv2;
    const Cplx i = I_UNIT;
    const double gamma2 = variant == W2Variant::GammaMinusSquared ? gm * gm : gm;

    const Cplx w1 = -4.0 * gv2 *
                    (8.0 * i * gv2 +
                     (gm + i * dc) * dc * (std::pow(Cplx(gm, 2.0 * dc), 2) + 4.0 * dq * dq));

    const Cplx w2 = 32.0 * i * gv4 +
                    2.0 * i * (gm - i * dc) * std::pow(dc, 4) * (gamma2 + 4.0 * dq * dq) *
                        (gm - 2.0 * i * (dc + dq)) -
                    4.0 * gv2 * dc *
                        (std::pow(gm, 3) - 5.0 * i * gm * gm * dc +
                         4.0 * i * dc * (dc * dc + 2.0 * dc * dq - dq * dq) +
                         4.0 * gm * (-dc * dc + dq * dq));

    const Cplx z_a = 8.0 * gv2 + dc * dc * (gm * gm + 4.0 * dq * dq);
    const Cplx z_b = 8.0 * gv2 * (i * gm + 2.0 * dc) +
                     dc * dc * (i * gm + dc) * (std::pow(Cplx(gm, -2.0 * dc), 2) + 4.0 * dq * dq);
    const Cplx z = z_a * z_b;

    const double z_scale = (std::abs(z_a) + 1.0) * (std::abs(z_b) + 1.0);
    if (std::abs(z) <= 1e-14 * z_scale)
        throw SingularDenominator("closed_form_z: Z vanishes at these parameters");

    return {w1 / z, w2 / z};
}

double photon_number(double v_tilde, double delta_c) {
    if (delta_c == 0.0) throw ZeroDetuning("photon_number: Δ_c = 0");
    const double r = v_tilde / delta_c;
    return r * r;
}

ApplicationCoefficients application_coefficients(const TlsBathParams& p, W2Variant variant) {
    ApplicationCoefficients out;
    const double g2 = p.g * p.g;
    for (int k = 0; k < static_cast<int>(p.delta_q.size()); ++k) {
        const auto [z1, z2] = closed_form_z(p, k, variant);
        const double shift_k = (z1 + z2).imag();
        const double ga_k = 2.0 * z2.real();
        const double gad_k = 2.0 * z1.real();
        out.shift_k.push_back(shift_k);
        out.gamma_a_k.push_back(ga_k);
        out.gamma_adag_k.push_back(gad_k);
        out.shift += g2 * shift_k;
        out.gamma_a += g2 * ga_k;
        out.gamma_adag += g2 * gad_k;
    }
    return out;
}

std::vector<SweepRow> sweep(const TlsBathParams& base, const SweepGrid& grid, W2Variant variant) {
    if (grid.delta_c_count < 1 || grid.v_tilde_count < 1)
        throw Error("sweep: grid counts must be >= 1");
    const auto dcs = TlsBathParams::uniform_detunings(grid.delta_c_min, grid.delta_c_max,
                                                      grid.delta_c_count);
    const auto vts = TlsBathParams::uniform_detunings(grid.v_tilde_min, grid.v_tilde_max,
                                                      grid.v_tilde_count);
    std::vector<SweepRow> rows;
    rows.reserve(dcs.size() * vts.size());
    for (double dc : dcs) {
        for (double vt : vts) {
            TlsBathParams p = base;
            p.delta_c = dc;
            p.v_tilde = vt;
            const auto coeff = application_coefficients(p, variant);
            SweepRow row;
            row.delta_c = dc;
            row.v_tilde = vt;
            row.n_photons = photon_number(vt, dc);
            row.shift = coeff.shift;
            row.gamma_a = coeff.gamma_a;
            row.gamma_adag = coeff.gamma_adag;
            rows.push_back(row);
        }
    }
    return rows;
}

} // namespace adel

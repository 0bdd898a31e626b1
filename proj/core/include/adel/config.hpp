// Line-oriented configuration files: `key = value` pairs under bracketed
// section headers, hand-editable, no external schema machinery.
//
//   # comment
//   [tlsbath]
//   g = 30e3
//   delta_q = [-100e6, 100e6]
//   [reduce]
//   order = 2
//   gauge = cancel-hs1
//
// Matrices are nested bracketed complex lists: [[1+0i, 0], [0, -1]]; lists of
// matrices add one more bracket level. Unknown sections or keys are rejected.
// The full grammar with annotated examples lives in docs/config_format.md.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "adel/reduce.hpp"
#include "adel/tlsbath.hpp"

namespace adel {

struct ToleranceConfig {
    double residual_order0 = 1e-13;
    double residual_order1 = 1e-10;
    double residual_order2 = 1e-9;
    double cptp_exponent_order1 = 1.8;
    double cptp_exponent_order2 = 2.7;
    double cptp_min_choi = -1e-9;
    double noise_floor = 1e-12;
};

struct VerifySection {
    std::vector<int> orders;        // empty -> all orders up to the reduction order
    std::vector<double> epsilons = {1e-1, 3e-2, 1e-2, 3e-3};
};

struct SimulateSection {
    double horizon = 0.0;           // 0 -> auto from the slow relaxation rate
    int steps = 50;
    std::vector<double> epsilons = {1e-1, 3e-2, 1e-2, 3e-3};
    std::optional<Mat> rho_s0;      // default: ground-state projector
    bool off_manifold = false;
    int dimension_cap = 64;
};

struct RunConfig {
    std::optional<CompositeModel> generic_model;
    std::optional<TlsBathParams> tls;
    bool tls_normalized = true;     // build the Γ₋-scaled model for verify/simulate
    int order = 1;
    Gauge gauge = Gauge::CancelHs1;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    VerifySection verify;
    SimulateSection simulate;
    std::optional<SweepGrid> sweep_grid;
    ToleranceConfig tol;

    // The model the pipeline operates on (generic, or built from [tlsbath]).
    CompositeModel build_model() const;
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

// Scalar helpers shared with the report writers; parse the full string or throw.
Cplx parse_complex(const std::string& token);

} // namespace adel

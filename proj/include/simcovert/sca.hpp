// SPDX-License-Identifier: Apache-2.0
//
// simcovert: SIM-assisted near-field covert downlink simulation and optimization
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
#pragma once

// Successive convex approximation of the beamfocusing subproblem and of
// the per-layer phase subproblem.
//
// Both programs are built in noise-normalized units: every received
// amplitude h^H G v is divided by sigma, so the noise power is 1 and the
// SINR / warden ratios carry no physical scale. The beamfocusing program
// additionally optimizes x = V / sqrt(P_max), which makes the power
// constraint ||vec(x)|| <= 1.

#include <string>
#include <vector>

#include "simcovert/config.hpp"
#include "simcovert/conic.hpp"
#include "simcovert/link_metrics.hpp"
#include "simcovert/wavefield.hpp"

namespace simcovert
{

// Largest tau with tau - ln(tau) - 1 <= 2 eps^2 / J; 1 when eps = 0.
double tau_bound(double eps, int observations);

// First-order minorant of |b|^2 / d around (a, d0):
//   -(|a| / d0)^2 d + 2 Re[a^* b] / d0.
template <typename Real>
Real taylor_minorant_value(const Complex<Real> &a, Real d0, const Complex<Real> &b, Real d)
{
    if (!(d0 > Real(0)))
        throw std::domain_error("taylor_minorant: expansion denominator must be positive");
    const Real r = std::abs(a) / d0;
    return -r * r * d + 2 * (a.real() * b.real() + a.imag() * b.imag()) / d0;
}

conic::LinExpr taylor_minorant(const Complex<double> &a, double d0, const conic::ComplexExpr &numerator,
                               const conic::LinExpr &denominator);

// sum_n w_n z_n over a complex variable block z = x[re..] + j x[im..].
conic::ComplexExpr linear_form(const CVector<double> &w, int re, int im);

struct SurrogateState
{
    CMatrix<double> beamformers;       // V^(m), M x K
    CVector<double> phases;            // phi_l^(m); empty for beamfocusing
    CMatrix<double> user_amplitude;    // (k, i) -> h_k^H G v_i / sigma
    CMatrix<double> warden_amplitude;  // (u, i) -> h_u^H G v_i / sigma
    std::vector<double> interference;  // 1 + sum_{i != k} |.|^2
    std::vector<double> sinr;          // |(k, k)|^2 / interference
    std::vector<double> warden_ratio;  // 1 + sum_i |(u, i)|^2
};

// Auxiliaries taken at their actual values for (G, V).
SurrogateState surrogate_state(const ChannelSet<double> &ch, const CMatrix<double> &g, const CMatrix<double> &v,
                               const SystemConfig &cfg);
// Same, with the expansion phases of `layer` recorded.
SurrogateState surrogate_state(const ChannelSet<double> &ch, const SimStack<double> &stack, const PhaseState<double> &phases,
                               int layer, const CMatrix<double> &v, const SystemConfig &cfg);

struct LoweringOptions
{
    // QoS rows become rho_k + s >= gamma_min with s >= 0 charged in the objective.
    bool soft_qos = false;
    double slack_weight = 1e3;
};

struct LoweredProgram
{
    conic::ConicProgram program;
    int re = 0;        // first real part of the complex decision block
    int im = 0;        // first imaginary part
    int count = 0;     // complex entries in the block
    int sinr = 0;      // rho_k / upsilon_k
    int interference = 0;
    int log_rate = 0;  // t_k <= ln(1 + rho_k)
    int warden = 0;    // tau_u / zeta_u
    int slack = -1;
    double scale = 1.0;

    CVector<double> decision(const Eigen::VectorXd &x) const;
};

LoweredProgram lower_beamfocusing(const SurrogateState &state, const ChannelSet<double> &ch, const CMatrix<double> &g,
                                  const SystemConfig &cfg, const LoweringOptions &opts = {});

LoweredProgram lower_phase_layer(const SurrogateState &state, const ChannelSet<double> &ch, const SimStack<double> &stack,
                                 const PhaseState<double> &phases, int layer, const CMatrix<double> &v,
                                 const SystemConfig &cfg, const LoweringOptions &opts = {});

// phi_n / |phi_n|, with 0 mapped to 1.
CVector<double> project_unit_modulus(const CVector<double> &phi);

// Comparison key of a candidate: sum rate plus its worst relative violation.
struct Merit
{
    double sum_rate = 0.0;
    double violation = 0.0;
    bool feasible = false;
};

Merit evaluate_merit(const LinkReport &report, const SystemConfig &cfg);

// Feasible candidates must not lower the rate; infeasible ones must shrink the
// violation or become feasible.
bool not_worse(const Merit &candidate, const Merit &current);

struct SubproblemStats
{
    int solves = 0;
    int softened = 0;
    int rejected = 0;
    bool failed = false;
    std::string diagnostics;

    SubproblemStats &operator+=(const SubproblemStats &o);
};

struct BeamfocusingResult
{
    CMatrix<double> v;
    Merit merit;
    int iterations = 0;
    SubproblemStats stats;
};

// Beamfocusing iterated from V0 until the rate gain drops below sca_tol (relative) or
// max_sca_iters; every iterate is guarded by not_worse.
BeamfocusingResult solve_beamfocusing(const ChannelSet<double> &ch, const CMatrix<double> &g, const CMatrix<double> &v0,
                                      const SystemConfig &cfg, const conic::SolverOptions &solver = {});

struct PhaseLayerResult
{
    PhaseState<double> phases;
    CMatrix<double> v; // beamformers paired with `phases`
    Merit merit;
    bool accepted = false;
    int iterations = 0;
    SubproblemStats stats;
};

// Phase subproblem for one layer. The relaxed iterates are projected after every solve. A
// projected candidate that is worse than the current point with the current
// beamformers gets one beamfocusing repair pass; the layer is replaced only by a
// (phases, V) pair that is not worse than the current point.
PhaseLayerResult solve_phase_layer(const ChannelSet<double> &ch, const SimStack<double> &stack,
                                   const PhaseState<double> &phases, int layer, const CMatrix<double> &v,
                                   const SystemConfig &cfg, const conic::SolverOptions &solver = {});

} // namespace simcovert

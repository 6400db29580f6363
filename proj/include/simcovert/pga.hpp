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

// Penalty objective, its analytic phase gradient and the Armijo phase update
// of the projected-gradient design.
//
// F = R - mu1 * sum_k min(gamma_k - gamma_min, 0)^2
//       - mu2 * sum_u max(g_u - 2 eps^2 / J, 0)^2,
// g_u = z_u - ln z_u - 1, z_u = 1 + sum_i |h_u^H G v_i|^2 / sigma^2.

#include <cmath>
#include <numbers>
#include <type_traits>
#include <vector>

#include "simcovert/config.hpp"
#include "simcovert/link_metrics.hpp"
#include "simcovert/wavefield.hpp"

namespace simcovert
{

struct PenaltyConfig
{
    double mu1 = 10.0;
    double mu2 = 100.0;
    double alpha0 = 1.0;
    double shrink = 0.5;
    int max_backtracks = 30;

    static PenaltyConfig from_config(const SystemConfig &cfg)
    {
        PenaltyConfig p{cfg.penalty_mu1, cfg.penalty_mu2, cfg.armijo_alpha0, cfg.armijo_shrink, cfg.max_armijo_backtracks};
        p.validate();
        return p;
    }

    void validate() const
    {
        if (!(mu1 > 0 && mu2 > 0 && alpha0 > 0 && shrink > 0 && shrink < 1 && max_backtracks >= 1))
            throw std::invalid_argument("PenaltyConfig: mu1, mu2, alpha0 > 0, shrink in (0,1), max_backtracks >= 1");
    }
};

template <typename Real>
struct PenaltyTerms
{
    Real rate = 0;   // R in bps/Hz
    Real qos = 0;    // sum_k min(gamma_k - gamma_min, 0)^2
    Real covert = 0; // sum_u max(g_u - 2 eps^2 / J, 0)^2
    Real value = 0;  // F
};

template <typename Real>
Real covert_measure(Real z)
{
    return (z - 1) - std::log(z);
}

template <typename Real>
PenaltyTerms<Real> penalty_terms(const CMatrix<Real> &user_amp, const CMatrix<Real> &warden_amp, Real noise,
                                 const SystemConfig &cfg)
{
    const Real gamma_min = static_cast<Real>(cfg.gamma_min());
    const Real budget = static_cast<Real>(cfg.covert_budget()) / cfg.observations;
    PenaltyTerms<Real> t;
    for (Eigen::Index k = 0; k < user_amp.rows(); ++k)
    {
        const Real gamma = sinr_from_gains(user_amp, noise, static_cast<int>(k));
        t.rate += std::log2(Real(1) + gamma);
        const Real short_by = std::min(gamma - gamma_min, Real(0));
        t.qos += short_by * short_by;
    }
    for (Eigen::Index u = 0; u < warden_amp.rows(); ++u)
    {
        const Real over = std::max(covert_measure(Real(1) + warden_amp.row(u).squaredNorm() / noise) - budget, Real(0));
        t.covert += over * over;
    }
    t.value = t.rate - static_cast<Real>(cfg.penalty_mu1) * t.qos - static_cast<Real>(cfg.penalty_mu2) * t.covert;
    return t;
}

template <typename Real>
PenaltyTerms<Real> penalty_terms(const ChannelSet<Real> &ch, const SimStack<Real> &stack, const PhaseState<Real> &phases,
                                 const CMatrix<Real> &v, const SystemConfig &cfg)
{
    const CMatrix<Real> g = sim_response(stack, phases);
    return penalty_terms(user_gains(ch, g, v), warden_gains(ch, g, v), static_cast<Real>(cfg.noise_power_w()), cfg);
}

template <typename Real>
Real penalty_objective(const ChannelSet<Real> &ch, const SimStack<Real> &stack, const PhaseState<Real> &phases,
                       const CMatrix<Real> &v, const SystemConfig &cfg)
{
    return penalty_terms(ch, stack, phases, v, cfg).value;
}

// Per-layer products needed by the partials of one layer.
template <typename Real>
struct LayerTerms
{
    CMatrix<Real> user_row;   // K x N, h_k^H G_L
    CMatrix<Real> warden_row; // U x N, h_u^H G_L
    CMatrix<Real> right;      // N x K, G_R V
    CVector<Real> phasor;     // phi_l
};

template <typename Real>
LayerTerms<Real> layer_terms(const ChannelSet<Real> &ch, const SimStack<Real> &stack, const PhaseState<Real> &phases,
                             const CMatrix<Real> &v, int layer)
{
    const SplitResponse<Real> split = split_response(stack, phases, layer);
    LayerTerms<Real> t;
    t.user_row.resize(ch.num_users(), stack.num_atoms());
    for (int k = 0; k < ch.num_users(); ++k)
        t.user_row.row(k) = ch.users[k].adjoint() * split.left;
    t.warden_row.resize(ch.num_wardens(), stack.num_atoms());
    for (int u = 0; u < ch.num_wardens(); ++u)
        t.warden_row.row(u) = ch.wardens[u].adjoint() * split.left;
    t.right = split.right * v;
    t.phasor = phases.phasor(layer);
    return t;
}

// psi = Im[e^{j theta_n} (h^H G v_i)^* [h^H G_L]_n [G_R v_i]_n]; the E_nn
// sandwich reduces to one row entry times one column entry.
template <typename Real>
Real psi(const Complex<Real> &amp, const Complex<Real> &phasor, const Complex<Real> &row, const Complex<Real> &col)
{
    return std::imag(phasor * std::conj(amp) * row * col);
}

// d gamma_k / d theta_n = 2 rho_k (gamma_k sum_{i != k} psi_{k,i} - psi_{k,k}),
// rho_k = 1 / (sum_{i != k} |h_k^H G v_i|^2 + sigma^2).
template <typename Real>
Real sinr_partial(const CMatrix<Real> &user_amp, Real noise, const LayerTerms<Real> &t, int k, int n)
{
    const Real denom = interference_plus_noise(user_amp, noise, k);
    const Real gamma = std::norm(user_amp(k, k)) / denom;
    Real cross = 0;
    Real own = 0;
    for (Eigen::Index i = 0; i < user_amp.cols(); ++i)
    {
        const Real p = psi(user_amp(k, i), t.phasor(n), t.user_row(k, n), t.right(n, i));
        if (i == k)
            own = p;
        else
            cross += p;
    }
    return 2 / denom * (gamma * cross - own);
}

// d g_u / d theta_n = (-2 / sigma^2)(1 - 1 / z_u) sum_k psi_{u,k}.
template <typename Real>
Real covert_partial(const CMatrix<Real> &warden_amp, Real noise, const LayerTerms<Real> &t, int u, int n)
{
    const Real z = Real(1) + warden_amp.row(u).squaredNorm() / noise;
    Real sum = 0;
    for (Eigen::Index i = 0; i < warden_amp.cols(); ++i)
        sum += psi(warden_amp(u, i), t.phasor(n), t.warden_row(u, n), t.right(n, i));
    return Real(-2) / noise * (Real(1) - Real(1) / z) * sum;
}

template <typename Real>
struct GradientField
{
    std::vector<RVector<Real>> partials; // [layer](atom)
    CMatrix<Real> user_amp;              // (k, i) -> h_k^H G v_i
    CMatrix<Real> warden_amp;            // (u, i) -> h_u^H G v_i

    Real max_abs() const
    {
        Real m = 0;
        for (const auto &p : partials)
            if (p.size() > 0)
                m = std::max(m, p.cwiseAbs().maxCoeff());
        return m;
    }
};

template <typename Real>
GradientField<Real> full_gradient(const ChannelSet<Real> &ch, const SimStack<Real> &stack, const PhaseState<Real> &phases,
                                  const CMatrix<Real> &v, const SystemConfig &cfg)
{
    const CMatrix<Real> g = sim_response(stack, phases);
    const Real noise = static_cast<Real>(cfg.noise_power_w());
    const Real gamma_min = static_cast<Real>(cfg.gamma_min());
    const Real budget = static_cast<Real>(cfg.covert_budget()) / cfg.observations;
    const Real mu1 = static_cast<Real>(cfg.penalty_mu1);
    const Real mu2 = static_cast<Real>(cfg.penalty_mu2);

    GradientField<Real> gf;
    gf.user_amp = user_gains(ch, g, v);
    gf.warden_amp = warden_gains(ch, g, v);

    // Chain-rule weights of d gamma_k and d g_u; indicators switch the
    // penalty parts on only where a constraint is violated.
    std::vector<Real> user_weight(ch.num_users()), warden_weight(ch.num_wardens());
    for (int k = 0; k < ch.num_users(); ++k)
    {
        const Real gamma = sinr_from_gains(gf.user_amp, noise, k);
        Real w = Real(1) / (std::numbers::ln2_v<Real> * (Real(1) + gamma));
        if (gamma < gamma_min)
            w -= 2 * mu1 * (gamma - gamma_min);
        user_weight[k] = w;
    }
    for (int u = 0; u < ch.num_wardens(); ++u)
    {
        const Real gu = covert_measure(Real(1) + gf.warden_amp.row(u).squaredNorm() / noise);
        warden_weight[u] = gu > budget ? -2 * mu2 * (gu - budget) : Real(0);
    }

    for (int l = 0; l < stack.num_layers(); ++l)
    {
        const LayerTerms<Real> t = layer_terms(ch, stack, phases, v, l);
        RVector<Real> d = RVector<Real>::Zero(stack.num_atoms());
        for (int n = 0; n < stack.num_atoms(); ++n)
        {
            for (int k = 0; k < ch.num_users(); ++k)
                d(n) += user_weight[k] * sinr_partial(gf.user_amp, noise, t, k, n);
            for (int u = 0; u < ch.num_wardens(); ++u)
                if (warden_weight[u] != Real(0))
                    d(n) += warden_weight[u] * covert_partial(gf.warden_amp, noise, t, u, n);
        }
        gf.partials.push_back(std::move(d));
    }
    return gf;
}

// Scales every partial by pi / kappa, kappa = max |partial|. A zero field is
// returned unchanged and signals convergence.
template <typename Real>
GradientField<Real> normalize_gradient(GradientField<Real> gf, bool *is_zero = nullptr)
{
    for (const auto &p : gf.partials)
        if (!p.allFinite())
            throw std::domain_error("normalize_gradient: non-finite partials");
    const Real kappa = gf.max_abs();
    if (is_zero)
        *is_zero = kappa == Real(0);
    if (kappa == Real(0))
        return gf;
    for (auto &p : gf.partials)
        p *= kPi<Real> / kappa;
    return gf;
}

template <typename Trial>
struct ArmijoStep
{
    PhaseState<double> phases;
    Trial point{};       // evaluation of the returned phases (unset if unchanged)
    double value = 0.0;  // objective at the returned phases
    double step = 0.0;   // accepted alpha, 0 if no step was taken
    int backtracks = 0;
    bool moved = false;
};

// theta <- wrap(theta + alpha * direction), evaluated through `evaluate`
// (which re-solves the beamformers and returns an object with `.value`).
// alpha shrinks while the objective falls below `current`; the previous
// point is kept when no trial step improves.
template <typename Evaluate>
auto armijo_phase_step(const PhaseState<double> &phases, const GradientField<double> &direction, double current,
                       Evaluate &&evaluate, const PenaltyConfig &pc)
    -> ArmijoStep<std::decay_t<std::invoke_result_t<Evaluate, const PhaseState<double> &>>>
{
    using Trial = std::decay_t<std::invoke_result_t<Evaluate, const PhaseState<double> &>>;
    ArmijoStep<Trial> out;
    out.phases = phases;
    out.value = current;
    if (direction.max_abs() == 0.0)
        return out;

    double alpha = pc.alpha0;
    for (int b = 0;; ++b)
    {
        PhaseState<double> trial = phases.stepped(direction.partials, alpha);
        Trial point = evaluate(trial);
        if (point.value >= current)
        {
            out.phases = std::move(trial);
            out.value = point.value;
            out.point = std::move(point);
            out.step = alpha;
            out.backtracks = b;
            out.moved = true;
            return out;
        }
        if (b == pc.max_backtracks)
        {
            out.backtracks = b;
            return out;
        }
        alpha *= pc.shrink;
    }
}

} // namespace simcovert

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

// SINR, rates, warden KL divergence and the feasibility check of the covert sum-rate problem.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "simcovert/config.hpp"
#include "simcovert/wavefield.hpp"

namespace simcovert
{

// Absolute tolerances on power (W), KL divergence and rate (bps/Hz).
constexpr double kPowerTol = 1e-6;
constexpr double kKlTol = 1e-6;
constexpr double kRateTol = 1e-6;

// (k, i) -> h_k^H G v_i.
template <typename Real>
CMatrix<Real> user_gains(const ChannelSet<Real> &ch, const CMatrix<Real> &g, const CMatrix<Real> &v)
{
    CMatrix<Real> out(ch.num_users(), v.cols());
    for (int k = 0; k < ch.num_users(); ++k)
        out.row(k) = ch.users[k].adjoint() * g * v;
    return out;
}

// (u, i) -> h_u^H G v_i.
template <typename Real>
CMatrix<Real> warden_gains(const ChannelSet<Real> &ch, const CMatrix<Real> &g, const CMatrix<Real> &v)
{
    CMatrix<Real> out(ch.num_wardens(), v.cols());
    for (int u = 0; u < ch.num_wardens(); ++u)
        out.row(u) = ch.wardens[u].adjoint() * g * v;
    return out;
}

template <typename Real>
Real interference_plus_noise(const CMatrix<Real> &gains, Real noise, int k)
{
    Real den = noise;
    for (Eigen::Index i = 0; i < gains.cols(); ++i)
        if (i != k)
            den += std::norm(gains(k, i));
    return den;
}

template <typename Real>
Real sinr_from_gains(const CMatrix<Real> &gains, Real noise, int k)
{
    return std::norm(gains(k, k)) / interference_plus_noise(gains, noise, k);
}

template <typename Real>
Real sinr(const ChannelSet<Real> &ch, const CMatrix<Real> &g, const CMatrix<Real> &v, Real noise, int k)
{
    const CMatrix<Real> gains = ch.users.at(k).adjoint() * g * v;
    Real den = noise;
    for (Eigen::Index i = 0; i < v.cols(); ++i)
        if (i != k)
            den += std::norm(gains(0, i));
    return std::norm(gains(0, k)) / den;
}

template <typename Real>
Real sum_rate(const std::vector<Real> &sinrs)
{
    Real total = 0;
    for (Real s : sinrs)
        total += std::log2(Real(1) + s);
    return total;
}

// nu(x) = x - ln(1 + x), accurate for small x.
template <typename Real>
Real kl_nu(Real x)
{
    return x - std::log1p(x);
}

// x = sum_i |h_u^H G v_i|^2 / sigma_u^2.
template <typename Real>
Real warden_excess(const CMatrix<Real> &wgains, Real noise, int u)
{
    return wgains.row(u).squaredNorm() / noise;
}

template <typename Real>
Real kl_divergence(const ChannelSet<Real> &ch, const CMatrix<Real> &g, const CMatrix<Real> &v, Real noise, int observations,
                   int u)
{
    const Real leak = (ch.wardens.at(u).adjoint() * g * v).squaredNorm();
    return static_cast<Real>(observations) * kl_nu(leak / noise);
}

// Pinsker lower bound on the warden's minimum detection error probability.
inline double dep_floor(double divergence)
{
    if (divergence < 0.0)
        throw std::domain_error("dep_floor: divergence must be non-negative");
    return std::max(0.0, 1.0 - std::sqrt(divergence / 2.0));
}

struct LinkReport
{
    std::vector<double> sinr;
    std::vector<double> rate;
    double sum_rate = 0.0;
    std::vector<double> divergence;
    std::vector<double> dep_floor;
    double power_w = 0.0;
};

template <typename Real>
LinkReport link_report(const ChannelSet<Real> &ch, const CMatrix<Real> &g, const CMatrix<Real> &v, const SystemConfig &cfg)
{
    const Real noise = static_cast<Real>(cfg.noise_power_w());
    const CMatrix<Real> ug = user_gains(ch, g, v);
    const CMatrix<Real> wg = warden_gains(ch, g, v);
    LinkReport rep;
    for (int k = 0; k < ch.num_users(); ++k)
    {
        const double s = static_cast<double>(sinr_from_gains(ug, noise, k));
        rep.sinr.push_back(s);
        rep.rate.push_back(std::log2(1.0 + s));
        rep.sum_rate += rep.rate.back();
    }
    for (int u = 0; u < ch.num_wardens(); ++u)
    {
        const double d = cfg.observations * static_cast<double>(kl_nu(warden_excess(wg, noise, u)));
        rep.divergence.push_back(d);
        rep.dep_floor.push_back(dep_floor(std::max(0.0, d)));
    }
    rep.power_w = static_cast<double>(v.squaredNorm());
    return rep;
}

// Signed slacks; non-negative means the constraint holds.
struct Feasibility
{
    std::vector<double> rate_slack;   // R_k - R_min
    double power_slack = 0.0;         // P_max - sum ||v_k||^2
    std::vector<double> kl_slack;     // 2 eps^2 - D_u
    double unit_modulus_error = 0.0;  // max ||phi| - 1|
    bool qos_ok = true;
    bool power_ok = true;
    bool covert_ok = true;
    bool unit_modulus_ok = true;

    bool feasible() const { return qos_ok && power_ok && covert_ok && unit_modulus_ok; }
    double worst_violation() const
    {
        double w = std::max(0.0, -power_slack);
        for (double s : rate_slack)
            w = std::max(w, -s);
        for (double s : kl_slack)
            w = std::max(w, -s);
        return std::max(w, unit_modulus_error);
    }
};

Feasibility check_feasibility(const LinkReport &report, const PhaseState<double> &phases, const SystemConfig &cfg);

template <typename Real>
Feasibility check_feasibility(const ChannelSet<Real> &ch, const SimStack<Real> &stack, const PhaseState<Real> &phases,
                              const CMatrix<Real> &v, const SystemConfig &cfg)
{
    const CMatrix<double> g = sim_response(stack, phases).template cast<Complex<double>>();
    return check_feasibility(link_report(cast_channels<double>(ch), g, v.template cast<Complex<double>>(), cfg),
                             cast_phases<double>(phases), cfg);
}

// One CSV row: sum_rate,power_w,sinr_1..K,rate_1..K,kl_1..U,dep_floor_1..U.
std::string link_report_csv_header(int users, int wardens);
std::string link_report_csv_row(const LinkReport &report);

} // namespace simcovert

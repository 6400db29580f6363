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
#include "simcovert/sca.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace simcovert
{

using conic::ComplexExpr;
using conic::LinExpr;

double tau_bound(double eps, int observations)
{
    if (eps < 0.0 || eps > 1.0)
        throw std::domain_error("tau_bound: eps must lie in [0, 1]");
    if (observations < 1)
        throw std::domain_error("tau_bound: observations must be positive");
    const double rhs = 2.0 * eps * eps / observations;
    if (rhs == 0.0)
        return 1.0;
    auto excess = [rhs](double t) { return (t - 1.0) - std::log(t) - rhs; };
    double lo = 1.0, hi = 2.0;
    while (excess(hi) <= 0.0)
        hi *= 2.0;
    while (hi - lo > 1e-12)
    {
        const double mid = 0.5 * (lo + hi);
        (excess(mid) <= 0.0 ? lo : hi) = mid;
    }
    return lo;
}

LinExpr taylor_minorant(const Complex<double> &a, double d0, const ComplexExpr &numerator, const LinExpr &denominator)
{
    if (!(d0 > 0.0))
        throw std::domain_error("taylor_minorant: expansion denominator must be positive");
    const double r = std::abs(a) / d0;
    return (-r * r) * denominator + (2.0 * a.real() / d0) * numerator.re + (2.0 * a.imag() / d0) * numerator.im;
}

ComplexExpr linear_form(const CVector<double> &w, int re, int im)
{
    ComplexExpr e;
    for (Eigen::Index n = 0; n < w.size(); ++n)
    {
        const int i = static_cast<int>(n);
        const double wr = w(n).real(), wi = w(n).imag();
        if (wr != 0.0)
        {
            e.re.terms.emplace_back(re + i, wr);
            e.im.terms.emplace_back(im + i, wr);
        }
        if (wi != 0.0)
        {
            e.re.terms.emplace_back(im + i, -wi);
            e.im.terms.emplace_back(re + i, wi);
        }
    }
    return e;
}

SurrogateState surrogate_state(const ChannelSet<double> &ch, const CMatrix<double> &g, const CMatrix<double> &v,
                               const SystemConfig &cfg)
{
    const double sigma = std::sqrt(cfg.noise_power_w());
    SurrogateState s;
    s.beamformers = v;
    s.user_amplitude = user_gains(ch, g, v) / sigma;
    s.warden_amplitude = warden_gains(ch, g, v) / sigma;
    for (int k = 0; k < ch.num_users(); ++k)
    {
        s.interference.push_back(interference_plus_noise(s.user_amplitude, 1.0, k));
        s.sinr.push_back(std::norm(s.user_amplitude(k, k)) / s.interference.back());
    }
    for (int u = 0; u < ch.num_wardens(); ++u)
        s.warden_ratio.push_back(1.0 + s.warden_amplitude.row(u).squaredNorm());
    return s;
}

SurrogateState surrogate_state(const ChannelSet<double> &ch, const SimStack<double> &stack, const PhaseState<double> &phases,
                               int layer, const CMatrix<double> &v, const SystemConfig &cfg)
{
    SurrogateState s = surrogate_state(ch, sim_response(stack, phases), v, cfg);
    s.phases = phases.phasor(layer);
    return s;
}

CVector<double> LoweredProgram::decision(const Eigen::VectorXd &x) const
{
    CVector<double> z(count);
    for (int i = 0; i < count; ++i)
        z(i) = scale * Complex<double>(x(re + i), x(im + i));
    return z;
}

namespace
{

// Shared tail of the beamfocusing and phase programs: given the received-amplitude forms
// user_form[k][i] and warden_form[u][i], adds the auxiliaries, the Taylor
// rows, the interference and warden cones and the log objective.
void add_rate_block(LoweredProgram &lp, const SurrogateState &state, const std::vector<std::vector<ComplexExpr>> &user_form,
                    const std::vector<std::vector<ComplexExpr>> &warden_form, const SystemConfig &cfg,
                    const LoweringOptions &opts)
{
    conic::ConicProgram &p = lp.program;
    const int users = static_cast<int>(user_form.size());
    const int wardens = static_cast<int>(warden_form.size());
    lp.sinr = p.add_variables("sinr", users);
    lp.interference = p.add_variables("interference", users);
    lp.log_rate = p.add_variables("log_rate", users);
    if (wardens > 0)
        lp.warden = p.add_variables("warden_ratio", wardens);
    if (opts.soft_qos)
        lp.slack = p.add_variables("qos_slack");

    const double gamma_min = cfg.gamma_min();
    LinExpr objective;
    for (int k = 0; k < users; ++k)
    {
        const LinExpr rho = LinExpr::var(lp.sinr + k);
        const LinExpr varpi = LinExpr::var(lp.interference + k);
        if (opts.soft_qos)
        {
            p.add_nonnegative(rho + LinExpr::var(lp.slack) - gamma_min);
            p.add_nonnegative(rho);
        }
        else
        {
            p.add_nonnegative(rho - gamma_min);
        }
        p.add_nonnegative(taylor_minorant(state.user_amplitude(k, k), state.interference[k], user_form[k][k], varpi) - rho);

        std::vector<LinExpr> leak;
        for (int i = 0; i < users; ++i)
            if (i != k)
            {
                leak.push_back(user_form[k][i].re);
                leak.push_back(user_form[k][i].im);
            }
        p.add_nonnegative(varpi - 1.0);
        if (!leak.empty())
            p.add_squared_norm_bound(leak, varpi - 1.0);

        p.add_log_hypograph(LinExpr::var(lp.log_rate + k), rho + 1.0);
        objective += LinExpr::var(lp.log_rate + k, 1.0 / std::numbers::ln2);
    }

    const double tau_max = tau_bound(cfg.covert_eps, cfg.observations);
    for (int u = 0; u < wardens; ++u)
    {
        std::vector<LinExpr> leak;
        for (const auto &f : warden_form[u])
        {
            leak.push_back(f.re);
            leak.push_back(f.im);
        }
        p.add_bounds(lp.warden + u, 1.0, tau_max);
        p.add_squared_norm_bound(leak, LinExpr::var(lp.warden + u) - 1.0);
    }

    if (opts.soft_qos)
    {
        p.add_nonnegative(LinExpr::var(lp.slack));
        objective += LinExpr::var(lp.slack, -opts.slack_weight);
    }
    p.maximize(objective);
}

LoweredProgram lower_phase_split(const SurrogateState &state, const ChannelSet<double> &ch, const SplitResponse<double> &split,
                                 const CMatrix<double> &v, const SystemConfig &cfg, const LoweringOptions &opts)
{
    const int atoms = static_cast<int>(split.left.rows());
    const int streams = static_cast<int>(v.cols());
    if (state.phases.size() != atoms || state.user_amplitude.rows() != ch.num_users())
        throw DimensionError("lower_phase_layer: surrogate state does not match the layer");
    const double sigma = std::sqrt(cfg.noise_power_w());

    LoweredProgram lp;
    lp.count = atoms;
    lp.re = lp.program.add_variables("phi_re", atoms);
    lp.im = lp.program.add_variables("phi_im", atoms);

    auto forms = [&](const std::vector<CVector<double>> &hs) {
        std::vector<std::vector<ComplexExpr>> out(hs.size());
        for (std::size_t a = 0; a < hs.size(); ++a)
            for (int i = 0; i < streams; ++i)
            {
                const CVector<double> eff = effective_phase_channel<double>(hs[a], split.left, split.right, v.col(i)) / sigma;
                out[a].push_back(linear_form(eff, lp.re, lp.im));
            }
        return out;
    };
    add_rate_block(lp, state, forms(ch.users), forms(ch.wardens), cfg, opts);

    for (int n = 0; n < atoms; ++n)
        lp.program.add_second_order_cone({LinExpr(1.0), LinExpr::var(lp.re + n), LinExpr::var(lp.im + n)});
    return lp;
}

} // namespace

LoweredProgram lower_beamfocusing(const SurrogateState &state, const ChannelSet<double> &ch, const CMatrix<double> &g,
                                  const SystemConfig &cfg, const LoweringOptions &opts)
{
    const int antennas = static_cast<int>(g.cols());
    const int streams = ch.num_users();
    if (state.user_amplitude.rows() != streams || state.beamformers.rows() != antennas)
        throw DimensionError("lower_beamfocusing: surrogate state does not match the channels");
    const double amp = std::sqrt(cfg.p_max_w() / cfg.noise_power_w());

    LoweredProgram lp;
    lp.count = antennas * streams;
    lp.scale = std::sqrt(cfg.p_max_w());
    lp.re = lp.program.add_variables("v_re", lp.count);
    lp.im = lp.program.add_variables("v_im", lp.count);

    // c^H x_i with c = sqrt(P) / sigma * G^H h.
    auto forms = [&](const std::vector<CVector<double>> &hs) {
        std::vector<std::vector<ComplexExpr>> out(hs.size());
        for (std::size_t a = 0; a < hs.size(); ++a)
        {
            const CVector<double> w = amp * (hs[a].adjoint() * g).transpose();
            for (int i = 0; i < streams; ++i)
                out[a].push_back(linear_form(w, lp.re + i * antennas, lp.im + i * antennas));
        }
        return out;
    };
    add_rate_block(lp, state, forms(ch.users), forms(ch.wardens), cfg, opts);

    std::vector<LinExpr> power{LinExpr(1.0)};
    for (int i = 0; i < lp.count; ++i)
    {
        power.push_back(LinExpr::var(lp.re + i));
        power.push_back(LinExpr::var(lp.im + i));
    }
    lp.program.add_second_order_cone(std::move(power));
    return lp;
}

LoweredProgram lower_phase_layer(const SurrogateState &state, const ChannelSet<double> &ch, const SimStack<double> &stack,
                                 const PhaseState<double> &phases, int layer, const CMatrix<double> &v,
                                 const SystemConfig &cfg, const LoweringOptions &opts)
{
    return lower_phase_split(state, ch, split_response(stack, phases, layer), v, cfg, opts);
}

CVector<double> project_unit_modulus(const CVector<double> &phi)
{
    CVector<double> out(phi.size());
    for (Eigen::Index n = 0; n < phi.size(); ++n)
    {
        const double mag = std::abs(phi(n));
        out(n) = mag > 0.0 ? phi(n) / mag : Complex<double>(1.0, 0.0);
    }
    return out;
}

Merit evaluate_merit(const LinkReport &report, const SystemConfig &cfg)
{
    const Feasibility f = check_feasibility(report, PhaseState<double>(), cfg);
    Merit m;
    m.sum_rate = report.sum_rate;
    m.feasible = f.feasible();
    m.violation = std::max(0.0, -f.power_slack) / cfg.p_max_w();
    for (double s : f.rate_slack)
        m.violation = std::max(m.violation, -s);
    for (double s : f.kl_slack)
        m.violation = std::max(m.violation, -s / cfg.covert_budget());
    return m;
}

bool not_worse(const Merit &candidate, const Merit &current)
{
    if (current.feasible)
        return candidate.feasible && candidate.sum_rate >= current.sum_rate;
    return candidate.feasible || candidate.violation < current.violation;
}

SubproblemStats &SubproblemStats::operator+=(const SubproblemStats &o)
{
    solves += o.solves;
    softened += o.softened;
    rejected += o.rejected;
    failed = failed || o.failed;
    if (!o.diagnostics.empty())
        diagnostics = o.diagnostics;
    return *this;
}

namespace
{

template <typename Lower>
conic::Solution solve_with_recovery(Lower &&lower, const conic::SolverOptions &solver, SubproblemStats &stats,
                                    LoweredProgram &lp)
{
    lp = lower(LoweringOptions{});
    conic::Solution sol = conic::solve_conic(lp.program, solver);
    ++stats.solves;
    if (sol.status == conic::Status::Infeasible)
    {
        LoweringOptions soft;
        soft.soft_qos = true;
        lp = lower(soft);
        sol = conic::solve_conic(lp.program, solver);
        ++stats.solves;
        ++stats.softened;
    }
    if (sol.status == conic::Status::NumericalFailure)
    {
        conic::SolverOptions tight = solver;
        tight.tolerance *= 1e-2;
        tight.max_iterations *= 2;
        sol = conic::solve_conic(lp.program, tight);
        ++stats.solves;
    }
    if (sol.status != conic::Status::Optimal)
    {
        stats.failed = sol.status == conic::Status::NumericalFailure;
        stats.diagnostics = std::string(conic::to_string(sol.status)) + ": " + sol.diagnostics;
    }
    return sol;
}

bool converged(const Merit &before, const Merit &after, double tol)
{
    return before.feasible && after.feasible &&
           std::abs(after.sum_rate - before.sum_rate) <= tol * std::max(std::abs(before.sum_rate), 1e-9);
}

} // namespace

BeamfocusingResult solve_beamfocusing(const ChannelSet<double> &ch, const CMatrix<double> &g, const CMatrix<double> &v0,
                                      const SystemConfig &cfg, const conic::SolverOptions &solver)
{
    BeamfocusingResult out;
    out.v = v0;
    out.merit = evaluate_merit(link_report(ch, g, v0, cfg), cfg);
    for (int it = 0; it < cfg.max_sca_iters; ++it)
    {
        const SurrogateState state = surrogate_state(ch, g, out.v, cfg);
        LoweredProgram lp;
        const conic::Solution sol = solve_with_recovery(
            [&](const LoweringOptions &o) { return lower_beamfocusing(state, ch, g, cfg, o); }, solver, out.stats, lp);
        if (sol.status != conic::Status::Optimal)
            break;

        CMatrix<double> v = lp.decision(sol.x).reshaped(g.cols(), ch.num_users());
        const Merit m = evaluate_merit(link_report(ch, g, v, cfg), cfg);
        ++out.iterations;
        if (!not_worse(m, out.merit))
        {
            ++out.stats.rejected;
            break;
        }
        const bool done = converged(out.merit, m, cfg.sca_tol);
        out.v = std::move(v);
        out.merit = m;
        if (done)
            break;
    }
    return out;
}

PhaseLayerResult solve_phase_layer(const ChannelSet<double> &ch, const SimStack<double> &stack,
                                   const PhaseState<double> &phases, int layer, const CMatrix<double> &v,
                                   const SystemConfig &cfg, const conic::SolverOptions &solver)
{
    const SplitResponse<double> split = split_response(stack, phases, layer);
    PhaseLayerResult out;
    out.phases = phases;
    out.v = v;
    out.merit = evaluate_merit(link_report(ch, sim_response(stack, phases), v, cfg), cfg);

    CVector<double> phi = phases.phasor(layer);
    double last_objective = 0.0;
    for (int it = 0; it < cfg.max_sca_iters; ++it)
    {
        const CMatrix<double> g = split.left * phi.asDiagonal() * split.right;
        SurrogateState state = surrogate_state(ch, g, out.v, cfg);
        state.phases = phi;
        LoweredProgram lp;
        const conic::Solution sol = solve_with_recovery(
            [&](const LoweringOptions &o) { return lower_phase_split(state, ch, split, out.v, cfg, o); }, solver,
            out.stats, lp);
        if (sol.status != conic::Status::Optimal)
            break;
        ++out.iterations;

        phi = lp.decision(sol.x);
        const bool stalled = it > 0 && lp.slack < 0 &&
                             std::abs(sol.objective - last_objective) <= cfg.sca_tol * std::max(std::abs(last_objective), 1e-9);
        last_objective = sol.objective;

        PhaseState<double> candidate = phases;
        candidate.set_layer_from_phasor(layer, project_unit_modulus(phi));
        if (candidate == out.phases)
        {
            if (stalled)
                break;
            continue;
        }
        const CMatrix<double> g_cand = sim_response(stack, candidate);
        Merit m = evaluate_merit(link_report(ch, g_cand, out.v, cfg), cfg);
        CMatrix<double> v_cand = out.v;
        bool repaired = false;
        if (!not_worse(m, out.merit))
        {
            BeamfocusingResult repair = solve_beamfocusing(ch, g_cand, out.v, cfg, solver);
            repaired = true;
            out.stats += repair.stats;
            m = repair.merit;
            v_cand = std::move(repair.v);
        }
        if (not_worse(m, out.merit))
        {
            out.phases = std::move(candidate);
            out.v = std::move(v_cand);
            out.merit = m;
            out.accepted = true;
            // New beamformers change the subproblem; re-expand at the accepted point.
            if (repaired)
            {
                phi = out.phases.phasor(layer);
                last_objective = std::numeric_limits<double>::quiet_NaN();
                continue;
            }
        }
        else
        {
            ++out.stats.rejected;
        }
        if (stalled)
            break;
    }
    return out;
}

} // namespace simcovert

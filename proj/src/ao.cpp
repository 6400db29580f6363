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
#include "simcovert/ao.hpp"

#include <chrono>
#include <stdexcept>

#include "simcovert/pga.hpp"

namespace simcovert
{

namespace
{

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

TraceEntry trace_entry(int iteration, const Merit &m)
{
    TraceEntry e;
    e.iteration = iteration;
    e.sum_rate = m.sum_rate;
    e.violation = m.violation;
    e.feasible = m.feasible;
    if (m.feasible)
        e.objective = m.sum_rate;
    return e;
}

bool settled(const Merit &before, const Merit &after, double tol)
{
    if (before.feasible && after.feasible)
        return std::abs(after.sum_rate - before.sum_rate) <= tol * std::max(std::abs(before.sum_rate), 1e-9);
    return !after.feasible && after.violation >= before.violation;
}

bool better(const Merit &a, const Merit &b)
{
    if (a.feasible != b.feasible)
        return a.feasible;
    return a.feasible ? a.sum_rate > b.sum_rate : a.violation < b.violation;
}

} // namespace

const char *to_string(Algorithm a)
{
    switch (a)
    {
    case Algorithm::Sca: return "sca";
    case Algorithm::Pga: return "pga";
    case Algorithm::Random: return "random";
    case Algorithm::Codebook: return "codebook";
    }
    return "unknown";
}

Algorithm algorithm_from_string(const std::string &name)
{
    for (Algorithm a : {Algorithm::Sca, Algorithm::Pga, Algorithm::Random, Algorithm::Codebook})
        if (name == to_string(a))
            return a;
    throw std::invalid_argument("unknown algorithm '" + name + "' (expected sca, pga, random or codebook)");
}

Scenario build_scenario(const SystemConfig &cfg, std::int64_t seed)
{
    Scenario s;
    s.cfg = cfg;
    s.seed = seed;
    Rng rng = make_rng(seed, 0);
    s.placement = place_nodes(cfg, rng);
    const SimGeometry geom = SimGeometry::from_config(cfg);
    s.stack = build_sim_stack<double>(geom);
    s.channels = build_channels<double>(s.placement, geom);
    return s;
}

Rng algorithm_rng(std::int64_t seed)
{
    return make_rng(seed, 1);
}

CMatrix<double> initial_beamformers(const ChannelSet<double> &ch, const CMatrix<double> &g, const SystemConfig &cfg)
{
    const int users = ch.num_users();
    CMatrix<double> v = CMatrix<double>::Zero(g.cols(), users);
    const double per_user = std::sqrt(cfg.p_max_w() / 2.0 / users);
    for (int k = 0; k < users; ++k)
    {
        const CVector<double> mf = g.adjoint() * ch.users[k];
        const double n = mf.norm();
        if (n > 0.0)
            v.col(k) = per_user / n * mf;
    }

    const double noise = cfg.noise_power_w();
    auto covert = [&](double scale) {
        const CMatrix<double> w = warden_gains(ch, g, CMatrix<double>(scale * v));
        for (int u = 0; u < ch.num_wardens(); ++u)
            if (cfg.observations * kl_nu(warden_excess(w, noise, u)) > cfg.covert_budget())
                return false;
        return true;
    };
    if (covert(1.0))
        return v;
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 100 && hi - lo > 1e-15; ++it)
    {
        const double mid = 0.5 * (lo + hi);
        (covert(mid) ? lo : hi) = mid;
    }
    return lo * v;
}

InitialState init_state(const SystemConfig &cfg, const ChannelSet<double> &ch, const SimStack<double> &stack, Rng &rng)
{
    InitialState s;
    s.phases = PhaseState<double>::random(stack.num_layers(), stack.num_atoms(), rng);
    s.beamformers = initial_beamformers(ch, sim_response(stack, s.phases), cfg);
    return s;
}

BeamfocusingResult converge_beamfocusing(const ChannelSet<double> &ch, const CMatrix<double> &g, const CMatrix<double> &v0,
                                         const SystemConfig &cfg)
{
    BeamfocusingResult out = solve_beamfocusing(ch, g, v0, cfg);
    for (int round = 1; round < cfg.max_ao_iters; ++round)
    {
        const Merit before = out.merit;
        BeamfocusingResult next = solve_beamfocusing(ch, g, out.v, cfg);
        out.stats += next.stats;
        out.iterations += next.iterations;
        out.v = std::move(next.v);
        out.merit = next.merit;
        if (next.iterations == 0 || settled(before, out.merit, cfg.ao_tol))
            break;
    }
    return out;
}

void finalize_record(SolveRecord &rec, const SystemConfig &cfg, const ChannelSet<double> &ch, const SimStack<double> &stack)
{
    rec.report = link_report(ch, sim_response(stack, rec.phases), rec.beamformers, cfg);
    rec.feasibility = check_feasibility(rec.report, rec.phases, cfg);
    rec.feasible = rec.feasibility.feasible() && !rec.failed;
}

SolveRecord run_ao_sca(const SystemConfig &cfg, const ChannelSet<double> &ch, const SimStack<double> &stack, Rng &rng)
{
    const auto t0 = Clock::now();
    SolveRecord rec;
    rec.algorithm = Algorithm::Sca;
    InitialState init = init_state(cfg, ch, stack, rng);
    rec.beamformers = std::move(init.beamformers);
    rec.phases = std::move(init.phases);
    Merit merit = evaluate_merit(link_report(ch, sim_response(stack, rec.phases), rec.beamformers, cfg), cfg);
    rec.trace.push_back(trace_entry(0, merit));

    for (int it = 1; it <= cfg.max_ao_iters; ++it)
    {
        const Merit before = merit;
        int attempted = 0, failures = 0;

        BeamfocusingResult bf = solve_beamfocusing(ch, sim_response(stack, rec.phases), rec.beamformers, cfg);
        rec.stats += bf.stats;
        ++attempted;
        failures += bf.stats.failed && bf.iterations == 0;
        rec.beamformers = std::move(bf.v);
        merit = bf.merit;

        for (int i = 0; i < stack.num_layers(); ++i)
        {
            const int layer = cfg.layer_order == LayerOrder::LastToFirst ? stack.num_layers() - 1 - i : i;
            PhaseLayerResult pl = solve_phase_layer(ch, stack, rec.phases, layer, rec.beamformers, cfg);
            rec.stats += pl.stats;
            ++attempted;
            failures += pl.stats.failed && pl.iterations == 0;
            if (pl.accepted)
            {
                rec.phases = std::move(pl.phases);
                rec.beamformers = std::move(pl.v);
                merit = pl.merit;
            }
        }
        rec.trace.push_back(trace_entry(it, merit));
        rec.iterations = it;
        if (failures == attempted)
        {
            rec.failed = true;
            rec.message = "every subproblem failed: " + rec.stats.diagnostics;
            break;
        }
        if (settled(before, merit, cfg.ao_tol))
            break;
    }
    finalize_record(rec, cfg, ch, stack);
    rec.seconds = seconds_since(t0);
    return rec;
}

namespace
{

struct PgaPoint
{
    double value = 0.0;
    CMatrix<double> v;
    Merit merit;
    SubproblemStats stats;
};

} // namespace

SolveRecord run_ao_pga(const SystemConfig &cfg, const ChannelSet<double> &ch, const SimStack<double> &stack, Rng &rng)
{
    const auto t0 = Clock::now();
    const PenaltyConfig pc = PenaltyConfig::from_config(cfg);
    SolveRecord rec;
    rec.algorithm = Algorithm::Pga;
    InitialState init = init_state(cfg, ch, stack, rng);
    rec.phases = std::move(init.phases);

    auto resolve = [&](const PhaseState<double> &phases, const CMatrix<double> &v0) {
        const CMatrix<double> g = sim_response(stack, phases);
        BeamfocusingResult bf = solve_beamfocusing(ch, g, v0, cfg);
        PgaPoint p;
        p.value = penalty_terms(user_gains(ch, g, bf.v), warden_gains(ch, g, bf.v), cfg.noise_power_w(), cfg).value;
        p.v = std::move(bf.v);
        p.merit = bf.merit;
        p.stats = bf.stats;
        return p;
    };
    auto fixed = [&](const PhaseState<double> &phases, const CMatrix<double> &v) {
        const CMatrix<double> g = sim_response(stack, phases);
        PgaPoint p;
        p.value = penalty_terms(user_gains(ch, g, v), warden_gains(ch, g, v), cfg.noise_power_w(), cfg).value;
        p.v = v;
        p.merit = evaluate_merit(link_report(ch, g, v, cfg), cfg);
        return p;
    };

    PgaPoint cur = resolve(rec.phases, init.beamformers);
    rec.stats += cur.stats;
    rec.beamformers = cur.v;
    {
        TraceEntry e = trace_entry(0, cur.merit);
        e.penalty = cur.value;
        rec.trace.push_back(e);
    }

    for (int it = 1; it <= cfg.max_ao_iters; ++it)
    {
        bool zero = false;
        const GradientField<double> dir =
            normalize_gradient(full_gradient(ch, stack, rec.phases, rec.beamformers, cfg), &zero);
        if (zero)
            break;

        const CMatrix<double> v_now = rec.beamformers;
        auto evaluate = [&](const PhaseState<double> &trial) {
            PgaPoint p = cfg.pga_resolve_each_trial ? resolve(trial, v_now) : fixed(trial, v_now);
            rec.stats += p.stats;
            return p;
        };
        ArmijoStep<PgaPoint> step = armijo_phase_step(rec.phases, dir, cur.value, evaluate, pc);
        if (!step.moved)
            break;

        PgaPoint next = std::move(step.point);
        if (!cfg.pga_resolve_each_trial)
        {
            PgaPoint re = resolve(step.phases, next.v);
            rec.stats += re.stats;
            if (re.value >= next.value)
                next = std::move(re);
        }
        const double previous = cur.value;
        rec.phases = std::move(step.phases);
        rec.beamformers = next.v;
        cur = std::move(next);

        TraceEntry e = trace_entry(it, cur.merit);
        e.penalty = cur.value;
        e.step = step.step;
        e.backtracks = step.backtracks;
        rec.trace.push_back(e);
        rec.iterations = it;
        if (std::abs(cur.value - previous) <= cfg.ao_tol * std::max(std::abs(previous), 1e-9))
            break;
    }
    finalize_record(rec, cfg, ch, stack);
    rec.seconds = seconds_since(t0);
    return rec;
}

SolveRecord random_phase_baseline(const SystemConfig &cfg, const ChannelSet<double> &ch, const SimStack<double> &stack,
                                  Rng &rng)
{
    const auto t0 = Clock::now();
    SolveRecord rec;
    rec.algorithm = Algorithm::Random;
    InitialState init = init_state(cfg, ch, stack, rng);
    rec.phases = std::move(init.phases);
    const CMatrix<double> g = sim_response(stack, rec.phases);
    rec.trace.push_back(trace_entry(0, evaluate_merit(link_report(ch, g, init.beamformers, cfg), cfg)));
    BeamfocusingResult bf = converge_beamfocusing(ch, g, init.beamformers, cfg);
    rec.beamformers = std::move(bf.v);
    rec.stats = bf.stats;
    rec.iterations = bf.iterations;
    rec.trace.push_back(trace_entry(1, bf.merit));
    finalize_record(rec, cfg, ch, stack);
    rec.seconds = seconds_since(t0);
    return rec;
}

SolveRecord codebook_baseline(const SystemConfig &cfg, const ChannelSet<double> &ch, const SimStack<double> &stack, Rng &rng,
                              int codebook_size)
{
    if (codebook_size < 1)
        throw std::invalid_argument("codebook_baseline: codebook_size must be at least 1");
    const auto t0 = Clock::now();
    SolveRecord rec;
    rec.algorithm = Algorithm::Codebook;
    Merit best;
    for (int c = 0; c < codebook_size; ++c)
    {
        InitialState entry = init_state(cfg, ch, stack, rng);
        const CMatrix<double> g = sim_response(stack, entry.phases);
        BeamfocusingResult bf = converge_beamfocusing(ch, g, entry.beamformers, cfg);
        rec.stats += bf.stats;
        rec.iterations += bf.iterations;
        if (c == 0 || better(bf.merit, best))
        {
            best = bf.merit;
            rec.phases = std::move(entry.phases);
            rec.beamformers = std::move(bf.v);
        }
        rec.trace.push_back(trace_entry(c + 1, best));
    }
    finalize_record(rec, cfg, ch, stack);
    if (!rec.feasible)
        rec.message = "no codebook entry is feasible";
    rec.seconds = seconds_since(t0);
    return rec;
}

SolveRecord run_algorithm(Algorithm algo, const Scenario &s, int codebook_size)
{
    Rng rng = algorithm_rng(s.seed);
    SolveRecord rec;
    try
    {
        switch (algo)
        {
        case Algorithm::Sca: rec = run_ao_sca(s.cfg, s.channels, s.stack, rng); break;
        case Algorithm::Pga: rec = run_ao_pga(s.cfg, s.channels, s.stack, rng); break;
        case Algorithm::Random: rec = random_phase_baseline(s.cfg, s.channels, s.stack, rng); break;
        case Algorithm::Codebook: rec = codebook_baseline(s.cfg, s.channels, s.stack, rng, codebook_size); break;
        }
    }
    catch (const std::exception &e)
    {
        rec = SolveRecord{};
        rec.algorithm = algo;
        rec.failed = true;
        rec.message = e.what();
    }
    rec.seed = s.seed;
    return rec;
}

} // namespace simcovert

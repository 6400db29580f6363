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

// Alternating optimization drivers (SCA and PGA phase designs) and the
// random-phase / codebook baselines.

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "simcovert/config.hpp"
#include "simcovert/link_metrics.hpp"
#include "simcovert/placement.hpp"
#include "simcovert/sca.hpp"
#include "simcovert/wavefield.hpp"

namespace simcovert
{

enum class Algorithm
{
    Sca,
    Pga,
    Random,
    Codebook,
};

const char *to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string &name);

struct TraceEntry
{
    int iteration = 0;
    // Objective: the sum rate of a feasible iterate, -inf otherwise.
    double objective = -std::numeric_limits<double>::infinity();
    double sum_rate = 0.0;
    double violation = 0.0;
    bool feasible = false;
    double penalty = 0.0; // F, PGA only
    double step = 0.0;    // accepted Armijo step, PGA only
    int backtracks = 0;
};

struct SolveRecord
{
    Algorithm algorithm = Algorithm::Sca;
    std::int64_t seed = 0;
    CMatrix<double> beamformers;
    PhaseState<double> phases;
    std::vector<TraceEntry> trace;
    LinkReport report;
    Feasibility feasibility;
    bool feasible = false;
    bool failed = false;
    std::string message;
    int iterations = 0;
    double seconds = 0.0;
    SubproblemStats stats;

    // Sum rate credited as covert: zero unless the solution is feasible.
    double covert_rate() const { return feasible ? report.sum_rate : 0.0; }
};

struct Scenario
{
    SystemConfig cfg;
    std::int64_t seed = 0;
    Placement placement;
    SimStack<double> stack;
    ChannelSet<double> channels;
};

// Placement drawn from stream 0 of `seed`.
Scenario build_scenario(const SystemConfig &cfg, std::int64_t seed);
// Stream shared by every algorithm of a seed, so all start from the same phases.
Rng algorithm_rng(std::int64_t seed);

// Matched filters at total power P_max / 2, scaled down by bisection until
// every warden meets the covertness budget.
CMatrix<double> initial_beamformers(const ChannelSet<double> &ch, const CMatrix<double> &g, const SystemConfig &cfg);

struct InitialState
{
    CMatrix<double> beamformers;
    PhaseState<double> phases;
};

InitialState init_state(const SystemConfig &cfg, const ChannelSet<double> &ch, const SimStack<double> &stack, Rng &rng);

// Beamfocusing repeated until the relative rate change is below ao_tol, capped at
// max_ao_iters rounds of max_sca_iters.
BeamfocusingResult converge_beamfocusing(const ChannelSet<double> &ch, const CMatrix<double> &g, const CMatrix<double> &v0,
                                         const SystemConfig &cfg);

SolveRecord run_ao_sca(const SystemConfig &cfg, const ChannelSet<double> &ch, const SimStack<double> &stack, Rng &rng);
SolveRecord run_ao_pga(const SystemConfig &cfg, const ChannelSet<double> &ch, const SimStack<double> &stack, Rng &rng);
SolveRecord random_phase_baseline(const SystemConfig &cfg, const ChannelSet<double> &ch, const SimStack<double> &stack,
                                  Rng &rng);
// The first table is the one random_phase_baseline would draw from the same stream.
SolveRecord codebook_baseline(const SystemConfig &cfg, const ChannelSet<double> &ch, const SimStack<double> &stack, Rng &rng,
                              int codebook_size = 100);

SolveRecord run_algorithm(Algorithm algo, const Scenario &scenario, int codebook_size = 100);

// Recomputes the report and feasibility of (V, phases) into the record.
void finalize_record(SolveRecord &rec, const SystemConfig &cfg, const ChannelSet<double> &ch, const SimStack<double> &stack);

} // namespace simcovert

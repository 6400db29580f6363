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

// Seed sweeps over one configuration field, CSV emission and plot series.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "simcovert/ao.hpp"

namespace simcovert
{

struct SweepSpec
{
    SystemConfig base;
    std::string param;               // a name from config_keys()
    std::vector<std::string> values; // swept in the given order
    std::vector<Algorithm> algorithms;
    std::vector<std::int64_t> seeds;
    std::filesystem::path out_dir; // empty: nothing written
    int workers = 0;               // 0: hardware concurrency
    int codebook_size = 100;
};

// Throws ConfigError listing every problem, including invalid swept values.
void validate_sweep(const SweepSpec &spec);

struct SweepRow
{
    std::string value;
    double x = 0.0;
    Algorithm algorithm = Algorithm::Sca;
    std::int64_t seed = 0;
    double sum_rate = 0.0;
    bool feasible = false;
    bool failed = false;
    int iterations = 0;
    double seconds = 0.0;
    std::string message;

    double covert_rate() const { return feasible ? sum_rate : 0.0; }
};

struct SweepResult
{
    std::string param;
    std::vector<SweepRow> rows; // sorted by (value index, algorithm, seed)
};

using SweepProgress = std::function<void(const SweepRow &, std::size_t done, std::size_t total)>;

SweepResult run_sweep(const SweepSpec &spec, const SweepProgress &progress = {});

// param,algo,seed,sum_rate,feasible,iters,seconds
std::string sweep_csv(const SweepResult &result);
SweepResult parse_sweep_csv(const std::string &text);

// Statistics of the covert rate (0 for infeasible rows); std uses n - 1.
struct Aggregate
{
    std::string value;
    double x = 0.0;
    Algorithm algorithm = Algorithm::Sca;
    double mean = 0.0;
    double std = 0.0;
    int n = 0;
};

std::vector<Aggregate> aggregate(const SweepResult &result);

// One file per algorithm, <tag>_<algo>.dat, columns x mean std n. Returns
// the written paths. Throws if `table` is empty.
std::vector<std::filesystem::path> emit_plot_data(const std::vector<Aggregate> &table, const std::string &tag,
                                                  const std::filesystem::path &out_dir);

// Writes <param>.csv and the plot files under spec.out_dir.
void write_sweep_outputs(const SweepSpec &spec, const SweepResult &result);

} // namespace simcovert

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

// File formats: SolveRecord JSON and CSV trace, and the binary dump of the
// SIM matrices and channels. Layouts are documented in README.md.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "simcovert/ao.hpp"

namespace simcovert
{

// FNV-1a (64 bit) of serialize_config(cfg).
std::uint64_t config_hash(const SystemConfig &cfg);

// Shortest round-trip decimal form.
std::string format_double(double v);

std::string record_to_json(const SolveRecord &rec, int indent = 2);
SolveRecord record_from_json(const std::string &text);

// iteration,objective,sum_rate,max_violation,feasible,penalty,step,backtracks
std::string trace_csv(const SolveRecord &rec);

struct DumpBlock
{
    std::string name; // at most 16 bytes
    CMatrix<double> data;
};

struct Dump
{
    std::uint64_t config_hash = 0;
    std::vector<DumpBlock> blocks;
};

// W1..WL, then h_user_k and h_warden_u as column vectors, then V and the
// phase-dependent response G when given.
Dump make_dump(const SystemConfig &cfg, const SimStack<double> &stack, const ChannelSet<double> &ch,
               const SolveRecord *record = nullptr);

void write_dump(std::ostream &os, const Dump &dump);
Dump read_dump(std::istream &is);
void write_dump_file(const std::filesystem::path &path, const Dump &dump);
Dump read_dump_file(const std::filesystem::path &path);

void write_text_file(const std::filesystem::path &path, const std::string &text);

} // namespace simcovert

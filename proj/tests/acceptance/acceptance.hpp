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

// Acceptance suite: one check per criterion, each against an oracle that is
// computed here rather than through the library code under test.

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace simcovert::acceptance
{

struct CriterionResult
{
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
    double limit_seconds = 0.0;
};

struct Options
{
    std::vector<int> only; // empty: all criteria
    int workers = 0;       // sweep worker threads, 0 = hardware
    bool verbose = false;
};

std::vector<int> criterion_ids();
CriterionResult run_criterion(int id, const Options &opts, std::ostream &log);

// Prints one "PASS|FAIL <id> <name>: <detail>" line per criterion as it
// finishes. Returns true when every selected criterion passed.
bool run_all(const Options &opts, std::ostream &out, std::vector<CriterionResult> *results = nullptr);

} // namespace simcovert::acceptance

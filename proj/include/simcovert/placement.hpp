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

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "simcovert/config.hpp"

namespace simcovert
{

using Rng = std::mt19937_64;

// A ground node and its spherical coordinates seen from the output-layer
// center. azimuth is measured in the x-y plane from +x, elevation is the
// polar angle from +z, so the unit direction is
// (cos(az) sin(el), sin(az) sin(el), cos(el)).
struct Node
{
    Eigen::Vector3d position = Eigen::Vector3d::Zero();
    double r = 0.0;
    double azimuth = 0.0;
    double elevation = 0.0;
};

struct Placement
{
    std::vector<Node> users;
    std::vector<Node> wardens;
};

// BS antenna array at (0,0,Z); layers are x-z planes at y = l * d_SIM.
Eigen::Vector3d output_layer_center(const SystemConfig &cfg);

Node make_node(const Eigen::Vector3d &position, const SystemConfig &cfg);

// Area-uniform draw on the service disk, z = 0. Users are drawn first.
Placement place_nodes(const SystemConfig &cfg, Rng &rng);

// Independent stream for (seed, stream id); streams never share state.
Rng make_rng(std::int64_t seed, std::uint64_t stream = 0);

} // namespace simcovert

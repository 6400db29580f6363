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
#include "simcovert/placement.hpp"

#include <algorithm>
#include <cmath>

namespace simcovert
{

Eigen::Vector3d output_layer_center(const SystemConfig &cfg)
{
    return {0.0, cfg.num_layers * cfg.layer_spacing(), cfg.bs_height_m};
}

Node make_node(const Eigen::Vector3d &position, const SystemConfig &cfg)
{
    Node node;
    node.position = position;
    const Eigen::Vector3d d = position - output_layer_center(cfg);
    node.r = d.norm();
    node.azimuth = std::atan2(d.y(), d.x());
    node.elevation = std::acos(std::clamp(d.z() / node.r, -1.0, 1.0));
    return node;
}

Placement place_nodes(const SystemConfig &cfg, Rng &rng)
{
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double two_pi = 2.0 * std::acos(-1.0);
    auto draw = [&] {
        const double rho = cfg.service_radius_m * std::sqrt(unit(rng));
        const double ang = two_pi * unit(rng);
        const Eigen::Vector3d p(cfg.service_center_m[0] + rho * std::cos(ang),
                                cfg.service_center_m[1] + rho * std::sin(ang), 0.0);
        return make_node(p, cfg);
    };
    Placement out;
    for (int k = 0; k < cfg.num_users; ++k)
        out.users.push_back(draw());
    for (int u = 0; u < cfg.num_wardens; ++u)
        out.wardens.push_back(draw());
    return out;
}

Rng make_rng(std::int64_t seed, std::uint64_t stream)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffff), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream & 0xffffffff), static_cast<std::uint32_t>(stream >> 32)};
    return Rng(seq);
}

} // namespace simcovert

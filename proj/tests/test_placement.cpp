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
#include <doctest.h>

#include "simcovert/placement.hpp"

using namespace simcovert;

TEST_CASE("placement is deterministic per seed")
{
    const SystemConfig cfg = paper_profile();
    Rng a = make_rng(7), b = make_rng(7);
    const Placement p = place_nodes(cfg, a), q = place_nodes(cfg, b);
    REQUIRE(p.users.size() == 3);
    REQUIRE(p.wardens.size() == 3);
    for (std::size_t i = 0; i < p.users.size(); ++i)
        CHECK(p.users[i].position == q.users[i].position);
    for (std::size_t i = 0; i < p.wardens.size(); ++i)
        CHECK(p.wardens[i].position == q.wardens[i].position);
}

TEST_CASE("streams of one seed are independent")
{
    Rng a = make_rng(7, 0), b = make_rng(7, 1), c = make_rng(8, 0);
    const auto x = a(), y = b(), z = c();
    CHECK(x != y);
    CHECK(x != z);
}

TEST_CASE("nodes lie on the service disk and the mean sits at its center")
{
    SystemConfig cfg = paper_profile();
    cfg.num_users = 1;
    cfg.num_wardens = 0;
    Rng rng = make_rng(1);
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    constexpr int kSamples = 10000;
    for (int i = 0; i < kSamples; ++i)
    {
        const Node n = place_nodes(cfg, rng).users[0];
        const Eigen::Vector3d d = n.position - Eigen::Vector3d(10, 10, 0);
        CHECK(n.position.z() == 0.0);
        CHECK(d.norm() <= cfg.service_radius_m + 1e-12);
        mean += n.position / kSamples;
    }
    CHECK((mean - Eigen::Vector3d(10, 10, 0)).norm() < 0.5);
}

TEST_CASE("warden sets are nested when U grows")
{
    SystemConfig cfg = desk_profile();
    Rng a = make_rng(3);
    const Placement one = place_nodes(cfg, a);
    cfg.num_wardens = 3;
    Rng b = make_rng(3);
    const Placement three = place_nodes(cfg, b);
    CHECK(one.wardens[0].position == three.wardens[0].position);
    CHECK(one.users[1].position == three.users[1].position);
}

TEST_CASE("spherical coordinates of a node at the disk center")
{
    const SystemConfig cfg = paper_profile();
    const Eigen::Vector3d center = output_layer_center(cfg);
    const Node n = make_node(Eigen::Vector3d(10, 10, 0), cfg);
    CHECK(n.r == doctest::Approx((Eigen::Vector3d(10, 10, 0) - center).norm()));
    const Eigen::Vector3d dir(std::cos(n.azimuth) * std::sin(n.elevation), std::sin(n.azimuth) * std::sin(n.elevation),
                              std::cos(n.elevation));
    CHECK((center + n.r * dir - n.position).norm() < 1e-9);
    CHECK(center.z() == doctest::Approx(cfg.bs_height_m));
    CHECK(center.y() == doctest::Approx(cfg.num_layers * cfg.layer_spacing()));
}

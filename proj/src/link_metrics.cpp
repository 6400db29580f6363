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
#include "simcovert/link_metrics.hpp"

#include <charconv>

namespace simcovert
{

namespace
{

std::string fmt(double v)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

} // namespace

Feasibility check_feasibility(const LinkReport &report, const PhaseState<double> &phases, const SystemConfig &cfg)
{
    Feasibility f;
    for (double r : report.rate)
    {
        f.rate_slack.push_back(r - cfg.min_rate_bpshz);
        f.qos_ok = f.qos_ok && f.rate_slack.back() >= -kRateTol;
    }
    f.power_slack = cfg.p_max_w() - report.power_w;
    f.power_ok = f.power_slack >= -kPowerTol;
    for (double d : report.divergence)
    {
        f.kl_slack.push_back(cfg.covert_budget() - d);
        f.covert_ok = f.covert_ok && f.kl_slack.back() >= -kKlTol;
    }
    for (int l = 0; l < phases.num_layers(); ++l)
        for (Eigen::Index n = 0; n < phases.phasor(l).size(); ++n)
            f.unit_modulus_error = std::max(f.unit_modulus_error, std::abs(std::abs(phases.phasor(l)(n)) - 1.0));
    f.unit_modulus_ok = f.unit_modulus_error <= 1e-12;
    return f;
}

std::string link_report_csv_header(int users, int wardens)
{
    std::string h = "sum_rate,power_w";
    for (int k = 1; k <= users; ++k)
        h += ",sinr_" + std::to_string(k);
    for (int k = 1; k <= users; ++k)
        h += ",rate_" + std::to_string(k);
    for (int u = 1; u <= wardens; ++u)
        h += ",kl_" + std::to_string(u);
    for (int u = 1; u <= wardens; ++u)
        h += ",dep_floor_" + std::to_string(u);
    return h;
}

std::string link_report_csv_row(const LinkReport &r)
{
    std::string row = fmt(r.sum_rate) + "," + fmt(r.power_w);
    for (double v : r.sinr)
        row += "," + fmt(v);
    for (double v : r.rate)
        row += "," + fmt(v);
    for (double v : r.divergence)
        row += "," + fmt(v);
    for (double v : r.dep_floor)
        row += "," + fmt(v);
    return row;
}

} // namespace simcovert

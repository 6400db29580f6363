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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>

#include "simcovert/harness.hpp"

using namespace simcovert;

namespace
{

SweepSpec small_spec()
{
    SweepSpec s;
    s.base = desk_profile();
    s.param = "p_max_dbm";
    s.values = {"30", "40"};
    s.algorithms = {Algorithm::Random, Algorithm::Codebook};
    s.seeds = {1, 2};
    s.codebook_size = 3;
    return s;
}

std::string strip_seconds(const std::string &csv)
{
    return std::regex_replace(csv, std::regex(",[^,\n]*\n"), "\n");
}

std::string slurp(const std::filesystem::path &p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("sweep validation lists every problem")
{
    SweepSpec s = small_spec();
    s.param = "warp_factor";
    s.seeds.clear();
    s.codebook_size = 0;
    try
    {
        validate_sweep(s);
        FAIL("expected ConfigError");
    }
    catch (const ConfigError &e)
    {
        const std::string msg = e.what();
        CHECK(msg.find("warp_factor") != std::string::npos);
        CHECK(msg.find("seeds") != std::string::npos);
        CHECK(msg.find("codebook_size") != std::string::npos);
    }

    SweepSpec dup = small_spec();
    dup.seeds = {1, 1};
    CHECK_THROWS_AS(validate_sweep(dup), ConfigError);

    SweepSpec bad_value = small_spec();
    bad_value.param = "num_users";
    bad_value.values = {"2", "-1"};
    CHECK_THROWS_AS(validate_sweep(bad_value), ConfigError);
    CHECK_THROWS_AS(run_sweep(bad_value), ConfigError);

    CHECK_NOTHROW(validate_sweep(small_spec()));
}

TEST_CASE("sweeps are reproducible across runs and worker counts")
{
    SweepSpec s = small_spec();
    s.workers = 1;
    const SweepResult a = run_sweep(s);
    s.workers = 3;
    const SweepResult b = run_sweep(s);
    REQUIRE(a.rows.size() == 8);
    CHECK(strip_seconds(sweep_csv(a)) == strip_seconds(sweep_csv(b)));

    // (value, algorithm, seed) order.
    CHECK(a.rows[0].value == "30");
    CHECK(a.rows[0].algorithm == Algorithm::Random);
    CHECK(a.rows[1].seed == 2);
    CHECK(a.rows[2].algorithm == Algorithm::Codebook);
    CHECK(a.rows[4].value == "40");
    for (const SweepRow &r : a.rows)
        CHECK_FALSE(r.failed);
}

TEST_CASE("aggregates recompute from the CSV")
{
    const SweepResult res = run_sweep(small_spec());
    const SweepResult parsed = parse_sweep_csv(sweep_csv(res));
    REQUIRE(parsed.rows.size() == res.rows.size());

    std::map<std::pair<std::string, std::string>, std::vector<double>> groups;
    for (const SweepRow &r : parsed.rows)
        groups[{r.value, to_string(r.algorithm)}].push_back(r.feasible ? r.sum_rate : 0.0);

    const auto table = aggregate(parsed);
    CHECK(table.size() == groups.size());
    for (const Aggregate &a : table)
    {
        const auto &g = groups.at({a.value, to_string(a.algorithm)});
        double mean = 0;
        for (double v : g)
            mean += v;
        mean /= g.size();
        double var = 0;
        for (double v : g)
            var += (v - mean) * (v - mean);
        CHECK(a.n == static_cast<int>(g.size()));
        CHECK(std::abs(a.mean - mean) <= 1e-12 * std::max(1.0, std::abs(mean)));
        CHECK(std::abs(a.std - std::sqrt(var / (g.size() - 1))) <= 1e-12);
        CHECK(a.x == std::stod(a.value));
    }
    CHECK_THROWS(parse_sweep_csv("value,algo\n"));
}

TEST_CASE("plot data emission")
{
    SweepResult res;
    res.param = "covert_eps";
    const Algorithm algos[] = {Algorithm::Sca, Algorithm::Pga, Algorithm::Random, Algorithm::Codebook};
    for (int v = 0; v < 5; ++v)
        for (Algorithm a : algos)
            for (int seed = 1; seed <= 3; ++seed)
            {
                SweepRow r;
                r.value = std::to_string(0.05 * (v + 1));
                r.x = 0.05 * (v + 1);
                r.algorithm = a;
                r.seed = seed;
                r.sum_rate = 10.0 + v + seed;
                r.feasible = seed != 3;
                res.rows.push_back(r);
            }
    const auto table = aggregate(res);
    const auto dir = std::filesystem::temp_directory_path() / "simcovert_test_harness";
    std::filesystem::remove_all(dir);
    const auto files = emit_plot_data(table, "eps", dir);
    REQUIRE(files.size() == 4);
    CHECK(files[0].filename() == "eps_sca.dat");
    const std::string first = slurp(files[0]);
    std::istringstream is(first);
    std::string line;
    int rows = 0;
    std::getline(is, line);
    CHECK(line == "# x mean std n");
    while (std::getline(is, line))
    {
        double x, mean, sd;
        int n;
        std::istringstream ls(line);
        const bool parsed = static_cast<bool>(ls >> x >> mean >> sd >> n);
        REQUIRE(parsed);
        CHECK(n == 3);
        CHECK(mean == doctest::Approx((10.0 + rows + 1 + 10.0 + rows + 2) / 3));
        ++rows;
    }
    CHECK(rows == 5);

    emit_plot_data(table, "eps", dir);
    CHECK(slurp(files[0]) == first);
    CHECK_THROWS_AS(emit_plot_data({}, "eps", dir), std::invalid_argument);
    std::filesystem::remove_all(dir);
}

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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "simcovert/config.hpp"

using namespace simcovert;

TEST_CASE("empty config yields the full-size profile")
{
    const SystemConfig cfg = parse_config("");
    CHECK(cfg == paper_profile());
    CHECK(cfg.num_tx_antennas == 6);
    CHECK(cfg.num_users == 3);
    CHECK(cfg.num_wardens == 3);
    CHECK(cfg.num_layers == 5);
    CHECK(cfg.atoms_per_layer == 45);
    CHECK(cfg.wavelength() == doctest::Approx(0.0299792458));
    CHECK(cfg.atom_spacing_x == doctest::Approx(cfg.wavelength()));
    CHECK(cfg.atom_area == doctest::Approx(cfg.wavelength() * cfg.wavelength() / 4));
    CHECK(cfg.sim_thickness_m == doctest::Approx(5 * cfg.wavelength()));
}

TEST_CASE("more users than antennas is rejected")
{
    CHECK_THROWS_AS(parse_config("num_users = 7\nnum_tx_antennas = 6\n"), ConfigError);
}

TEST_CASE("odd 9 x 5 layer of 45 atoms is accepted, even sides are not")
{
    CHECK_NOTHROW(parse_config("atoms_per_layer = 45\natoms_x = 9\natoms_z = 5"));
    CHECK_THROWS_AS(parse_config("atoms_per_layer = 40\natoms_x = 8\natoms_z = 5"), ConfigError);
    CHECK_THROWS_AS(parse_config("atoms_per_layer = 44\natoms_x = 9\natoms_z = 5"), ConfigError);
}

TEST_CASE("violations are reported together")
{
    SystemConfig cfg = paper_profile();
    cfg.num_users = 9;
    cfg.covert_eps = 2.0;
    cfg.armijo_shrink = 1.0;
    const auto v = config_violations(cfg);
    CHECK(v.size() == 3);
    try
    {
        validate_config(cfg);
        FAIL("expected ConfigError");
    }
    catch (const ConfigError &e)
    {
        const std::string what = e.what();
        CHECK(what.find("num_users") != std::string::npos);
        CHECK(what.find("covert_eps") != std::string::npos);
        CHECK(what.find("armijo_shrink") != std::string::npos);
    }
}

TEST_CASE("parse errors name the offending line")
{
    CHECK_THROWS_AS(parse_config("no_such_key = 1"), ConfigError);
    CHECK_THROWS_AS(parse_config("num_users = three"), ConfigError);
    CHECK_THROWS_AS(parse_config("num_users 3"), ConfigError);
    CHECK_THROWS_AS(parse_config("p_max_dbm = 30dB"), ConfigError);
    CHECK_NOTHROW(parse_config("# comment only\n\n  p_max_dbm = 30   # trailing\n"));
}

TEST_CASE("noise power from PSD and bandwidth")
{
    auto dbm = [](double w) { return 10 * std::log10(w * 1e3); };
    CHECK(derive_noise_power(-174, 1e6) == doctest::Approx(3.981e-15).epsilon(1e-3));
    CHECK(dbm(derive_noise_power(-174, 1e6)) == doctest::Approx(-114));
    CHECK(dbm(derive_noise_power(-174, 1)) == doctest::Approx(-174));
    CHECK(dbm(derive_noise_power(-160, 10e6)) == doctest::Approx(-90));
    CHECK(dbm_to_watts(30) == doctest::Approx(1.0));
}

TEST_CASE("serialize and parse round trip")
{
    SystemConfig cfg = desk_profile();
    cfg.p_max_dbm = 33.3;
    cfg.layer_order = LayerOrder::FirstToLast;
    cfg.gain_convention = GainConvention::Amplitude;
    cfg.pga_resolve_each_trial = false;
    cfg.rng_seed = 123456789012345LL;
    CHECK(parse_config(serialize_config(cfg)) == cfg);

    const auto path = std::filesystem::temp_directory_path() / "simcovert_cfg_test.txt";
    std::ofstream(path) << serialize_config(cfg);
    CHECK(load_config(path) == cfg);
    std::filesystem::remove(path);
    CHECK_THROWS(load_config(path));
}

TEST_CASE("profiles and swept keys")
{
    CHECK(profile_by_name("paper") == paper_profile());
    CHECK(profile_by_name("desk") == desk_profile());
    CHECK_THROWS_AS(profile_by_name("huge"), ConfigError);
    const SystemConfig desk = desk_profile();
    CHECK(desk.num_tx_antennas == 4);
    CHECK(desk.atoms_per_layer == 15);
    CHECK(desk.num_layers == 3);
    CHECK_NOTHROW(validate_config(desk));

    SystemConfig cfg = desk;
    set_config_value(cfg, "atoms_x", "7");
    CHECK(cfg.atoms_per_layer == 21);
    set_config_value(cfg, "p_max_dbm", "25");
    CHECK(cfg.p_max_w() == doctest::Approx(dbm_to_watts(25)));
    set_config_value(cfg, "carrier_freq_hz", "20e9");
    CHECK(cfg.atom_spacing_x == doctest::Approx(cfg.wavelength()));
    CHECK_THROWS_AS(set_config_value(cfg, "bogus", "1"), ConfigError);
    const auto keys = config_keys();
    for (const char *k : {"p_max_dbm", "num_tx_antennas", "num_users", "num_wardens", "atoms_x", "covert_eps",
                          "observations", "num_layers"})
        CHECK(std::find(keys.begin(), keys.end(), k) != keys.end());
}

TEST_CASE("derived quantities")
{
    SystemConfig cfg = paper_profile();
    CHECK(cfg.gamma_min() == doctest::Approx(std::exp2(0.1) - 1));
    CHECK(cfg.covert_budget() == doctest::Approx(0.02));
    CHECK(cfg.layer_spacing() == doctest::Approx(cfg.wavelength()));
}

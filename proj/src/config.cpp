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
#include "simcovert/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace simcovert
{

namespace
{

std::string trim(const std::string &s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string &key, const std::string &value)
{
    double out = 0.0;
    const char *first = value.data();
    const char *last = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last)
        throw ConfigError(key + ": not a number: '" + value + "'");
    return out;
}

std::int64_t parse_int(const std::string &key, const std::string &value)
{
    std::int64_t out = 0;
    const char *first = value.data();
    const char *last = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last)
        throw ConfigError(key + ": not an integer: '" + value + "'");
    return out;
}

bool parse_bool(const std::string &key, const std::string &value)
{
    if (value == "true" || value == "1")
        return true;
    if (value == "false" || value == "0")
        return false;
    throw ConfigError(key + ": not a boolean: '" + value + "'");
}

std::string format_double(double v)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

struct Field
{
    std::function<void(SystemConfig &, const std::string &, const std::string &)> set;
    std::function<std::string(const SystemConfig &)> get;
};

template <typename T>
Field int_field(T SystemConfig::*member)
{
    return {[member](SystemConfig &c, const std::string &k, const std::string &v) {
                c.*member = static_cast<T>(parse_int(k, v));
            },
            [member](const SystemConfig &c) { return std::to_string(c.*member); }};
}

Field real_field(double SystemConfig::*member)
{
    return {[member](SystemConfig &c, const std::string &k, const std::string &v) { c.*member = parse_double(k, v); },
            [member](const SystemConfig &c) { return format_double(c.*member); }};
}

// Ordered so that serialization output is stable.
const std::vector<std::pair<std::string, Field>> &fields()
{
    static const std::vector<std::pair<std::string, Field>> table = {
        {"num_tx_antennas", int_field(&SystemConfig::num_tx_antennas)},
        {"num_users", int_field(&SystemConfig::num_users)},
        {"num_wardens", int_field(&SystemConfig::num_wardens)},
        {"num_layers", int_field(&SystemConfig::num_layers)},
        {"atoms_per_layer", int_field(&SystemConfig::atoms_per_layer)},
        {"atoms_x", int_field(&SystemConfig::atoms_x)},
        {"atoms_z", int_field(&SystemConfig::atoms_z)},
        {"carrier_freq_hz", real_field(&SystemConfig::carrier_freq_hz)},
        {"bandwidth_hz", real_field(&SystemConfig::bandwidth_hz)},
        {"noise_psd_dbm_per_hz", real_field(&SystemConfig::noise_psd_dbm_per_hz)},
        {"bs_height_m", real_field(&SystemConfig::bs_height_m)},
        {"service_radius_m", real_field(&SystemConfig::service_radius_m)},
        {"service_center_m",
         {[](SystemConfig &c, const std::string &k, const std::string &v) {
              std::istringstream in(v);
              std::string tok;
              std::vector<double> vals;
              while (in >> tok)
                  vals.push_back(parse_double(k, tok));
              if (vals.size() != 3)
                  throw ConfigError(k + ": expected three numbers");
              c.service_center_m = {vals[0], vals[1], vals[2]};
          },
          [](const SystemConfig &c) {
              return format_double(c.service_center_m[0]) + " " + format_double(c.service_center_m[1]) + " " +
                     format_double(c.service_center_m[2]);
          }}},
        {"p_max_dbm", real_field(&SystemConfig::p_max_dbm)},
        {"covert_eps", real_field(&SystemConfig::covert_eps)},
        {"min_rate_bpshz", real_field(&SystemConfig::min_rate_bpshz)},
        {"observations", int_field(&SystemConfig::observations)},
        {"atom_spacing_x", real_field(&SystemConfig::atom_spacing_x)},
        {"atom_spacing_z", real_field(&SystemConfig::atom_spacing_z)},
        {"atom_area", real_field(&SystemConfig::atom_area)},
        {"sim_thickness_m", real_field(&SystemConfig::sim_thickness_m)},
        {"path_loss_exp", real_field(&SystemConfig::path_loss_exp)},
        {"penalty_mu1", real_field(&SystemConfig::penalty_mu1)},
        {"penalty_mu2", real_field(&SystemConfig::penalty_mu2)},
        {"armijo_alpha0", real_field(&SystemConfig::armijo_alpha0)},
        {"armijo_shrink", real_field(&SystemConfig::armijo_shrink)},
        {"sca_tol", real_field(&SystemConfig::sca_tol)},
        {"ao_tol", real_field(&SystemConfig::ao_tol)},
        {"max_ao_iters", int_field(&SystemConfig::max_ao_iters)},
        {"max_sca_iters", int_field(&SystemConfig::max_sca_iters)},
        {"max_armijo_backtracks", int_field(&SystemConfig::max_armijo_backtracks)},
        {"rng_seed", int_field(&SystemConfig::rng_seed)},
        {"layer_order",
         {[](SystemConfig &c, const std::string &k, const std::string &v) {
              if (v == "last_to_first")
                  c.layer_order = LayerOrder::LastToFirst;
              else if (v == "first_to_last")
                  c.layer_order = LayerOrder::FirstToLast;
              else
                  throw ConfigError(k + ": expected last_to_first or first_to_last");
          },
          [](const SystemConfig &c) {
              return std::string(c.layer_order == LayerOrder::LastToFirst ? "last_to_first" : "first_to_last");
          }}},
        {"gain_convention",
         {[](SystemConfig &c, const std::string &k, const std::string &v) {
              if (v == "power")
                  c.gain_convention = GainConvention::Power;
              else if (v == "amplitude")
                  c.gain_convention = GainConvention::Amplitude;
              else
                  throw ConfigError(k + ": expected power or amplitude");
          },
          [](const SystemConfig &c) {
              return std::string(c.gain_convention == GainConvention::Power ? "power" : "amplitude");
          }}},
        {"pga_resolve_each_trial",
         {[](SystemConfig &c, const std::string &k, const std::string &v) { c.pga_resolve_each_trial = parse_bool(k, v); },
          [](const SystemConfig &c) { return std::string(c.pga_resolve_each_trial ? "true" : "false"); }}},
    };
    return table;
}

const Field *find_field(const std::string &key)
{
    for (const auto &[name, field] : fields())
        if (name == key)
            return &field;
    return nullptr;
}

const std::set<std::string> kWavelengthRelative = {"atom_spacing_x", "atom_spacing_z", "atom_area", "sim_thickness_m"};

} // namespace

double dbm_to_watts(double dbm) { return std::pow(10.0, dbm / 10.0) / 1000.0; }

double derive_noise_power(double noise_psd_dbm_per_hz, double bandwidth_hz)
{
    if (!(bandwidth_hz > 0.0))
        throw ConfigError("bandwidth_hz: must be positive");
    return dbm_to_watts(noise_psd_dbm_per_hz + 10.0 * std::log10(bandwidth_hz));
}

double SystemConfig::noise_power_w() const { return derive_noise_power(noise_psd_dbm_per_hz, bandwidth_hz); }
double SystemConfig::p_max_w() const { return dbm_to_watts(p_max_dbm); }
double SystemConfig::gamma_min() const { return std::exp2(min_rate_bpshz) - 1.0; }

SystemConfig with_wavelength_defaults(SystemConfig cfg)
{
    if (!(cfg.carrier_freq_hz > 0.0))
        return cfg;
    const double lambda = cfg.wavelength();
    if (cfg.atom_spacing_x == 0.0)
        cfg.atom_spacing_x = lambda;
    if (cfg.atom_spacing_z == 0.0)
        cfg.atom_spacing_z = lambda;
    if (cfg.atom_area == 0.0)
        cfg.atom_area = lambda * lambda / 4.0;
    if (cfg.sim_thickness_m == 0.0)
        cfg.sim_thickness_m = 5.0 * lambda;
    return cfg;
}

std::vector<std::string> config_violations(const SystemConfig &c)
{
    std::vector<std::string> out;
    auto require = [&out](bool ok, const std::string &msg) {
        if (!ok)
            out.push_back(msg);
    };
    require(c.num_tx_antennas > 0, "num_tx_antennas: must be positive");
    require(c.num_users > 0, "num_users: must be positive");
    require(c.num_wardens >= 0, "num_wardens: must be non-negative");
    require(c.num_layers > 0, "num_layers: must be positive");
    require(c.atoms_x > 0 && c.atoms_x % 2 == 1, "atoms_x: must be a positive odd integer");
    require(c.atoms_z > 0 && c.atoms_z % 2 == 1, "atoms_z: must be a positive odd integer");
    require(c.atoms_per_layer == c.atoms_x * c.atoms_z, "atoms_per_layer: must equal atoms_x * atoms_z");
    require(c.num_users <= c.num_tx_antennas, "num_users: must not exceed num_tx_antennas");
    require(c.carrier_freq_hz > 0.0, "carrier_freq_hz: must be positive");
    require(c.bandwidth_hz > 0.0, "bandwidth_hz: must be positive");
    require(std::isfinite(c.noise_psd_dbm_per_hz), "noise_psd_dbm_per_hz: must be finite");
    require(c.bs_height_m > 0.0, "bs_height_m: must be positive");
    require(c.service_radius_m > 0.0, "service_radius_m: must be positive");
    require(std::isfinite(c.p_max_dbm), "p_max_dbm: must be finite");
    require(c.covert_eps > 0.0 && c.covert_eps <= 1.0, "covert_eps: must lie in (0, 1]");
    require(c.min_rate_bpshz >= 0.0, "min_rate_bpshz: must be non-negative");
    require(c.observations > 0, "observations: must be positive");
    require(c.atom_spacing_x > 0.0, "atom_spacing_x: must be positive");
    require(c.atom_spacing_z > 0.0, "atom_spacing_z: must be positive");
    require(c.atom_area > 0.0, "atom_area: must be positive");
    require(c.sim_thickness_m > 0.0, "sim_thickness_m: must be positive");
    require(c.path_loss_exp > 0.0, "path_loss_exp: must be positive");
    require(c.penalty_mu1 > 0.0, "penalty_mu1: must be positive");
    require(c.penalty_mu2 > 0.0, "penalty_mu2: must be positive");
    require(c.armijo_alpha0 > 0.0, "armijo_alpha0: must be positive");
    require(c.armijo_shrink > 0.0 && c.armijo_shrink < 1.0, "armijo_shrink: must lie in (0, 1)");
    require(c.sca_tol > 0.0, "sca_tol: must be positive");
    require(c.ao_tol > 0.0, "ao_tol: must be positive");
    require(c.max_ao_iters > 0, "max_ao_iters: must be positive");
    require(c.max_sca_iters > 0, "max_sca_iters: must be positive");
    require(c.max_armijo_backtracks > 0, "max_armijo_backtracks: must be positive");
    return out;
}

void validate_config(const SystemConfig &cfg)
{
    const auto errors = config_violations(cfg);
    if (errors.empty())
        return;
    std::string msg = "invalid configuration:";
    for (const auto &e : errors)
        msg += "\n  " + e;
    throw ConfigError(msg);
}

SystemConfig parse_config(const std::string &text, const SystemConfig &base)
{
    SystemConfig cfg = base;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line))
    {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const Field *field = find_field(key);
        if (field == nullptr)
            throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        if (!seen.insert(key).second)
            throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        field->set(cfg, key, value);
    }
    // A new carrier re-derives the wavelength-relative geometry that the file
    // did not pin explicitly.
    if (seen.count("carrier_freq_hz"))
        for (const auto &key : kWavelengthRelative)
            if (!seen.count(key))
                find_field(key)->set(cfg, key, "0");
    cfg = with_wavelength_defaults(cfg);
    validate_config(cfg);
    return cfg;
}

SystemConfig load_config(const std::filesystem::path &path, const SystemConfig &base)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path.string() + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), base);
}

std::string serialize_config(const SystemConfig &cfg)
{
    std::string out;
    for (const auto &[name, field] : fields())
        out += name + " = " + field.get(cfg) + "\n";
    return out;
}

SystemConfig paper_profile() { return with_wavelength_defaults(SystemConfig{}); }

SystemConfig desk_profile()
{
    SystemConfig cfg;
    cfg.num_tx_antennas = 4;
    cfg.num_users = 2;
    cfg.num_wardens = 1;
    cfg.num_layers = 3;
    cfg.atoms_x = 5;
    cfg.atoms_z = 3;
    cfg.atoms_per_layer = 15;
    return with_wavelength_defaults(cfg);
}

SystemConfig profile_by_name(const std::string &name)
{
    if (name == "paper")
        return paper_profile();
    if (name == "desk")
        return desk_profile();
    throw ConfigError("unknown profile '" + name + "' (expected desk or paper)");
}

std::vector<std::string> config_keys()
{
    std::vector<std::string> keys;
    for (const auto &[name, field] : fields())
        keys.push_back(name);
    return keys;
}

void set_config_value(SystemConfig &cfg, const std::string &key, const std::string &value)
{
    const Field *field = find_field(key);
    if (field == nullptr)
        throw ConfigError("unknown key '" + key + "'");
    field->set(cfg, key, value);
    if (key == "atoms_x" || key == "atoms_z")
        cfg.atoms_per_layer = cfg.atoms_x * cfg.atoms_z;
    if (key == "carrier_freq_hz")
    {
        cfg.atom_spacing_x = cfg.atom_spacing_z = cfg.atom_area = cfg.sim_thickness_m = 0.0;
        cfg = with_wavelength_defaults(cfg);
    }
}

} // namespace simcovert

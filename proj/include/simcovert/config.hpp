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

#include <array>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace simcovert
{

// Order in which the per-layer phase subproblems are visited in one AO pass.
enum class LayerOrder
{
    LastToFirst,
    FirstToLast,
};

// How beta = beta0 * r^-eta enters the channel. Power: |[h]_n|^2 = beta.
// Amplitude: |[h]_n| = beta, which leaves every full-size instance far below
// the QoS floor (matched-filter SNR around 1e-4 at 40 dBm).
enum class GainConvention
{
    Power,
    Amplitude,
};

// Every scalar knob of a run. Lengths are meters, powers dBm unless noted.
struct SystemConfig
{
    int num_tx_antennas = 6;
    int num_users = 3;
    int num_wardens = 3;
    int num_layers = 5;
    int atoms_per_layer = 45;
    int atoms_x = 9;
    int atoms_z = 5;

    double carrier_freq_hz = 10e9;
    double bandwidth_hz = 1e6;
    double noise_psd_dbm_per_hz = -174.0;
    double bs_height_m = 5.0;
    double service_radius_m = 10.0;
    std::array<double, 3> service_center_m = {10.0, 10.0, 0.0};
    double p_max_dbm = 40.0;
    double covert_eps = 0.1;
    double min_rate_bpshz = 0.1;
    int observations = 10;

    // Wavelength-relative defaults (dx = dz = lambda, A = lambda^2/4,
    // thickness = 5 lambda) are filled in by with_wavelength_defaults().
    double atom_spacing_x = 0.0;
    double atom_spacing_z = 0.0;
    double atom_area = 0.0;
    double sim_thickness_m = 0.0;
    double path_loss_exp = 2.5;

    double penalty_mu1 = 10.0;
    double penalty_mu2 = 100.0;
    double armijo_alpha0 = 1.0;
    double armijo_shrink = 0.5;
    double sca_tol = 1e-4;
    double ao_tol = 1e-4;
    int max_ao_iters = 50;
    int max_sca_iters = 10;
    int max_armijo_backtracks = 30;
    std::int64_t rng_seed = 1;

    LayerOrder layer_order = LayerOrder::LastToFirst;
    GainConvention gain_convention = GainConvention::Power;
    // True re-solves the beamformers for every Armijo trial step.
    // When false, the beamformers are re-solved once per outer PGA iteration.
    bool pga_resolve_each_trial = true;

    // Derived quantities; all are pure functions of the fields above.
    double wavelength() const { return 299792458.0 / carrier_freq_hz; }
    double layer_spacing() const { return sim_thickness_m / num_layers; }
    double noise_power_w() const;
    double p_max_w() const;
    double gamma_min() const;
    double covert_budget() const { return 2.0 * covert_eps * covert_eps; }

    bool operator==(const SystemConfig &) const = default;
};

// Reports every violated invariant, one "field: reason" entry per line.
class ConfigError : public std::runtime_error
{
public:
    explicit ConfigError(const std::string &what) : std::runtime_error(what) {}
};

// Fills the zero-valued wavelength-relative fields.
SystemConfig with_wavelength_defaults(SystemConfig cfg);

std::vector<std::string> config_violations(const SystemConfig &cfg);
void validate_config(const SystemConfig &cfg);

// Flat "key = value" text; '#' starts a comment. Keys are the field names
// above; unknown keys and malformed values are errors. Missing keys keep the
// value of `base`, which defaults to the full-size profile.
SystemConfig parse_config(const std::string &text, const SystemConfig &base = SystemConfig{});
SystemConfig load_config(const std::filesystem::path &path, const SystemConfig &base = SystemConfig{});
std::string serialize_config(const SystemConfig &cfg);

// Full-size scenario.
SystemConfig paper_profile();
// Scaled-down scenario used for seed sweeps: M=4, 5x3 atoms, L=3, K=2, U=1.
SystemConfig desk_profile();
SystemConfig profile_by_name(const std::string &name);

// sigma^2 in watts from a noise PSD in dBm/Hz and a bandwidth in Hz.
double derive_noise_power(double noise_psd_dbm_per_hz, double bandwidth_hz);
double dbm_to_watts(double dbm);

// Names accepted as a swept parameter. Integer-valued fields are rounded.
std::vector<std::string> config_keys();
void set_config_value(SystemConfig &cfg, const std::string &key, const std::string &value);

} // namespace simcovert

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

// SIM diffraction matrices, cascaded response and near-field channels.
//
// Index conventions used throughout:
//   * layers are 0-based, layer 0 is the one next to the antenna array;
//   * atom n in [0, N) corresponds to the Kronecker index of a^x (x) a^z,
//     i.e. n = ix * N_z + iz with ix, iz the offsets from -N~ (see
//     near_field_channel);
//   * the inter-layer and antenna-to-layer distances are the closed forms
//     evaluated on the 1-based linear index n + 1.

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "simcovert/config.hpp"
#include "simcovert/placement.hpp"
#include "simcovert/types.hpp"

namespace simcovert
{

struct SimGeometry
{
    int num_antennas = 0;
    int num_layers = 0;
    int atoms_x = 0;
    int atoms_z = 0;
    double layer_spacing = 0.0;
    double wavelength = 0.0;
    double atom_area = 0.0;
    double spacing_x = 0.0;
    double spacing_z = 0.0;
    double path_loss_exp = 0.0;
    GainConvention gain_convention = GainConvention::Power;

    int num_atoms() const { return atoms_x * atoms_z; }
    int max_side() const { return std::max(atoms_x, atoms_z); }

    static SimGeometry from_config(const SystemConfig &cfg)
    {
        SimGeometry g;
        g.num_antennas = cfg.num_tx_antennas;
        g.num_layers = cfg.num_layers;
        g.atoms_x = cfg.atoms_x;
        g.atoms_z = cfg.atoms_z;
        g.layer_spacing = cfg.layer_spacing();
        g.wavelength = cfg.wavelength();
        g.atom_area = cfg.atom_area;
        g.spacing_x = cfg.atom_spacing_x;
        g.spacing_z = cfg.atom_spacing_z;
        g.path_loss_exp = cfg.path_loss_exp;
        g.gain_convention = cfg.gain_convention;
        return g;
    }
};

// Distance between atom `to` of layer l and atom `from` of layer l-1.
inline double inter_layer_distance(int to, int from, const SimGeometry &g)
{
    const int n = g.num_atoms();
    if (to < 0 || to >= n || from < 0 || from >= n)
        throw std::out_of_range("inter_layer_distance: atom index out of range");
    const int diff = std::abs(to - from);
    const int nmax = g.max_side();
    const double rows = diff / nmax;
    const double cols = diff % nmax;
    const double lam = g.wavelength;
    return std::sqrt(g.layer_spacing * g.layer_spacing + lam * lam * (rows * rows + cols * cols));
}

// Distance from transmit antenna `antenna` (0-based) to atom `atom` of the
// first layer.
inline double antenna_distance(int atom, int antenna, const SimGeometry &g)
{
    if (atom < 0 || atom >= g.num_atoms() || antenna < 0 || antenna >= g.num_antennas)
        throw std::out_of_range("antenna_distance: index out of range");
    const int nmax = g.max_side();
    const int n1 = atom + 1;
    const int m1 = antenna + 1;
    const double half = (1.0 + nmax) / 2.0;
    const double dx = (static_cast<double>((n1 - 1) % nmax) - half) - (m1 - (1.0 + g.num_antennas) / 2.0);
    const double dz = static_cast<double>((n1 + nmax - 1) / nmax) - half;
    const double lam = g.wavelength;
    return std::sqrt(g.layer_spacing * g.layer_spacing + lam * lam * dx * dx + lam * lam * dz * dz);
}

// Rayleigh-Sommerfeld coefficient w = (A cos(chi) / r) (1/(2 pi r) - j/lambda) e^{j 2 pi r / lambda}.
template <typename Real>
Complex<Real> propagation_coeff(Real r, Real cos_chi, Real area, Real wavelength)
{
    if (!(r > Real(0)))
        throw std::domain_error("propagation_coeff: distance must be positive");
    const Real two_pi = 2 * kPi<Real>;
    const Complex<Real> bracket(Real(1) / (two_pi * r), -Real(1) / wavelength);
    return (area * cos_chi / r) * bracket * std::polar(Real(1), two_pi * r / wavelength);
}

template <typename Real>
struct SimStack
{
    CMatrix<Real> first;              // N x M, antennas -> layer 0
    std::vector<CMatrix<Real>> inner; // L-1 matrices N x N, layer l-1 -> layer l
    SimGeometry geometry;

    int num_layers() const { return static_cast<int>(inner.size()) + 1; }
    int num_atoms() const { return static_cast<int>(first.rows()); }
    int num_antennas() const { return static_cast<int>(first.cols()); }

    // Matrix feeding layer l (W^{l+1} in 1-based notation).
    const CMatrix<Real> &feed(int l) const { return l == 0 ? first : inner[l - 1]; }
};

template <typename Real = double>
SimStack<Real> build_sim_stack(const SimGeometry &g)
{
    const int n = g.num_atoms();
    const int m = g.num_antennas;
    const Real area = static_cast<Real>(g.atom_area);
    const Real lam = static_cast<Real>(g.wavelength);
    const Real d = static_cast<Real>(g.layer_spacing);

    SimStack<Real> stack;
    stack.geometry = g;
    stack.first.resize(n, m);
    for (int a = 0; a < n; ++a)
        for (int t = 0; t < m; ++t)
        {
            const Real r = static_cast<Real>(antenna_distance(a, t, g));
            stack.first(a, t) = propagation_coeff<Real>(r, d / r, area, lam);
        }

    CMatrix<Real> between(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
        {
            const Real r = static_cast<Real>(inter_layer_distance(a, b, g));
            between(a, b) = propagation_coeff<Real>(r, d / r, area, lam);
        }
    stack.inner.assign(g.num_layers - 1, between);
    return stack;
}

template <typename Real = double>
SimStack<Real> build_sim_stack(const SystemConfig &cfg)
{
    return build_sim_stack<Real>(SimGeometry::from_config(cfg));
}

template <typename Real>
Real wrap_phase(Real theta)
{
    const Real two_pi = 2 * kPi<Real>;
    Real w = std::fmod(theta, two_pi);
    if (w < 0)
        w += two_pi;
    if (w >= two_pi)
        w = 0;
    return w;
}

// Per-layer phase angles in [0, 2 pi) with their unit-modulus phasors cached.
template <typename Real>
class PhaseState
{
public:
    PhaseState() = default;
    PhaseState(int layers, int atoms) : theta_(layers, RVector<Real>::Zero(atoms)), phasor_(layers, CVector<Real>::Ones(atoms)) {}

    static PhaseState random(int layers, int atoms, Rng &rng)
    {
        PhaseState s(layers, atoms);
        std::uniform_real_distribution<double> dist(0.0, 2.0 * kPi<double>);
        for (int l = 0; l < layers; ++l)
        {
            RVector<Real> t(atoms);
            for (int n = 0; n < atoms; ++n)
                t(n) = static_cast<Real>(dist(rng));
            s.set_layer(l, t);
        }
        return s;
    }

    int num_layers() const { return static_cast<int>(theta_.size()); }
    int num_atoms() const { return theta_.empty() ? 0 : static_cast<int>(theta_.front().size()); }

    const RVector<Real> &theta(int l) const { return theta_.at(l); }
    const CVector<Real> &phasor(int l) const { return phasor_.at(l); }

    void set_layer(int l, const RVector<Real> &theta)
    {
        if (theta.size() != num_atoms())
            throw DimensionError("PhaseState::set_layer: wrong atom count");
        RVector<Real> &t = theta_.at(l);
        CVector<Real> &p = phasor_.at(l);
        for (Eigen::Index n = 0; n < theta.size(); ++n)
        {
            t(n) = wrap_phase(theta(n));
            p(n) = std::polar(Real(1), t(n));
        }
    }

    // Takes the angle of each entry; magnitudes are ignored.
    void set_layer_from_phasor(int l, const CVector<Real> &phi)
    {
        RVector<Real> t(phi.size());
        for (Eigen::Index n = 0; n < phi.size(); ++n)
            t(n) = std::arg(phi(n));
        set_layer(l, t);
    }

    // theta + step * direction, wrapped, for every layer.
    PhaseState stepped(const std::vector<RVector<Real>> &direction, Real step) const
    {
        PhaseState out = *this;
        for (int l = 0; l < num_layers(); ++l)
            out.set_layer(l, theta_[l] + step * direction.at(l));
        return out;
    }

    bool operator==(const PhaseState &o) const { return theta_ == o.theta_; }

private:
    std::vector<RVector<Real>> theta_;
    std::vector<CVector<Real>> phasor_;
};

template <typename Real>
void check_consistent(const SimStack<Real> &stack, const PhaseState<Real> &phases)
{
    if (stack.num_layers() != phases.num_layers() || stack.num_atoms() != phases.num_atoms())
        throw DimensionError("SIM stack and phase state disagree on layers/atoms");
}

// G = Theta^L W^L ... Theta^1 W^1, evaluated right to left.
template <typename Real>
CMatrix<Real> sim_response(const SimStack<Real> &stack, const PhaseState<Real> &phases)
{
    check_consistent(stack, phases);
    CMatrix<Real> g = phases.phasor(0).asDiagonal() * stack.first;
    for (int l = 1; l < stack.num_layers(); ++l)
        g = phases.phasor(l).asDiagonal() * (stack.inner[l - 1] * g);
    return g;
}

template <typename Real>
struct SplitResponse
{
    CMatrix<Real> left;  // N x N, identity for the output layer
    CMatrix<Real> right; // N x M, W^1 for the first layer
};

// G = left * diag(phi_l) * right.
template <typename Real>
SplitResponse<Real> split_response(const SimStack<Real> &stack, const PhaseState<Real> &phases, int layer)
{
    check_consistent(stack, phases);
    const int layers = stack.num_layers();
    if (layer < 0 || layer >= layers)
        throw std::out_of_range("split_response: layer index out of range");
    SplitResponse<Real> out;
    out.right = stack.first;
    for (int l = 1; l <= layer; ++l)
        out.right = stack.inner[l - 1] * (phases.phasor(l - 1).asDiagonal() * out.right);
    const int n = stack.num_atoms();
    out.left = CMatrix<Real>::Identity(n, n);
    for (int l = layer + 1; l < layers; ++l)
        out.left = phases.phasor(l).asDiagonal() * (stack.inner[l - 1] * out.left);
    return out;
}

// h_tilde = diag(h^H G_L) G_R v, so that h^H G v = phi^T h_tilde.
template <typename Real>
CVector<Real> effective_phase_channel(const CVector<Real> &h, const CMatrix<Real> &left, const CMatrix<Real> &right,
                                      const CVector<Real> &v)
{
    if (h.size() != left.rows() || left.cols() != right.rows() || right.cols() != v.size())
        throw DimensionError("effective_phase_channel: inconsistent dimensions");
    const CVector<Real> row = left.transpose() * h.conjugate();
    return row.cwiseProduct(right * v);
}

template <typename Real>
Real reference_path_gain(Real wavelength)
{
    const Real q = wavelength / (4 * kPi<Real>);
    return q * q;
}

// Per-entry channel magnitude |[h]_n| for a node at distance r.
template <typename Real>
Real channel_amplitude(Real r, const SimGeometry &g)
{
    const Real beta = reference_path_gain(static_cast<Real>(g.wavelength)) * std::pow(r, -static_cast<Real>(g.path_loss_exp));
    return g.gain_convention == GainConvention::Power ? std::sqrt(beta) : beta;
}

// USW near-field LoS channel from the output layer to a node.
template <typename Real = double>
CVector<Real> near_field_channel(const Node &node, const SimGeometry &g)
{
    if (!(node.r > 0.0))
        throw std::domain_error("near_field_channel: node distance must be positive");
    const Real lam = static_cast<Real>(g.wavelength);
    const Real r = static_cast<Real>(node.r);
    const Real k0 = 2 * kPi<Real> / lam;
    const Real cos_az = std::cos(static_cast<Real>(node.azimuth));
    const Real sin_el = std::sin(static_cast<Real>(node.elevation));
    const Real cos_el = std::cos(static_cast<Real>(node.elevation));
    const Real dx = static_cast<Real>(g.spacing_x);
    const Real dz = static_cast<Real>(g.spacing_z);
    // Offsets centered on the array; integers for the odd sizes of the model.
    const Real half_x = static_cast<Real>(g.atoms_x - 1) / 2;
    const Real half_z = static_cast<Real>(g.atoms_z - 1) / 2;

    CVector<Real> ax(g.atoms_x), az(g.atoms_z);
    for (int i = 0; i < g.atoms_x; ++i)
    {
        const Real nx = static_cast<Real>(i) - half_x;
        const Real path = -nx * dx * cos_az * sin_el + nx * nx * dx * dx * (1 - cos_az * cos_az * sin_el * sin_el) / (2 * r);
        ax(i) = std::polar(Real(1), -k0 * path);
    }
    for (int i = 0; i < g.atoms_z; ++i)
    {
        const Real nz = static_cast<Real>(i) - half_z;
        const Real path = -nz * dz * cos_el + nz * nz * dz * dz * sin_el * sin_el / (2 * r);
        az(i) = std::polar(Real(1), -k0 * path);
    }
    const Complex<Real> common = channel_amplitude(r, g) * std::polar(Real(1), -k0 * r);
    CVector<Real> h(g.num_atoms());
    for (int i = 0; i < g.atoms_x; ++i)
        for (int j = 0; j < g.atoms_z; ++j)
            h(i * g.atoms_z + j) = common * ax(i) * az(j);
    return h;
}

template <typename Real>
struct ChannelSet
{
    std::vector<CVector<Real>> users;
    std::vector<CVector<Real>> wardens;
    std::vector<Real> user_gain;   // |[h_k]_n|
    std::vector<Real> warden_gain; // |[h_u]_n|

    int num_users() const { return static_cast<int>(users.size()); }
    int num_wardens() const { return static_cast<int>(wardens.size()); }
};

template <typename Real = double>
ChannelSet<Real> build_channels(const Placement &placement, const SimGeometry &g)
{
    ChannelSet<Real> out;
    for (const Node &node : placement.users)
    {
        out.users.push_back(near_field_channel<Real>(node, g));
        out.user_gain.push_back(channel_amplitude(static_cast<Real>(node.r), g));
    }
    for (const Node &node : placement.wardens)
    {
        out.wardens.push_back(near_field_channel<Real>(node, g));
        out.warden_gain.push_back(channel_amplitude(static_cast<Real>(node.r), g));
    }
    return out;
}

// Converts every array of a model to another scalar type.
template <typename To, typename From>
SimStack<To> cast_stack(const SimStack<From> &s)
{
    SimStack<To> out;
    out.geometry = s.geometry;
    out.first = s.first.template cast<Complex<To>>();
    for (const auto &w : s.inner)
        out.inner.push_back(w.template cast<Complex<To>>());
    return out;
}

template <typename To, typename From>
ChannelSet<To> cast_channels(const ChannelSet<From> &c)
{
    ChannelSet<To> out;
    for (const auto &h : c.users)
        out.users.push_back(h.template cast<Complex<To>>());
    for (const auto &h : c.wardens)
        out.wardens.push_back(h.template cast<Complex<To>>());
    for (auto b : c.user_gain)
        out.user_gain.push_back(static_cast<To>(b));
    for (auto b : c.warden_gain)
        out.warden_gain.push_back(static_cast<To>(b));
    return out;
}

template <typename To, typename From>
PhaseState<To> cast_phases(const PhaseState<From> &p)
{
    PhaseState<To> out(p.num_layers(), p.num_atoms());
    for (int l = 0; l < p.num_layers(); ++l)
        out.set_layer(l, p.theta(l).template cast<To>());
    return out;
}

} // namespace simcovert

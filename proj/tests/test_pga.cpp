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
#include <numbers>
#include <random>

#include "simcovert/ao.hpp"
#include "simcovert/pga.hpp"

using namespace simcovert;

namespace
{

struct Point
{
    SystemConfig cfg;
    Scenario sc;
    PhaseState<double> phases;
    CMatrix<double> v;

    explicit Point(int seed, double power = 1e-3) : cfg(desk_profile()), sc(build_scenario(cfg, seed))
    {
        Rng rng(seed);
        phases = PhaseState<double>::random(cfg.num_layers, cfg.atoms_per_layer, rng);
        std::normal_distribution<double> n;
        v.resize(cfg.num_tx_antennas, cfg.num_users);
        for (Eigen::Index i = 0; i < v.size(); ++i)
            v(i) = {n(rng), n(rng)};
        v *= power / v.norm();
    }
};

} // namespace

TEST_CASE("penalty objective")
{
    Point p(1, 1e-9);
    // Loosen the covertness budget and the QoS floor until both hold strictly.
    p.cfg.covert_eps = 1.0;
    p.cfg.observations = 1;
    p.cfg.min_rate_bpshz = 0.0;
    const auto t = penalty_terms(p.sc.channels, p.sc.stack, p.phases, p.v, p.cfg);
    const LinkReport r = link_report(p.sc.channels, sim_response(p.sc.stack, p.phases), p.v, p.cfg);
    REQUIRE(r.divergence[0] < 2.0);
    CHECK(t.qos == 0.0);
    CHECK(t.covert == 0.0);
    CHECK(t.value == doctest::Approx(r.sum_rate).epsilon(1e-12));

    // V = 0: both rates vanish, so each user is gamma_min short; the penalty
    // lowers F (the violated-QoS term is subtracted).
    Point z(2);
    const CMatrix<double> zero = CMatrix<double>::Zero(z.v.rows(), z.v.cols());
    const double gmin = z.cfg.gamma_min();
    CHECK(penalty_objective(z.sc.channels, z.sc.stack, z.phases, zero, z.cfg) ==
          doctest::Approx(-z.cfg.penalty_mu1 * z.cfg.num_users * gmin * gmin));
}

TEST_CASE("partials vanish for zero beamformers")
{
    Point p(3);
    const double noise = p.cfg.noise_power_w();
    CMatrix<double> v = p.v;
    v.col(0).setZero();
    const CMatrix<double> g = sim_response(p.sc.stack, p.phases);
    const CMatrix<double> ua = user_gains(p.sc.channels, g, v);
    for (int l = 0; l < p.cfg.num_layers; ++l)
    {
        const LayerTerms<double> t = layer_terms(p.sc.channels, p.sc.stack, p.phases, v, l);
        for (int n = 0; n < p.cfg.atoms_per_layer; ++n)
            CHECK(psi(ua(0, 0), t.phasor(n), t.user_row(0, n), t.right(n, 0)) == 0.0);
    }
    const CMatrix<double> zero = CMatrix<double>::Zero(v.rows(), v.cols());
    const CMatrix<double> wa = warden_gains(p.sc.channels, g, zero);
    const LayerTerms<double> t = layer_terms(p.sc.channels, p.sc.stack, p.phases, zero, 0);
    for (int n = 0; n < p.cfg.atoms_per_layer; ++n)
        CHECK(covert_partial(wa, noise, t, 0, n) == 0.0);
}

TEST_CASE("rank-one shortcut equals the dense E_nn sandwich")
{
    Point p(4);
    const CMatrix<double> g = sim_response(p.sc.stack, p.phases);
    const CMatrix<double> ua = user_gains(p.sc.channels, g, p.v);
    const int atoms = p.cfg.atoms_per_layer;
    for (int l = 0; l < p.cfg.num_layers; ++l)
    {
        const SplitResponse<double> s = split_response(p.sc.stack, p.phases, l);
        const LayerTerms<double> t = layer_terms(p.sc.channels, p.sc.stack, p.phases, p.v, l);
        for (int n = 0; n < atoms; ++n)
        {
            CMatrix<double> e = CMatrix<double>::Zero(atoms, atoms);
            e(n, n) = 1.0;
            for (int k = 0; k < p.cfg.num_users; ++k)
                for (int i = 0; i < p.cfg.num_users; ++i)
                {
                    const Complex<double> dense = (p.sc.channels.users[k].adjoint() * s.left * e *
                                                   p.phases.phasor(l).asDiagonal() * s.right * p.v.col(i))(0);
                    const double expected = std::imag(std::conj(ua(k, i)) * dense);
                    const double got = psi(ua(k, i), t.phasor(n), t.user_row(k, n), t.right(n, i));
                    CHECK(std::abs(got - expected) <= 1e-12 * std::max(1e-300, std::abs(ua(k, i)) * std::abs(dense)));
                }
        }
    }
}

TEST_CASE("inactive penalties leave the pure rate gradient")
{
    Point p(5, 1e-9);
    p.cfg.covert_eps = 1.0;
    p.cfg.observations = 1;
    p.cfg.min_rate_bpshz = 0.0;
    const GradientField<double> gf = full_gradient(p.sc.channels, p.sc.stack, p.phases, p.v, p.cfg);
    const double noise = p.cfg.noise_power_w();
    for (int l = 0; l < p.cfg.num_layers; ++l)
    {
        const LayerTerms<double> t = layer_terms(p.sc.channels, p.sc.stack, p.phases, p.v, l);
        for (int n = 0; n < p.cfg.atoms_per_layer; ++n)
        {
            double rate = 0;
            for (int k = 0; k < p.cfg.num_users; ++k)
                rate += sinr_partial(gf.user_amp, noise, t, k, n) /
                        (std::numbers::ln2 * (1 + sinr_from_gains(gf.user_amp, noise, k)));
            CHECK(gf.partials[l](n) == doctest::Approx(rate).epsilon(1e-12));
        }
    }
}

TEST_CASE("gradient normalization")
{
    GradientField<double> gf;
    gf.partials = {RVector<double>(3), RVector<double>(3)};
    gf.partials[0] << 0.1, -4.0, 2.0;
    gf.partials[1] << 1.0, 0.0, 3.0;
    bool zero = true;
    const auto n = normalize_gradient(gf, &zero);
    CHECK_FALSE(zero);
    CHECK(n.max_abs() == doctest::Approx(std::numbers::pi));
    CHECK(n.partials[0](1) == doctest::Approx(-std::numbers::pi));

    GradientField<double> flat;
    flat.partials = {RVector<double>::Constant(4, 0.25)};
    const auto scaled = normalize_gradient(flat);
    for (double x : scaled.partials[0])
        CHECK(x == doctest::Approx(std::numbers::pi));

    GradientField<double> none;
    none.partials = {RVector<double>::Zero(4)};
    const auto same = normalize_gradient(none, &zero);
    CHECK(zero);
    CHECK(same.partials[0].isZero());

    GradientField<double> bad;
    bad.partials = {RVector<double>::Constant(2, std::nan(""))};
    CHECK_THROWS_AS(normalize_gradient(bad), std::domain_error);
}

TEST_CASE("Armijo step on a toy objective")
{
    struct Eval
    {
        double value;
    };
    RVector<double> target(4);
    target << 0.5, 1.0, 4.0, 6.0;
    auto toy = [&](const PhaseState<double> &p) {
        double v = 0;
        for (int n = 0; n < 4; ++n)
            v -= std::pow(p.theta(0)(n) - target(n), 2);
        return Eval{v};
    };
    PhaseState<double> p(1, 4);
    RVector<double> start(4);
    start << 1.0, 2.0, 3.0, 4.0;
    p.set_layer(0, start);
    PenaltyConfig pc;
    pc.validate();

    for (int it = 0; it < 10; ++it)
    {
        GradientField<double> gf;
        gf.partials = {RVector<double>(-2 * (p.theta(0) - target))};
        const double before = toy(p).value;
        const auto step = armijo_phase_step(p, normalize_gradient(gf), before, toy, pc);
        CHECK(step.value >= before);
        CHECK(step.backtracks <= pc.max_backtracks);
        for (double t : step.phases.theta(0))
        {
            CHECK(t >= 0.0);
            CHECK(t < 2 * std::numbers::pi);
        }
        p = step.phases;
    }

    GradientField<double> flat;
    flat.partials = {RVector<double>::Zero(4)};
    const auto still = armijo_phase_step(p, flat, toy(p).value, toy, pc);
    CHECK_FALSE(still.moved);
    CHECK(still.phases == p);

    PenaltyConfig bad = pc;
    bad.shrink = 1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

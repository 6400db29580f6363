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
#include "simcovert/sca.hpp"

using namespace simcovert;

namespace
{

Scenario single_user(double p_max_dbm, int seed)
{
    SystemConfig cfg = desk_profile();
    cfg.num_users = 1;
    cfg.num_wardens = 0;
    cfg.p_max_dbm = p_max_dbm;
    return build_scenario(cfg, seed);
}

} // namespace

TEST_CASE("tau bound")
{
    CHECK(tau_bound(0.0, 10) == 1.0);
    const double t = tau_bound(0.1, 10);
    CHECK(t == doctest::Approx(1.0647).epsilon(1e-4));
    CHECK(t - std::log(t) - 1 == doctest::Approx(0.002).epsilon(1e-9));
    CHECK(tau_bound(0.1, 1) > t);
    CHECK_THROWS_AS(tau_bound(-0.1, 10), std::domain_error);
    CHECK_THROWS_AS(tau_bound(1.5, 10), std::domain_error);
    CHECK_THROWS_AS(tau_bound(0.1, 0), std::domain_error);
}

TEST_CASE("Taylor minorant")
{
    const Complex<double> a(0.8, -0.3);
    const double d0 = 2.5;
    CHECK(taylor_minorant_value(a, d0, a, d0) == doctest::Approx(std::norm(a) / d0).epsilon(1e-15));
    CHECK_THROWS_AS(taylor_minorant_value(a, 0.0, a, d0), std::domain_error);
    CHECK_THROWS_AS(taylor_minorant_value(a, -1.0, a, d0), std::domain_error);

    CVector<double> w(3);
    w << Complex<double>(1, 2), Complex<double>(-0.5, 0.1), Complex<double>(0, -1);
    const conic::ComplexExpr num = linear_form(w, 0, 3);
    const conic::LinExpr zero = taylor_minorant(Complex<double>(0, 0), 1.7, num, conic::LinExpr::var(6));
    std::mt19937_64 rng(1);
    std::normal_distribution<double> n;
    for (int i = 0; i < 20; ++i)
    {
        Eigen::VectorXd x(7);
        for (auto &e : x)
            e = n(rng);
        CHECK(zero.eval(x) == 0.0);
        // linear_form evaluates sum_n w_n z_n.
        Complex<double> direct = 0;
        for (int k = 0; k < 3; ++k)
            direct += w(k) * Complex<double>(x(k), x(3 + k));
        CHECK(num.re.eval(x) == doctest::Approx(direct.real()));
        CHECK(num.im.eval(x) == doctest::Approx(direct.imag()));
    }
}

TEST_CASE("unit-modulus projection")
{
    CVector<double> phi(3);
    phi << std::polar(0.5, std::numbers::pi / 3), Complex<double>(0, 0), std::polar(1.0, 2.0);
    const CVector<double> p = project_unit_modulus(phi);
    CHECK(std::abs(p(0) - std::polar(1.0, std::numbers::pi / 3)) < 1e-15);
    CHECK(p(1) == Complex<double>(1, 0));
    CHECK(std::abs(p(2) - phi(2)) <= 1e-15);
    CHECK((project_unit_modulus(p) - p).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("merit ordering")
{
    const Merit feasible{10.0, 0.0, true}, better{10.5, 0.0, true}, infeasible{20.0, 0.3, false},
        closer{5.0, 0.1, false};
    CHECK(not_worse(better, feasible));
    CHECK(not_worse(feasible, feasible));
    CHECK_FALSE(not_worse(feasible, better));
    CHECK_FALSE(not_worse(infeasible, feasible));
    CHECK(not_worse(feasible, infeasible));
    CHECK(not_worse(closer, infeasible));
    CHECK_FALSE(not_worse(infeasible, closer));
}

TEST_CASE("single user at high power: beamformer matches the closed form")
{
    const Scenario sc = single_user(60.0, 3);
    Rng rng = algorithm_rng(3);
    const InitialState init = init_state(sc.cfg, sc.channels, sc.stack, rng);
    const CMatrix<double> g = sim_response(sc.stack, init.phases);
    const BeamfocusingResult bf = converge_beamfocusing(sc.channels, g, init.beamformers, sc.cfg);
    const CVector<double> eff = g.adjoint() * sc.channels.users[0];
    const double achieved = std::norm((sc.channels.users[0].adjoint() * g * bf.v)(0));
    CHECK(achieved == doctest::Approx(eff.squaredNorm() * sc.cfg.p_max_w()).epsilon(1e-6));
    CHECK(bf.merit.feasible);
}

TEST_CASE("unreachable QoS floor is reported infeasible by the solver")
{
    Scenario sc = single_user(30.0, 4);
    Rng rng = algorithm_rng(4);
    const InitialState init = init_state(sc.cfg, sc.channels, sc.stack, rng);
    const CMatrix<double> g = sim_response(sc.stack, init.phases);
    // Four bits above the single-user capacity at this G.
    const CVector<double> eff = g.adjoint() * sc.channels.users[0];
    sc.cfg.min_rate_bpshz = std::log2(1 + eff.squaredNorm() * sc.cfg.p_max_w() / sc.cfg.noise_power_w()) + 4;
    const SurrogateState st = surrogate_state(sc.channels, g, init.beamformers, sc.cfg);
    const LoweredProgram lp = lower_beamfocusing(st, sc.channels, g, sc.cfg);
    CHECK_NOTHROW(lp.program.validate());
    CHECK(conic::solve_conic(lp.program).status == conic::Status::Infeasible);

    LoweringOptions soft;
    soft.soft_qos = true;
    const LoweredProgram relaxed = lower_beamfocusing(st, sc.channels, g, sc.cfg, soft);
    CHECK(relaxed.slack >= 0);
    CHECK(conic::solve_conic(relaxed.program).status == conic::Status::Optimal);
}

TEST_CASE("lowered programs have the expected blocks")
{
    const SystemConfig cfg = desk_profile();
    const Scenario sc = build_scenario(cfg, 5);
    Rng rng = algorithm_rng(5);
    const InitialState init = init_state(cfg, sc.channels, sc.stack, rng);
    const CMatrix<double> g = sim_response(sc.stack, init.phases);
    const SurrogateState st = surrogate_state(sc.channels, g, init.beamformers, cfg);
    const LoweredProgram p3 = lower_beamfocusing(st, sc.channels, g, cfg);
    CHECK(p3.count == cfg.num_tx_antennas * cfg.num_users);
    CHECK(p3.program.exponential_cones().size() == static_cast<std::size_t>(cfg.num_users));
    CHECK(p3.decision(Eigen::VectorXd::Zero(p3.program.num_variables())).size() == p3.count);

    const SurrogateState sl = surrogate_state(sc.channels, sc.stack, init.phases, 1, init.beamformers, cfg);
    const LoweredProgram p5 = lower_phase_layer(sl, sc.channels, sc.stack, init.phases, 1, init.beamformers, cfg);
    CHECK(p5.count == cfg.atoms_per_layer);
    CHECK_NOTHROW(p5.program.validate());
    // At the expansion point every surrogate constraint holds with the current values.
    const conic::Solution s = conic::solve_conic(p5.program);
    CHECK(s.status == conic::Status::Optimal);
    const CVector<double> phi = p5.decision(s.x);
    CHECK(phi.cwiseAbs().maxCoeff() <= 1 + 1e-6);
}

TEST_CASE("phase layer update keeps unit modulus and never loses merit")
{
    const SystemConfig cfg = desk_profile();
    const Scenario sc = build_scenario(cfg, 6);
    Rng rng = algorithm_rng(6);
    const InitialState init = init_state(cfg, sc.channels, sc.stack, rng);
    const BeamfocusingResult bf =
        converge_beamfocusing(sc.channels, sim_response(sc.stack, init.phases), init.beamformers, cfg);
    for (int layer = 0; layer < cfg.num_layers; ++layer)
    {
        const PhaseLayerResult r = solve_phase_layer(sc.channels, sc.stack, init.phases, layer, bf.v, cfg);
        CHECK(not_worse(r.merit, bf.merit));
        const Feasibility f = check_feasibility(sc.channels, sc.stack, r.phases, r.v, cfg);
        CHECK(f.unit_modulus_ok);
        for (int l = 0; l < cfg.num_layers; ++l)
            if (l != layer)
                CHECK(r.phases.theta(l) == init.phases.theta(l));
    }
}

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

// A small modelling layer for convex conic programs (affine equalities,
// nonnegativity, second-order cones and the exponential cone) and the solver
// contract used by the SCA subproblems.

#include <array>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace simcovert::conic
{

// sum_i coef_i * x_i + constant
struct LinExpr
{
    std::vector<std::pair<int, double>> terms;
    double constant = 0.0;

    LinExpr() = default;
    LinExpr(double c) : constant(c) {} // NOLINT(google-explicit-constructor)

    static LinExpr var(int index, double coef = 1.0)
    {
        LinExpr e;
        e.terms.emplace_back(index, coef);
        return e;
    }

    double eval(const Eigen::VectorXd &x) const
    {
        double v = constant;
        for (const auto &[i, c] : terms)
            v += c * x(i);
        return v;
    }

    LinExpr &operator+=(const LinExpr &o)
    {
        terms.insert(terms.end(), o.terms.begin(), o.terms.end());
        constant += o.constant;
        return *this;
    }
    LinExpr &operator-=(const LinExpr &o) { return *this += o * -1.0; }
    LinExpr &operator*=(double s)
    {
        for (auto &t : terms)
            t.second *= s;
        constant *= s;
        return *this;
    }
    friend LinExpr operator+(LinExpr a, const LinExpr &b) { return a += b; }
    friend LinExpr operator-(LinExpr a, const LinExpr &b) { return a -= b; }
    friend LinExpr operator*(LinExpr a, double s) { return a *= s; }
    friend LinExpr operator*(double s, LinExpr a) { return a *= s; }
};

// A complex-valued affine form held as its real and imaginary parts.
struct ComplexExpr
{
    LinExpr re;
    LinExpr im;
};

enum class Status
{
    Optimal,
    Infeasible,
    NumericalFailure,
};

const char *to_string(Status s);

class ConicProgram
{
public:
    // Returns the index of the first of `count` new variables.
    int add_variables(const std::string &name, int count = 1);
    int num_variables() const { return static_cast<int>(names_.size()); }
    const std::string &variable_name(int i) const { return names_.at(i); }

    void maximize(LinExpr objective) { objective_ = std::move(objective); }
    const LinExpr &objective() const { return objective_; }

    void add_equality(LinExpr e) { equalities_.push_back(std::move(e)); }
    // e >= 0
    void add_nonnegative(LinExpr e) { nonnegatives_.push_back(std::move(e)); }
    void add_bounds(int var, double lo, double hi)
    {
        add_nonnegative(LinExpr::var(var) - lo);
        add_nonnegative(hi - LinExpr::var(var));
    }
    // rows[0] >= || rows[1..] ||
    void add_second_order_cone(std::vector<LinExpr> rows) { socs_.push_back(std::move(rows)); }
    // ||rows||^2 <= bound, with bound affine and implicitly nonnegative.
    void add_squared_norm_bound(const std::vector<LinExpr> &rows, const LinExpr &bound);
    // t <= ln(arg)
    void add_log_hypograph(LinExpr t, LinExpr arg) { exps_.push_back({std::move(t), LinExpr(1.0), std::move(arg)}); }

    const std::vector<LinExpr> &equalities() const { return equalities_; }
    const std::vector<LinExpr> &nonnegatives() const { return nonnegatives_; }
    const std::vector<std::vector<LinExpr>> &second_order_cones() const { return socs_; }
    // (x, y, z) with y exp(x / y) <= z, y > 0.
    const std::vector<std::array<LinExpr, 3>> &exponential_cones() const { return exps_; }

    // Throws std::invalid_argument on out-of-range indices or empty cones.
    void validate() const;

    // Largest constraint violation at x, each scaled by 1 + |constant| + sum |coef x|.
    double primal_residual(const Eigen::VectorXd &x) const;

    // Plain-text standard form, see README ("Conic program dump").
    std::string dump() const;

private:
    std::vector<std::string> names_;
    LinExpr objective_;
    std::vector<LinExpr> equalities_;
    std::vector<LinExpr> nonnegatives_;
    std::vector<std::vector<LinExpr>> socs_;
    std::vector<std::array<LinExpr, 3>> exps_;
};

struct SolverOptions
{
    double tolerance = 1e-9;
    unsigned max_iterations = 200;
    double residual_limit = 1e-7;
};

struct Solution
{
    Status status = Status::NumericalFailure;
    Eigen::VectorXd x;
    double objective = 0.0;
    double primal_residual = 0.0;
    unsigned iterations = 0;
    std::string diagnostics;
};

Solution solve_conic(const ConicProgram &program, const SolverOptions &options = {});

} // namespace simcovert::conic

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
#include "simcovert/conic.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include <Eigen/SparseCore>

extern "C"
{
    struct ClarabelCResult
    {
        std::int32_t status;
        std::uint32_t iterations;
        double obj_val;
        double r_prim;
        double r_dual;
        double solve_time;
    };

    int clarabel_c_solve(std::size_t n, std::size_t m, const double *q, const std::size_t *colptr, const std::size_t *rowval,
                         const double *nzval, const double *b, std::size_t num_cones, const std::int32_t *cone_kind,
                         const std::size_t *cone_dim, double tol, std::uint32_t max_iter, double *x_out, double *s_out,
                         ClarabelCResult *result);
}

namespace simcovert::conic
{

namespace
{

enum ConeKind : std::int32_t
{
    kZero = 0,
    kNonneg = 1,
    kSoc = 2,
    kExp = 3,
};

// Clarabel's SolverStatus discriminants.
enum BackendStatus : std::int32_t
{
    kSolved = 1,
    kPrimalInfeasible = 2,
    kDualInfeasible = 3,
    kAlmostSolved = 4,
    kAlmostPrimalInfeasible = 5,
    kAlmostDualInfeasible = 6,
    kMaxIterations = 7,
    kMaxTime = 8,
    kNumericalError = 9,
    kInsufficientProgress = 10,
};

const char *backend_status_name(std::int32_t s)
{
    switch (s)
    {
    case 0: return "Unsolved";
    case kSolved: return "Solved";
    case kPrimalInfeasible: return "PrimalInfeasible";
    case kDualInfeasible: return "DualInfeasible";
    case kAlmostSolved: return "AlmostSolved";
    case kAlmostPrimalInfeasible: return "AlmostPrimalInfeasible";
    case kAlmostDualInfeasible: return "AlmostDualInfeasible";
    case kMaxIterations: return "MaxIterations";
    case kMaxTime: return "MaxTime";
    case kNumericalError: return "NumericalError";
    case kInsufficientProgress: return "InsufficientProgress";
    default: return "Unknown";
    }
}

std::string fmt(double v)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

double row_scale(const LinExpr &e, const Eigen::VectorXd &x)
{
    double s = 1.0 + std::abs(e.constant);
    for (const auto &[i, c] : e.terms)
        s += std::abs(c * x(i));
    return s;
}

void check_expr(const LinExpr &e, int n)
{
    for (const auto &[i, c] : e.terms)
    {
        if (i < 0 || i >= n)
            throw std::invalid_argument("conic program: variable index " + std::to_string(i) + " out of range");
        if (!std::isfinite(c))
            throw std::invalid_argument("conic program: non-finite coefficient");
    }
    if (!std::isfinite(e.constant))
        throw std::invalid_argument("conic program: non-finite constant");
}

std::string expr_text(const LinExpr &e)
{
    std::string s = fmt(e.constant);
    for (const auto &[i, c] : e.terms)
        s += " " + std::to_string(i) + ":" + fmt(c);
    return s;
}

} // namespace

const char *to_string(Status s)
{
    switch (s)
    {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::NumericalFailure: return "numerical-failure";
    }
    return "unknown";
}

int ConicProgram::add_variables(const std::string &name, int count)
{
    if (count < 1)
        throw std::invalid_argument("add_variables: count must be positive");
    const int first = num_variables();
    for (int i = 0; i < count; ++i)
        names_.push_back(count == 1 ? name : name + "[" + std::to_string(i) + "]");
    return first;
}

// ||y||^2 <= b  <=>  ||(2y, b - 1)|| <= b + 1.
void ConicProgram::add_squared_norm_bound(const std::vector<LinExpr> &rows, const LinExpr &bound)
{
    std::vector<LinExpr> cone;
    cone.reserve(rows.size() + 2);
    cone.push_back(bound + 1.0);
    for (const auto &r : rows)
        cone.push_back(2.0 * r);
    cone.push_back(bound - 1.0);
    add_second_order_cone(std::move(cone));
}

void ConicProgram::validate() const
{
    const int n = num_variables();
    if (n == 0)
        throw std::invalid_argument("conic program: no variables");
    check_expr(objective_, n);
    for (const auto &e : equalities_)
        check_expr(e, n);
    for (const auto &e : nonnegatives_)
        check_expr(e, n);
    for (const auto &c : socs_)
    {
        if (c.empty())
            throw std::invalid_argument("conic program: empty second-order cone");
        for (const auto &e : c)
            check_expr(e, n);
    }
    for (const auto &c : exps_)
        for (const auto &e : c)
            check_expr(e, n);
}

double ConicProgram::primal_residual(const Eigen::VectorXd &x) const
{
    if (x.size() != num_variables())
        throw std::invalid_argument("primal_residual: wrong vector length");
    double worst = 0.0;
    for (const auto &e : equalities_)
        worst = std::max(worst, std::abs(e.eval(x)) / row_scale(e, x));
    for (const auto &e : nonnegatives_)
        worst = std::max(worst, std::max(0.0, -e.eval(x)) / row_scale(e, x));
    for (const auto &c : socs_)
    {
        double tail = 0.0, scale = 1.0;
        for (std::size_t i = 1; i < c.size(); ++i)
        {
            const double v = c[i].eval(x);
            tail += v * v;
        }
        for (const auto &e : c)
            scale = std::max(scale, row_scale(e, x));
        worst = std::max(worst, std::max(0.0, std::sqrt(tail) - c[0].eval(x)) / scale);
    }
    for (const auto &c : exps_)
    {
        const double a = c[0].eval(x), y = c[1].eval(x), z = c[2].eval(x);
        const double scale = std::max({row_scale(c[0], x), row_scale(c[1], x), row_scale(c[2], x)});
        double viol = std::max(0.0, -y) + std::max(0.0, -z);
        if (y > 0.0 && z > 0.0)
            viol += std::max(0.0, a - y * std::log(z / y));
        else
            viol += std::max(0.0, a);
        worst = std::max(worst, viol / scale);
    }
    return worst;
}

std::string ConicProgram::dump() const
{
    std::string out = "conic-program v1\n";
    out += "variables " + std::to_string(num_variables()) + "\n";
    for (int i = 0; i < num_variables(); ++i)
        out += "var " + std::to_string(i) + " " + names_[i] + "\n";
    out += "maximize " + expr_text(objective_) + "\n";
    for (const auto &e : equalities_)
        out += "zero 1\n  " + expr_text(e) + "\n";
    for (const auto &e : nonnegatives_)
        out += "nonneg 1\n  " + expr_text(e) + "\n";
    for (const auto &c : socs_)
    {
        out += "soc " + std::to_string(c.size()) + "\n";
        for (const auto &e : c)
            out += "  " + expr_text(e) + "\n";
    }
    for (const auto &c : exps_)
    {
        out += "exp 3\n";
        for (const auto &e : c)
            out += "  " + expr_text(e) + "\n";
    }
    out += "end\n";
    return out;
}

Solution solve_conic(const ConicProgram &program, const SolverOptions &options)
{
    program.validate();
    const int n = program.num_variables();

    // Rows in cone order: zero, nonnegative, each SOC, each exp cone.
    std::vector<const LinExpr *> rows;
    std::vector<std::int32_t> kinds;
    std::vector<std::size_t> dims;
    if (!program.equalities().empty())
    {
        kinds.push_back(kZero);
        dims.push_back(program.equalities().size());
        for (const auto &e : program.equalities())
            rows.push_back(&e);
    }
    if (!program.nonnegatives().empty())
    {
        kinds.push_back(kNonneg);
        dims.push_back(program.nonnegatives().size());
        for (const auto &e : program.nonnegatives())
            rows.push_back(&e);
    }
    for (const auto &c : program.second_order_cones())
    {
        kinds.push_back(kSoc);
        dims.push_back(c.size());
        for (const auto &e : c)
            rows.push_back(&e);
    }
    for (const auto &c : program.exponential_cones())
    {
        kinds.push_back(kExp);
        dims.push_back(3);
        for (const auto &e : c)
            rows.push_back(&e);
    }
    const std::size_t m = rows.size();

    // s = b - A x must equal the affine expression, so A = -coef, b = constant.
    std::vector<Eigen::Triplet<double, std::ptrdiff_t>> trips;
    Eigen::VectorXd b(static_cast<Eigen::Index>(m));
    for (std::size_t r = 0; r < m; ++r)
    {
        b(static_cast<Eigen::Index>(r)) = rows[r]->constant;
        for (const auto &[i, c] : rows[r]->terms)
            trips.emplace_back(static_cast<std::ptrdiff_t>(r), i, -c);
    }
    Eigen::SparseMatrix<double, Eigen::ColMajor, std::ptrdiff_t> a(static_cast<Eigen::Index>(m), n);
    a.setFromTriplets(trips.begin(), trips.end());
    a.prune(0.0);
    a.makeCompressed();

    std::vector<std::size_t> colptr(n + 1), rowval(a.nonZeros());
    for (int j = 0; j <= n; ++j)
        colptr[j] = static_cast<std::size_t>(a.outerIndexPtr()[j]);
    for (Eigen::Index k = 0; k < a.nonZeros(); ++k)
        rowval[k] = static_cast<std::size_t>(a.innerIndexPtr()[k]);

    Eigen::VectorXd q = Eigen::VectorXd::Zero(n);
    for (const auto &[i, c] : program.objective().terms)
        q(i) -= c;

    Solution sol;
    sol.x = Eigen::VectorXd::Zero(n);
    ClarabelCResult res{};
    const int rc = clarabel_c_solve(static_cast<std::size_t>(n), m, q.data(), colptr.data(), rowval.data(), a.valuePtr(),
                                    b.data(), kinds.size(), kinds.data(), dims.data(), options.tolerance,
                                    options.max_iterations, sol.x.data(), nullptr, &res);
    if (rc != 0)
    {
        sol.status = Status::NumericalFailure;
        sol.diagnostics = "backend rejected the problem (code " + std::to_string(rc) + ")";
        return sol;
    }

    sol.iterations = res.iterations;
    sol.objective = program.objective().eval(sol.x);
    sol.primal_residual = program.primal_residual(sol.x);
    const std::string backend = std::string("backend status ") + backend_status_name(res.status) + ", iterations " +
                                std::to_string(res.iterations) + ", r_prim " + fmt(res.r_prim) + ", r_dual " +
                                fmt(res.r_dual) + ", residual " + fmt(sol.primal_residual);
    sol.diagnostics = backend;

    switch (res.status)
    {
    case kPrimalInfeasible:
    case kAlmostPrimalInfeasible:
        sol.status = Status::Infeasible;
        return sol;
    case kSolved:
    case kAlmostSolved:
        if (sol.primal_residual <= options.residual_limit && sol.x.allFinite())
        {
            sol.status = Status::Optimal;
            return sol;
        }
        break;
    default: break;
    }
    sol.status = Status::NumericalFailure;
    return sol;
}

} // namespace simcovert::conic

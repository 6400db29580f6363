// SPDX-License-Identifier: Apache-2.0
//
// Minimal C ABI over the Clarabel conic solver. Solves
//
//     minimize    q' x
//     subject to  A x + s = b,  s in K
//
// where K is a product of zero, nonnegative, second-order and exponential
// cones given in order. A is passed in compressed sparse column form.

#![allow(non_snake_case)]

use clarabel::algebra::*;
use clarabel::solver::*;
use std::slice;

pub const CONE_ZERO: i32 = 0;
pub const CONE_NONNEG: i32 = 1;
pub const CONE_SOC: i32 = 2;
pub const CONE_EXP: i32 = 3;

#[repr(C)]
pub struct ClarabelCResult {
    pub status: i32,
    pub iterations: u32,
    pub obj_val: f64,
    pub r_prim: f64,
    pub r_dual: f64,
    pub solve_time: f64,
}

/// Returns 0 when the problem was handed to the solver, negative on malformed
/// input. The solver outcome is reported through `result.status`, using the
/// numeric value of `clarabel::solver::SolverStatus`.
///
/// # Safety
/// All pointers must reference arrays of the documented lengths.
#[no_mangle]
pub unsafe extern "C" fn clarabel_c_solve(
    n: usize,
    m: usize,
    q: *const f64,
    colptr: *const usize,
    rowval: *const usize,
    nzval: *const f64,
    b: *const f64,
    num_cones: usize,
    cone_kind: *const i32,
    cone_dim: *const usize,
    tol: f64,
    max_iter: u32,
    x_out: *mut f64,
    s_out: *mut f64,
    result: *mut ClarabelCResult,
) -> i32 {
    if result.is_null() || x_out.is_null() {
        return -1;
    }
    let q = slice::from_raw_parts(q, n).to_vec();
    let colptr = slice::from_raw_parts(colptr, n + 1).to_vec();
    let nnz = colptr[n];
    let rowval = slice::from_raw_parts(rowval, nnz).to_vec();
    let nzval = slice::from_raw_parts(nzval, nnz).to_vec();
    let b = slice::from_raw_parts(b, m).to_vec();
    let kinds = slice::from_raw_parts(cone_kind, num_cones);
    let dims = slice::from_raw_parts(cone_dim, num_cones);

    let mut cones: Vec<SupportedConeT<f64>> = Vec::with_capacity(num_cones);
    let mut total = 0usize;
    for (&kind, &dim) in kinds.iter().zip(dims.iter()) {
        let cone = match kind {
            CONE_ZERO => ZeroConeT(dim),
            CONE_NONNEG => NonnegativeConeT(dim),
            CONE_SOC => SecondOrderConeT(dim),
            CONE_EXP => {
                if dim != 3 {
                    return -2;
                }
                ExponentialConeT()
            }
            _ => return -2,
        };
        total += dim;
        cones.push(cone);
    }
    if total != m {
        return -3;
    }

    let P = CscMatrix::<f64>::zeros((n, n));
    let A = CscMatrix::new(m, n, colptr, rowval, nzval);

    let settings = DefaultSettings::<f64> {
        verbose: false,
        max_iter,
        tol_gap_abs: tol,
        tol_gap_rel: tol,
        tol_feas: tol,
        ..DefaultSettings::default()
    };

    let mut solver = match DefaultSolver::new(&P, &q, &A, &b, &cones, settings) {
        Ok(s) => s,
        Err(_) => return -4,
    };
    solver.solve();

    let sol = &solver.solution;
    slice::from_raw_parts_mut(x_out, n).copy_from_slice(&sol.x);
    if !s_out.is_null() {
        slice::from_raw_parts_mut(s_out, m).copy_from_slice(&sol.s);
    }
    *result = ClarabelCResult {
        status: sol.status as i32,
        iterations: sol.iterations,
        obj_val: sol.obj_val,
        r_prim: sol.r_prim,
        r_dual: sol.r_dual,
        solve_time: sol.solve_time,
    };
    0
}
